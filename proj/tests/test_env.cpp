#include <cmath>

#include "doctest.h"
#include "rwre/env.hpp"
#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

using namespace rwre;

namespace {

EnvParams params_1d(double kappa = 0.1) {
    EnvParams p;
    p.d = 1;
    p.kappa = kappa;
    return p;
}

EnvParams params_2d(double kappa = 0.05) {
    EnvParams p;
    p.d = 2;
    p.kappa = kappa;
    return p;
}

}  // namespace

TEST_CASE("transition vectors must be kappa-floored probability rows") {
    const EnvParams p = params_1d(0.1);
    CHECK_NOTHROW(validate_transition_vector(TransitionVector{{0.62, 0.38}}, p));
    CHECK_THROWS_AS(validate_transition_vector(TransitionVector{{0.95, 0.05}}, p), ConfigError);
    CHECK_THROWS_AS(validate_transition_vector(TransitionVector{{0.7, 0.7}}, p), ConfigError);
    CHECK_THROWS_AS(validate_transition_vector(TransitionVector{{0.5, 0.3, 0.2}}, p), ConfigError);

    EnvParams bad = params_1d(0.6);  // floor above 1/(2d)
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("homogeneous law is constant and equals its mean") {
    const EnvironmentLaw law = EnvironmentLaw::homogeneous(params_1d(), TransitionVector{{0.9, 0.1}});
    SplitMix64 rng(7);
    const TransitionVector s = law.sample(rng);
    CHECK(s.w[0] == 0.9);
    CHECK(s.w[1] == 0.1);
    CHECK(law.mean_vector().w[0] == 0.9);
    CHECK(law.homogeneous_vector().w[1] == 0.1);
}

TEST_CASE("finite-support law: atom probabilities checked, mean is the mixture") {
    const EnvParams p = params_1d();
    CHECK_THROWS_AS(EnvironmentLaw::finite_support(
                        p, {TransitionVector{{0.62, 0.38}}, TransitionVector{{0.78, 0.22}}},
                        {0.5, 0.4}),
                    ConfigError);

    const EnvironmentLaw law = EnvironmentLaw::finite_support(
        p, {TransitionVector{{0.62, 0.38}}, TransitionVector{{0.78, 0.22}}}, {0.25, 0.75});
    CHECK(law.mean_vector().w[0] == doctest::Approx(0.25 * 0.62 + 0.75 * 0.78).epsilon(1e-15));

    SplitMix64 a(42), b(42);
    CHECK(law.sample(a).w[0] == law.sample(b).w[0]);
}

TEST_CASE("dirichlet samples live in the floored simplex") {
    const EnvironmentLaw law = EnvironmentLaw::iid_dirichlet(params_2d(0.05), {2.0, 1.0, 1.0, 0.5});
    SplitMix64 rng(99);
    for (int t = 0; t < 200; ++t) {
        const TransitionVector tv = law.sample(rng);
        double sum = 0.0;
        for (double w : tv.w) {
            CHECK(w >= 0.05 - 1e-12);
            sum += w;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    const double total = 2.0 + 1.0 + 1.0 + 0.5;
    CHECK(law.mean_vector().w[0] == doctest::Approx(0.05 + 0.8 * 2.0 / total).epsilon(1e-12));
}

TEST_CASE("law ids separate laws, parameters included") {
    const EnvironmentLaw a = EnvironmentLaw::homogeneous(params_1d(), TransitionVector{{0.9, 0.1}});
    const EnvironmentLaw b = EnvironmentLaw::homogeneous(params_1d(), TransitionVector{{0.8, 0.2}});
    const EnvironmentLaw c = EnvironmentLaw::iid_dirichlet(params_1d(), {1.0, 1.0});
    CHECK(a.law_id() != b.law_id());
    CHECK(a.law_id() != c.law_id());
}

TEST_CASE("sampled environments are a deterministic function of (law, window, seed)") {
    const EnvironmentLaw law = EnvironmentLaw::iid_dirichlet(params_1d(), {1.5, 1.0});
    LatticeBox w;
    w.d = 1;
    w.lo[0] = -5;
    w.hi[0] = 6;
    const QuenchedEnvironment e1 = sample_environment(law, w, 2024);
    const QuenchedEnvironment e2 = sample_environment(law, w, 2024);
    const QuenchedEnvironment e3 = sample_environment(law, w, 2025);

    bool same12 = true, same13 = true;
    for (std::int64_t x = -5; x <= 5; ++x) {
        const Point p = make_point({x});
        same12 = same12 && e1.row(p)[0] == e2.row(p)[0];
        same13 = same13 && e1.row(p)[0] == e3.row(p)[0];
    }
    CHECK(same12);
    CHECK_FALSE(same13);
    CHECK_NOTHROW(e1.validate());
}

TEST_CASE("table view and law view agree site by site under one seed") {
    const EnvironmentLaw law = EnvironmentLaw::iid_dirichlet(params_2d(), {1.0, 2.0, 3.0, 4.0});
    LatticeBox w;
    w.d = 2;
    w.lo = {-3, -3};
    w.hi = {4, 4};
    const std::uint64_t seed = 31337;
    const QuenchedEnvironment env = sample_environment(law, w, seed);
    const TableView table(env);
    const LawView lazy(law, seed);
    for (std::int64_t x = -3; x <= 3; ++x)
        for (std::int64_t y = -3; y <= 3; ++y) {
            const Point p = make_point({x, y});
            const SiteTrans a = table.site(p);
            const SiteTrans b = lazy.site(p);
            for (int i = 0; i < 4; ++i) CHECK(a.w[static_cast<std::size_t>(i)] == b.w[static_cast<std::size_t>(i)]);
        }
    CHECK(table.bounded());
    CHECK_FALSE(lazy.bounded());
}

TEST_CASE("environment windows larger than the byte cap are refused") {
    const EnvironmentLaw law = EnvironmentLaw::homogeneous(params_1d(), TransitionVector{{0.9, 0.1}});
    LatticeBox w;
    w.d = 1;
    w.lo[0] = 0;
    w.hi[0] = 1000;
    CHECK_THROWS_AS(sample_environment(law, w, 1, /*max_bytes=*/100), CapacityError);
}

TEST_CASE("quantization floors onto the kappa grid and keeps a valid law") {
    const EnvironmentLaw base =
        EnvironmentLaw::homogeneous(params_1d(0.04), TransitionVector{{0.9, 0.1}});

    const EnvironmentLaw q4 = quantize_law(base, 4);
    REQUIRE(q4.atoms().size() == 1);
    CHECK(q4.atoms()[0].w[0] == doctest::Approx(0.73).epsilon(1e-15));
    CHECK(q4.atoms()[0].w[1] == doctest::Approx(0.27).epsilon(1e-15));

    const EnvironmentLaw q16 = quantize_law(base, 16);
    CHECK(q16.atoms()[0].w[0] == doctest::Approx(0.845).epsilon(1e-15));
    const EnvironmentLaw q64 = quantize_law(base, 64);
    CHECK(q64.atoms()[0].w[0] == doctest::Approx(0.888125).epsilon(1e-15));

    CHECK_THROWS_AS(quantize_law(base, 0), ConfigError);
}

TEST_CASE("quantizing a continuous law is deterministic and finite-support") {
    const EnvironmentLaw base = EnvironmentLaw::iid_dirichlet(params_1d(0.05), {1.0, 1.0});
    const EnvironmentLaw qa = quantize_law(base, 8);
    const EnvironmentLaw qb = quantize_law(base, 8);
    CHECK(qa.kind() == LawKind::FiniteSupport);
    REQUIRE(qa.atoms().size() == qb.atoms().size());
    double psum = 0.0;
    for (std::size_t i = 0; i < qa.atoms().size(); ++i) {
        CHECK(qa.atoms()[i].w[0] == qb.atoms()[i].w[0]);
        CHECK(qa.atom_probs()[i] == qb.atom_probs()[i]);
        psum += qa.atom_probs()[i];
    }
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-12));
    SplitMix64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const TransitionVector tv = qa.sample(rng);
        CHECK(tv.w[0] >= 0.05 - 1e-12);
        CHECK(tv.w[0] + tv.w[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}
