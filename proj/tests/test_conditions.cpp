#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rwre/conditions.hpp"
#include "rwre/env.hpp"
#include "rwre/errors.hpp"
#include "rwre/oned.hpp"

using namespace rwre;

namespace {

EnvironmentLaw homog_1d(double up, double kappa = 0.05) {
    EnvParams p;
    p.d = 1;
    p.kappa = kappa;
    return EnvironmentLaw::homogeneous(p, TransitionVector{{up, 1.0 - up}});
}

EnvironmentLaw mixture_1d() {
    EnvParams p;
    p.d = 1;
    p.kappa = 0.1;
    return EnvironmentLaw::finite_support(
        p, {TransitionVector{{0.70, 0.30}}, TransitionVector{{0.85, 0.15}}}, {0.5, 0.5});
}

EnvironmentLaw symmetric_2d() {
    EnvParams p;
    p.d = 2;
    p.kappa = 0.05;
    return EnvironmentLaw::homogeneous(p, TransitionVector{{0.25, 0.25, 0.25, 0.25}});
}

CurvePoint two_sided(std::int64_t L, double p) {
    CurvePoint pt;
    pt.L = L;
    pt.p_hat = p;
    pt.log_p = std::log(p);
    pt.exact = true;
    return pt;
}

CurvePoint unresolved(std::int64_t L, std::int64_t trials) {
    CurvePoint pt;
    pt.L = L;
    pt.one_sided = true;
    pt.p_hat = 3.0 / static_cast<double>(trials);
    pt.log_p = std::log(pt.p_hat);
    return pt;
}

}  // namespace

TEST_CASE("direction neighborhoods: one lateral rotation pair per frame axis") {
    const Direction e1 = make_direction(1, {1.0});
    const auto hood1 = direction_neighborhood(e1);
    REQUIRE(hood1.size() == 1);
    CHECK(hood1[0].ell[0] == 1.0);

    const Direction d2 = make_direction(2, {1.0, 0.0});
    const auto hood2 = direction_neighborhood(d2, 0.1);
    REQUIRE(hood2.size() == 3);
    CHECK(hood2[0].ell[0] == 1.0);
    for (const auto& n : hood2) {
        double norm2 = 0.0;
        for (double v : n.ell) norm2 += v * v;
        CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(hood2[1].ell[0] == doctest::Approx(std::cos(0.1)).epsilon(1e-12));
    CHECK(std::fabs(hood2[1].ell[1]) == doctest::Approx(std::sin(0.1)).epsilon(1e-12));
    CHECK(hood2[1].ell[1] == doctest::Approx(-hood2[2].ell[1]).epsilon(1e-12));
}

TEST_CASE("condition specs reject inconsistent parameters") {
    ConditionSpec spec;
    spec.dir = make_direction(1, {1.0});

    spec.b = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.b = 1.0;

    spec.kind = ConditionKind::StretchT;
    spec.gamma = 1.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.gamma = 1.0;

    spec.kind = ConditionKind::WeakW;
    spec.M = 0.0;
    spec.lambda1 = 0.04;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.M = 10.0;
    spec.validate();

    // an explicit neighborhood must contain the direction itself
    spec.neighborhood = {make_direction(1, {-1.0})};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("decay fits: exponential, flat, polynomial and unresolved curves") {
    CHECK_THROWS_AS(fit_decay({}), ConfigError);

    // exact exponential e^{-0.7 L}
    std::vector<CurvePoint> exp_curve;
    for (std::int64_t L : {10, 20, 30, 40}) exp_curve.push_back(two_sided(L, std::exp(-0.7 * L)));
    const DecayFit ef = fit_decay(exp_curve);
    CHECK(ef.n_fit_points == 4);
    CHECK(ef.exp_rate == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(ef.exp_r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ef.stretch_gamma == doctest::Approx(1.0).epsilon(0.02));
    CHECK(ef.stretch_rate == doctest::Approx(0.7).epsilon(0.02));
    CHECK_FALSE(ef.decay_rejected);
    CHECK(ef.super_polynomial);  // log-log slope steepens without bound
    CHECK_FALSE(ef.degenerate_zero);

    // no decay at all
    std::vector<CurvePoint> flat;
    for (std::int64_t L : {10, 20, 30}) flat.push_back(two_sided(L, 0.5));
    CHECK(fit_decay(flat).decay_rejected);

    // pure power law L^{-2}
    std::vector<CurvePoint> poly;
    for (std::int64_t L : {8, 16, 32, 64})
        poly.push_back(two_sided(L, 1.0 / (static_cast<double>(L) * static_cast<double>(L))));
    const DecayFit pf = fit_decay(poly);
    CHECK(pf.poly_degree == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_FALSE(pf.super_polynomial);
    CHECK_FALSE(pf.decay_rejected);

    // every point an unresolved zero: super-exponential by convention
    std::vector<CurvePoint> zeros;
    for (std::int64_t L : {10, 20, 30}) zeros.push_back(unresolved(L, 1000));
    const DecayFit zf = fit_decay(zeros);
    CHECK(zf.degenerate_zero);
    CHECK(zf.super_polynomial);
    CHECK_FALSE(zf.decay_rejected);
    CHECK(zf.n_fit_points == 0);
    CHECK(zf.one_sided_flag);

    // one resolved point is not enough for a fit
    std::vector<CurvePoint> mixed{two_sided(10, 0.01), unresolved(20, 1000), unresolved(30, 1000)};
    const DecayFit mf = fit_decay(mixed);
    CHECK(mf.n_fit_points == 1);
    CHECK(mf.decay_rejected);
    CHECK_FALSE(mf.degenerate_zero);
}

TEST_CASE("slab curves solve exactly in one dimension") {
    ConditionSpec spec;
    spec.kind = ConditionKind::StretchT;
    spec.dir = make_direction(1, {1.0});
    spec.b = 1.0;

    // constant drift: the ruin probability decays at rate ln((1-p)/p)
    const DecayFit drift = estimate_slab_curve(homog_1d(0.9), spec, {10, 20, 30}, 100, 411);
    REQUIRE(drift.curve.size() == 3);
    for (const auto& pt : drift.curve) {
        CHECK(pt.exact);
        CHECK(pt.stderr_est == 0.0);
        CHECK_FALSE(pt.one_sided);
    }
    CHECK(drift.curve[0].p_hat ==
          doctest::Approx(accept::closed_form_ruin(0.9, 20, 10)).epsilon(1e-12));
    CHECK(drift.exp_rate == doctest::Approx(std::log(9.0)).epsilon(1e-6));
    CHECK(drift.exp_r2 > 0.999);
    CHECK(drift.stretch_gamma > 0.9);
    CHECK_FALSE(drift.decay_rejected);

    // no drift, no decay
    const DecayFit sym = estimate_slab_curve(homog_1d(0.5), spec, {10, 20, 30}, 100, 412);
    for (const auto& pt : sym.curve) CHECK(pt.p_hat == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sym.decay_rejected);

    // random environments: sampled mean agrees with exhaustive enumeration
    const DecayFit mix = estimate_slab_curve(mixture_1d(), spec, {3, 4}, 400, 413);
    REQUIRE(mix.curve.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& pt = mix.curve[i];
        CHECK_FALSE(pt.exact);
        CHECK(pt.stderr_est > 0.0);
        const double exact = annealed_slab_enumerate(mixture_1d(), pt.L);
        CHECK(std::fabs(pt.p_hat - exact) <= 4.0 * pt.stderr_est + 1e-12);
    }

    CHECK_THROWS_AS(estimate_slab_curve(homog_1d(0.9), spec, {}, 100, 1), ConfigError);
    CHECK_THROWS_AS(estimate_slab_curve(homog_1d(0.9), spec, {10, 10}, 100, 1), ConfigError);
    CHECK_THROWS_AS(estimate_slab_curve(symmetric_2d(), spec, {10, 20}, 100, 1), ConfigError);
}

TEST_CASE("expectation-threshold condition on the standard box pair") {
    const Direction e1 = make_direction(1, {1.0});

    // symmetric: worst site of [0,30) ruins to the chain edge at 33/64
    const WeakConditionReport sym =
        estimate_condition_W(homog_1d(0.5), e1, 1.0, 30.0, 0.04, 100, 1, 511);
    CHECK(sym.value == doctest::Approx(33.0 / 64.0).epsilon(1e-12));
    CHECK(sym.stderr_est == 0.0);
    CHECK(sym.n_envs == 1);  // deterministic law: no environment variance
    CHECK(sym.verdict == Verdict::No);
    CHECK(sym.side_condition_ok);  // 30 > 1/0.04

    const WeakConditionReport drift =
        estimate_condition_W(homog_1d(0.9), e1, 1.0, 30.0, 0.04, 100, 1, 511);
    CHECK(drift.value <= 1e-20);
    CHECK(drift.verdict == Verdict::Yes);

    // the side condition is reported, never enforced
    const WeakConditionReport small_box =
        estimate_condition_W(homog_1d(0.9), e1, 1.0, 20.0, 0.04, 100, 1, 511);
    CHECK_FALSE(small_box.side_condition_ok);
    CHECK(small_box.verdict == Verdict::Yes);

    // a threshold at or above one is vacuous
    const WeakConditionReport degen =
        estimate_condition_W(homog_1d(0.5), e1, 1.0, 30.0, 1.0, 100, 1, 511);
    CHECK(degen.degenerate);
    CHECK(degen.verdict == Verdict::Yes);

    CHECK_THROWS_AS(estimate_condition_W(homog_1d(0.5), e1, 1.0, 30.0, 0.0, 10, 1, 1),
                    ConfigError);
    CHECK_THROWS_AS(estimate_condition_W(homog_1d(0.5), e1, 1.0, 0.0, 0.04, 10, 1, 1),
                    ConfigError);
    CHECK_THROWS_AS(estimate_condition_W(homog_1d(0.5), e1, 1.0, 30.0, 0.04, 0, 1, 1),
                    ConfigError);
    CHECK_THROWS_AS(
        estimate_condition_W(symmetric_2d(), e1, 1.0, 30.0, 0.04, 10, 1, 1), ConfigError);
}

TEST_CASE("anisotropic box condition degenerates to the slab in one dimension") {
    ConditionSpec box_spec;
    box_spec.kind = ConditionKind::BoxT;
    box_spec.dir = make_direction(1, {1.0});

    ConditionSpec slab_spec;
    slab_spec.kind = ConditionKind::StretchT;
    slab_spec.dir = make_direction(1, {1.0});
    slab_spec.b = 1.0;

    const DecayFit via_box = estimate_condition_boxT(mixture_1d(), box_spec, {6, 10}, 150, 611);
    const DecayFit via_slab = estimate_slab_curve(mixture_1d(), slab_spec, {6, 10}, 150, 611);
    REQUIRE(via_box.curve.size() == via_slab.curve.size());
    for (std::size_t i = 0; i < via_box.curve.size(); ++i) {
        CHECK(via_box.curve[i].L == via_slab.curve[i].L);
        CHECK(via_box.curve[i].p_hat == via_slab.curve[i].p_hat);
        CHECK(via_box.curve[i].log_p == via_slab.curve[i].log_p);
        CHECK(via_box.curve[i].stderr_est == via_slab.curve[i].stderr_est);
        CHECK(via_box.curve[i].exact == via_slab.curve[i].exact);
        CHECK(via_box.curve[i].one_sided == via_slab.curve[i].one_sided);
        CHECK(via_box.curve[i].censored == via_slab.curve[i].censored);
    }
    CHECK(via_box.exp_rate == via_slab.exp_rate);
    CHECK(via_box.stretch_gamma == via_slab.stretch_gamma);
    CHECK(via_box.poly_degree == via_slab.poly_degree);
}

TEST_CASE("anisotropic box condition in two dimensions") {
    ConditionSpec spec;
    spec.kind = ConditionKind::BoxT;
    spec.dir = make_direction(2, {1.0, 0.0});

    const DecayFit fit = estimate_condition_boxT(symmetric_2d(), spec, {3, 5}, 400, 613);
    REQUIRE(fit.curve.size() == 2);
    for (const auto& pt : fit.curve) {
        CHECK_FALSE(pt.exact);
        CHECK(pt.censored == 0);
        CHECK(pt.p_hat > 0.0);
        CHECK(pt.p_hat < 1.0);
    }
    // the lateral faces are L^3 away; a symmetric walk backtracks half the time
    CHECK(fit.curve[0].p_hat == doctest::Approx(0.5).epsilon(0.25));
    CHECK(fit.n_fit_points == 2);

    CHECK_THROWS_AS(estimate_condition_boxT(symmetric_2d(), spec, {65}, 400, 1), CapacityError);
}

TEST_CASE("transience probe separates drift from recurrence") {
    const Direction e1 = make_direction(1, {1.0});
    const std::vector<std::int64_t> horizons{128, 512, 2048};

    const TransienceReport drift = transience_probe(homog_1d(0.9), e1, horizons, 1200, 711);
    REQUIRE(drift.escape_fraction.size() == 3);
    CHECK(drift.verdict == Verdict::Yes);
    CHECK(drift.escape_fraction.back() >= 1.0 - 1e-3);
    CHECK(drift.drift_speed == doctest::Approx(0.8).epsilon(0.06));

    const TransienceReport sym = transience_probe(homog_1d(0.5), e1, horizons, 1200, 712);
    CHECK(sym.verdict == Verdict::No);
    CHECK(sym.escape_fraction.back() < 0.9);
    CHECK(std::fabs(sym.drift_speed) < 0.1);

    CHECK_THROWS_AS(transience_probe(homog_1d(0.9), e1, horizons, 1, 1), ConfigError);
    CHECK_THROWS_AS(transience_probe(homog_1d(0.9), e1, {10, 10}, 100, 1), ConfigError);
}

TEST_CASE("verdict table lines up for a strongly ballistic law") {
    HierarchyConfig cfg;
    cfg.dir = make_direction(1, {1.0});
    cfg.M = 10.0;
    cfg.lambda1 = 0.04;
    cfg.slab_grid = {10, 20, 30};
    cfg.box_grid = {4, 8, 12};
    cfg.n_grid = {128, 512};
    cfg.envs = 10;
    cfg.trials = 800;
    cfg.seed = 811;

    const HierarchyReport rep = hierarchy_report(homog_1d(0.9), cfg);
    CHECK_FALSE(rep.caveat.empty());
    CHECK(rep.weak_verdict == Verdict::Yes);
    CHECK(rep.stretch_verdict == Verdict::Yes);
    CHECK(rep.box_verdict == Verdict::Yes);
    CHECK(rep.poly_verdict == Verdict::Yes);
    CHECK(rep.transience_verdict == Verdict::Yes);

    const nlohmann::json j = hierarchy_report_json(rep);
    CHECK(j["verdicts"]["weak"] == "yes");
    CHECK(j["weak"]["value"].get<double>() < 1e-9);
    CHECK(j["slab"]["curve"].size() == 3);

    const std::string csv = decay_fit_csv(rep.slab);
    CHECK(csv.rfind("L,p_hat", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
