#include <cmath>
#include <limits>
#include <utility>

#include "doctest.h"
#include "oracles.hpp"
#include "rwre/env.hpp"
#include "rwre/errors.hpp"
#include "rwre/geometry.hpp"
#include "rwre/renorm.hpp"
#include "rwre/rng.hpp"

using namespace rwre;

namespace {

ScaleHierarchy desk_1d(int k_max = 1) { return make_hierarchy(1, 10, 4, 4, 1.0, k_max); }

EnvironmentLaw law_1d(double up, double kappa = 0.1) {
    EnvParams p;
    p.d = 1;
    p.kappa = kappa;
    return EnvironmentLaw::homogeneous(p, TransitionVector{{up, 1.0 - up}});
}

}  // namespace

TEST_CASE("constant ladder identities on the reduced hierarchy") {
    const CascadeConstants cc = compute_constants(desk_1d(3));

    // lambda2 = ((23/11) N0)^2 in d = 1
    CHECK(cc.lambda2 == doctest::Approx(std::pow(92.0 / 11.0, 2)).epsilon(1e-13));
    const double inv = 4.0 * cc.lambda2;
    CHECK(cc.lambda1 * inv * inv == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cc.c0 == doctest::Approx(std::log(inv)).epsilon(1e-14));

    // N0 = 4 collapses the quenched products to c0 at every scale
    for (int k = 0; k <= 10; ++k) {
        const double Lk = 10.0 * std::pow(4.0, k);
        CHECK(cc.c_quenched[static_cast<std::size_t>(k)] * Lk ==
              doctest::Approx(cc.c0).epsilon(1e-13));
    }

    // with C = 0 only lambda2 drains the annealed sequence
    CHECK(cc.c_annealed[1] == doctest::Approx(cc.c0 - std::log(cc.lambda2) / 2.0).epsilon(1e-14));
    // the bounding sequence also pays the uniform mixing majorant
    CHECK(cc.c_bounding[1] ==
          doctest::Approx(cc.c0 - (std::log(cc.lambda2) + std::exp(-10.0 / 30.0)) / 2.0)
              .epsilon(1e-14));
    CHECK(cc.gamma == doctest::Approx(std::log(2.0) / (2.0 * std::log(4.0))).epsilon(1e-15));

    // sequences head monotonically toward the closed-form infimum; the tail
    // increments shrink as 2^-k and fall below one ulp near k ~ 55
    for (std::size_t k = 0; k + 1 < cc.c_bounding.size(); ++k)
        CHECK(cc.c_bounding[k + 1] <= cc.c_bounding[k]);
    for (std::size_t k = 0; k < 20; ++k) CHECK(cc.c_bounding[k + 1] < cc.c_bounding[k]);
    CHECK(cc.c_bounding.back() == doctest::Approx(cc.closed_form_limit).epsilon(1e-13));
    CHECK(cc.limit_positive);

    CHECK_THROWS_AS(compute_constants(desk_1d(1), MixingParams{}, -1.0), ConfigError);
    CHECK_THROWS_AS(
        compute_constants(desk_1d(1), MixingParams{}, std::numeric_limits<double>::quiet_NaN(), -1),
        ConfigError);
}

TEST_CASE("mixing corrections enter the annealed recursion scale by scale") {
    MixingParams mp;
    mp.C = 1.0;
    mp.g = 1.0;
    mp.r = 1;
    const CascadeConstants cc = compute_constants(desk_1d(1), mp);
    const double gamma0 = std::exp(-(9.0 / 11.0) * 10.0) * 9.0 * 100.0;  // r^2d = 1, d = 1
    CHECK(cc.c_annealed[1] ==
          doctest::Approx(cc.c0 - (std::log(cc.lambda2) + gamma0) / 2.0).epsilon(1e-13));

    MixingParams bad;
    bad.g = 0.0;
    CHECK_THROWS_AS(compute_constants(desk_1d(1), bad), ConfigError);
}

TEST_CASE("production-size constants: pair counts and block geometry") {
    const CascadeConstants cc = compute_constants(make_production_hierarchy(2, 12, 0.5, 1));
    CHECK(cc.n_line == 18401.0);
    CHECK(cc.J == 92581);
    CHECK(cc.w0 == doctest::Approx((12.0 / 11.0) * 8800.0).epsilon(1e-15));
    CHECK(cc.gamma == doctest::Approx(std::log(2.0) / (2.0 * std::log(8800.0))).epsilon(1e-15));
    CHECK(accept::lambda2_matches_exact(2, 8800, 6814720000LL, cc.lambda2, 1e-12));
}

TEST_CASE("companion exit box shares the anchor and widens the footprint") {
    const ScaleHierarchy h = desk_1d();
    const Direction e1 = make_direction(1, {1.0});
    const BoxSpec b1 = box_b1tilde(h, 0, make_point({7}), e1);
    const BoxSpec b2 = companion_b2(b1);
    CHECK(b2.kind == BoxKind::B2);
    CHECK(b2.anchor == b1.anchor);
    CHECK(b2.contains(make_point({-2})));
    CHECK_FALSE(b1.contains(make_point({-2})));
    CHECK(b2.has_plus_face());
}

TEST_CASE("worst-site non-forward exit on free boxes: symmetric and drifted closed forms") {
    const Direction e1 = make_direction(1, {1.0});
    const Point origin = make_point({0});
    // inner box [0, 30); its exit box spans [-30, 30 + 30/11), absorbing
    // chain [-31, 33], so the symmetric worst site x = 0 ruins at 33/64
    const BoxSpec b1 = box_b1tilde_free(1, 1.0, 30.0, origin, e1);

    LatticeBox w;
    w.d = 1;
    w.lo[0] = -40;
    w.hi[0] = 41;
    const QuenchedEnvironment sym = sample_environment(law_1d(0.5), w, 1);
    const TableView sview(sym);
    const BoxStatus sst = classify_scale0(sview, b1, 0.04, 0, 9);
    CHECK(sst.sup_exit == doctest::Approx(33.0 / 64.0).epsilon(1e-13));
    CHECK_FALSE(sst.good);

    const QuenchedEnvironment drift = sample_environment(law_1d(0.9), w, 1);
    const TableView dview(drift);
    const BoxStatus dst = classify_scale0(dview, b1, 0.04, 0, 9);
    CHECK(dst.sup_exit < 1e-25);
    CHECK(dst.good);
}

TEST_CASE("reference-scale labels: exact in one dimension") {
    const ScaleHierarchy h = desk_1d();
    const Direction e1 = make_direction(1, {1.0});
    const BoxSpec b1 = box_b1tilde(h, 0, make_point({0}), e1);

    LatticeBox w;
    w.d = 1;
    w.lo[0] = -30;
    w.hi[0] = 31;
    const QuenchedEnvironment sym = sample_environment(law_1d(0.5), w, 2);
    const TableView sview(sym);
    const BoxStatus bad = classify_scale0(sview, b1, 0.04, 0, 9);
    CHECK_FALSE(bad.good);
    CHECK_FALSE(bad.indeterminate);
    CHECK(bad.sup_exit == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(bad.sup_exit_stderr == 0.0);

    const QuenchedEnvironment drift = sample_environment(law_1d(0.9), w, 2);
    const TableView dview(drift);
    const BoxStatus good = classify_scale0(dview, b1, 0.04, 0, 9);
    CHECK(good.good);
    CHECK(good.sup_exit ==
          doctest::Approx(accept::closed_form_ruin(0.9, 22, 11)).epsilon(1e-12));

    // thresholds at or above one accept everything
    const BoxStatus degen = classify_scale0(sview, b1, 1.0, 0, 9);
    CHECK(degen.good);
    CHECK(degen.degenerate);
}

TEST_CASE("reference-scale labels: Monte Carlo path respects the censor cap") {
    EnvParams p;
    p.d = 2;
    p.kappa = 0.05;
    const EnvironmentLaw law =
        EnvironmentLaw::homogeneous(p, TransitionVector{{0.25, 0.25, 0.25, 0.25}});
    const LawView view(law, 5);
    const ScaleHierarchy h = make_hierarchy(2, 10, 4, 16, 0.5, 1);
    const BoxSpec b1 = box_b1tilde(h, 0, make_point({0, 0}), make_direction(2, {1.0, 0.0}));

    const BoxStatus st = classify_scale0(view, b1, 0.04, 200, 17);
    CHECK(st.sup_exit >= 0.0);
    CHECK(st.sup_exit <= 1.0);
    CHECK(st.censored == 0);
    // symmetric walks leave through a non-forward face most of the time
    CHECK_FALSE(st.good);
    CHECK_FALSE(st.indeterminate);

    StepBudget strangled;
    strangled.max_steps = 3;
    strangled.censor_cap = 0.0;
    CHECK_THROWS_AS(classify_scale0(view, b1, 0.04, 50, 17, strangled), CapacityError);
}

TEST_CASE("recursive rule: literal and pairwise readings can split") {
    const ScaleHierarchy h = desk_1d();
    const Direction e1 = make_direction(1, {1.0});
    const auto cover = quasi_cover(h, 1, make_point({0}));
    REQUIRE(cover.size() == 8);

    const auto child_statuses = [&](std::initializer_list<std::int64_t> bad_anchors) {
        std::vector<BoxStatus> out;
        for (const Point& y : cover) {
            BoxStatus st;
            st.box = box_b1tilde(h, 0, y, e1);
            st.good = true;
            for (std::int64_t b : bad_anchors)
                if (y[0] == b) st.good = false;
            out.push_back(st);
        }
        return out;
    };

    // all good: trivially good, readings agree
    const BoxStatus clean = classify_recursive(h, 1, make_point({0}), child_statuses({}));
    CHECK(clean.good);
    CHECK(clean.pairwise_good);
    CHECK(clean.readings_agree);
    CHECK_FALSE(clean.has_witness);

    // two bads straddling a bridge: the literal rule keeps the parent good,
    // the pairwise gloss does not
    const BoxStatus bridge = classify_recursive(h, 1, make_point({0}), child_statuses({0, 30}));
    CHECK(bridge.good);
    CHECK_FALSE(bridge.pairwise_good);
    CHECK_FALSE(bridge.readings_agree);
    CHECK(bridge.has_witness);
    CHECK(bridge.witness[0] == make_point({0}));
    CHECK(bridge.witness[1] == make_point({30}));

    // far-apart bads without a bridge: both readings reject
    const BoxStatus split = classify_recursive(h, 1, make_point({0}), child_statuses({-40, 30}));
    CHECK_FALSE(split.good);
    CHECK_FALSE(split.pairwise_good);
    CHECK(split.readings_agree);

    // adjacent bads overlap: both readings accept
    const BoxStatus near = classify_recursive(h, 1, make_point({0}), child_statuses({0, 10}));
    CHECK(near.good);
    CHECK(near.pairwise_good);

    // indeterminate children poison the parent
    auto kids = child_statuses({});
    kids[3].indeterminate = true;
    CHECK(classify_recursive(h, 1, make_point({0}), kids).indeterminate);

    // children must arrive in quasi-cover order
    auto shuffled = child_statuses({});
    std::swap(shuffled[0], shuffled[1]);
    CHECK_THROWS_AS(classify_recursive(h, 1, make_point({0}), shuffled), ConfigError);
}

TEST_CASE("disjoint-pair counts match the integer oracle across scales") {
    const ScaleHierarchy h = make_hierarchy(1, 10, 4, 4, 1.0, 3);
    for (int k = 1; k <= 3; ++k) {
        std::int64_t L_child = 10;
        for (int i = 1; i < k; ++i) L_child *= 4;
        const auto oracle =
            accept::disjoint_pairs(accept::exit_boxes_1d(accept::cover_anchors_1d(10, 4, k), L_child));
        CHECK(disjoint_pair_count(h, k, make_point({0})) == oracle);
        CHECK(oracle == 15);
    }
}

TEST_CASE("cascade runs are independent of the worker count") {
    EnvParams p;
    p.d = 1;
    p.kappa = 0.1;
    const EnvironmentLaw law = EnvironmentLaw::finite_support(
        p, {TransitionVector{{0.62, 0.38}}, TransitionVector{{0.78, 0.22}}}, {0.5, 0.5});
    const ScaleHierarchy h = desk_1d(1);

    const CascadeReport a = cascade_experiment(law, h, 1, 6, 50, 0.25, 77, MixingParams{}, 1);
    const CascadeReport b = cascade_experiment(law, h, 1, 6, 50, 0.25, 77, MixingParams{}, 3);
    CHECK(cascade_report_json(a).dump() == cascade_report_json(b).dump());

    REQUIRE(a.scales.size() == 2);
    CHECK(a.scales[0].k == 0);
    CHECK(a.scales[0].n_boxes == 6);
    CHECK(a.scales[0].p_hat >= 0.0);
    CHECK(a.scales[0].p_hat <= 1.0);
    CHECK(a.scales[0].bound == doctest::Approx(std::exp(-a.constants.c_annealed[0])).epsilon(1e-12));
    CHECK(a.scales[1].bound ==
          doctest::Approx(std::exp(-a.constants.c_annealed[1] * 2.0)).epsilon(1e-12));
}

TEST_CASE("cascade refuses production hierarchies outright") {
    const EnvironmentLaw law = law_1d(0.9);
    const ScaleHierarchy hp = make_production_hierarchy(1, 11, 1.0, 1);
    CHECK_THROWS_AS(cascade_experiment(law, hp, 1, 2, 10, 0.04, 1), CapacityError);
}

TEST_CASE("null-model marks respect the union bound and its pair count") {
    const ScaleHierarchy h = desk_1d(1);
    const NullModelReport rep = cascade_null_model(h, 1, 0.25, 2000, 31);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].pairs == 15);
    CHECK(rep.rows[0].n_samples == 2000);
    CHECK(std::fabs(rep.p_hat[0] - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / 2000.0));
    CHECK(rep.rows[0].within);
    CHECK(rep.rows[0].p_child_hat == rep.p_hat[0]);
    CHECK(rep.rows[0].bound ==
          doctest::Approx(15.0 * rep.p_hat[0] * rep.p_hat[0]).epsilon(1e-12));

    // same seed, same marks
    const NullModelReport again = cascade_null_model(h, 1, 0.25, 2000, 31);
    CHECK(again.p_hat[1] == rep.p_hat[1]);
}

TEST_CASE("lateral and union reference bounds follow their formulas") {
    const CascadeConstants c1 = compute_constants(desk_1d(1));
    CHECK(lateral_bound_value(c1, 0) == 0.0);  // no lateral directions in d = 1

    const CascadeConstants c2 = compute_constants(make_production_hierarchy(2, 12, 0.5, 1));
    const double x = std::log(2.0 * c2.n_line) + 0.002;
    const double want = std::exp(-(static_cast<double>(c2.J) / 8.0) * 0.002);
    CHECK(lateral_bound_value(c2, 0, true, x) == doctest::Approx(want).epsilon(1e-6));
    const double x1 = std::log(c2.n_line) + 0.002;
    CHECK(lateral_bound_value(c2, 0, false, x1) == doctest::Approx(want).epsilon(1e-6));

    LatticeBox region;
    region.d = 1;
    region.lo[0] = 0;
    region.hi[0] = 95;
    CHECK(union_bad_bound(c1, 0, region) ==
          doctest::Approx(10.0 * std::exp(-c1.c0)).epsilon(1e-12));

    const ScaleHierarchy h2 = make_hierarchy(2, 10, 4, 16, 0.5, 1);
    const CascadeConstants c2d = compute_constants(h2);
    LatticeBox region2;
    region2.d = 2;
    region2.lo = {0, 0};
    region2.hi = {20, 30};
    CHECK(union_bad_bound(c2d, 0, region2) ==
          doctest::Approx(4.0 * std::exp(-c2d.c0)).epsilon(1e-12));

    CHECK_THROWS_AS(union_bad_bound(c1, 5, region), ConfigError);
}
