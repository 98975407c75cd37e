#pragma once
// Estimators for the ballisticity condition hierarchy: slab backtrack curves
// with three-model decay fits, the expectation-threshold weak condition, the
// anisotropic box condition, a directional-transience probe, and a combined
// verdict table. All threshold verdicts are three-valued; Monte Carlo error
// never binarizes silently.

#include <cstdint>
#include <string>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/geometry.hpp"
#include "rwre/walk.hpp"

#include "json.hpp"

namespace rwre {

enum class Verdict { Yes, No, Indeterminate };
const char* verdict_name(Verdict v);

// Finite surrogate for an open neighborhood of directions: the direction
// itself plus, for each lateral frame axis, a rotation by +/- angle radians
// in the plane it spans with the direction. d=1 has no lateral axes.
std::vector<Direction> direction_neighborhood(const Direction& ell, double angle = 0.1);

enum class ConditionKind { PolynomialP, StretchT, BoxT, WeakW, Transience };

struct ConditionSpec {
    ConditionKind kind = ConditionKind::StretchT;
    Direction dir;
    double gamma = 1.0;    // stretch exponent target (StretchT / BoxT)
    double M = 0.0;        // polynomial degree target, and the WeakW box size
    double c = 1.0;        // WeakW lateral aspect
    double lambda1 = 0.0;  // WeakW threshold
    double b = 1.0;        // backtrack ratio of the slab
    std::vector<Direction> neighborhood;  // defaults to direction_neighborhood(dir)
    void validate() const;
};

struct CurvePoint {
    std::int64_t L = 0;
    double p_hat = 0.0;
    double log_p = 0.0;       // -inf when p_hat = 0
    double stderr_est = 0.0;  // 0 for exact solves
    bool exact = false;
    bool one_sided = false;  // no hits: p_hat replaced by the rule-of-three bound
    std::int64_t censored = 0;
};

// Three decay models fitted to a probability curve. Fits use only exact or
// two-sided points with p in (0,1); one-sided points are carried but flagged.
struct DecayFit {
    std::vector<CurvePoint> curve;
    double exp_rate = 0.0;  // log p ~ -rate L
    double exp_r2 = 0.0;
    double stretch_gamma = 0.0;  // log p ~ -rate L^gamma
    double stretch_rate = 0.0;
    double stretch_r2 = 0.0;
    double poly_degree = 0.0;  // local slope of log p vs log L at the largest L
    bool super_polynomial = false;
    bool degenerate_zero = false;  // every point had no hits: super-exponential
    bool decay_rejected = false;   // flat or unresolved curve: no decay claim
    bool one_sided_flag = false;
    int n_fit_points = 0;
};

DecayFit fit_decay(const std::vector<CurvePoint>& curve);

// P_0[backtrack below -bL before advancing past L], worst case over the
// direction neighborhood, for each L in the grid. Exact absorption solves in
// d=1 for axis-aligned forward directions (per sampled environment, one
// environment when the law is deterministic); annealed Monte Carlo otherwise.
DecayFit estimate_slab_curve(const EnvironmentLaw& law, const ConditionSpec& spec,
                             const std::vector<std::int64_t>& L_grid, std::int64_t trials,
                             std::uint64_t seed, int jobs = 1, const StepBudget& budget = {});

struct WeakConditionReport {
    double value = 0.0;       // estimate of E[sup_x P_x[non-forward exit]]
    double stderr_est = 0.0;  // environment-sampling error (0 when exact)
    double lambda1 = 0.0;
    double M = 0.0;
    double c = 0.0;
    bool side_condition_ok = false;  // M > 1/lambda1, reported not enforced
    bool degenerate = false;         // lambda1 >= 1 passes vacuously
    Verdict verdict = Verdict::Indeterminate;
    std::int64_t n_envs = 0;
};

// Expectation-threshold condition on the standard box pair of size M and
// aspect c: annealed mean of the per-environment worst-case non-forward exit
// probability, compared to lambda1 at three sigma.
WeakConditionReport estimate_condition_W(const EnvironmentLaw& law, const Direction& dir, double c,
                                         double M, double lambda1, std::int64_t envs,
                                         std::int64_t trials, std::uint64_t seed, int jobs = 1,
                                         const StepBudget& budget = {});

// Non-forward exit probability of the anisotropic box (-L,L) x (-2L^3,2L^3)^{d-1}
// across the grid, with the same decay fits. In d=1 the box degenerates to the
// unit-ratio slab and reproduces estimate_slab_curve point for point (shared
// implementation and seed derivation).
DecayFit estimate_condition_boxT(const EnvironmentLaw& law, const ConditionSpec& spec,
                                 const std::vector<std::int64_t>& L_grid, std::int64_t trials,
                                 std::uint64_t seed, int jobs = 1, const StepBudget& budget = {});

struct TransienceReport {
    std::vector<std::int64_t> n_grid;
    std::vector<double> escape_fraction;  // fraction with inf_{n>=n0} X.l > X_{n0/2}.l
    VelocityEstimate velocity;
    double drift_speed = 0.0;  // fitted velocity projected on the direction
    Verdict verdict = Verdict::Indeterminate;
};

// Escape-to-infinity surrogate along a direction: a walk of length max(n_grid)
// per trial, suffix minima of the projection, thresholds reported explicitly
// (supported above 1 - 1e-3 at the largest horizon, refuted below 0.9).
TransienceReport transience_probe(const EnvironmentLaw& law, const Direction& dir,
                                  const std::vector<std::int64_t>& n_grid, std::int64_t trials,
                                  std::uint64_t seed, int jobs = 1);

struct HierarchyConfig {
    Direction dir;
    double b = 1.0;
    double gamma = 1.0;
    double M = 10.0;
    double c = 1.0;
    double lambda1 = 0.04;
    std::vector<std::int64_t> slab_grid{10, 20, 30};
    std::vector<std::int64_t> box_grid{4, 8, 12};
    std::vector<std::int64_t> n_grid{256, 1024, 4096};
    std::int64_t envs = 50;
    std::int64_t trials = 2000;
    std::uint64_t seed = 1;
    int jobs = 1;
    StepBudget budget{};
};

struct HierarchyReport {
    std::string caveat;  // consistency evidence, not an implication proof
    WeakConditionReport weak;
    DecayFit slab;
    DecayFit box;
    TransienceReport transience;
    Verdict weak_verdict = Verdict::Indeterminate;
    Verdict stretch_verdict = Verdict::Indeterminate;
    Verdict poly_verdict = Verdict::Indeterminate;
    Verdict box_verdict = Verdict::Indeterminate;
    Verdict transience_verdict = Verdict::Indeterminate;
};

// Runs every estimator on one law and tabulates the verdicts side by side.
HierarchyReport hierarchy_report(const EnvironmentLaw& law, const HierarchyConfig& cfg);

nlohmann::json decay_fit_json(const DecayFit& fit);
nlohmann::json weak_report_json(const WeakConditionReport& report);
nlohmann::json transience_report_json(const TransienceReport& report);
nlohmann::json hierarchy_report_json(const HierarchyReport& report);
std::string decay_fit_csv(const DecayFit& fit);

}  // namespace rwre
