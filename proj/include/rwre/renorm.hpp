#pragma once
// Multiscale box classification and the two decay cascades: Good/Bad labels
// for boxes (exact solves in d=1, Monte Carlo otherwise), the recursive
// classification rule, the annealed/quenched constant sequences with their
// closed-form limit checks, the independent-marking null model that makes the
// induction step empirically checkable, and the lateral-exit reference bound.

#include <cstdint>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/geometry.hpp"
#include "rwre/walk.hpp"

#include "json.hpp"

namespace rwre {

struct CascadeConstants {
    ScaleHierarchy hierarchy;
    MixingParams mixing;
    double lambda2 = 0.0;  // ((5/3) Ntilde0)^{2(d-1)} ((23/11) N0)^2
    double lambda1 = 0.0;  // default (4 lambda2)^{-2}
    double c0 = 0.0;       // ln(1 / sqrt(lambda1))

    // c_{k+1} = c_k - ln(lambda2)/2^{k+1} - G_k/2^{k+1}, where G_k is the log
    // of the mixing correction bound at scale k.
    std::vector<double> c_annealed;
    // Same recursion with G_k replaced by the uniform majorant e^{-g L0/30};
    // this is the sequence whose infimum has a closed form.
    std::vector<double> c_bounding;
    // c_k = c0 / (4^k L0): the quenched ladder, c_k L_k = c0 L0 (N0/4)^k.
    std::vector<double> c_quenched;

    double closed_form_limit = 0.0;  // c0 - ln(lambda2) - e^{-g L0/30}
    bool limit_positive = false;

    double n_line = 0.0;  // (23/11) N0 + 1 successive boxes along the direction
    std::int64_t J = 0;   // floor(Ntilde0 / (4 (n_line + 1)))
    double w0 = 0.0;      // (12/11) N0
    double gamma = 0.0;   // ln 2 / (2 ln N0)

    // Measured decay-rate diagnostics (fitted by experiments, never proven).
    double eta1, eta2, eta3;
};

CascadeConstants compute_constants(const ScaleHierarchy& h, const MixingParams& mixing = {},
                                   double lambda1_override = std::numeric_limits<double>::quiet_NaN(),
                                   int k_terms = 60);

struct BoxStatus {
    BoxSpec box;  // the inner (B1-tilde) box the label belongs to
    bool good = false;
    bool indeterminate = false;  // MC confidence interval straddled the threshold
    bool degenerate = false;     // threshold >= 1: every box passes

    // Scale-0 measurements (exact value in d=1; MC sup of per-site estimates
    // otherwise). NaN at higher scales unless exactly computable.
    double sup_exit = std::numeric_limits<double>::quiet_NaN();
    double sup_exit_stderr = 0.0;
    std::int64_t censored = 0;

    // Recursive-scale diagnostics.
    bool has_witness = false;
    Point witness[2]{};          // a disjoint Bad child pair (present when Bad)
    bool pairwise_good = false;  // "no disjoint Bad pair" gloss of the rule
    bool readings_agree = true;  // literal rule vs gloss on this instance
};

// The exit box associated with an inner box (same anchor, direction, sizes).
BoxSpec companion_b2(const BoxSpec& b1tilde);

// Scale-0 label: worst-case over inner-box sites of the quenched probability
// of leaving the exit box anywhere but its forward face, compared against
// sqrt(lambda1). d=1 is an exact absorption solve (trials ignored); higher d
// uses per-site Monte Carlo, counts censored walks as non-forward exits, and
// labels conservatively (Bad + indeterminate) when the CI straddles.
BoxStatus classify_scale0(const EnvView& env, const BoxSpec& b1tilde, double lambda1,
                          std::int64_t trials, std::uint64_t seed, const StepBudget& budget = {});

// Disjointness of two axis-aligned boxes as continuous regions.
bool boxes_disjoint(const BoxSpec& a, const BoxSpec& b);

// Recursive label from child labels (children must be the quasi-cover of the
// parent, in lattice order). Good iff some child's exit box meets every Bad
// child's exit box — literally: there is a witness child such that every
// child disjoint from it is Good. Records a disjoint Bad pair when Bad, and
// the pairwise-gloss verdict for comparison (the readings can differ when a
// bridge child touches two disjoint Bad boxes).
BoxStatus classify_recursive(const ScaleHierarchy& h, int k, const Point& parent_anchor,
                             const std::vector<BoxStatus>& children);

// Number of unordered disjoint pairs among the quasi-cover children's exit
// boxes; the combinatorial factor of the induction step.
std::int64_t disjoint_pair_count(const ScaleHierarchy& h, int k, const Point& parent_anchor);

struct ScaleRow {
    int k = 0;
    std::int64_t n_boxes = 0;
    std::int64_t n_bad = 0;
    std::int64_t n_indeterminate = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool one_sided = false;  // no Bad samples: ci_hi is the rule-of-three bound
    double bound = 0.0;      // e^{-c_k 2^k}
    double mean_sup_exit = std::numeric_limits<double>::quiet_NaN();  // Good boxes, d=1
    std::int64_t n_good_measured = 0;
    double quench_bound = 0.0;  // e^{-c_k L_k} with the quenched ladder
};

struct CascadeReport {
    std::string note;  // stamps the reduced-constants caveat
    CascadeConstants constants;
    std::vector<ScaleRow> scales;
    double eta1_hat, eta1_r2;  // from ln(-ln p_k) vs k
    double eta2_hat, eta2_r2;  // from ln(-ln sup_exit_k) vs k
};

// Empirical bad-box frequencies per scale on sampled environments, each scale
// estimated on its own batch of fresh environments. Refuses production-default
// hierarchies (the window alone would exceed any memory budget).
CascadeReport cascade_experiment(const EnvironmentLaw& law, const ScaleHierarchy& h, int k_top,
                                 std::int64_t envs_per_scale, std::int64_t trials, double lambda1,
                                 std::uint64_t seed, const MixingParams& mixing = {}, int jobs = 1,
                                 const StepBudget& budget = {});

nlohmann::json cascade_report_json(const CascadeReport& report);

struct NullScaleRow {
    int k = 0;  // parent scale; the bound uses scale k-1 statistics
    std::int64_t n_samples = 0;
    double p_hat = 0.0;
    double p_child_hat = 0.0;
    std::int64_t pairs = 0;
    double bound = 0.0;   // pairs * p_child_hat^2
    double sigma = 0.0;   // combined MC error of p_hat and the bound
    bool within = false;  // p_hat <= bound + 3 sigma
};

struct NullModelReport {
    double p_mark = 0.0;
    std::vector<double> p_hat;  // per scale 0..k_top
    std::vector<NullScaleRow> rows;
};

// Marks scale-0 boxes Bad i.i.d. and pushes the recursive rule up the tree;
// the empirical parent bad-probability must sit below the disjoint-pair
// union bound. This is the computable content of the induction step.
NullModelReport cascade_null_model(const ScaleHierarchy& h, int k_top, double p_mark,
                                   std::int64_t samples_per_scale, std::uint64_t seed);

// Reference value exp(-(J/8)(c_k L_k - ln(2(d-1) n))) for the probability of
// a lateral exit at scale k+1. In d=1 there are no lateral directions and
// the probability is 0 by convention. Dropping the direction factor turns
// the exponent into -(J/8)(c_k L_k - ln n), the single-direction form.
double lateral_bound_value(const CascadeConstants& cc, int k, bool direction_factor = true,
                           double ck_lk_override = std::numeric_limits<double>::quiet_NaN());

// Union bound for "some scale-k box meeting the region is Bad":
// (number of anchors whose inner box meets the region) * e^{-c_k 2^k}.
double union_bad_bound(const CascadeConstants& cc, int k, const LatticeBox& region);

}  // namespace rwre
