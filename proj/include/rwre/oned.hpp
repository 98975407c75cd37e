#pragma once
// Exact one-dimensional machinery: absorption probabilities for birth-death
// chains (log-space product formula), strip-crossing odds profiles, the
// associated potential, exact slab-exit probabilities, and the quantized-law
// slab experiment. These are the trusted values Monte Carlo output is checked
// against.

#include <cstdint>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/errors.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// Nearest-neighbor chain on [left, right] absorbed at both ends; alpha[m] is
// the up-step probability at interior site m.
struct BirthDeathChain {
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::vector<double> alpha;  // size right - left - 1, indexed by site - left - 1

    double alpha_at(std::int64_t m) const { return alpha[static_cast<std::size_t>(m - left - 1)]; }
    std::int64_t interior_count() const { return right - left - 1; }
    void validate() const;
};

// Q_m = P_m[hit left before right]; Q_left = 1, Q_right = 0.
struct AbsorptionSolution {
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::vector<double> q;      // site left..right
    std::vector<double> log_q;  // log of the same, -inf at right

    double q_at(std::int64_t m) const { return q[static_cast<std::size_t>(m - left)]; }
    double log_q_at(std::int64_t m) const { return log_q[static_cast<std::size_t>(m - left)]; }

    // Largest harmonicity defect |Q_m - (a Q_{m+1} + (1-a) Q_{m-1})|.
    double max_residual(const BirthDeathChain& chain) const;
};

// Boundary-correct ratio-of-products solution, evaluated with log-space
// prefix sums and compensated accumulation so long or strongly drifted
// chains stay accurate.
AbsorptionSolution solve_absorption(const BirthDeathChain& chain);

// Per-strip worst-case odds of crossing left rather than right. Strip i is
// the site block [i*w, (i+1)*w); crossing resolves by the absorption problem
// with barriers i*w - 1 and (i+1)*w. With w = 1 this reduces to the local
// odds omega(-)/omega(+). Environment must cover the involved interiors.
std::vector<double> rho_profile(const QuenchedEnvironment& env, int w, std::int64_t strip_lo,
                                std::int64_t strip_hi);

// f(j) = sum_{j <= n <= w0} prod_{n < m <= w0} rho_m^{-1}, f = 0 beyond w0.
// rho is indexed by site: rho[m - lo]. Values saturate at +inf rather than
// throw; callers fitting ratios should stay in the finite range.
struct PotentialProfile {
    std::int64_t lo = 0;
    std::int64_t w0 = 0;
    std::vector<double> f;  // site lo..w0+1

    double f_at(std::int64_t j) const {
        if (j > w0) return 0.0;
        return f[static_cast<std::size_t>(j - lo)];
    }
    // Decay ratio f(0) / f(-(N0 - 9)) used as a crossing-probability bound.
    double ratio(std::int64_t N0) const { return f_at(0) / f_at(-(N0 - 9)); }
};

PotentialProfile f_potential(const std::vector<double>& rho, std::int64_t lo, std::int64_t w0);

// Exact probability that the walk started at `start` exits the slab
// {|x| < L} on the left. Requires the environment on the interior sites.
struct SlabExit {
    double p = 0.0;
    double log_p = 0.0;
};
SlabExit slab_exit_exact(const QuenchedEnvironment& env, std::int64_t L, std::int64_t start = 0);

// Annealed left-exit probability by exhaustive enumeration over environment
// assignments (finite-support laws; interior site count bounded by the cap).
double annealed_slab_enumerate(const EnvironmentLaw& law, std::int64_t L, std::int64_t start = 0,
                               std::int64_t assignment_cap = 20'000'000);

// Annealed left-exit probability by environment Monte Carlo with exact
// quenched solves (the only randomness is the environment draw).
MeanVar annealed_slab_mc(const EnvironmentLaw& law, std::int64_t L, std::int64_t n_envs,
                         std::uint64_t seed, std::int64_t start = 0);

struct SlabCurvePoint {
    std::int64_t L = 0;
    double estimate = 0.0;
    double log_estimate = 0.0;
    double stderr_est = 0.0;
    bool exact = false;
    std::int64_t n_envs = 0;
};

struct QuantizedSlabCurve {
    int m = 0;  // 0 = base (unquantized) law
    std::vector<SlabCurvePoint> points;
    double rate = 0.0;  // fitted exponential decay rate of the left-exit probability
    double r2 = 0.0;
};

struct QuantizedRateReport {
    std::vector<QuantizedSlabCurve> curves;  // base first, then one per m
};

// Slab-exit decay across quantization orders: the fitted rates converge to
// the base law's rate as m grows.
QuantizedRateReport quantized_rate_experiment(const EnvironmentLaw& law, const std::vector<int>& m_grid,
                                     const std::vector<std::int64_t>& L_grid, std::int64_t mc_envs,
                                     std::uint64_t seed);

// Desk-size diagnostic: probability that a walk from x is at y after n steps
// while staying strictly inside the window, maximized over finite-support
// environment assignments, next to the same number for the simple symmetric
// walk. Reported side by side, no relation asserted.
struct PathEventComparison {
    double sup_env_prob = 0.0;
    double simple_walk_prob = 0.0;
};
PathEventComparison path_event_comparison(const EnvironmentLaw& law, std::int64_t window_radius,
                                          std::int64_t x, std::int64_t y, int n_steps);

}  // namespace rwre
