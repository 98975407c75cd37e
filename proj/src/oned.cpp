#include "rwre/oned.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwre/rng.hpp"

namespace rwre {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr long double kNegInfL = -std::numeric_limits<long double>::infinity();

// log(e^a + e^b) without overflow; either argument may be -inf.  Extended
// precision: the absorption recursion chains hundreds of these, and the
// rounding of each is an ulp of the running log magnitude, not of the result.
long double log_add(long double a, long double b) {
    if (a == kNegInfL) return b;
    if (b == kNegInfL) return a;
    long double hi = std::max(a, b);
    long double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double alpha_at_site(const QuenchedEnvironment& env, std::int64_t x) {
    Point p{};
    p.coord[0] = x;
    const double* row = env.row(p);
    return row[dir_index(0, false)];
}

BirthDeathChain chain_from_env(const QuenchedEnvironment& env, std::int64_t left,
                               std::int64_t right) {
    BirthDeathChain chain;
    chain.left = left;
    chain.right = right;
    chain.alpha.reserve(static_cast<std::size_t>(right - left - 1));
    for (std::int64_t m = left + 1; m < right; ++m) chain.alpha.push_back(alpha_at_site(env, m));
    return chain;
}

}  // namespace

void BirthDeathChain::validate() const {
    if (right - left < 2) throw ConfigError("absorption interval needs at least one interior site");
    if (alpha.size() != static_cast<std::size_t>(right - left - 1))
        throw ConfigError("alpha vector length does not match the interval");
    for (double a : alpha)
        if (!(a > 0.0) || !(a < 1.0))
            throw ConfigError("up-step probabilities must lie strictly inside (0,1)");
}

double AbsorptionSolution::max_residual(const BirthDeathChain& chain) const {
    double worst = 0.0;
    for (std::int64_t m = left + 1; m < right; ++m) {
        double a = chain.alpha_at(m);
        double expect = a * q_at(m + 1) + (1.0 - a) * q_at(m - 1);
        worst = std::max(worst, std::abs(q_at(m) - expect));
    }
    return worst;
}

AbsorptionSolution solve_absorption(const BirthDeathChain& chain) {
    chain.validate();
    const std::int64_t n_pi = chain.right - chain.left;  // pi_n for n = left .. right-1

    // log pi_n = sum of log rho over the interior sites up to n; pi_left = 1.
    std::vector<long double> log_pi(static_cast<std::size_t>(n_pi));
    log_pi[0] = 0.0L;
    long double prefix = 0.0L;
    for (std::int64_t n = 1; n < n_pi; ++n) {
        long double a = chain.alpha[static_cast<std::size_t>(n - 1)];
        prefix += std::log1p(-a) - std::log(a);  // log((1-a)/a)
        log_pi[static_cast<std::size_t>(n)] = prefix;
    }

    // suffix[m] = log sum_{n >= m} pi_n, built backwards for stability.
    std::vector<long double> suffix(static_cast<std::size_t>(n_pi) + 1);
    suffix[static_cast<std::size_t>(n_pi)] = kNegInfL;
    for (std::int64_t m = n_pi - 1; m >= 0; --m)
        suffix[static_cast<std::size_t>(m)] =
            log_add(log_pi[static_cast<std::size_t>(m)], suffix[static_cast<std::size_t>(m + 1)]);

    AbsorptionSolution sol;
    sol.left = chain.left;
    sol.right = chain.right;
    const std::size_t n_sites = static_cast<std::size_t>(chain.right - chain.left) + 1;
    sol.q.resize(n_sites);
    sol.log_q.resize(n_sites);
    const long double denom = suffix[0];
    for (std::int64_t m = 0; m < n_pi; ++m) {
        long double lq = suffix[static_cast<std::size_t>(m)] - denom;
        sol.log_q[static_cast<std::size_t>(m)] = static_cast<double>(lq);
        sol.q[static_cast<std::size_t>(m)] = static_cast<double>(std::exp(lq));
    }
    sol.q.front() = 1.0;
    sol.log_q.front() = 0.0;
    sol.q.back() = 0.0;
    sol.log_q.back() = kNegInf;
    return sol;
}

std::vector<double> rho_profile(const QuenchedEnvironment& env, int w, std::int64_t strip_lo,
                                std::int64_t strip_hi) {
    if (env.params().d != 1) throw ConfigError("rho_profile is one-dimensional");
    if (w < 1) throw ConfigError("strip width must be positive");
    if (strip_hi < strip_lo) throw ConfigError("empty strip range");
    std::vector<double> rho;
    rho.reserve(static_cast<std::size_t>(strip_hi - strip_lo + 1));
    for (std::int64_t i = strip_lo; i <= strip_hi; ++i) {
        auto sol = solve_absorption(chain_from_env(env, i * w - 1, (i + 1) * w));
        double worst = 0.0;
        for (std::int64_t z = i * w; z < (i + 1) * w; ++z) {
            double q = sol.q_at(z);
            worst = std::max(worst, q / (1.0 - q));
        }
        rho.push_back(worst);
    }
    return rho;
}

PotentialProfile f_potential(const std::vector<double>& rho, std::int64_t lo, std::int64_t w0) {
    if (w0 < lo) throw ConfigError("potential range is empty");
    if (rho.size() < static_cast<std::size_t>(w0 - lo + 1))
        throw ConfigError("rho vector does not cover the potential range");
    PotentialProfile prof;
    prof.lo = lo;
    prof.w0 = w0;
    prof.f.resize(static_cast<std::size_t>(w0 - lo) + 2);
    // g(n) = prod_{n < m <= w0} 1/rho_m, accumulated downward; f(j) = sum g.
    double g = 1.0;
    double f = 0.0;
    prof.f.back() = 0.0;
    for (std::int64_t j = w0; j >= lo; --j) {
        f += g;
        prof.f[static_cast<std::size_t>(j - lo)] = f;
        if (j > lo) g /= rho[static_cast<std::size_t>(j - lo)];
    }
    return prof;
}

SlabExit slab_exit_exact(const QuenchedEnvironment& env, std::int64_t L, std::int64_t start) {
    if (env.params().d != 1) throw ConfigError("slab_exit_exact is one-dimensional");
    if (L < 1 || start <= -L || start >= L) throw ConfigError("start must lie inside the slab");
    auto sol = solve_absorption(chain_from_env(env, -L, L));
    return {sol.q_at(start), sol.log_q_at(start)};
}

namespace {

// Exact Q_start for an explicit assignment of up-step probabilities on the
// interior of [-L, L].
double slab_q_for_alphas(const std::vector<double>& alpha, std::int64_t L, std::int64_t start) {
    BirthDeathChain chain;
    chain.left = -L;
    chain.right = L;
    chain.alpha = alpha;
    return solve_absorption(chain).q_at(start);
}

}  // namespace

double annealed_slab_enumerate(const EnvironmentLaw& law, std::int64_t L, std::int64_t start,
                               std::int64_t assignment_cap) {
    if (law.params().d != 1) throw ConfigError("slab enumeration is one-dimensional");
    if (law.kind() == LawKind::Homogeneous) {
        const auto& w = law.atoms().front().w;
        std::vector<double> alpha(static_cast<std::size_t>(2 * L - 1), w[dir_index(0, false)]);
        return slab_q_for_alphas(alpha, L, start);
    }
    if (law.kind() != LawKind::FiniteSupport)
        throw ConfigError("exact enumeration needs a finite-support law");

    const auto& atoms = law.atoms();
    const auto& probs = law.atom_probs();
    const std::size_t n_atoms = atoms.size();
    const std::int64_t n_sites = 2 * L - 1;
    if (static_cast<double>(n_sites) * std::log(static_cast<double>(n_atoms)) >
        std::log(static_cast<double>(assignment_cap)))
        throw CapacityError("environment assignment count exceeds the enumeration cap");

    std::vector<std::size_t> pick(static_cast<std::size_t>(n_sites), 0);
    std::vector<double> alpha(static_cast<std::size_t>(n_sites));
    KahanSum total;
    for (;;) {
        double weight = 1.0;
        for (std::int64_t s = 0; s < n_sites; ++s) {
            const std::size_t a = pick[static_cast<std::size_t>(s)];
            weight *= probs[a];
            alpha[static_cast<std::size_t>(s)] = atoms[a].w[dir_index(0, false)];
        }
        total.add(weight * slab_q_for_alphas(alpha, L, start));
        // odometer increment
        std::size_t s = 0;
        while (s < pick.size()) {
            if (++pick[s] < n_atoms) break;
            pick[s] = 0;
            ++s;
        }
        if (s == pick.size()) break;
    }
    return total.value();
}

MeanVar annealed_slab_mc(const EnvironmentLaw& law, std::int64_t L, std::int64_t n_envs,
                         std::uint64_t seed, std::int64_t start) {
    if (law.params().d != 1) throw ConfigError("slab environment sampling is one-dimensional");
    if (n_envs < 2) throw ConfigError("need at least two environment draws");
    std::vector<double> q(static_cast<std::size_t>(n_envs));
    const std::int64_t n_sites = 2 * L - 1;
    std::vector<double> alpha(static_cast<std::size_t>(n_sites));
    for (std::int64_t e = 0; e < n_envs; ++e) {
        for (std::int64_t s = 0; s < n_sites; ++s) {
            Point site{};
            site.coord[0] = -L + 1 + s;
            auto tv = sample_transition_vector(law, derived_seed(seed, StreamTag::EnvOfTrial,
                                                                 static_cast<std::uint64_t>(e)),
                                               site);
            alpha[static_cast<std::size_t>(s)] = tv.plus(0);
        }
        q[static_cast<std::size_t>(e)] = slab_q_for_alphas(alpha, L, start);
    }
    return mean_var(q);
}

QuantizedRateReport quantized_rate_experiment(const EnvironmentLaw& law, const std::vector<int>& m_grid,
                                     const std::vector<std::int64_t>& L_grid, std::int64_t mc_envs,
                                     std::uint64_t seed) {
    if (L_grid.size() < 2) throw ConfigError("need at least two slab widths to fit a rate");

    auto run_curve = [&](const EnvironmentLaw& variant, int m) {
        QuantizedSlabCurve curve;
        curve.m = m;
        std::vector<double> xs, ys;
        for (std::int64_t L : L_grid) {
            SlabCurvePoint pt;
            pt.L = L;
            bool enumerable = variant.kind() == LawKind::Homogeneous;
            if (variant.kind() == LawKind::FiniteSupport) {
                double count_log = static_cast<double>(2 * L - 1) *
                                   std::log(static_cast<double>(variant.atoms().size()));
                enumerable = count_log <= std::log(1.0e7);
            }
            if (enumerable) {
                pt.estimate = annealed_slab_enumerate(variant, L);
                pt.exact = true;
                pt.n_envs = 0;
            } else {
                auto mv =
                    annealed_slab_mc(variant, L, mc_envs,
                                     derived_seed(seed, StreamTag::Scratch,
                                                  static_cast<std::uint64_t>(m) * 1000 + 7,
                                                  static_cast<std::uint64_t>(L)));
                pt.estimate = mv.mean;
                pt.stderr_est = mv.stderr_mean;
                pt.n_envs = mc_envs;
            }
            pt.log_estimate = std::log(pt.estimate);
            curve.points.push_back(pt);
            if (pt.estimate > 0.0) {
                xs.push_back(static_cast<double>(L));
                ys.push_back(pt.log_estimate);
            }
        }
        if (xs.size() >= 2) {
            auto fit = linear_fit(xs, ys);
            curve.rate = -fit.slope;
            curve.r2 = fit.r2;
        }
        return curve;
    };

    QuantizedRateReport report;
    report.curves.push_back(run_curve(law, 0));
    for (int m : m_grid) {
        if (m < 1) throw ConfigError("quantization order must be positive");
        report.curves.push_back(run_curve(quantize_law(law, m), m));
    }
    return report;
}

PathEventComparison path_event_comparison(const EnvironmentLaw& law, std::int64_t window_radius,
                                          std::int64_t x, std::int64_t y, int n_steps) {
    if (law.params().d != 1) throw ConfigError("path comparison is one-dimensional");
    if (law.kind() != LawKind::FiniteSupport && law.kind() != LawKind::Homogeneous)
        throw ConfigError("path comparison enumerates finite-support laws");
    const std::int64_t W = window_radius;
    if (std::abs(x) >= W || std::abs(y) >= W) throw ConfigError("endpoints must be inside the window");

    const std::int64_t n_sites = 2 * W - 1;  // strictly inside (-W, W)
    const auto& atoms = law.atoms();
    const std::size_t n_atoms = atoms.size();
    if (static_cast<double>(n_sites) * std::log(static_cast<double>(n_atoms)) > std::log(1.0e6))
        throw CapacityError("environment assignment count exceeds the diagnostic cap");

    auto dp_prob = [&](const std::vector<double>& alpha) {
        // occupation[s] = P[at site -W+1+s, all previous positions inside]
        std::vector<double> occ(static_cast<std::size_t>(n_sites), 0.0);
        occ[static_cast<std::size_t>(x + W - 1)] = 1.0;
        std::vector<double> next(static_cast<std::size_t>(n_sites));
        for (int t = 0; t < n_steps; ++t) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::int64_t s = 0; s < n_sites; ++s) {
                double p = occ[static_cast<std::size_t>(s)];
                if (p == 0.0) continue;
                double a = alpha[static_cast<std::size_t>(s)];
                if (s + 1 < n_sites) next[static_cast<std::size_t>(s + 1)] += p * a;
                if (s - 1 >= 0) next[static_cast<std::size_t>(s - 1)] += p * (1.0 - a);
            }
            occ.swap(next);
        }
        return occ[static_cast<std::size_t>(y + W - 1)];
    };

    PathEventComparison cmp;
    std::vector<double> alpha(static_cast<std::size_t>(n_sites));

    std::vector<std::size_t> pick(static_cast<std::size_t>(n_sites), 0);
    for (;;) {
        for (std::int64_t s = 0; s < n_sites; ++s)
            alpha[static_cast<std::size_t>(s)] =
                atoms[pick[static_cast<std::size_t>(s)]].w[dir_index(0, false)];
        cmp.sup_env_prob = std::max(cmp.sup_env_prob, dp_prob(alpha));
        std::size_t s = 0;
        while (s < pick.size()) {
            if (++pick[s] < n_atoms) break;
            pick[s] = 0;
            ++s;
        }
        if (s == pick.size()) break;
    }

    std::fill(alpha.begin(), alpha.end(), 0.5);
    cmp.simple_walk_prob = dp_prob(alpha);
    return cmp;
}

}  // namespace rwre
