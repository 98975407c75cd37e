#include "rwre/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rwre/oned.hpp"
#include "rwre/parallel.hpp"
#include "rwre/renorm.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "yes";
        case Verdict::No: return "no";
        default: return "indeterminate";
    }
}

std::vector<Direction> direction_neighborhood(const Direction& ell, double angle) {
    std::vector<Direction> out{ell};
    for (int j = 1; j < ell.d; ++j) {
        const std::vector<double> u = ell.basis(j);
        for (int sgn : {+1, -1}) {
            std::vector<double> v(static_cast<std::size_t>(ell.d));
            for (int i = 0; i < ell.d; ++i)
                v[static_cast<std::size_t>(i)] =
                    std::cos(angle) * ell.ell[static_cast<std::size_t>(i)] +
                    sgn * std::sin(angle) * u[static_cast<std::size_t>(i)];
            out.push_back(make_direction(ell.d, v));
        }
    }
    return out;
}

namespace {

bool same_direction(const Direction& a, const Direction& b) {
    if (a.d != b.d) return false;
    for (int i = 0; i < a.d; ++i)
        if (std::abs(a.ell[static_cast<std::size_t>(i)] - b.ell[static_cast<std::size_t>(i)]) >
            1e-9)
            return false;
    return true;
}

}  // namespace

void ConditionSpec::validate() const {
    if (dir.d < 1 || dir.ell.empty()) throw ConfigError("condition needs a direction");
    if (!(b > 0.0)) throw ConfigError("backtrack ratio must be positive");
    if (kind == ConditionKind::StretchT || kind == ConditionKind::BoxT)
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw ConfigError("stretch exponent must lie in (0,1]");
    if (kind == ConditionKind::PolynomialP && !(M > 0.0))
        throw ConfigError("polynomial degree target must be positive");
    if (kind == ConditionKind::WeakW) {
        if (!(M > 0.0)) throw ConfigError("box size must be positive");
        if (!(lambda1 > 0.0)) throw ConfigError("lambda1 must be positive");
        if (!(c > 0.0)) throw ConfigError("lateral aspect must be positive");
    }
    if (!neighborhood.empty()) {
        bool found = false;
        for (const auto& n : neighborhood) found = found || same_direction(n, dir);
        if (!found) throw ConfigError("direction neighborhood must contain the direction");
    }
}

DecayFit fit_decay(const std::vector<CurvePoint>& curve) {
    if (curve.empty()) throw ConfigError("decay fit needs at least one curve point");
    DecayFit fit;
    fit.curve = curve;
    fit.exp_rate = fit.exp_r2 = fit.stretch_gamma = fit.stretch_rate = fit.stretch_r2 = kNaN;
    fit.poly_degree = kNaN;

    std::vector<double> Ls, logs;
    for (const auto& pt : curve) {
        fit.one_sided_flag = fit.one_sided_flag || pt.one_sided;
        if (!pt.one_sided && pt.p_hat > 0.0 && pt.p_hat <= 1.0 && std::isfinite(pt.log_p)) {
            Ls.push_back(static_cast<double>(pt.L));
            logs.push_back(pt.log_p);
        }
    }
    fit.n_fit_points = static_cast<int>(Ls.size());
    fit.degenerate_zero = fit.n_fit_points == 0 && fit.one_sided_flag;
    if (fit.degenerate_zero) {
        // every probability was an unresolved upper bound: faster than any fit
        fit.super_polynomial = true;
        return fit;
    }
    if (fit.n_fit_points < 2) {
        fit.decay_rejected = true;
        return fit;
    }

    const auto exp_fit = linear_fit(Ls, logs);
    fit.exp_rate = -exp_fit.slope;
    fit.exp_r2 = exp_fit.r2;

    const auto stretch_sse = [&](double g) {
        std::vector<double> xs(Ls.size());
        for (std::size_t i = 0; i < Ls.size(); ++i) xs[i] = std::pow(Ls[i], g);
        return linear_fit(xs, logs).sse;
    };
    fit.stretch_gamma = golden_min(stretch_sse, 0.1, 1.25, 1e-6);
    {
        std::vector<double> xs(Ls.size());
        for (std::size_t i = 0; i < Ls.size(); ++i) xs[i] = std::pow(Ls[i], fit.stretch_gamma);
        const auto sf = linear_fit(xs, logs);
        fit.stretch_rate = -sf.slope;
        fit.stretch_r2 = sf.r2;
    }

    std::vector<double> loglog_slopes;
    for (std::size_t i = 0; i + 1 < Ls.size(); ++i)
        loglog_slopes.push_back((logs[i + 1] - logs[i]) /
                                (std::log(Ls[i + 1]) - std::log(Ls[i])));
    fit.poly_degree = -loglog_slopes.back();
    if (loglog_slopes.size() >= 2) {
        const double first = -loglog_slopes.front();
        const double last = -loglog_slopes.back();
        fit.super_polynomial = last > 0.0 && last >= 1.5 * std::max(first, 1e-12);
    }

    const double L_max = Ls.back();
    fit.decay_rejected = !(fit.exp_rate > 0.0) || fit.exp_r2 < 0.5 || fit.exp_rate * L_max < kLn2;
    return fit;
}

namespace {

// d=1 exact cell: absorption solve per sampled environment between the
// backtrack barrier -ceil(bL) and the forward barrier L.
CurvePoint slab_cell_exact_1d(const EnvironmentLaw& law, double b, std::int64_t L,
                              std::int64_t n_envs, std::uint64_t cell_seed) {
    CurvePoint pt;
    pt.L = L;
    const std::int64_t left = -static_cast<std::int64_t>(std::ceil(b * static_cast<double>(L)));
    const std::int64_t right = L;
    if (left >= 0 || right <= 0) throw ConfigError("slab barriers must bracket the origin");
    if (law.kind() == LawKind::Homogeneous) n_envs = 1;
    if (n_envs < 1) throw ConfigError("slab estimate needs at least one environment");

    std::vector<double> vals(static_cast<std::size_t>(n_envs));
    for (std::int64_t e = 0; e < n_envs; ++e) {
        const std::uint64_t env_seed =
            derived_seed(cell_seed, StreamTag::EnvOfTrial, static_cast<std::uint64_t>(e));
        BirthDeathChain chain;
        chain.left = left;
        chain.right = right;
        chain.alpha.reserve(static_cast<std::size_t>(right - left - 1));
        for (std::int64_t m = left + 1; m < right; ++m) {
            Point p{};
            p.coord[0] = m;
            chain.alpha.push_back(sample_transition_vector(law, env_seed, p).plus(0));
        }
        vals[static_cast<std::size_t>(e)] = solve_absorption(chain).q_at(0);
    }
    const auto mv = mean_var(vals);
    pt.p_hat = mv.mean;
    pt.log_p = pt.p_hat > 0.0 ? std::log(pt.p_hat) : -std::numeric_limits<double>::infinity();
    pt.stderr_est = mv.stderr_mean;
    pt.exact = law.kind() == LawKind::Homogeneous;
    return pt;
}

CurvePoint slab_cell_mc(const EnvironmentLaw& law, const Direction& dir, double b, std::int64_t L,
                        std::int64_t trials, std::uint64_t cell_seed, int jobs,
                        const StepBudget& budget) {
    CurvePoint pt;
    pt.L = L;
    if (trials < 2) throw ConfigError("slab estimate needs at least two trials");
    const std::vector<StopSpec> specs{
        StopHalfSpaceBelow{dir, -b * static_cast<double>(L)},
        StopHalfSpaceAbove{dir, static_cast<double>(L)}};
    std::vector<char> outcome(static_cast<std::size_t>(trials));
    parallel_for_blocks(trials, 1024, jobs, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t t = begin; t < end; ++t) {
            LawView env(law, derived_seed(cell_seed, StreamTag::EnvOfTrial,
                                          static_cast<std::uint64_t>(t)));
            SplitMix64 rng(
                derived_seed(cell_seed, StreamTag::Trial, static_cast<std::uint64_t>(t)));
            const Point origin{};
            const RaceResult rr = run_race(env, origin, specs, rng, budget);
            outcome[static_cast<std::size_t>(t)] = rr.censored ? 2 : (rr.winner == 0 ? 1 : 0);
        }
    });
    std::int64_t hits = 0;
    for (char o : outcome) {
        if (o == 1) ++hits;
        if (o == 2) ++pt.censored;
    }
    if (static_cast<double>(pt.censored) / static_cast<double>(trials) > budget.censor_cap)
        throw CapacityError("censored fraction exceeds the configured cap in the slab estimate");
    if (hits == 0) {
        pt.one_sided = true;
        pt.p_hat = 3.0 / static_cast<double>(trials);  // upper bound, not an estimate
        pt.log_p = std::log(pt.p_hat);
        return pt;
    }
    pt.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    pt.log_p = std::log(pt.p_hat);
    pt.stderr_est = binom_stderr(pt.p_hat, trials);
    return pt;
}

bool exact_1d_eligible(const Direction& dir) {
    return dir.d == 1 && dir.axis_aligned && dir.ell[0] > 0.0;
}

CurvePoint slab_cell(const EnvironmentLaw& law, const Direction& dir, double b, std::int64_t L,
                     std::int64_t trials, std::uint64_t cell_seed, int jobs,
                     const StepBudget& budget) {
    if (exact_1d_eligible(dir)) return slab_cell_exact_1d(law, b, L, trials, cell_seed);
    return slab_cell_mc(law, dir, b, L, trials, cell_seed, jobs, budget);
}

void check_grid(const std::vector<std::int64_t>& L_grid) {
    if (L_grid.empty()) throw ConfigError("the size grid must not be empty");
    for (std::size_t i = 0; i < L_grid.size(); ++i) {
        if (L_grid[i] < 1) throw ConfigError("grid sizes must be positive");
        if (i > 0 && L_grid[i] <= L_grid[i - 1])
            throw ConfigError("the size grid must be strictly increasing");
    }
}

}  // namespace

DecayFit estimate_slab_curve(const EnvironmentLaw& law, const ConditionSpec& spec,
                             const std::vector<std::int64_t>& L_grid, std::int64_t trials,
                             std::uint64_t seed, int jobs, const StepBudget& budget) {
    spec.validate();
    check_grid(L_grid);
    if (law.params().d != spec.dir.d) throw ConfigError("law and direction dimensions differ");
    const std::vector<Direction> hood =
        spec.neighborhood.empty() ? direction_neighborhood(spec.dir) : spec.neighborhood;

    std::vector<CurvePoint> curve;
    curve.reserve(L_grid.size());
    for (const std::int64_t L : L_grid) {
        CurvePoint worst;
        bool have = false;
        for (std::size_t a = 0; a < hood.size(); ++a) {
            const std::uint64_t cell_seed = derived_seed(seed, StreamTag::Scratch,
                                                         static_cast<std::uint64_t>(L),
                                                         static_cast<std::uint64_t>(a));
            const CurvePoint pt =
                slab_cell(law, hood[a], spec.b, L, trials, cell_seed, jobs, budget);
            if (!have || pt.p_hat > worst.p_hat) {
                worst = pt;
                have = true;
            }
        }
        curve.push_back(worst);
    }
    return fit_decay(curve);
}

WeakConditionReport estimate_condition_W(const EnvironmentLaw& law, const Direction& dir, double c,
                                         double M, double lambda1, std::int64_t envs,
                                         std::int64_t trials, std::uint64_t seed, int jobs,
                                         const StepBudget& budget) {
    if (!(lambda1 > 0.0)) throw ConfigError("lambda1 must be positive");
    if (!(M > 0.0) || !(c > 0.0)) throw ConfigError("box size and aspect must be positive");
    if (envs < 1) throw ConfigError("expectation estimate needs at least one environment");
    const int d = law.params().d;
    if (dir.d != d) throw ConfigError("law and direction dimensions differ");

    WeakConditionReport report;
    report.lambda1 = lambda1;
    report.M = M;
    report.c = c;
    report.side_condition_ok = M > 1.0 / lambda1;
    report.degenerate = lambda1 >= 1.0;

    if (law.kind() == LawKind::Homogeneous) envs = 1;  // no environment variance
    report.n_envs = envs;

    const Point origin{};
    const BoxSpec b1 = box_b1tilde_free(d, c, M, origin, dir);
    const LatticeBox window = companion_b2(b1).lattice_box();

    std::vector<double> sups(static_cast<std::size_t>(envs));
    parallel_for_blocks(envs, 4, jobs, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t e = begin; e < end; ++e) {
            const std::uint64_t env_seed =
                derived_seed(seed, StreamTag::EnvOfTrial, static_cast<std::uint64_t>(e));
            const QuenchedEnvironment qenv = sample_environment(law, window, env_seed);
            TableView view(qenv);
            const BoxStatus st = classify_scale0(view, b1, lambda1, trials, env_seed, budget);
            sups[static_cast<std::size_t>(e)] = st.sup_exit;
        }
    });

    const auto mv = mean_var(sups);
    report.value = mv.mean;
    report.stderr_est = mv.stderr_mean;
    if (report.degenerate) {
        report.verdict = Verdict::Yes;
    } else if (report.value + 3.0 * report.stderr_est < lambda1) {
        report.verdict = Verdict::Yes;
    } else if (report.value - 3.0 * report.stderr_est >= lambda1) {
        report.verdict = Verdict::No;
    } else {
        report.verdict = Verdict::Indeterminate;
    }
    return report;
}

DecayFit estimate_condition_boxT(const EnvironmentLaw& law, const ConditionSpec& spec,
                                 const std::vector<std::int64_t>& L_grid, std::int64_t trials,
                                 std::uint64_t seed, int jobs, const StepBudget& budget) {
    spec.validate();
    check_grid(L_grid);
    const int d = law.params().d;
    if (spec.dir.d != d) throw ConfigError("law and direction dimensions differ");

    std::vector<CurvePoint> curve;
    curve.reserve(L_grid.size());
    for (const std::int64_t L : L_grid) {
        const std::uint64_t cell_seed = derived_seed(seed, StreamTag::Scratch,
                                                     static_cast<std::uint64_t>(L), 0);
        if (d == 1) {
            // the box degenerates to the unit-ratio slab; share everything
            curve.push_back(slab_cell(law, spec.dir, 1.0, L, trials, cell_seed, jobs, budget));
            continue;
        }
        if (L > 64) throw CapacityError("box sizes above 64 exceed the desk-scale budget");
        if (trials < 2) throw ConfigError("box estimate needs at least two trials");
        const BoxSpec box = box_b0(d, static_cast<double>(L), spec.dir);
        std::vector<char> outcome(static_cast<std::size_t>(trials));
        parallel_for_blocks(trials, 1024, jobs,
                            [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            for (std::int64_t t = begin; t < end; ++t) {
                LawView env(law, derived_seed(cell_seed, StreamTag::EnvOfTrial,
                                              static_cast<std::uint64_t>(t)));
                SplitMix64 rng(
                    derived_seed(cell_seed, StreamTag::Trial, static_cast<std::uint64_t>(t)));
                const Point origin{};
                const BoxExit exit = box_exit_face(env, box, origin, rng, budget);
                outcome[static_cast<std::size_t>(t)] =
                    exit.race.censored ? 2 : (exit.face != Membership::BoundaryPlus ? 1 : 0);
            }
        });
        CurvePoint pt;
        pt.L = L;
        std::int64_t hits = 0;
        for (char o : outcome) {
            if (o == 1) ++hits;
            if (o == 2) ++pt.censored;
        }
        if (static_cast<double>(pt.censored) / static_cast<double>(trials) > budget.censor_cap)
            throw CapacityError("censored fraction exceeds the configured cap in the box estimate");
        if (hits == 0) {
            pt.one_sided = true;
            pt.p_hat = 3.0 / static_cast<double>(trials);
            pt.log_p = std::log(pt.p_hat);
        } else {
            pt.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
            pt.log_p = std::log(pt.p_hat);
            pt.stderr_est = binom_stderr(pt.p_hat, trials);
        }
        curve.push_back(pt);
    }
    return fit_decay(curve);
}

TransienceReport transience_probe(const EnvironmentLaw& law, const Direction& dir,
                                  const std::vector<std::int64_t>& n_grid, std::int64_t trials,
                                  std::uint64_t seed, int jobs) {
    check_grid(n_grid);
    if (trials < 2) throw ConfigError("transience probe needs at least two trials");
    const int d = law.params().d;
    if (dir.d != d) throw ConfigError("law and direction dimensions differ");

    TransienceReport report;
    report.n_grid = n_grid;
    const std::int64_t n_max = n_grid.back();
    const std::size_t n_levels = n_grid.size();

    std::vector<char> escapes(static_cast<std::size_t>(trials) * n_levels);
    parallel_for_blocks(trials, 64, jobs, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        std::vector<double> proj(static_cast<std::size_t>(n_max) + 1);
        for (std::int64_t t = begin; t < end; ++t) {
            LawView env(law,
                        derived_seed(seed, StreamTag::EnvOfTrial, static_cast<std::uint64_t>(t)));
            SplitMix64 rng(derived_seed(seed, StreamTag::Trial, static_cast<std::uint64_t>(t)));
            Point x{};
            proj[0] = 0.0;
            for (std::int64_t n = 1; n <= n_max; ++n) {
                const SiteTrans row = env.site(x);
                const double u = rng.u01();
                double acc = 0.0;
                int move = 2 * d - 1;
                for (int j = 0; j < 2 * d; ++j) {
                    acc += row.w[static_cast<std::size_t>(j)];
                    if (u < acc) {
                        move = j;
                        break;
                    }
                }
                const int axis = move >> 1;
                x.coord[static_cast<std::size_t>(axis)] += (move & 1) ? -1 : +1;
                proj[static_cast<std::size_t>(n)] = dir.dot(x);
            }
            // suffix minima: escape at n0 means the walk never returns below
            // its halfway mark after time n0 (within the horizon)
            double running = proj[static_cast<std::size_t>(n_max)];
            std::size_t level = n_levels;
            for (std::int64_t n = n_max; n >= 0; --n) {
                running = std::min(running, proj[static_cast<std::size_t>(n)]);
                while (level > 0 && n_grid[level - 1] == n) {
                    --level;
                    escapes[static_cast<std::size_t>(t) * n_levels + level] =
                        running > proj[static_cast<std::size_t>(n_grid[level] / 2)] ? 1 : 0;
                }
            }
        }
    });

    report.escape_fraction.resize(n_levels);
    for (std::size_t i = 0; i < n_levels; ++i) {
        std::int64_t count = 0;
        for (std::int64_t t = 0; t < trials; ++t)
            count += escapes[static_cast<std::size_t>(t) * n_levels + i];
        report.escape_fraction[i] = static_cast<double>(count) / static_cast<double>(trials);
    }

    report.velocity = velocity_estimate(law, derived_seed(seed, StreamTag::Scratch, 0xBA11), n_max,
                                        trials, jobs, true);
    report.drift_speed = 0.0;
    for (int i = 0; i < d; ++i)
        report.drift_speed +=
            report.velocity.mean[static_cast<std::size_t>(i)] * dir.ell[static_cast<std::size_t>(i)];

    const double final_frac = report.escape_fraction.back();
    if (final_frac >= 1.0 - 1e-3)
        report.verdict = Verdict::Yes;
    else if (final_frac < 0.9)
        report.verdict = Verdict::No;
    else
        report.verdict = Verdict::Indeterminate;
    return report;
}

HierarchyReport hierarchy_report(const EnvironmentLaw& law, const HierarchyConfig& cfg) {
    HierarchyReport report;
    report.caveat = "consistency evidence, not implication proof";

    report.weak = estimate_condition_W(law, cfg.dir, cfg.c, cfg.M, cfg.lambda1, cfg.envs,
                                       cfg.trials, derived_seed(cfg.seed, StreamTag::Scratch, 1),
                                       cfg.jobs, cfg.budget);
    report.weak_verdict = report.weak.verdict;

    ConditionSpec slab_spec;
    slab_spec.kind = ConditionKind::StretchT;
    slab_spec.dir = cfg.dir;
    slab_spec.gamma = cfg.gamma;
    slab_spec.b = cfg.b;
    report.slab = estimate_slab_curve(law, slab_spec, cfg.slab_grid, cfg.trials,
                                      derived_seed(cfg.seed, StreamTag::Scratch, 2), cfg.jobs,
                                      cfg.budget);

    ConditionSpec box_spec;
    box_spec.kind = ConditionKind::BoxT;
    box_spec.dir = cfg.dir;
    box_spec.gamma = cfg.gamma;
    report.box = estimate_condition_boxT(law, box_spec, cfg.box_grid, cfg.trials,
                                         derived_seed(cfg.seed, StreamTag::Scratch, 3), cfg.jobs,
                                         cfg.budget);

    report.transience = transience_probe(law, cfg.dir, cfg.n_grid, cfg.trials,
                                         derived_seed(cfg.seed, StreamTag::Scratch, 4), cfg.jobs);
    report.transience_verdict = report.transience.verdict;

    const auto stretch_verdict = [&](const DecayFit& fit) {
        if (fit.degenerate_zero) return Verdict::Yes;  // faster than any stretch
        if (fit.decay_rejected) return Verdict::No;
        if (fit.stretch_gamma >= cfg.gamma - 0.1) return Verdict::Yes;
        return Verdict::Indeterminate;
    };
    report.stretch_verdict = stretch_verdict(report.slab);
    report.box_verdict = stretch_verdict(report.box);

    if (report.slab.degenerate_zero || (!report.slab.decay_rejected &&
                                        (report.slab.super_polynomial ||
                                         report.slab.poly_degree >= cfg.M)))
        report.poly_verdict = Verdict::Yes;
    else if (report.slab.decay_rejected)
        report.poly_verdict = Verdict::No;
    else
        report.poly_verdict = Verdict::Indeterminate;
    return report;
}

nlohmann::json decay_fit_json(const DecayFit& fit) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& pt : fit.curve)
        curve.push_back({{"L", pt.L},
                         {"p_hat", pt.p_hat},
                         {"log_p", pt.log_p},
                         {"stderr", pt.stderr_est},
                         {"exact", pt.exact},
                         {"one_sided", pt.one_sided},
                         {"censored", pt.censored}});
    return {{"curve", curve},
            {"exp", {{"rate", fit.exp_rate}, {"r2", fit.exp_r2}}},
            {"stretched",
             {{"gamma", fit.stretch_gamma}, {"rate", fit.stretch_rate}, {"r2", fit.stretch_r2}}},
            {"poly", {{"degree", fit.poly_degree}, {"super_polynomial", fit.super_polynomial}}},
            {"degenerate_zero", fit.degenerate_zero},
            {"decay_rejected", fit.decay_rejected},
            {"one_sided_flag", fit.one_sided_flag},
            {"n_fit_points", fit.n_fit_points}};
}

nlohmann::json weak_report_json(const WeakConditionReport& report) {
    return {{"value", report.value},
            {"stderr", report.stderr_est},
            {"lambda1", report.lambda1},
            {"M", report.M},
            {"c", report.c},
            {"side_condition_ok", report.side_condition_ok},
            {"degenerate", report.degenerate},
            {"verdict", verdict_name(report.verdict)},
            {"n_envs", report.n_envs}};
}

nlohmann::json transience_report_json(const TransienceReport& report) {
    return {{"n_grid", report.n_grid},
            {"escape_fraction", report.escape_fraction},
            {"velocity_mean", report.velocity.mean},
            {"velocity_stderr", report.velocity.stderr_},
            {"drift_speed", report.drift_speed},
            {"verdict", verdict_name(report.verdict)}};
}

nlohmann::json hierarchy_report_json(const HierarchyReport& report) {
    return {{"caveat", report.caveat},
            {"weak", weak_report_json(report.weak)},
            {"slab", decay_fit_json(report.slab)},
            {"box", decay_fit_json(report.box)},
            {"transience", transience_report_json(report.transience)},
            {"verdicts",
             {{"weak", verdict_name(report.weak_verdict)},
              {"stretch", verdict_name(report.stretch_verdict)},
              {"poly", verdict_name(report.poly_verdict)},
              {"box", verdict_name(report.box_verdict)},
              {"transience", verdict_name(report.transience_verdict)}}}};
}

std::string decay_fit_csv(const DecayFit& fit) {
    std::ostringstream os;
    os << "L,p_hat,log_p,stderr,exact,one_sided,censored\n";
    os.precision(17);
    for (const auto& pt : fit.curve)
        os << pt.L << ',' << pt.p_hat << ',' << pt.log_p << ',' << pt.stderr_est << ','
           << (pt.exact ? 1 : 0) << ',' << (pt.one_sided ? 1 : 0) << ',' << pt.censored << '\n';
    return os.str();
}

}  // namespace rwre
