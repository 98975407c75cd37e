#include "rwre/walk.hpp"

#include <cassert>
#include <cmath>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/stats.hpp"

namespace rwre {

bool stop_triggered(const StopSpec& spec, const Point& x, const Point& start, int d) {
    (void)d;
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, StopHalfSpaceAbove>) {
                return s.dir.dot(x) >= s.level;
            } else if constexpr (std::is_same_v<T, StopHalfSpaceBelow>) {
                return s.dir.dot(x) <= s.level;
            } else if constexpr (std::is_same_v<T, StopExitBox>) {
                return !s.box.contains(x);
            } else if constexpr (std::is_same_v<T, StopExitWindow>) {
                return !s.window.contains(x);
            } else if constexpr (std::is_same_v<T, StopLateralAbove>) {
                double y[kMaxDim];
                s.dir.frame_coords(x, start, y);
                return y[s.axis] >= s.level;
            } else if constexpr (std::is_same_v<T, StopLateralBelow>) {
                double y[kMaxDim];
                s.dir.frame_coords(x, start, y);
                return y[s.axis] <= s.level;
            } else if constexpr (std::is_same_v<T, StopStripChange>) {
                return s.strip.index(x) != s.strip.index(start);
            } else {
                static_assert(std::is_same_v<T, StopEnterWindow>);
                return s.window.contains(x);
            }
        },
        spec);
}

namespace {

int check_specs(const std::vector<StopSpec>& specs, const Point& x, const Point& start, int d) {
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (stop_triggered(specs[i], x, start, d)) return static_cast<int>(i);
    return -1;
}

}  // namespace

RaceResult run_race(const EnvView& env, const Point& start, const std::vector<StopSpec>& specs,
                    SplitMix64& rng, const StepBudget& budget, const StepObserver& observer) {
    const int d = env.d();
    RaceResult res;
    Point x = start;
    if (observer) observer(0, x);
    res.winner = check_specs(specs, x, start, d);
    if (res.winner >= 0) {
        res.site = x;
        return res;
    }
    for (std::int64_t n = 1; n <= budget.max_steps; ++n) {
        const SiteTrans row = env.site(x);
        const double u = rng.u01();
        double acc = 0.0;
        int move = 2 * d - 1;  // fall through to the last direction on rounding slack
        for (int j = 0; j < 2 * d; ++j) {
            acc += row.w[static_cast<std::size_t>(j)];
            if (u < acc) {
                move = j;
                break;
            }
        }
        const int axis = move >> 1;
        x.coord[static_cast<std::size_t>(axis)] += (move & 1) ? -1 : +1;
        if (observer) observer(n, x);
        res.winner = check_specs(specs, x, start, d);
        if (res.winner >= 0) {
            res.site = x;
            res.steps = n;
            return res;
        }
    }
    res.site = x;
    res.steps = budget.max_steps;
    res.censored = true;
    return res;
}

BoxExit box_exit_face(const EnvView& env, const BoxSpec& box, const Point& start, SplitMix64& rng,
                      const StepBudget& budget) {
    if (!box.contains(start)) throw ConfigError("box exit requires an interior start");
    BoxExit out;
    out.race = run_race(env, start, {StopExitBox{box}}, rng, budget);
    if (!out.race.censored) out.face = box.classify(out.race.site);
    return out;
}

LateralEvent lateral_event_indicator(const EnvView& env, const BoxSpec& box, double halfwidth,
                                     const Point& start, SplitMix64& rng,
                                     const StepBudget& budget) {
    const int d = env.d();
    std::vector<StopSpec> specs;
    for (int axis = 1; axis < d; ++axis) {
        specs.push_back(StopLateralAbove{box.dir, axis, halfwidth});
        specs.push_back(StopLateralBelow{box.dir, axis, -halfwidth});
    }
    const int n_lateral = static_cast<int>(specs.size());
    specs.push_back(StopExitBox{box});
    LateralEvent ev;
    ev.race = run_race(env, start, specs, rng, budget);
    ev.censored = ev.race.censored;
    ev.lateral = !ev.censored && ev.race.winner < n_lateral;
    return ev;
}

VelocityEstimate velocity_estimate(const EnvironmentLaw& law, std::uint64_t master_seed,
                                   std::int64_t n_steps, std::int64_t trials, int jobs,
                                   bool annealed) {
    if (n_steps < 1 || trials < 2) throw ConfigError("velocity estimate needs steps and >= 2 trials");
    const int d = law.params().d;
    // displacement-per-step samples, trial-major
    std::vector<double> samples(static_cast<std::size_t>(trials) * static_cast<std::size_t>(d));
    const std::uint64_t quenched_env_seed = derived_seed(master_seed, StreamTag::EnvOfTrial, 0);

    parallel_for_blocks(trials, 256, jobs, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t t = begin; t < end; ++t) {
            const std::uint64_t env_seed =
                annealed ? derived_seed(master_seed, StreamTag::EnvOfTrial,
                                        static_cast<std::uint64_t>(t))
                         : quenched_env_seed;
            LawView env(law, env_seed);
            SplitMix64 rng(derived_seed(master_seed, StreamTag::Trial,
                                        static_cast<std::uint64_t>(t)));
            Point x{};
            for (std::int64_t n = 0; n < n_steps; ++n) {
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
            }
            for (int i = 0; i < d; ++i)
                samples[static_cast<std::size_t>(t) * static_cast<std::size_t>(d) +
                        static_cast<std::size_t>(i)] =
                    static_cast<double>(x.coord[static_cast<std::size_t>(i)]) /
                    static_cast<double>(n_steps);
        }
    });

    VelocityEstimate est;
    est.trials = trials;
    est.n_steps = n_steps;
    est.mean.resize(static_cast<std::size_t>(d));
    est.stderr_.resize(static_cast<std::size_t>(d));
    std::vector<double> coord(static_cast<std::size_t>(trials));
    for (int i = 0; i < d; ++i) {
        for (std::int64_t t = 0; t < trials; ++t)
            coord[static_cast<std::size_t>(t)] =
                samples[static_cast<std::size_t>(t) * static_cast<std::size_t>(d) +
                        static_cast<std::size_t>(i)];
        auto mv = mean_var(coord);
        est.mean[static_cast<std::size_t>(i)] = mv.mean;
        est.stderr_[static_cast<std::size_t>(i)] = mv.stderr_mean;
    }
    return est;
}

}  // namespace rwre
