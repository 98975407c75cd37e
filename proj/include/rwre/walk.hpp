#pragma once
// Nearest-neighbor walk simulation in a fixed environment view: racing
// families of stopping rules, box-exit classification, lateral-displacement
// events, and velocity estimation.

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/geometry.hpp"
#include "rwre/rng.hpp"

namespace rwre {

// Stopping rules. Frame-based rules measure displacement from the walk's
// start in the direction frame; box rules use absolute coordinates.
struct StopHalfSpaceAbove {  // X . ell >= level
    Direction dir;
    double level = 0.0;
};
struct StopHalfSpaceBelow {  // X . ell <= level
    Direction dir;
    double level = 0.0;
};
struct StopExitBox {  // X leaves the box
    BoxSpec box;
};
struct StopExitWindow {  // X leaves a lattice window (guards table views)
    LatticeBox window;
};
struct StopLateralAbove {  // (X - start) . R e_axis >= level, axis >= 1
    Direction dir;
    int axis = 1;
    double level = 0.0;
};
struct StopLateralBelow {  // (X - start) . R e_axis <= level
    Direction dir;
    int axis = 1;
    double level = 0.0;
};
struct StopStripChange {  // strip index differs from the start's
    StripIndexer strip;
};
struct StopEnterWindow {  // X hits a target set (hitting time of a window)
    LatticeBox window;
};

using StopSpec = std::variant<StopHalfSpaceAbove, StopHalfSpaceBelow, StopExitBox, StopExitWindow,
                              StopLateralAbove, StopLateralBelow, StopStripChange, StopEnterWindow>;

bool stop_triggered(const StopSpec& spec, const Point& x, const Point& start, int d);

struct StepBudget {
    std::int64_t max_steps = 10'000'000;
    double censor_cap = 0.001;  // estimators refuse above this censored fraction
};

struct RaceResult {
    int winner = -1;  // index into the spec list, -1 if censored
    Point site{};     // where the walk was when the race ended
    std::int64_t steps = 0;
    bool censored = false;
};

// Observes every position of the walk, including the start; used by strip
// statistics and trace-based diagnostics.
using StepObserver = std::function<void(std::int64_t step, const Point&)>;

// Runs the walk until the first stopping rule fires (rules are checked at
// time 0 too) or the budget runs out. Ties go to the lowest spec index.
RaceResult run_race(const EnvView& env, const Point& start, const std::vector<StopSpec>& specs,
                    SplitMix64& rng, const StepBudget& budget, const StepObserver& observer = {});

// Exit-face classification for a single box.
struct BoxExit {
    Membership face = Membership::Exterior;  // BoundaryPlus or Boundary
    RaceResult race;
};
BoxExit box_exit_face(const EnvView& env, const BoxSpec& box, const Point& start, SplitMix64& rng,
                      const StepBudget& budget);

// True when some lateral frame coordinate reaches +/- halfwidth before the
// walk leaves the box. One-dimensional boxes have no lateral directions, so
// the event never fires there.
struct LateralEvent {
    bool lateral = false;
    bool censored = false;
    RaceResult race;
};
LateralEvent lateral_event_indicator(const EnvView& env, const BoxSpec& box, double halfwidth,
                                     const Point& start, SplitMix64& rng, const StepBudget& budget);

// X_n / n averaged across trials. Annealed mode draws a fresh environment
// per trial; quenched mode shares one environment stream. Results are
// independent of the worker count (fixed-block reduction).
struct VelocityEstimate {
    std::vector<double> mean;    // per coordinate
    std::vector<double> stderr_; // per coordinate
    std::int64_t trials = 0;
    std::int64_t n_steps = 0;
};
VelocityEstimate velocity_estimate(const EnvironmentLaw& law, std::uint64_t master_seed,
                                   std::int64_t n_steps, std::int64_t trials, int jobs,
                                   bool annealed = true);

}  // namespace rwre
