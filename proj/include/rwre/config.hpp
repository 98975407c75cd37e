#pragma once
// Strict-schema JSON experiment configuration and the dispatcher that turns a
// validated config into a deterministic result payload plus a run manifest.
// Unknown keys are rejected everywhere. Payloads are pure functions of
// (config, seed, tool version); wall-clock data lives only in the manifest.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwre/conditions.hpp"
#include "rwre/env.hpp"
#include "rwre/geometry.hpp"
#include "rwre/renorm.hpp"
#include "rwre/walk.hpp"

#include "json.hpp"

namespace rwre {

const char* tool_version();

// Experiments runnable from a config file, in dispatch order.
const std::vector<std::string>& experiment_names();

struct ParsedConfig {
    std::string experiment;
    std::optional<EnvironmentLaw> law;  // absent for environment-free experiments
    std::uint64_t seed = 1;
    int jobs = 1;
    StepBudget budget{};
    Direction dir;
    nlohmann::json params;     // experiment-specific block, validated
    nlohmann::json canonical;  // normalized config echoed into the payload (no jobs)
};

// Throws ConfigError on schema violations, unknown keys, or bad values.
ParsedConfig parse_config(const nlohmann::json& j);
ParsedConfig parse_config_file(const std::string& path);

struct RunOutcome {
    int exit_code = 0;      // 0 ok, 3 capacity-refused, 4 indeterminate verdict
    nlohmann::json payload; // report.json body (deterministic)
    std::string csv;        // curve export; empty when the experiment has none
};

// Runs the configured experiment. Capacity refusals that carry a suggested
// replacement config return exit_code 3 with a diagnostic payload instead of
// throwing; hard errors still throw.
RunOutcome run_experiment(const ParsedConfig& cfg);

std::string config_hash(const nlohmann::json& canonical);

nlohmann::json make_manifest(const ParsedConfig& cfg, double wall_ms, int exit_code);

// Machine-readable diagnostic body used by the CLI for error reporting.
nlohmann::json error_json(const std::string& code, const std::string& message);

}  // namespace rwre
