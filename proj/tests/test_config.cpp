#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "rwre/config.hpp"
#include "rwre/env.hpp"
#include "rwre/errors.hpp"

using namespace rwre;
using nlohmann::json;

namespace {

json velocity_config(std::int64_t seed = 7, int jobs = 1) {
    return {{"experiment", "velocity"},
            {"seed", seed},
            {"jobs", jobs},
            {"law",
             {{"kind", "finite_support"},
              {"d", 2},
              {"kappa", 0.05},
              {"atoms",
               json::array({{{"weights", {0.40, 0.10, 0.30, 0.20}}, {"prob", 0.5}},
                            {{"weights", {0.25, 0.25, 0.25, 0.25}}, {"prob", 0.5}}})}}},
            {"params", {{"n_steps", 200}, {"trials", 500}, {"annealed", true}}}};
}

json homog_config(const std::string& experiment, double up, json params, std::int64_t seed = 11) {
    return {{"experiment", experiment},
            {"seed", seed},
            {"law", {{"kind", "homogeneous"}, {"d", 1}, {"kappa", 0.05}, {"weights", {up, 1.0 - up}}}},
            {"params", std::move(params)}};
}

json desk_hierarchy() {
    return {{"L0", 10}, {"N0", 4}, {"Ntilde0", 4}, {"c_tilde", 1.0}, {"k_max", 1}};
}

}  // namespace

TEST_CASE("config schema: unknown keys are rejected at every level") {
    CHECK_NOTHROW(parse_config(velocity_config()));

    json top = velocity_config();
    top["extra"] = 1;
    CHECK_THROWS_AS(parse_config(top), ConfigError);

    json law = velocity_config();
    law["law"]["color"] = "blue";
    CHECK_THROWS_AS(parse_config(law), ConfigError);

    json atom = velocity_config();
    atom["law"]["atoms"][0]["junk"] = 3;
    CHECK_THROWS_AS(parse_config(atom), ConfigError);

    json budget = velocity_config();
    budget["budget"] = {{"max_steps", 100}, {"fuel", 2}};
    CHECK_THROWS_AS(parse_config(budget), ConfigError);

    json params = velocity_config();
    params["params"]["bogus"] = true;
    CHECK_THROWS_AS(run_experiment(parse_config(params)), ConfigError);
}

TEST_CASE("config schema: values and types are validated") {
    json bad_seed = velocity_config();
    bad_seed["seed"] = -1;
    CHECK_THROWS_AS(parse_config(bad_seed), ConfigError);

    json bad_jobs = velocity_config();
    bad_jobs["jobs"] = 0;
    CHECK_THROWS_AS(parse_config(bad_jobs), ConfigError);

    json bad_exp = velocity_config();
    bad_exp["experiment"] = "teleport";
    CHECK_THROWS_AS(parse_config(bad_exp), ConfigError);

    json bad_kind = velocity_config();
    bad_kind["law"]["kind"] = "mystery";
    CHECK_THROWS_AS(parse_config(bad_kind), ConfigError);

    json bad_steps = velocity_config();
    bad_steps["params"]["n_steps"] = "many";
    CHECK_THROWS_AS(run_experiment(parse_config(bad_steps)), ConfigError);

    json bad_dir = velocity_config();
    bad_dir["direction"] = {1.0};  // law is two-dimensional
    CHECK_THROWS_AS(parse_config(bad_dir), ConfigError);

    json bad_budget = velocity_config();
    bad_budget["budget"] = {{"censor_cap", 1.5}};
    CHECK_THROWS_AS(parse_config(bad_budget), ConfigError);

    // law-dependent experiments refuse to run without one
    json lawless{{"experiment", "velocity"}, {"params", {{"n_steps", 10}, {"trials", 10}}}};
    CHECK_THROWS_AS(run_experiment(parse_config(lawless)), ConfigError);
}

TEST_CASE("config files: missing and malformed inputs") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/rwre.json"), ConfigError);

    const auto path = std::filesystem::temp_directory_path() / "rwre-test-bad-config.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(parse_config_file(path.string()), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("canonical config excludes the worker count") {
    const ParsedConfig one = parse_config(velocity_config(7, 1));
    const ParsedConfig eight = parse_config(velocity_config(7, 8));
    CHECK(one.canonical == eight.canonical);
    CHECK(config_hash(one.canonical) == config_hash(eight.canonical));

    const ParsedConfig other_seed = parse_config(velocity_config(8, 1));
    CHECK(config_hash(one.canonical) != config_hash(other_seed.canonical));
}

TEST_CASE("velocity payloads are deterministic and jobs-invariant") {
    const ParsedConfig cfg = parse_config(velocity_config(7, 1));
    const RunOutcome a = run_experiment(cfg);
    const RunOutcome b = run_experiment(cfg);
    const RunOutcome c = run_experiment(parse_config(velocity_config(7, 4)));

    CHECK(a.exit_code == 0);
    CHECK(a.payload.dump() == b.payload.dump());
    CHECK(a.payload.dump() == c.payload.dump());

    CHECK(a.payload["format_version"] == 1);
    CHECK(a.payload["tool_version"] == tool_version());
    CHECK(a.payload["experiment"] == "velocity");
    CHECK(a.payload["config"] == cfg.canonical);
    CHECK(a.payload["result"]["mean"].size() == 2);
    CHECK(a.payload["result"]["annealed"] == true);
    CHECK(a.csv.empty());
}

TEST_CASE("manifest carries the run metadata, payload carries none") {
    const ParsedConfig cfg = parse_config(velocity_config(7, 3));
    const json m = make_manifest(cfg, 12.5, 0);
    CHECK(m["config_hash"] == config_hash(cfg.canonical));
    CHECK(m["tool_version"] == tool_version());
    CHECK(m["experiment"] == "velocity");
    CHECK(m["seed"] == 7);
    CHECK(m["jobs"] == 3);
    CHECK(m["wall_ms"] == 12.5);
    CHECK(m["exit_code"] == 0);
}

TEST_CASE("slab curve experiment writes a curve export") {
    const json raw =
        homog_config("slab_curve", 0.9, {{"b", 1.0}, {"L_grid", {10, 20, 30}}, {"trials", 50}});
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 0);
    CHECK(out.payload["result"]["curve"].size() == 3);
    CHECK(out.payload["result"]["decay_rejected"] == false);
    CHECK(out.csv.rfind("L,p_hat", 0) == 0);
}

TEST_CASE("starved budgets surface as capacity errors") {
    json raw = velocity_config();
    raw["experiment"] = "slab_curve";
    raw["params"] = {{"b", 1.0}, {"L_grid", {30}}, {"trials", 100}};
    raw["budget"] = {{"max_steps", 5}, {"censor_cap", 0.0}};
    CHECK_THROWS_AS(run_experiment(parse_config(raw)), CapacityError);
}

TEST_CASE("oversized hierarchies become capacity errors, not schema errors") {
    json raw{{"experiment", "constants"},
             {"params",
              {{"hierarchy",
                {{"L0", 1000000}, {"N0", 1000000}, {"k_max", 10}}}}}};
    CHECK_THROWS_AS(run_experiment(parse_config(raw)), CapacityError);
}

TEST_CASE("constants experiment exposes the full ladder") {
    json raw{{"experiment", "constants"},
             {"params", {{"hierarchy", desk_hierarchy()}, {"d", 1}}}};
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 0);
    const json& r = out.payload["result"];
    CHECK(r["c_annealed"].size() == 61);
    CHECK(r["c_bounding"].size() == 61);
    CHECK(r["c_quenched"].size() == 61);
    CHECK(r["lambda2"].get<double>() == doctest::Approx(std::pow(92.0 / 11.0, 2)).epsilon(1e-12));
    CHECK(r["hierarchy"]["L0"] == 10);
    CHECK(r["hierarchy"]["production_defaults"] == false);
}

TEST_CASE("cascade refuses production constants with a usable counter-offer") {
    json raw = homog_config(
        "cascade", 0.9,
        {{"hierarchy", {{"L0", 11}, {"production_defaults", true}, {"k_max", 1}}},
         {"k_top", 1},
         {"envs_per_scale", 4},
         {"trials", 10},
         {"lambda1", 0.25}});
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 3);
    REQUIRE(out.payload.contains("error"));
    CHECK(out.payload["error"]["code"] == "infeasible_constants");
    CHECK(out.payload["error"]["estimate_bytes"].is_number());
    CHECK(out.payload["error"]["cap_bytes"].is_number());
    // the refusal is a diagnostic, not a result envelope
    CHECK_FALSE(out.payload.contains("format_version"));
    const json& sug = out.payload["error"]["suggested_config"];
    CHECK(sug["params"]["hierarchy"]["L0"] == 10);
    CHECK(sug["params"]["k_top"] == 1);

    // the suggested config parses and passes the feasibility gate
    json retry = raw;
    retry["params"] = sug["params"];
    const RunOutcome ok = run_experiment(parse_config(retry));
    CHECK(ok.exit_code == 0);
}

TEST_CASE("tiny cascade run end to end") {
    json raw = homog_config("cascade", 0.9,
                            {{"hierarchy", desk_hierarchy()},
                             {"k_top", 1},
                             {"envs_per_scale", 4},
                             {"trials", 10},
                             {"lambda1", 0.25}});
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 0);
    CHECK(out.payload["result"]["scales"].size() == 2);
    CHECK(out.payload["result"]["constants"]["lambda1"] == 0.25);
}

TEST_CASE("null model run reports per-scale union-bound rows") {
    json raw{{"experiment", "null_model"},
             {"seed", 5},
             {"params",
              {{"hierarchy", desk_hierarchy()},
               {"k_top", 1},
               {"p_mark", 0.25},
               {"samples_per_scale", 500}}}};
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 0);
    REQUIRE(out.payload["result"]["rows"].size() == 1);
    CHECK(out.payload["result"]["rows"][0]["pairs"] == 15);
    CHECK(out.payload["result"]["rows"][0]["within"] == true);
}

TEST_CASE("indeterminate verdicts exit with their own code") {
    // weak drift over two steps lands between the two thresholds
    json raw{{"experiment", "transience"},
             {"seed", 3},
             {"law",
              {{"kind", "homogeneous"}, {"d", 1}, {"kappa", 0.03}, {"weights", {0.97, 0.03}}}},
             {"params", {{"n_grid", {2, 4}}, {"trials", 2000}}}};
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 4);
    CHECK(out.payload["result"]["verdict"] == "indeterminate");
}

TEST_CASE("hierarchy experiment aggregates the verdict table") {
    json raw = homog_config("hierarchy", 0.9,
                            {{"M", 10.0},
                             {"lambda1", 0.04},
                             {"slab_grid", {10, 20}},
                             {"box_grid", {4, 8}},
                             {"n_grid", {64, 128}},
                             {"envs", 5},
                             {"trials", 400}});
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 0);
    CHECK(out.payload["result"]["verdicts"]["weak"] == "yes");
    CHECK(out.payload["result"]["verdicts"]["transience"] == "yes");
    CHECK(out.payload["result"]["caveat"].is_string());
}

TEST_CASE("quantized rate experiment through the dispatcher") {
    json raw = homog_config("quantized_rate", 0.9,
                            {{"m_grid", {4, 16}}, {"L_grid", {10, 20, 30}}, {"mc_envs", 50}});
    const RunOutcome out = run_experiment(parse_config(raw));
    CHECK(out.exit_code == 0);
    // the unquantized baseline curve rides along as m = 0
    REQUIRE(out.payload["result"]["curves"].size() == 3);
    CHECK(out.payload["result"]["curves"][0]["m"] == 0);
    for (const auto& c : out.payload["result"]["curves"]) {
        CHECK(c["points"].size() == 3);
        CHECK(c["rate"].get<double>() > 0.0);
    }
}
