// Command-line front end: run experiments from JSON configs, validate
// configs, reproduce the acceptance criteria, list what is available.
//
// Exit codes: 0 success, 1 failed acceptance reproduction, 2 config error,
// 3 capacity refusal, 4 indeterminate verdict, 5 internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "criteria.hpp"
#include "rwre/config.hpp"
#include "rwre/errors.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rwre::ConfigError("cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw rwre::ConfigError("config file is not valid JSON: " + path);
    return j;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

fs::path resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return fs::path(flag);
    if (const char* env = std::getenv("RWRE_LAB_OUT"); env && *env) return fs::path(env);
    return fs::path(".");
}

int cmd_run(const std::string& config_path, const std::string& out_flag, bool check_only,
            std::int64_t seed_flag, int jobs_flag) {
    json raw = load_json_file(config_path);
    if (seed_flag >= 0) raw["seed"] = seed_flag;
    if (jobs_flag > 0) raw["jobs"] = jobs_flag;
    const rwre::ParsedConfig cfg = rwre::parse_config(raw);

    if (check_only) {
        std::cout << "ok " << cfg.experiment << " " << rwre::config_hash(cfg.canonical) << "\n";
        return 0;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const rwre::RunOutcome out = rwre::run_experiment(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    const fs::path dir = resolve_out_dir(out_flag);
    fs::create_directories(dir);
    write_text(dir / "report.json", out.payload.dump(2) + "\n");
    write_text(dir / "manifest.json",
               rwre::make_manifest(cfg, wall_ms, out.exit_code).dump(2) + "\n");
    if (!out.csv.empty()) write_text(dir / "curve.csv", out.csv);

    std::cout << cfg.experiment << " exit=" << out.exit_code << " out=" << dir.string() << "\n";
    return out.exit_code;
}

int cmd_reproduce(const std::string& id, const std::string& cli_path) {
    std::vector<rwre::accept::CriterionResult> results;
    if (id == "all") {
        results = rwre::accept::run_all(cli_path);
    } else {
        results.push_back(rwre::accept::run_criterion(id, cli_path));
    }
    bool all_pass = true;
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << r.id << " " << (r.pass ? "PASS" : "FAIL") << " ("
                  << static_cast<long long>(r.ms) << " ms) " << r.details << "\n";
    }
    return all_pass ? 0 : 1;
}

void report_error(const char* code, const std::string& message) {
    std::cerr << rwre::error_json(code, message).dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-walk-in-random-environment laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    bool check_only = false;
    std::int64_t seed_flag = -1;
    int jobs_flag = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("--config", config_path, "path to the config file")->required();
    run->add_option("--out", out_flag, "output directory (default $RWRE_LAB_OUT or .)");
    run->add_option("--seed", seed_flag, "override the config seed");
    run->add_option("--jobs", jobs_flag, "override the worker count");
    run->add_flag("--check", check_only, "validate the config and exit");

    std::string check_path;
    CLI::App* check = app.add_subcommand("check", "validate a config without running it");
    check->add_option("--config", check_path, "path to the config file")->required();

    std::string criterion = "all";
    std::string cli_override;
    CLI::App* repro = app.add_subcommand("reproduce", "re-run acceptance criteria");
    repro->add_option("id", criterion, "criterion id (A1..A9) or 'all'");
    repro->add_option("--cli", cli_override, "path to this binary (for the end-to-end check)");

    CLI::App* list = app.add_subcommand("list", "list experiments and criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_flag, check_only, seed_flag, jobs_flag);
        if (check->parsed()) return cmd_run(check_path, "", true, -1, 0);
        if (repro->parsed()) {
            const std::string cli = cli_override.empty() ? std::string(argv[0]) : cli_override;
            return cmd_reproduce(criterion, cli);
        }
        if (list->parsed()) {
            std::cout << "experiments:";
            for (const auto& name : rwre::experiment_names()) std::cout << " " << name;
            std::cout << "\ncriteria:";
            for (const auto& id : rwre::accept::criterion_ids()) std::cout << " " << id;
            std::cout << "\n";
            return 0;
        }
    } catch (const rwre::ConfigError& e) {
        report_error("config", e.what());
        return 2;
    } catch (const rwre::CapacityError& e) {
        report_error("capacity", e.what());
        return 3;
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return 5;
    }
    return 0;
}
