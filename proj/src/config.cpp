#include "rwre/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rwre/oned.hpp"
#include "rwre/rng.hpp"

namespace rwre {

const char* tool_version() { return "0.1.0"; }

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{
        "velocity",   "slab_curve", "box_curve",      "weak",      "transience",
        "hierarchy",  "cascade",    "null_model",     "constants", "quantized_rate"};
    return names;
}

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(ctx + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + ctx);
    }
}

const json& need(const json& j, const char* key, const std::string& ctx) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ctx + " is missing required key \"" + key + "\"");
    return *it;
}

double get_num(const json& j, const char* key, const std::string& ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_number()) throw ConfigError(ctx + "." + key + " must be a number");
    return v.get<double>();
}

double get_num_or(const json& j, const char* key, const std::string& ctx, double fallback) {
    if (j.find(key) == j.end()) return fallback;
    return get_num(j, key, ctx);
}

std::int64_t get_int(const json& j, const char* key, const std::string& ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_number_integer()) throw ConfigError(ctx + "." + key + " must be an integer");
    return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& j, const char* key, const std::string& ctx,
                        std::int64_t fallback) {
    if (j.find(key) == j.end()) return fallback;
    return get_int(j, key, ctx);
}

std::string get_str(const json& j, const char* key, const std::string& ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_string()) throw ConfigError(ctx + "." + key + " must be a string");
    return v.get<std::string>();
}

bool get_bool_or(const json& j, const char* key, const std::string& ctx, bool fallback) {
    if (j.find(key) == j.end()) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw ConfigError(ctx + "." + key + " must be a boolean");
    return v.get<bool>();
}

std::vector<std::int64_t> get_int_array(const json& j, const char* key, const std::string& ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_array() || v.empty()) throw ConfigError(ctx + "." + key + " must be a nonempty array");
    std::vector<std::int64_t> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) throw ConfigError(ctx + "." + key + " must hold integers");
        out.push_back(e.get<std::int64_t>());
    }
    return out;
}

std::vector<double> get_num_array(const json& j, const char* key, const std::string& ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_array() || v.empty()) throw ConfigError(ctx + "." + key + " must be a nonempty array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(ctx + "." + key + " must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

EnvironmentLaw parse_law(const json& jl) {
    check_keys(jl, "law", {"kind", "d", "kappa", "weights", "atoms", "concentration", "quantize_m"});
    EnvParams params;
    params.d = static_cast<int>(get_int(jl, "d", "law"));
    params.kappa = get_num(jl, "kappa", "law");
    const std::string kind = get_str(jl, "kind", "law");

    EnvironmentLaw law = [&] {
        if (kind == "homogeneous") {
            TransitionVector tv;
            tv.w = get_num_array(jl, "weights", "law");
            return EnvironmentLaw::homogeneous(params, tv);
        }
        if (kind == "finite_support") {
            const json& atoms = need(jl, "atoms", "law");
            if (!atoms.is_array() || atoms.empty())
                throw ConfigError("law.atoms must be a nonempty array");
            std::vector<TransitionVector> tvs;
            std::vector<double> probs;
            for (const auto& a : atoms) {
                check_keys(a, "law.atoms[]", {"weights", "prob"});
                TransitionVector tv;
                tv.w = get_num_array(a, "weights", "law.atoms[]");
                tvs.push_back(tv);
                probs.push_back(get_num(a, "prob", "law.atoms[]"));
            }
            return EnvironmentLaw::finite_support(params, tvs, probs);
        }
        if (kind == "iid_dirichlet")
            return EnvironmentLaw::iid_dirichlet(params,
                                                 get_num_array(jl, "concentration", "law"));
        throw ConfigError("law.kind must be homogeneous, finite_support, or iid_dirichlet");
    }();

    if (jl.find("quantize_m") != jl.end()) {
        const std::int64_t m = get_int(jl, "quantize_m", "law");
        if (m < 1 || m > 100000) throw ConfigError("law.quantize_m must lie in [1, 100000]");
        law = quantize_law(law, static_cast<int>(m));
    }
    return law;
}

ScaleHierarchy parse_hierarchy(const json& jh, int d) {
    check_keys(jh, "params.hierarchy",
               {"L0", "N0", "Ntilde0", "c_tilde", "k_max", "production_defaults"});
    const std::int64_t L0 = get_int(jh, "L0", "hierarchy");
    const double c_tilde = get_num_or(jh, "c_tilde", "hierarchy", 1.0);
    const int k_max = static_cast<int>(get_int(jh, "k_max", "hierarchy"));
    try {
        if (get_bool_or(jh, "production_defaults", "hierarchy", false))
            return make_production_hierarchy(d, L0, c_tilde, k_max);
        const std::int64_t N0 = get_int(jh, "N0", "hierarchy");
        const std::int64_t Nt0 = get_int_or(jh, "Ntilde0", "hierarchy", N0);
        return make_hierarchy(d, L0, N0, Nt0, c_tilde, k_max);
    } catch (const std::range_error& e) {
        // scales that overflow 64-bit extents are a capacity problem, not a schema one
        throw CapacityError(e.what());
    }
}

MixingParams parse_mixing(const json& jp, const std::string& ctx) {
    MixingParams mp;
    if (jp.find("mixing") == jp.end()) return mp;
    const json& jm = jp.at("mixing");
    check_keys(jm, ctx + ".mixing", {"C", "g", "r"});
    mp.C = get_num_or(jm, "C", ctx, 0.0);
    mp.g = get_num_or(jm, "g", ctx, 1.0);
    mp.r = static_cast<int>(get_int_or(jm, "r", ctx, 1));
    return mp;
}

json hierarchy_json(const ScaleHierarchy& h) {
    return {{"d", h.d},          {"L0", h.L0},
            {"N0", h.N0},        {"Ntilde0", h.Ntilde0},
            {"c_tilde", h.c_tilde}, {"k_max", h.k_max},
            {"production_defaults", h.production_defaults},
            {"separation_ok", h.separation_ok()}};
}

json velocity_json(const VelocityEstimate& v, bool annealed) {
    return {{"mean", v.mean},
            {"stderr", v.stderr_},
            {"trials", v.trials},
            {"n_steps", v.n_steps},
            {"annealed", annealed}};
}

json quantized_rate_json(const QuantizedRateReport& report) {
    json curves = json::array();
    for (const auto& c : report.curves) {
        json pts = json::array();
        for (const auto& p : c.points)
            pts.push_back({{"L", p.L},
                           {"estimate", p.estimate},
                           {"log_estimate", p.log_estimate},
                           {"stderr", p.stderr_est},
                           {"exact", p.exact},
                           {"n_envs", p.n_envs}});
        curves.push_back({{"m", c.m}, {"points", pts}, {"rate", c.rate}, {"r2", c.r2}});
    }
    return {{"curves", curves}};
}

json null_model_json(const NullModelReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"k", r.k},
                        {"n_samples", r.n_samples},
                        {"p_hat", r.p_hat},
                        {"p_child_hat", r.p_child_hat},
                        {"pairs", r.pairs},
                        {"bound", r.bound},
                        {"sigma", r.sigma},
                        {"within", r.within}});
    return {{"p_mark", report.p_mark}, {"p_hat", report.p_hat}, {"rows", rows}};
}

json constants_json(const CascadeConstants& cc) {
    return {{"lambda1", cc.lambda1},
            {"lambda2", cc.lambda2},
            {"c0", cc.c0},
            {"c_annealed", cc.c_annealed},
            {"c_bounding", cc.c_bounding},
            {"c_quenched", cc.c_quenched},
            {"closed_form_limit", cc.closed_form_limit},
            {"limit_positive", cc.limit_positive},
            {"n_line", cc.n_line},
            {"J", cc.J},
            {"w0", cc.w0},
            {"gamma", cc.gamma},
            {"hierarchy", hierarchy_json(cc.hierarchy)},
            {"mixing", {{"C", cc.mixing.C}, {"g", cc.mixing.g}, {"r", cc.mixing.r}}}};
}

constexpr double kMemCapBytes = 2.0 * 1024.0 * 1024.0 * 1024.0;

// Bytes needed to tabulate one environment over the top-scale dependency
// window: sites x 2d components x 16 bytes (value + bookkeeping).
double cascade_window_bytes(const ScaleHierarchy& h, int k_top) {
    const Point origin{};
    const LatticeBox window = dependency_region(h, k_top, origin);
    double sites = 1.0;
    for (int i = 0; i < h.d; ++i)
        sites *= static_cast<double>(window.hi[i]) - static_cast<double>(window.lo[i]);
    return sites * 2.0 * h.d * 16.0;
}

json suggested_cascade_config(const ParsedConfig& cfg, int d) {
    json h = d == 1 ? json{{"L0", 10}, {"N0", 4}, {"Ntilde0", 4}, {"c_tilde", 1.0}, {"k_max", 3}}
                    : json{{"L0", 8}, {"N0", 4}, {"Ntilde0", 16}, {"c_tilde", 0.5}, {"k_max", 2}};
    json params = cfg.params;
    params["hierarchy"] = h;
    if (params.contains("k_top"))
        params["k_top"] = std::min<std::int64_t>(params["k_top"].get<std::int64_t>(),
                                                 h["k_max"].get<std::int64_t>());
    json out = cfg.canonical;
    out["params"] = params;
    return out;
}

Direction config_direction(const ParsedConfig& cfg, int d) {
    if (cfg.dir.d == d) return cfg.dir;
    std::vector<double> e1(static_cast<std::size_t>(d), 0.0);
    e1[0] = 1.0;
    return make_direction(d, e1);
}

const EnvironmentLaw& need_law(const ParsedConfig& cfg) {
    if (!cfg.law) throw ConfigError("experiment \"" + cfg.experiment + "\" needs a law block");
    return *cfg.law;
}

}  // namespace

ParsedConfig parse_config(const nlohmann::json& j) {
    check_keys(j, "config",
               {"experiment", "seed", "jobs", "law", "budget", "direction", "params"});
    ParsedConfig cfg;
    cfg.experiment = get_str(j, "experiment", "config");
    bool known = false;
    for (const auto& name : experiment_names()) known = known || name == cfg.experiment;
    if (!known) throw ConfigError("unknown experiment \"" + cfg.experiment + "\"");

    const std::int64_t seed = get_int_or(j, "seed", "config", 1);
    if (seed < 0) throw ConfigError("config.seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    const std::int64_t jobs = get_int_or(j, "jobs", "config", 1);
    if (jobs < 1 || jobs > 512) throw ConfigError("config.jobs must lie in [1, 512]");
    cfg.jobs = static_cast<int>(jobs);

    if (j.find("budget") != j.end()) {
        const json& jb = j.at("budget");
        check_keys(jb, "config.budget", {"max_steps", "censor_cap"});
        cfg.budget.max_steps = get_int_or(jb, "max_steps", "budget", cfg.budget.max_steps);
        if (cfg.budget.max_steps < 1) throw ConfigError("budget.max_steps must be positive");
        cfg.budget.censor_cap = get_num_or(jb, "censor_cap", "budget", cfg.budget.censor_cap);
        if (cfg.budget.censor_cap < 0.0 || cfg.budget.censor_cap > 1.0)
            throw ConfigError("budget.censor_cap must lie in [0,1]");
    }

    if (j.find("law") != j.end()) cfg.law = parse_law(j.at("law"));

    int d = cfg.law ? cfg.law->params().d : 1;
    if (j.find("direction") != j.end()) {
        const json& jd = j.at("direction");
        if (!jd.is_array() || jd.empty()) throw ConfigError("config.direction must be an array");
        std::vector<double> ell;
        for (const auto& e : jd) {
            if (!e.is_number()) throw ConfigError("config.direction must hold numbers");
            ell.push_back(e.get<double>());
        }
        if (cfg.law && static_cast<int>(ell.size()) != d)
            throw ConfigError("config.direction dimension must match the law");
        cfg.dir = make_direction(static_cast<int>(ell.size()), ell);
    } else {
        std::vector<double> e1(static_cast<std::size_t>(d), 0.0);
        e1[0] = 1.0;
        cfg.dir = make_direction(d, e1);
    }

    cfg.params = j.value("params", json::object());
    if (!cfg.params.is_object()) throw ConfigError("config.params must be an object");

    // normalized echo: everything that determines the payload except jobs
    cfg.canonical = json::object();
    cfg.canonical["experiment"] = cfg.experiment;
    cfg.canonical["seed"] = cfg.seed;
    if (j.find("law") != j.end()) cfg.canonical["law"] = j.at("law");
    cfg.canonical["budget"] = {{"max_steps", cfg.budget.max_steps},
                               {"censor_cap", cfg.budget.censor_cap}};
    cfg.canonical["direction"] = cfg.dir.ell;
    cfg.canonical["params"] = cfg.params;
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config JSON parse failure: ") + e.what());
    }
    return parse_config(j);
}

std::string config_hash(const nlohmann::json& canonical) {
    const std::string s = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

nlohmann::json error_json(const std::string& code, const std::string& message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

nlohmann::json make_manifest(const ParsedConfig& cfg, double wall_ms, int exit_code) {
    return {{"config_hash", config_hash(cfg.canonical)},
            {"tool_version", tool_version()},
            {"experiment", cfg.experiment},
            {"seed", cfg.seed},
            {"jobs", cfg.jobs},
            {"wall_ms", wall_ms},
            {"exit_code", exit_code}};
}

RunOutcome run_experiment(const ParsedConfig& cfg) {
    RunOutcome out;
    const json& p = cfg.params;
    const std::string ctx = "params";
    json result;

    if (cfg.experiment == "velocity") {
        check_keys(p, ctx, {"n_steps", "trials", "annealed"});
        const bool annealed = get_bool_or(p, "annealed", ctx, true);
        const VelocityEstimate v =
            velocity_estimate(need_law(cfg), cfg.seed, get_int(p, "n_steps", ctx),
                              get_int(p, "trials", ctx), cfg.jobs, annealed);
        result = velocity_json(v, annealed);
    } else if (cfg.experiment == "slab_curve" || cfg.experiment == "box_curve") {
        check_keys(p, ctx, {"b", "gamma", "L_grid", "trials"});
        const EnvironmentLaw& law = need_law(cfg);
        ConditionSpec spec;
        spec.dir = config_direction(cfg, law.params().d);
        spec.gamma = get_num_or(p, "gamma", ctx, 1.0);
        spec.b = get_num_or(p, "b", ctx, 1.0);
        const auto grid = get_int_array(p, "L_grid", ctx);
        const std::int64_t trials = get_int(p, "trials", ctx);
        DecayFit fit;
        if (cfg.experiment == "slab_curve") {
            spec.kind = ConditionKind::StretchT;
            fit = estimate_slab_curve(law, spec, grid, trials, cfg.seed, cfg.jobs, cfg.budget);
        } else {
            spec.kind = ConditionKind::BoxT;
            fit = estimate_condition_boxT(law, spec, grid, trials, cfg.seed, cfg.jobs, cfg.budget);
        }
        result = decay_fit_json(fit);
        out.csv = decay_fit_csv(fit);
    } else if (cfg.experiment == "weak") {
        check_keys(p, ctx, {"c", "M", "lambda1", "envs", "trials"});
        const EnvironmentLaw& law = need_law(cfg);
        const WeakConditionReport report = estimate_condition_W(
            law, config_direction(cfg, law.params().d), get_num(p, "c", ctx),
            get_num(p, "M", ctx), get_num(p, "lambda1", ctx), get_int(p, "envs", ctx),
            get_int(p, "trials", ctx), cfg.seed, cfg.jobs, cfg.budget);
        result = weak_report_json(report);
        if (report.verdict == Verdict::Indeterminate) out.exit_code = 4;
    } else if (cfg.experiment == "transience") {
        check_keys(p, ctx, {"n_grid", "trials"});
        const EnvironmentLaw& law = need_law(cfg);
        const TransienceReport report =
            transience_probe(law, config_direction(cfg, law.params().d),
                             get_int_array(p, "n_grid", ctx), get_int(p, "trials", ctx), cfg.seed,
                             cfg.jobs);
        result = transience_report_json(report);
        if (report.verdict == Verdict::Indeterminate) out.exit_code = 4;
    } else if (cfg.experiment == "hierarchy") {
        check_keys(p, ctx,
                   {"b", "gamma", "M", "c", "lambda1", "slab_grid", "box_grid", "n_grid", "envs",
                    "trials"});
        const EnvironmentLaw& law = need_law(cfg);
        HierarchyConfig hc;
        hc.dir = config_direction(cfg, law.params().d);
        hc.b = get_num_or(p, "b", ctx, hc.b);
        hc.gamma = get_num_or(p, "gamma", ctx, hc.gamma);
        hc.M = get_num_or(p, "M", ctx, hc.M);
        hc.c = get_num_or(p, "c", ctx, hc.c);
        hc.lambda1 = get_num_or(p, "lambda1", ctx, hc.lambda1);
        if (p.contains("slab_grid")) hc.slab_grid = get_int_array(p, "slab_grid", ctx);
        if (p.contains("box_grid")) hc.box_grid = get_int_array(p, "box_grid", ctx);
        if (p.contains("n_grid")) hc.n_grid = get_int_array(p, "n_grid", ctx);
        hc.envs = get_int_or(p, "envs", ctx, hc.envs);
        hc.trials = get_int_or(p, "trials", ctx, hc.trials);
        hc.seed = cfg.seed;
        hc.jobs = cfg.jobs;
        hc.budget = cfg.budget;
        const HierarchyReport report = hierarchy_report(law, hc);
        result = hierarchy_report_json(report);
        const bool any_indet = report.weak_verdict == Verdict::Indeterminate ||
                               report.stretch_verdict == Verdict::Indeterminate ||
                               report.poly_verdict == Verdict::Indeterminate ||
                               report.box_verdict == Verdict::Indeterminate ||
                               report.transience_verdict == Verdict::Indeterminate;
        if (any_indet) out.exit_code = 4;
    } else if (cfg.experiment == "cascade") {
        check_keys(p, ctx,
                   {"hierarchy", "k_top", "envs_per_scale", "trials", "lambda1", "mixing"});
        const EnvironmentLaw& law = need_law(cfg);
        const ScaleHierarchy h = parse_hierarchy(need(p, "hierarchy", ctx), law.params().d);
        const int k_top = static_cast<int>(get_int(p, "k_top", ctx));
        const double bytes = cascade_window_bytes(h, std::min(k_top, h.k_max));
        if (h.production_defaults || bytes > kMemCapBytes) {
            const std::string reason =
                h.production_defaults
                    ? "production-constant ladders are proof artifacts, not simulation targets"
                    : "one environment table over the dependency window needs ~" +
                          std::to_string(bytes) + " bytes (cap " + std::to_string(kMemCapBytes) +
                          ")";
            json diag = error_json(
                "infeasible_constants",
                "the requested hierarchy cannot be simulated: " + reason +
                    "; the structural checks are scale-free, use the suggested config");
            diag["error"]["estimate_bytes"] = bytes;
            diag["error"]["cap_bytes"] = kMemCapBytes;
            diag["error"]["suggested_config"] = suggested_cascade_config(cfg, law.params().d);
            out.exit_code = 3;
            out.payload = diag;
            return out;
        }
        const double lambda1 =
            get_num_or(p, "lambda1", ctx, std::numeric_limits<double>::quiet_NaN());
        const CascadeReport report = cascade_experiment(
            law, h, k_top, get_int(p, "envs_per_scale", ctx), get_int_or(p, "trials", ctx, 2000),
            lambda1, cfg.seed, parse_mixing(p, ctx), cfg.jobs, cfg.budget);
        result = cascade_report_json(report);
    } else if (cfg.experiment == "null_model") {
        check_keys(p, ctx, {"hierarchy", "k_top", "p_mark", "samples_per_scale"});
        const ScaleHierarchy h = parse_hierarchy(need(p, "hierarchy", ctx), 1);
        const NullModelReport report = cascade_null_model(
            h, static_cast<int>(get_int(p, "k_top", ctx)), get_num(p, "p_mark", ctx),
            get_int(p, "samples_per_scale", ctx), cfg.seed);
        result = null_model_json(report);
    } else if (cfg.experiment == "constants") {
        check_keys(p, ctx, {"hierarchy", "mixing", "lambda1", "k_terms", "d"});
        const int d = static_cast<int>(get_int_or(p, "d", ctx, cfg.law ? cfg.law->params().d : 1));
        const ScaleHierarchy h = parse_hierarchy(need(p, "hierarchy", ctx), d);
        const CascadeConstants cc = compute_constants(
            h, parse_mixing(p, ctx),
            get_num_or(p, "lambda1", ctx, std::numeric_limits<double>::quiet_NaN()),
            static_cast<int>(get_int_or(p, "k_terms", ctx, 60)));
        result = constants_json(cc);
    } else if (cfg.experiment == "quantized_rate") {
        check_keys(p, ctx, {"m_grid", "L_grid", "mc_envs"});
        const EnvironmentLaw& law = need_law(cfg);
        std::vector<int> m_grid;
        for (const std::int64_t m : get_int_array(p, "m_grid", ctx))
            m_grid.push_back(static_cast<int>(m));
        const QuantizedRateReport report =
            quantized_rate_experiment(law, m_grid, get_int_array(p, "L_grid", ctx),
                                 get_int_or(p, "mc_envs", ctx, 200), cfg.seed);
        result = quantized_rate_json(report);
    } else {
        throw ConfigError("unknown experiment \"" + cfg.experiment + "\"");
    }

    out.payload = {{"format_version", 1},
                   {"tool_version", tool_version()},
                   {"experiment", cfg.experiment},
                   {"config", cfg.canonical},
                   {"result", result}};
    return out;
}

}  // namespace rwre
