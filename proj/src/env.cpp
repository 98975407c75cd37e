#include "rwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "rwre/stats.hpp"

namespace rwre {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Number of draws used to tally a continuous law into atoms. Fixed together
// with the internal seed so quantize_law is a pure function of (law, m).
constexpr int kQuantizeDraws = 32768;
constexpr std::uint64_t kQuantizeSeed = 0x5EEDC0FFEE0001ULL;

}  // namespace

void EnvParams::validate() const {
    if (d < 1 || d > kMaxDim)
        throw ConfigError("environment dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    if (!(kappa > 0.0) || kappa > 1.0 / (2.0 * d) + 1e-15)
        throw ConfigError("kappa must lie in (0, 1/(2d)]");
}

void MixingParams::validate() const {
    if (C < 0.0) throw ConfigError("mixing prefactor must be nonnegative");
    if (!(g > 0.0)) throw ConfigError("mixing decay rate must be positive");
    if (r < 1) throw ConfigError("mixing shell thickness must be at least 1");
}

void validate_transition_vector(const TransitionVector& tv, const EnvParams& params, double tol) {
    if (tv.w.size() != static_cast<std::size_t>(2 * params.d))
        throw ConfigError("transition vector has wrong arity");
    KahanSum s;
    for (double v : tv.w) {
        if (v < params.kappa - tol) throw ConfigError("transition weight below the kappa floor");
        s.add(v);
    }
    if (std::abs(s.value() - 1.0) > tol) throw ConfigError("transition weights do not sum to 1");
}

EnvironmentLaw EnvironmentLaw::homogeneous(EnvParams params, TransitionVector tv) {
    params.validate();
    validate_transition_vector(tv, params);
    EnvironmentLaw law;
    law.params_ = params;
    law.kind_ = LawKind::Homogeneous;
    law.atoms_ = {std::move(tv)};
    law.probs_ = {1.0};
    std::string id = "homogeneous(d=" + std::to_string(params.d) +
                     ",kappa=" + fmt_double(params.kappa) + ",w=";
    for (std::size_t i = 0; i < law.atoms_[0].w.size(); ++i)
        id += (i ? "," : "") + fmt_double(law.atoms_[0].w[i]);
    law.law_id_ = id + ")";
    return law;
}

EnvironmentLaw EnvironmentLaw::iid_dirichlet(EnvParams params, std::vector<double> concentration) {
    params.validate();
    if (concentration.size() != static_cast<std::size_t>(2 * params.d))
        throw ConfigError("concentration vector has wrong arity");
    for (double a : concentration)
        if (!(a > 0.0)) throw ConfigError("concentration entries must be positive");
    EnvironmentLaw law;
    law.params_ = params;
    law.kind_ = LawKind::IidDirichlet;
    law.concentration_ = std::move(concentration);
    std::string id = "iid_dirichlet(d=" + std::to_string(params.d) +
                     ",kappa=" + fmt_double(params.kappa) + ",alpha=";
    for (std::size_t i = 0; i < law.concentration_.size(); ++i)
        id += (i ? "," : "") + fmt_double(law.concentration_[i]);
    law.law_id_ = id + ")";
    return law;
}

EnvironmentLaw EnvironmentLaw::finite_support(EnvParams params, std::vector<TransitionVector> atoms,
                                              std::vector<double> probs) {
    params.validate();
    if (atoms.empty() || atoms.size() != probs.size())
        throw ConfigError("finite-support law needs matching non-empty atoms and probabilities");
    KahanSum s;
    for (double p : probs) {
        if (p < -1e-15) throw ConfigError("negative atom probability");
        s.add(p);
    }
    if (std::abs(s.value() - 1.0) > 1e-12) throw ConfigError("atom probabilities do not sum to 1");
    for (const auto& a : atoms) validate_transition_vector(a, params);
    EnvironmentLaw law;
    law.params_ = params;
    law.kind_ = LawKind::FiniteSupport;
    law.atoms_ = std::move(atoms);
    law.probs_ = std::move(probs);
    std::string id = "finite_support(d=" + std::to_string(params.d) +
                     ",kappa=" + fmt_double(params.kappa) +
                     ",atoms=" + std::to_string(law.atoms_.size()) + ";";
    for (std::size_t i = 0; i < law.atoms_.size(); ++i) {
        id += (i ? "|" : "") + fmt_double(law.probs_[i]) + ":";
        for (std::size_t j = 0; j < law.atoms_[i].w.size(); ++j)
            id += (j ? "," : "") + fmt_double(law.atoms_[i].w[j]);
    }
    law.law_id_ = id + ")";
    return law;
}

TransitionVector EnvironmentLaw::sample(SplitMix64& rng) const {
    const int n = 2 * params_.d;
    switch (kind_) {
        case LawKind::Homogeneous:
            return atoms_.front();
        case LawKind::IidDirichlet: {
            // Normalized gamma draws, affinely embedded above the kappa floor.
            TransitionVector tv;
            tv.w.resize(static_cast<std::size_t>(n));
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                std::gamma_distribution<double> g(concentration_[static_cast<std::size_t>(i)], 1.0);
                double v = g(rng);
                tv.w[static_cast<std::size_t>(i)] = v;
                total += v;
            }
            const double scale = 1.0 - 2.0 * params_.d * params_.kappa;
            for (int i = 0; i < n; ++i)
                tv.w[static_cast<std::size_t>(i)] =
                    params_.kappa + scale * tv.w[static_cast<std::size_t>(i)] / total;
            return tv;
        }
        case LawKind::FiniteSupport: {
            double u = rng.u01();
            double acc = 0.0;
            for (std::size_t i = 0; i < probs_.size(); ++i) {
                acc += probs_[i];
                if (u < acc) return atoms_[i];
            }
            return atoms_.back();
        }
    }
    throw ConfigError("unreachable law kind");
}

TransitionVector EnvironmentLaw::mean_vector() const {
    const int n = 2 * params_.d;
    TransitionVector tv;
    tv.w.assign(static_cast<std::size_t>(n), 0.0);
    switch (kind_) {
        case LawKind::Homogeneous:
            return atoms_.front();
        case LawKind::IidDirichlet: {
            double total = 0.0;
            for (double a : concentration_) total += a;
            const double scale = 1.0 - 2.0 * params_.d * params_.kappa;
            for (int i = 0; i < n; ++i)
                tv.w[static_cast<std::size_t>(i)] =
                    params_.kappa + scale * concentration_[static_cast<std::size_t>(i)] / total;
            return tv;
        }
        case LawKind::FiniteSupport: {
            for (std::size_t a = 0; a < atoms_.size(); ++a)
                for (int i = 0; i < n; ++i)
                    tv.w[static_cast<std::size_t>(i)] +=
                        probs_[a] * atoms_[a].w[static_cast<std::size_t>(i)];
            return tv;
        }
    }
    throw ConfigError("unreachable law kind");
}

TransitionVector sample_transition_vector(const EnvironmentLaw& law, std::uint64_t seed,
                                          const Point& site) {
    SplitMix64 rng(site_seed(seed, StreamTag::EnvSite, site, law.params().d));
    return law.sample(rng);
}

QuenchedEnvironment::QuenchedEnvironment(EnvParams params, LatticeBox window, std::string law_id,
                                         std::uint64_t seed, std::vector<double> table)
    : params_(params),
      window_(window),
      law_id_(std::move(law_id)),
      seed_(seed),
      table_(std::move(table)) {
    if (window_.d != params_.d) throw ConfigError("window dimension mismatch");
    if (table_.size() != static_cast<std::size_t>(window_.site_count()) *
                             static_cast<std::size_t>(2 * params_.d))
        throw ConfigError("environment table size mismatch");
}

void QuenchedEnvironment::validate(double tol) const {
    params_.validate();
    const std::size_t stride = static_cast<std::size_t>(2 * params_.d);
    for (std::size_t off = 0; off < table_.size(); off += stride) {
        KahanSum s;
        for (std::size_t i = 0; i < stride; ++i) {
            double v = table_[off + i];
            if (v < params_.kappa - tol)
                throw ConfigError("environment table violates the kappa floor");
            s.add(v);
        }
        if (std::abs(s.value() - 1.0) > tol)
            throw ConfigError("environment table row does not sum to 1");
    }
}

QuenchedEnvironment sample_environment(const EnvironmentLaw& law, const LatticeBox& window,
                                       std::uint64_t seed, std::uint64_t max_bytes) {
    if (window.d != law.params().d) throw ConfigError("window dimension mismatch");
    if (window.empty()) throw ConfigError("empty environment window");
    const std::int64_t sites = window.site_count();
    const std::uint64_t bytes =
        static_cast<std::uint64_t>(sites) * static_cast<std::uint64_t>(2 * law.params().d) * 8ULL;
    if (bytes > max_bytes)
        throw CapacityError("environment window " + window.to_string() + " needs " +
                            std::to_string(bytes) + " bytes (cap " + std::to_string(max_bytes) +
                            ")");
    std::vector<double> table;
    table.resize(static_cast<std::size_t>(sites) * static_cast<std::size_t>(2 * law.params().d));
    const std::size_t stride = static_cast<std::size_t>(2 * law.params().d);
    for (std::int64_t i = 0; i < sites; ++i) {
        Point p = window.site_at(i);
        TransitionVector tv = sample_transition_vector(law, seed, p);
        std::copy(tv.w.begin(), tv.w.end(), table.begin() + static_cast<std::ptrdiff_t>(
                                                                stride * static_cast<std::size_t>(i)));
    }
    return QuenchedEnvironment(law.params(), window, law.law_id(), seed, std::move(table));
}

TableView::TableView(const QuenchedEnvironment& env) : env_(&env) {
    d_ = env.params().d;
    kappa_ = env.params().kappa;
}

SiteTrans TableView::site(const Point& p) const {
    if (!env_->defined_at(p)) {
        std::string s = "(";
        for (int i = 0; i < d_; ++i) s += (i ? "," : "") + std::to_string(p[i]);
        throw ConfigError("environment window underrun at site " + s + ") in window " +
                          env_->window().to_string());
    }
    SiteTrans st;
    const double* row = env_->row(p);
    std::copy(row, row + 2 * d_, st.w.begin());
    return st;
}

LawView::LawView(const EnvironmentLaw& law, std::uint64_t seed) : law_(&law), seed_(seed) {
    d_ = law.params().d;
    kappa_ = law.params().kappa;
    constant_ = (law.kind() == LawKind::Homogeneous);
    if (constant_) {
        const auto& tv = law.homogeneous_vector();
        std::copy(tv.w.begin(), tv.w.end(), fixed_.w.begin());
    }
}

SiteTrans LawView::site(const Point& p) const {
    if (constant_) return fixed_;
    SiteTrans st;
    TransitionVector tv = sample_transition_vector(*law_, seed_, p);
    std::copy(tv.w.begin(), tv.w.end(), st.w.begin());
    return st;
}

namespace {

// Floors one atom onto the quantization grid. The last coordinate takes the
// leftover mass; flooring only shrinks the others, so for a valid input it
// can only grow and the kappa floor survives. The projection branch handles
// inputs that arrive within tolerance of infeasibility.
TransitionVector quantize_atom(const TransitionVector& tv, const EnvParams& params, int m) {
    const int n = 2 * params.d;
    const double mesh = (1.0 - 2.0 * params.d * params.kappa) / m;
    TransitionVector out;
    out.w.assign(static_cast<std::size_t>(n), params.kappa);
    if (mesh <= 0.0) return out;  // kappa = 1/(2d): the simplex is a single point

    auto floor_coord = [&](double v) {
        // Grid-point inputs must stay put; the relative nudge absorbs the
        // one-ulp droop of (v - kappa)/mesh at exact multiples.
        double idx = std::floor((v - params.kappa) / mesh + 1e-9);
        idx = std::clamp(idx, 0.0, static_cast<double>(m));
        return params.kappa + idx * mesh;
    };

    KahanSum head;
    for (int i = 0; i < n - 1; ++i) {
        out.w[static_cast<std::size_t>(i)] = floor_coord(tv.w[static_cast<std::size_t>(i)]);
        head.add(out.w[static_cast<std::size_t>(i)]);
    }
    double last = 1.0 - head.value();
    if (last < params.kappa - 1e-12) {
        // Proportional redistribution of the deficit over the above-floor mass.
        double deficit = params.kappa - last;
        double above = 0.0;
        for (int i = 0; i < n - 1; ++i) above += out.w[static_cast<std::size_t>(i)] - params.kappa;
        if (above <= deficit + 1e-15)
            throw QuantizationError("m=" + std::to_string(m) +
                                    " too small to respect the kappa floor after projection");
        KahanSum head2;
        for (int i = 0; i < n - 1; ++i) {
            double v = out.w[static_cast<std::size_t>(i)];
            v -= deficit * (v - params.kappa) / above;
            // Snap down to the grid (no upward nudge here: we must not undo
            // the redistribution).
            double idx = std::floor((v - params.kappa) / mesh);
            idx = std::clamp(idx, 0.0, static_cast<double>(m));
            out.w[static_cast<std::size_t>(i)] = params.kappa + idx * mesh;
            head2.add(out.w[static_cast<std::size_t>(i)]);
        }
        last = 1.0 - head2.value();
        if (last < params.kappa - 1e-12)
            throw QuantizationError("projection failed to restore the kappa floor (m=" +
                                    std::to_string(m) + ")");
    }
    out.w[static_cast<std::size_t>(n - 1)] = last;
    return out;
}

}  // namespace

EnvironmentLaw quantize_law(const EnvironmentLaw& law, int m) {
    if (m < 1) throw QuantizationError("quantization order must be >= 1");
    const EnvParams& params = law.params();
    const int n = 2 * params.d;

    // Tuple of grid indices for the first 2d-1 coordinates identifies an atom.
    std::map<std::vector<std::int64_t>, double> tally;
    const double mesh = (1.0 - 2.0 * params.d * params.kappa) / m;
    auto key_of = [&](const TransitionVector& tv) {
        std::vector<std::int64_t> key(static_cast<std::size_t>(n - 1), 0);
        if (mesh > 0.0)
            for (int i = 0; i < n - 1; ++i)
                key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(
                    std::llround((tv.w[static_cast<std::size_t>(i)] - params.kappa) / mesh));
        return key;
    };

    if (law.kind() == LawKind::IidDirichlet) {
        SplitMix64 rng(kQuantizeSeed);
        const double weight = 1.0 / kQuantizeDraws;
        for (int i = 0; i < kQuantizeDraws; ++i) {
            TransitionVector q = quantize_atom(law.sample(rng), params, m);
            tally[key_of(q)] += weight;
        }
    } else {
        for (std::size_t a = 0; a < law.atoms().size(); ++a) {
            TransitionVector q = quantize_atom(law.atoms()[a], params, m);
            tally[key_of(q)] += law.atom_probs()[a];
        }
    }

    std::vector<TransitionVector> atoms;
    std::vector<double> probs;
    atoms.reserve(tally.size());
    for (const auto& [key, p] : tally) {
        TransitionVector tv;
        tv.w.assign(static_cast<std::size_t>(n), params.kappa);
        KahanSum head;
        for (int i = 0; i < n - 1; ++i) {
            tv.w[static_cast<std::size_t>(i)] =
                params.kappa + static_cast<double>(key[static_cast<std::size_t>(i)]) * mesh;
            head.add(tv.w[static_cast<std::size_t>(i)]);
        }
        tv.w[static_cast<std::size_t>(n - 1)] = 1.0 - head.value();
        atoms.push_back(std::move(tv));
        probs.push_back(p);
    }
    // Renormalize away the tally rounding (exact inputs are untouched).
    KahanSum tot;
    for (double p : probs) tot.add(p);
    for (double& p : probs) p /= tot.value();
    return EnvironmentLaw::finite_support(params, std::move(atoms), std::move(probs));
}

double mixing_correction_bound(const MixingParams& mixing, int d, double L_k, double Ltilde_k,
                               double c_tilde) {
    if (mixing.C == 0.0) return 1.0;  // i.i.d. environment: no correction
    double lateral = (d > 1) ? std::pow(6.0 * c_tilde * Ltilde_k, 2.0 * (d - 1)) : 1.0;
    double inner = std::exp(-mixing.g * (9.0 / 11.0) * L_k) * 9.0 *
                   std::pow(static_cast<double>(mixing.r), 2.0 * d) * L_k * L_k * lateral *
                   mixing.C;
    double v = std::exp(inner);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

void save_environment(const QuenchedEnvironment& env, std::ostream& os) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["d"] = env.params().d;
    j["kappa"] = env.params().kappa;
    j["law_id"] = env.law_id();
    j["seed"] = env.seed();
    j["window"]["lo"] = std::vector<std::int64_t>(env.window().lo.begin(),
                                                  env.window().lo.begin() + env.params().d);
    j["window"]["hi"] = std::vector<std::int64_t>(env.window().hi.begin(),
                                                  env.window().hi.begin() + env.params().d);
    j["weights"] = env.table();
    os << j.dump();
}

QuenchedEnvironment load_environment(std::istream& is) {
    nlohmann::json j = nlohmann::json::parse(is);
    if (j.at("format_version").get<int>() != 1)
        throw ConfigError("unsupported environment container version");
    EnvParams params;
    params.d = j.at("d").get<int>();
    params.kappa = j.at("kappa").get<double>();
    params.validate();
    LatticeBox window;
    window.d = params.d;
    auto lo = j.at("window").at("lo").get<std::vector<std::int64_t>>();
    auto hi = j.at("window").at("hi").get<std::vector<std::int64_t>>();
    if (lo.size() != static_cast<std::size_t>(params.d) || hi.size() != lo.size())
        throw ConfigError("environment container window arity mismatch");
    for (int i = 0; i < params.d; ++i) {
        window.lo[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
        window.hi[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)];
    }
    QuenchedEnvironment env(params, window, j.at("law_id").get<std::string>(),
                            j.at("seed").get<std::uint64_t>(),
                            j.at("weights").get<std::vector<double>>());
    env.validate(1e-9);
    return env;
}

void save_environment_file(const QuenchedEnvironment& env, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    save_environment(env, os);
}

QuenchedEnvironment load_environment_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    return load_environment(is);
}

}  // namespace rwre
