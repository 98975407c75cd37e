#include "rwre/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "rwre/oned.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Direction axis_direction(int d) {
    std::vector<double> e1(static_cast<std::size_t>(d), 0.0);
    e1[0] = 1.0;
    return make_direction(d, e1);
}

double pow_int(double base, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

// log of the mixing correction bound at scale k (0 when C = 0).
double gamma_term(const MixingParams& mp, int d, double Lk, double Ltk, double c_tilde) {
    if (mp.C == 0.0) return 0.0;
    return std::exp(-mp.g * (9.0 / 11.0) * Lk) * 9.0 * pow_int(mp.r, 2 * d) * Lk * Lk *
           pow_int(6.0 * c_tilde * Ltk, 2 * (d - 1)) * mp.C;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

// multiples of step inside [a, b]
std::int64_t count_multiples(std::int64_t step, std::int64_t a, std::int64_t b) {
    if (b < a) return 0;
    return floor_div(b, step) - floor_div(a - 1, step);
}

}  // namespace

CascadeConstants compute_constants(const ScaleHierarchy& h, const MixingParams& mixing,
                                   double lambda1_override, int k_terms) {
    if (k_terms < 0) throw ConfigError("constant sequences need k_terms >= 0");
    mixing.validate();
    CascadeConstants cc;
    cc.hierarchy = h;
    cc.mixing = mixing;
    cc.eta1 = cc.eta2 = cc.eta3 = kNaN;

    const int d = h.d;
    cc.lambda2 = pow_int((5.0 / 3.0) * static_cast<double>(h.Ntilde0), 2 * (d - 1)) *
                 pow_int((23.0 / 11.0) * static_cast<double>(h.N0), 2);
    if (std::isnan(lambda1_override)) {
        const double inv_sqrt = 4.0 * cc.lambda2;  // the choice 1/sqrt(lambda1) = 4 lambda2
        cc.lambda1 = 1.0 / (inv_sqrt * inv_sqrt);
    } else {
        if (!(lambda1_override > 0.0)) throw ConfigError("lambda1 must be positive");
        cc.lambda1 = lambda1_override;
    }
    cc.c0 = -0.5 * std::log(cc.lambda1);

    const double L0 = static_cast<double>(h.L0);
    const double log_l2 = std::log(cc.lambda2);
    const double majorant = std::exp(-mixing.g * L0 / 30.0);

    cc.c_annealed.resize(static_cast<std::size_t>(k_terms) + 1);
    cc.c_bounding.resize(static_cast<std::size_t>(k_terms) + 1);
    cc.c_quenched.resize(static_cast<std::size_t>(k_terms) + 1);
    cc.c_annealed[0] = cc.c_bounding[0] = cc.c0;
    cc.c_quenched[0] = cc.c0 / L0;
    double Lk = L0;
    double Ltk = L0;
    double pow4 = 1.0;
    for (int k = 0; k < k_terms; ++k) {
        const double half = std::pow(2.0, -(k + 1));
        cc.c_annealed[static_cast<std::size_t>(k) + 1] =
            cc.c_annealed[static_cast<std::size_t>(k)] -
            half * (log_l2 + gamma_term(mixing, d, Lk, Ltk, h.c_tilde));
        cc.c_bounding[static_cast<std::size_t>(k) + 1] =
            cc.c_bounding[static_cast<std::size_t>(k)] - half * (log_l2 + majorant);
        Lk *= static_cast<double>(h.N0);
        Ltk *= static_cast<double>(h.Ntilde0);
        pow4 *= 4.0;
        cc.c_quenched[static_cast<std::size_t>(k) + 1] = cc.c0 / (pow4 * L0);
    }

    cc.closed_form_limit = cc.c0 - log_l2 - majorant;
    cc.limit_positive = cc.closed_form_limit > 0.0;

    cc.n_line = (23.0 / 11.0) * static_cast<double>(h.N0) + 1.0;
    cc.J = static_cast<std::int64_t>(
        std::floor(static_cast<double>(h.Ntilde0) / (4.0 * (cc.n_line + 1.0))));
    cc.w0 = (12.0 / 11.0) * static_cast<double>(h.N0);
    cc.gamma = std::log(2.0) / (2.0 * std::log(static_cast<double>(h.N0)));
    return cc;
}

BoxSpec companion_b2(const BoxSpec& b1tilde) {
    BoxSpec b2 = b1tilde;
    b2.kind = BoxKind::B2;
    return b2;
}

namespace {

// Exact worst-case non-forward exit probability in d=1 over the inner box.
double exact_sup_nonplus(const EnvView& env, const BoxSpec& b1, const BoxSpec& b2) {
    const LatticeBox lb = b2.lattice_box();
    const std::int64_t ilo = lb.lo[0];
    const std::int64_t ihi = lb.hi[0];
    BirthDeathChain chain;
    chain.left = ilo - 1;
    chain.right = ihi;
    chain.alpha.reserve(static_cast<std::size_t>(ihi - ilo));
    for (std::int64_t m = ilo; m < ihi; ++m) {
        Point p{};
        p.coord[0] = m;
        chain.alpha.push_back(env.site(p).w[dir_index(0, false)]);
    }
    const auto sol = solve_absorption(chain);

    Point left_site{};
    left_site.coord[0] = ilo - 1;
    Point right_site{};
    right_site.coord[0] = ihi;
    const double left_weight = b2.classify(left_site) == Membership::BoundaryPlus ? 0.0 : 1.0;
    const double right_weight = b2.classify(right_site) == Membership::BoundaryPlus ? 0.0 : 1.0;

    const LatticeBox inner = b1.lattice_box();
    double sup = 0.0;
    for (std::int64_t x = inner.lo[0]; x < inner.hi[0]; ++x) {
        const double q = sol.q_at(x);
        sup = std::max(sup, q * left_weight + (1.0 - q) * right_weight);
    }
    return sup;
}

}  // namespace

BoxStatus classify_scale0(const EnvView& env, const BoxSpec& b1tilde, double lambda1,
                          std::int64_t trials, std::uint64_t seed, const StepBudget& budget) {
    if (!(lambda1 > 0.0)) throw ConfigError("lambda1 must be positive");
    const double threshold = std::sqrt(lambda1);
    BoxStatus st;
    st.box = b1tilde;
    const BoxSpec b2 = companion_b2(b1tilde);

    if (env.d() == 1) {
        st.sup_exit = exact_sup_nonplus(env, b1tilde, b2);
        st.sup_exit_stderr = 0.0;
        st.good = st.sup_exit < threshold;
    } else {
        if (trials < 2) throw ConfigError("scale-0 Monte Carlo needs at least two trials");
        const LatticeBox inner = b1tilde.lattice_box();
        const std::int64_t n_sites = inner.site_count();
        double sup_lo = 0.0, sup_hi = 0.0, sig_lo = 0.0, sig_hi = 0.0;
        std::int64_t censored_total = 0;
        for (std::int64_t si = 0; si < n_sites; ++si) {
            const Point x = inner.site_at(si);
            SplitMix64 rng(site_seed(seed, StreamTag::Trial, x, env.d()));
            std::int64_t nonplus = 0, censored = 0;
            for (std::int64_t t = 0; t < trials; ++t) {
                const BoxExit exit = box_exit_face(env, b2, x, rng, budget);
                if (exit.race.censored)
                    ++censored;
                else if (exit.face != Membership::BoundaryPlus)
                    ++nonplus;
            }
            censored_total += censored;
            const double p_lo = static_cast<double>(nonplus) / static_cast<double>(trials);
            const double p_hi =
                static_cast<double>(nonplus + censored) / static_cast<double>(trials);
            if (p_lo > sup_lo) {
                sup_lo = p_lo;
                sig_lo = binom_stderr(p_lo, trials);
            }
            if (p_hi > sup_hi) {
                sup_hi = p_hi;
                sig_hi = binom_stderr(p_hi, trials);
            }
        }
        const double censor_frac =
            static_cast<double>(censored_total) /
            (static_cast<double>(trials) * static_cast<double>(n_sites));
        if (censor_frac > budget.censor_cap)
            throw CapacityError("censored fraction exceeds the configured cap in scale-0 classification");
        st.sup_exit = sup_lo;
        st.sup_exit_stderr = sig_lo;
        st.censored = censored_total;
        if (sup_hi + 3.0 * sig_hi < threshold) {
            st.good = true;
        } else if (sup_lo - 3.0 * sig_lo >= threshold) {
            st.good = false;
        } else {
            st.good = false;
            st.indeterminate = true;
        }
    }

    if (threshold >= 1.0) {  // degenerate: no probability can reach it
        st.good = true;
        st.degenerate = true;
        st.indeterminate = false;
    }
    return st;
}

bool boxes_disjoint(const BoxSpec& a, const BoxSpec& b) {
    for (int i = 0; i < a.d; ++i)
        if (std::abs(a.dir.ell[static_cast<std::size_t>(i)] -
                     b.dir.ell[static_cast<std::size_t>(i)]) > 1e-12)
            throw ConfigError("disjointness test requires a common direction");
    double delta[kMaxDim];
    a.dir.frame_coords(b.anchor, a.anchor, delta);
    for (int i = 0; i < a.d; ++i) {
        double alo, ahi, blo, bhi;
        bool inc;
        a.bounds(i, alo, ahi, inc);
        b.bounds(i, blo, bhi, inc);
        if (ahi <= delta[i] + blo || delta[i] + bhi <= alo) return true;
    }
    return false;
}

BoxStatus classify_recursive(const ScaleHierarchy& h, int k, const Point& parent_anchor,
                             const std::vector<BoxStatus>& children) {
    if (k < 1 || k > h.k_max) throw ConfigError("recursive classification needs 1 <= k <= k_max");
    const auto cover = quasi_cover(h, k, parent_anchor);
    if (children.size() != cover.size())
        throw ConfigError("child statuses do not match the quasi-cover");
    const std::size_t n = cover.size();
    for (std::size_t i = 0; i < n; ++i)
        if (!(children[i].box.anchor == cover[i]))
            throw ConfigError("child statuses are not in quasi-cover order");

    std::vector<BoxSpec> b2(n);
    std::vector<char> bad(n);
    for (std::size_t i = 0; i < n; ++i) {
        b2[i] = box_b2(h, k - 1, cover[i], children[i].box.dir);
        bad[i] = children[i].good ? 0 : 1;
    }

    BoxStatus st;
    st.box = box_b1tilde(h, k, parent_anchor, children.empty() ? Direction{} : children[0].box.dir);

    bool literal_good = false;
    for (std::size_t i = 0; i < n && !literal_good; ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (bad[j] && boxes_disjoint(b2[i], b2[j])) {
                ok = false;
                break;
            }
        }
        literal_good = ok;
    }
    if (n == 0) literal_good = true;

    bool pairwise_good = true;
    for (std::size_t i = 0; i < n && pairwise_good; ++i) {
        if (!bad[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (bad[j] && boxes_disjoint(b2[i], b2[j])) {
                pairwise_good = false;
                st.witness[0] = cover[i];
                st.witness[1] = cover[j];
                st.has_witness = true;
                break;
            }
        }
    }

    st.good = literal_good;
    st.pairwise_good = pairwise_good;
    st.readings_agree = literal_good == pairwise_good;
    st.indeterminate = false;
    for (std::size_t i = 0; i < n; ++i)
        if (children[i].indeterminate) st.indeterminate = true;
    return st;
}

std::int64_t disjoint_pair_count(const ScaleHierarchy& h, int k, const Point& parent_anchor) {
    const auto cover = quasi_cover(h, k, parent_anchor);
    Direction dir = axis_direction(h.d);
    std::vector<BoxSpec> b2;
    b2.reserve(cover.size());
    for (const Point& y : cover) b2.push_back(box_b2(h, k - 1, y, dir));
    std::int64_t count = 0;
    for (std::size_t i = 0; i < b2.size(); ++i)
        for (std::size_t j = i + 1; j < b2.size(); ++j)
            if (boxes_disjoint(b2[i], b2[j])) ++count;
    return count;
}

namespace {

struct MemoKey {
    int k;
    std::array<std::int64_t, kMaxDim> a;
    bool operator<(const MemoKey& o) const {
        if (k != o.k) return k < o.k;
        return a < o.a;
    }
};

MemoKey memo_key(int k, const Point& p) {
    MemoKey key;
    key.k = k;
    key.a = p.coord;
    return key;
}

BoxStatus classify_tree(const EnvView& env, const ScaleHierarchy& h, int k, const Point& anchor,
                        const Direction& dir, double lambda1, std::int64_t trials,
                        std::uint64_t seed, const StepBudget& budget,
                        std::map<MemoKey, BoxStatus>& memo) {
    const auto it = memo.find(memo_key(k, anchor));
    if (it != memo.end()) return it->second;
    BoxStatus st;
    if (k == 0) {
        st = classify_scale0(env, box_b1tilde(h, 0, anchor, dir), lambda1, trials,
                             site_seed(seed, StreamTag::Scratch, anchor, h.d), budget);
    } else {
        const auto cover = quasi_cover(h, k, anchor);
        std::vector<BoxStatus> children;
        children.reserve(cover.size());
        for (const Point& y : cover)
            children.push_back(
                classify_tree(env, h, k - 1, y, dir, lambda1, trials, seed, budget, memo));
        st = classify_recursive(h, k, anchor, children);
    }
    memo.emplace(memo_key(k, anchor), st);
    return st;
}

}  // namespace

CascadeReport cascade_experiment(const EnvironmentLaw& law, const ScaleHierarchy& h, int k_top,
                                 std::int64_t envs_per_scale, std::int64_t trials, double lambda1,
                                 std::uint64_t seed, const MixingParams& mixing, int jobs,
                                 const StepBudget& budget) {
    if (k_top < 0 || k_top > h.k_max) throw ConfigError("cascade depth must lie within the hierarchy");
    if (envs_per_scale < 1) throw ConfigError("cascade experiment needs at least one environment");
    if (h.production_defaults)
        throw CapacityError(
            "production-default constants are far beyond simulation capacity; "
            "use a scaled-down hierarchy (the structural checks are scale-free)");
    const Point origin{};
    {
        const LatticeBox top_window = dependency_region(h, k_top, origin);
        const double bytes = static_cast<double>(top_window.site_count()) * 2.0 * h.d * 8.0;
        if (bytes > 2.0 * (1ull << 30))
            throw CapacityError("cascade window exceeds the memory budget; lower L0/N0/k_max");
    }

    CascadeReport report;
    report.note = "structural check at reduced constants";
    report.constants = compute_constants(h, mixing, lambda1, std::max(k_top, 60));
    report.eta1_hat = report.eta1_r2 = report.eta2_hat = report.eta2_r2 = kNaN;

    const Direction dir = axis_direction(h.d);
    const double L0 = static_cast<double>(h.L0);

    for (int k = 0; k <= k_top; ++k) {
        const LatticeBox window = dependency_region(h, k, origin);
        std::vector<char> bad(static_cast<std::size_t>(envs_per_scale));
        std::vector<char> indet(static_cast<std::size_t>(envs_per_scale));
        std::vector<double> sup(static_cast<std::size_t>(envs_per_scale), kNaN);

        parallel_for_blocks(envs_per_scale, 16, jobs,
                            [&](std::int64_t, std::int64_t begin, std::int64_t end) {
            for (std::int64_t e = begin; e < end; ++e) {
                const std::uint64_t env_seed =
                    derived_seed(seed, StreamTag::EnvOfTrial, static_cast<std::uint64_t>(k),
                                 static_cast<std::uint64_t>(e));
                const QuenchedEnvironment qenv = sample_environment(law, window, env_seed);
                TableView view(qenv);
                std::map<MemoKey, BoxStatus> memo;
                const BoxStatus st = classify_tree(view, h, k, origin, dir, lambda1, trials,
                                                   env_seed, budget, memo);
                bad[static_cast<std::size_t>(e)] = st.good ? 0 : 1;
                indet[static_cast<std::size_t>(e)] = st.indeterminate ? 1 : 0;
                if (st.good && h.d == 1)
                    sup[static_cast<std::size_t>(e)] = exact_sup_nonplus(
                        view, box_b1tilde(h, k, origin, dir), box_b2(h, k, origin, dir));
            }
        });

        ScaleRow row;
        row.k = k;
        row.n_boxes = envs_per_scale;
        for (std::int64_t e = 0; e < envs_per_scale; ++e) {
            row.n_bad += bad[static_cast<std::size_t>(e)];
            row.n_indeterminate += indet[static_cast<std::size_t>(e)];
        }
        row.p_hat = static_cast<double>(row.n_bad) / static_cast<double>(row.n_boxes);
        if (row.n_bad > 0) {
            const double sig = binom_stderr(row.p_hat, row.n_boxes);
            row.ci_lo = std::max(0.0, row.p_hat - 3.0 * sig);
            row.ci_hi = std::min(1.0, row.p_hat + 3.0 * sig);
        } else {
            row.one_sided = true;
            row.ci_lo = 0.0;
            row.ci_hi = 3.0 / static_cast<double>(row.n_boxes);
        }
        row.bound = std::exp(-report.constants.c_annealed[static_cast<std::size_t>(k)] *
                             std::pow(2.0, k));
        row.quench_bound = std::exp(-report.constants.c_quenched[static_cast<std::size_t>(k)] *
                                    L0 * std::pow(static_cast<double>(h.N0), k));
        KahanSum sup_sum;
        for (std::int64_t e = 0; e < envs_per_scale; ++e) {
            const double s = sup[static_cast<std::size_t>(e)];
            if (!std::isnan(s)) {
                sup_sum.add(s);
                ++row.n_good_measured;
            }
        }
        if (row.n_good_measured > 0)
            row.mean_sup_exit = sup_sum.value() / static_cast<double>(row.n_good_measured);
        report.scales.push_back(row);
    }

    // Fitted diagnostics; double-log coordinates, only where defined.
    {
        std::vector<double> xs, ys;
        for (const auto& row : report.scales)
            if (row.p_hat > 0.0 && row.p_hat < 1.0) {
                xs.push_back(row.k);
                ys.push_back(std::log(-std::log(row.p_hat)));
            }
        if (xs.size() >= 2) {
            const auto fit = linear_fit(xs, ys);
            report.eta1_hat = std::exp(fit.intercept);
            report.eta1_r2 = fit.r2;
            report.constants.eta1 = report.eta1_hat;
        }
    }
    {
        std::vector<double> xs, ys;
        for (const auto& row : report.scales)
            if (!std::isnan(row.mean_sup_exit) && row.mean_sup_exit > 0.0 &&
                row.mean_sup_exit < 1.0) {
                xs.push_back(row.k);
                ys.push_back(std::log(-std::log(row.mean_sup_exit)));
            }
        if (xs.size() >= 2) {
            const auto fit = linear_fit(xs, ys);
            report.eta2_hat = std::exp(fit.intercept);
            report.eta2_r2 = fit.r2;
            report.constants.eta2 = report.eta2_hat;
        }
    }
    return report;
}

nlohmann::json cascade_report_json(const CascadeReport& report) {
    nlohmann::json scales = nlohmann::json::array();
    for (const auto& row : report.scales) {
        scales.push_back({{"k", row.k},
                          {"n_boxes", row.n_boxes},
                          {"n_bad", row.n_bad},
                          {"n_indeterminate", row.n_indeterminate},
                          {"p_hat", row.p_hat},
                          {"ci_lo", row.ci_lo},
                          {"ci_hi", row.ci_hi},
                          {"one_sided", row.one_sided},
                          {"bound", row.bound},
                          {"mean_sup_exit", row.mean_sup_exit},
                          {"n_good_measured", row.n_good_measured},
                          {"quench_bound", row.quench_bound}});
    }
    const auto& cc = report.constants;
    return {{"note", report.note},
            {"constants",
             {{"lambda1", cc.lambda1},
              {"lambda2", cc.lambda2},
              {"c0", cc.c0},
              {"gamma", cc.gamma},
              {"n_line", cc.n_line},
              {"J", cc.J},
              {"w0", cc.w0},
              {"closed_form_limit", cc.closed_form_limit},
              {"limit_positive", cc.limit_positive},
              {"L0", cc.hierarchy.L0},
              {"N0", cc.hierarchy.N0},
              {"Ntilde0", cc.hierarchy.Ntilde0},
              {"c_tilde", cc.hierarchy.c_tilde},
              {"mixing", {{"C", cc.mixing.C}, {"g", cc.mixing.g}, {"r", cc.mixing.r}}}}},
            {"scales", scales},
            {"eta1_hat", report.eta1_hat},
            {"eta1_r2", report.eta1_r2},
            {"eta2_hat", report.eta2_hat},
            {"eta2_r2", report.eta2_r2}};
}

namespace {

bool null_status(const ScaleHierarchy& h, int k, const Point& anchor, double p_mark,
                 std::uint64_t sample_seed, std::map<MemoKey, BoxStatus>& memo, BoxStatus& out) {
    const auto it = memo.find(memo_key(k, anchor));
    if (it != memo.end()) {
        out = it->second;
        return out.good;
    }
    BoxStatus st;
    if (k == 0) {
        SplitMix64 eng(site_seed(sample_seed, StreamTag::NullMark, anchor, h.d));
        st.good = !(eng.u01() < p_mark);
        st.box = box_b1tilde(h, 0, anchor, axis_direction(h.d));
    } else {
        const auto cover = quasi_cover(h, k, anchor);
        std::vector<BoxStatus> children;
        children.reserve(cover.size());
        for (const Point& y : cover) {
            BoxStatus child;
            null_status(h, k - 1, y, p_mark, sample_seed, memo, child);
            children.push_back(child);
        }
        st = classify_recursive(h, k, anchor, children);
    }
    memo.emplace(memo_key(k, anchor), st);
    out = st;
    return st.good;
}

}  // namespace

NullModelReport cascade_null_model(const ScaleHierarchy& h, int k_top, double p_mark,
                                   std::int64_t samples_per_scale, std::uint64_t seed) {
    if (!(p_mark >= 0.0 && p_mark <= 1.0)) throw ConfigError("mark probability must lie in [0,1]");
    if (k_top < 1 || k_top > h.k_max) throw ConfigError("null model needs 1 <= k_top <= k_max");
    if (samples_per_scale < 2) throw ConfigError("null model needs at least two samples per scale");

    NullModelReport report;
    report.p_mark = p_mark;
    const Point origin{};

    std::vector<double> sigma(static_cast<std::size_t>(k_top) + 1);
    for (int k = 0; k <= k_top; ++k) {
        std::int64_t n_bad = 0;
        for (std::int64_t s = 0; s < samples_per_scale; ++s) {
            const std::uint64_t sample_seed = derived_seed(
                seed, StreamTag::Scratch, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(s));
            std::map<MemoKey, BoxStatus> memo;
            BoxStatus st;
            null_status(h, k, origin, p_mark, sample_seed, memo, st);
            if (!st.good) ++n_bad;
        }
        const double p = static_cast<double>(n_bad) / static_cast<double>(samples_per_scale);
        report.p_hat.push_back(p);
        sigma[static_cast<std::size_t>(k)] = binom_stderr(p, samples_per_scale);
    }

    for (int k = 1; k <= k_top; ++k) {
        NullScaleRow row;
        row.k = k;
        row.n_samples = samples_per_scale;
        row.p_hat = report.p_hat[static_cast<std::size_t>(k)];
        row.p_child_hat = report.p_hat[static_cast<std::size_t>(k) - 1];
        row.pairs = disjoint_pair_count(h, k, origin);
        row.bound = static_cast<double>(row.pairs) * row.p_child_hat * row.p_child_hat;
        const double sig_bound =
            2.0 * static_cast<double>(row.pairs) * row.p_child_hat * sigma[static_cast<std::size_t>(k) - 1];
        row.sigma = std::sqrt(sigma[static_cast<std::size_t>(k)] * sigma[static_cast<std::size_t>(k)] +
                              sig_bound * sig_bound);
        row.within = row.p_hat <= row.bound + 3.0 * row.sigma;
        report.rows.push_back(row);
    }
    return report;
}

double lateral_bound_value(const CascadeConstants& cc, int k, bool direction_factor,
                           double ck_lk_override) {
    const int d = cc.hierarchy.d;
    if (d == 1 && direction_factor) return 0.0;  // no lateral directions to exit through
    double ck_lk = ck_lk_override;
    if (std::isnan(ck_lk)) {
        if (k < 0 || static_cast<std::size_t>(k) >= cc.c_quenched.size())
            throw ConfigError("scale index outside the computed constant range");
        ck_lk = cc.c_quenched[static_cast<std::size_t>(k)] * static_cast<double>(cc.hierarchy.L0) *
                std::pow(static_cast<double>(cc.hierarchy.N0), k);
    }
    const double factor = direction_factor ? 2.0 * (d - 1) : 1.0;
    const double exponent =
        -(static_cast<double>(cc.J) / 8.0) * (ck_lk - std::log(factor * cc.n_line));
    return std::exp(exponent);
}

double union_bad_bound(const CascadeConstants& cc, int k, const LatticeBox& region) {
    const ScaleHierarchy& h = cc.hierarchy;
    if (k < 0 || k > h.k_max) throw ConfigError("scale index outside the hierarchy");
    if (static_cast<std::size_t>(k) >= cc.c_annealed.size())
        throw ConfigError("scale index outside the computed constant range");
    const std::int64_t lateral =
        std::llround(3.0 * h.c_tilde * static_cast<double>(h.Ltilde[static_cast<std::size_t>(k)]));
    std::int64_t anchors = 1;
    for (int i = 0; i < h.d; ++i) {
        // anchor spacing equals the inner-box extent on each axis
        const std::int64_t step = i == 0 ? h.L[static_cast<std::size_t>(k)] : lateral;
        anchors *= count_multiples(step, region.lo[static_cast<std::size_t>(i)] - step + 1,
                                   region.hi[static_cast<std::size_t>(i)] - 1);
    }
    return static_cast<double>(anchors) *
           std::exp(-cc.c_annealed[static_cast<std::size_t>(k)] * std::pow(2.0, k));
}

}  // namespace rwre
