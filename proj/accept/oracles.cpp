#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace rwre::accept {

namespace {
// random chains can be badly conditioned (site weights spanning e^60), so the
// elimination runs at 50 digits to keep its forward error far below the
// tolerances it referees
using BigFloat = boost::multiprecision::cpp_bin_float_50;
}  // namespace

std::vector<double> tridiag_absorption(const BirthDeathChain& chain) {
    chain.validate();
    const std::int64_t n_interior = chain.interior_count();
    std::vector<double> q(static_cast<std::size_t>(n_interior) + 2);
    q.front() = 1.0;
    q.back() = 0.0;
    if (n_interior == 0) return q;

    // interior rows: -(1-a_i) x_{i-1} + x_i - a_i x_{i+1} = boundary terms
    std::vector<BigFloat> diag(static_cast<std::size_t>(n_interior), 1);
    std::vector<BigFloat> rhs(static_cast<std::size_t>(n_interior), 0);
    rhs.front() = BigFloat(1) - BigFloat(chain.alpha.front());

    for (std::int64_t i = 1; i < n_interior; ++i) {
        const BigFloat lower = -(BigFloat(1) - BigFloat(chain.alpha[static_cast<std::size_t>(i)]));
        const BigFloat upper = -BigFloat(chain.alpha[static_cast<std::size_t>(i) - 1]);
        const BigFloat w = lower / diag[static_cast<std::size_t>(i) - 1];
        diag[static_cast<std::size_t>(i)] -= w * upper;
        rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i) - 1];
    }
    std::vector<BigFloat> x(static_cast<std::size_t>(n_interior));
    x.back() = rhs.back() / diag.back();
    for (std::int64_t i = n_interior - 2; i >= 0; --i) {
        const BigFloat upper = -BigFloat(chain.alpha[static_cast<std::size_t>(i)]);
        x[static_cast<std::size_t>(i)] =
            (rhs[static_cast<std::size_t>(i)] - upper * x[static_cast<std::size_t>(i) + 1]) /
            diag[static_cast<std::size_t>(i)];
    }
    for (std::int64_t i = 0; i < n_interior; ++i)
        q[static_cast<std::size_t>(i) + 1] = static_cast<double>(x[static_cast<std::size_t>(i)]);
    return q;
}

double closed_form_ruin(double alpha, std::int64_t n, std::int64_t m) {
    if (n < 1 || m < 0 || m > n) throw std::invalid_argument("ruin needs 0 <= m <= n");
    const long double rho = (1.0L - static_cast<long double>(alpha)) / static_cast<long double>(alpha);
    if (std::abs(static_cast<double>(rho) - 1.0) < 1e-15)
        return static_cast<double>(n - m) / static_cast<double>(n);
    const long double num = std::pow(rho, static_cast<long double>(m)) -
                            std::pow(rho, static_cast<long double>(n));
    const long double den = 1.0L - std::pow(rho, static_cast<long double>(n));
    return static_cast<double>(num / den);
}

double dp_nonplus_exit(const EnvView& env, const BoxSpec& box, const Point& start, double tol,
                       std::int64_t max_sweeps) {
    if (!box.contains(start)) throw std::invalid_argument("start must lie in the box");
    const LatticeBox lb = box.lattice_box();
    const std::int64_t n = lb.site_count();
    std::vector<double> value(static_cast<std::size_t>(n), 0.0);
    std::vector<char> inside(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < n; ++i)
        inside[static_cast<std::size_t>(i)] = box.contains(lb.site_at(i)) ? 1 : 0;

    for (std::int64_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double delta = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            if (!inside[static_cast<std::size_t>(i)]) continue;
            const Point x = lb.site_at(i);
            const SiteTrans row = env.site(x);
            double v = 0.0;
            for (int axis = 0; axis < box.d; ++axis) {
                for (int sgn = 0; sgn < 2; ++sgn) {
                    Point y = x;
                    y.coord[static_cast<std::size_t>(axis)] += sgn == 0 ? 1 : -1;
                    double vy;
                    if (box.contains(y))
                        vy = value[static_cast<std::size_t>(lb.index_of(y))];
                    else
                        vy = box.classify(y) == Membership::BoundaryPlus ? 0.0 : 1.0;
                    v += row.w[static_cast<std::size_t>(dir_index(axis, sgn == 1))] * vy;
                }
            }
            delta = std::max(delta, std::abs(v - value[static_cast<std::size_t>(i)]));
            value[static_cast<std::size_t>(i)] = v;
        }
        if (delta < tol) return value[static_cast<std::size_t>(lb.index_of(start))];
    }
    throw std::runtime_error("value iteration did not converge");
}

bool iboxes_disjoint(const IBox& a, const IBox& b) {
    for (int i = 0; i < a.axes; ++i)
        if (a.hi[static_cast<std::size_t>(i)] <= b.lo[static_cast<std::size_t>(i)] ||
            b.hi[static_cast<std::size_t>(i)] <= a.lo[static_cast<std::size_t>(i)])
            return true;
    return false;
}

bool literal_good(const std::vector<IBox>& exit_boxes, const std::vector<char>& bad) {
    const std::size_t n = exit_boxes.size();
    if (n == 0) return true;
    for (std::size_t y = 0; y < n; ++y) {
        bool ok = true;
        for (std::size_t z = 0; z < n; ++z)
            if (bad[z] && iboxes_disjoint(exit_boxes[z], exit_boxes[y])) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

bool pairwise_good(const std::vector<IBox>& exit_boxes, const std::vector<char>& bad) {
    const std::size_t n = exit_boxes.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!bad[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j)
            if (bad[j] && iboxes_disjoint(exit_boxes[i], exit_boxes[j])) return false;
    }
    return true;
}

std::int64_t disjoint_pairs(const std::vector<IBox>& exit_boxes) {
    std::int64_t count = 0;
    for (std::size_t i = 0; i < exit_boxes.size(); ++i)
        for (std::size_t j = i + 1; j < exit_boxes.size(); ++j)
            if (iboxes_disjoint(exit_boxes[i], exit_boxes[j])) ++count;
    return count;
}

std::vector<std::int64_t> cover_anchors_1d(std::int64_t L0, std::int64_t N0, int k) {
    if (k < 1) throw std::invalid_argument("cover anchors need k >= 1");
    std::int64_t L_child = L0;
    for (int i = 1; i < k; ++i) L_child *= N0;
    const std::int64_t L_parent = L_child * N0;
    std::vector<std::int64_t> anchors;
    for (std::int64_t m = -(N0 + 2); m <= 2 * N0 + 2; ++m) {
        const std::int64_t y = m * L_child;
        if (y + 1 >= -L_parent && 11 * (y + L_child - 1) < 12 * L_parent) anchors.push_back(y);
    }
    return anchors;
}

std::vector<IBox> exit_boxes_1d(const std::vector<std::int64_t>& anchors, std::int64_t L_child) {
    std::vector<IBox> out;
    out.reserve(anchors.size());
    for (const std::int64_t a : anchors) {
        IBox b;
        b.axes = 1;
        b.lo[0] = 11 * (a - L_child);
        b.hi[0] = 11 * a + 12 * L_child;
        out.push_back(b);
    }
    return out;
}

std::vector<IBox> exit_boxes_2d(const std::vector<std::array<std::int64_t, 2>>& anchors,
                                std::int64_t L_child, std::int64_t lat2_child) {
    std::vector<IBox> out;
    out.reserve(anchors.size());
    for (const auto& a : anchors) {
        IBox b;
        b.axes = 2;
        b.lo[0] = 11 * (a[0] - L_child);
        b.hi[0] = 11 * a[0] + 12 * L_child;
        b.lo[1] = 2 * a[1] - lat2_child;
        b.hi[1] = 2 * a[1] + 4 * lat2_child;
        out.push_back(b);
    }
    return out;
}

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_rational rational_pow(const cpp_rational& base, int e) {
    cpp_rational v = 1;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

bool rel_close(double value, const cpp_rational& exact, double rel_tol) {
    const double e = static_cast<double>(exact);
    if (e == 0.0) return value == 0.0;
    return std::abs(value - e) <= rel_tol * std::abs(e);
}

}  // namespace

bool lambda2_matches_exact(int d, std::int64_t N0, std::int64_t Ntilde0, double lambda2,
                           double rel_tol) {
    const cpp_rational lat(cpp_int(5) * Ntilde0, 3);
    const cpp_rational axis(cpp_int(23) * N0, 11);
    const cpp_rational exact = rational_pow(lat, 2 * (d - 1)) * rational_pow(axis, 2);
    return rel_close(lambda2, exact, rel_tol);
}

bool quenched_ladder_matches_exact(std::int64_t L0, std::int64_t N0,
                                   const std::vector<double>& c_quenched, double c0, int k_upto,
                                   double rel_tol) {
    if (static_cast<std::size_t>(k_upto) >= c_quenched.size() || !(c0 > 0.0)) return false;
    cpp_rational ratio = 1;  // (N0/4)^k, exact
    const cpp_rational step(cpp_int(N0), 4);
    double Lk = static_cast<double>(L0);
    for (int k = 0; k <= k_upto; ++k) {
        const double u = c_quenched[static_cast<std::size_t>(k)] * Lk / c0;
        if (!rel_close(u, ratio, rel_tol)) return false;
        ratio *= step;
        Lk *= static_cast<double>(N0);
    }
    return true;
}

}  // namespace rwre::accept
