#include "rwre/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace rwre {

namespace {

constexpr double kUnitTol = 1e-12;

bool is_integer(double v) { return std::floor(v) == v; }

// Integer content of a 1-d interval: [ceil(lo), ceil(hi)) when lo is
// included, [floor(lo)+1, ceil(hi)) when both endpoints are strict.
void interval_to_int(double lo, double hi, bool include_lo, std::int64_t& ilo, std::int64_t& ihi) {
    ilo = include_lo ? static_cast<std::int64_t>(std::ceil(lo))
                     : static_cast<std::int64_t>(std::floor(lo)) + 1;
    // exclusive integer upper bound; the < hi constraint drops an integer hi
    ihi = static_cast<std::int64_t>(std::ceil(hi));
}

}  // namespace

void Direction::frame_coords(const Point& p, const Point& anchor, double* out) const {
    if (axis_aligned) {
        for (int i = 0; i < d; ++i) out[i] = static_cast<double>(p[i] - anchor[i]);
        return;
    }
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j)
            s += R[static_cast<std::size_t>(j * d + i)] * static_cast<double>(p[j] - anchor[j]);
        out[i] = s;
    }
}

std::vector<double> Direction::basis(int i) const {
    std::vector<double> col(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) col[static_cast<std::size_t>(j)] = R[static_cast<std::size_t>(j * d + i)];
    return col;
}

Direction make_direction(int d, std::vector<double> ell_raw) {
    if (d < 1 || d > kMaxDim) throw ConfigError("direction dimension out of range");
    if (ell_raw.size() != static_cast<std::size_t>(d)) throw ConfigError("direction arity mismatch");
    double norm = 0.0;
    for (double v : ell_raw) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > kUnitTol)) throw ConfigError("direction must be a nonzero vector");
    Direction dir;
    dir.d = d;
    dir.ell.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) dir.ell[static_cast<std::size_t>(i)] = ell_raw[static_cast<std::size_t>(i)] / norm;

    dir.axis_aligned = true;
    for (int i = 0; i < d; ++i) {
        double want = (i == 0) ? 1.0 : 0.0;
        if (std::abs(dir.ell[static_cast<std::size_t>(i)] - want) > 1e-15) dir.axis_aligned = false;
    }

    // Householder reflection swapping e1 and ell; identity when they match.
    dir.R.assign(static_cast<std::size_t>(d * d), 0.0);
    std::vector<double> v(static_cast<std::size_t>(d));
    double vv = 0.0;
    for (int i = 0; i < d; ++i) {
        v[static_cast<std::size_t>(i)] = (i == 0 ? 1.0 : 0.0) - dir.ell[static_cast<std::size_t>(i)];
        vv += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < d; ++i) dir.R[static_cast<std::size_t>(i * d + i)] = 1.0;
    if (vv > kUnitTol * kUnitTol) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                dir.R[static_cast<std::size_t>(i * d + j)] -=
                    2.0 * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] / vv;
    }
    return dir;
}

ScaleHierarchy make_hierarchy(int d, std::int64_t L0, std::int64_t N0, std::int64_t Ntilde0,
                              double c_tilde, int k_max) {
    if (d < 1 || d > kMaxDim) throw ConfigError("hierarchy dimension out of range");
    if (static_cast<double>(L0) <= 3.0 * std::sqrt(static_cast<double>(d)))
        throw ConfigError("L0 must exceed 3*sqrt(d)");
    if (N0 < 2 || Ntilde0 < 2) throw ConfigError("scale ratios must be integers >= 2");
    if (!(c_tilde > 0.0)) throw ConfigError("c_tilde must be positive");
    if (k_max < 0) throw ConfigError("k_max must be >= 0");

    ScaleHierarchy h;
    h.d = d;
    h.L0 = L0;
    h.N0 = N0;
    h.Ntilde0 = Ntilde0;
    h.c_tilde = c_tilde;
    h.k_max = k_max;

    double L = static_cast<double>(L0), Lt = static_cast<double>(L0);
    double A = 0.0, At = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        if (!std::isfinite(L) || !std::isfinite(Lt) || L > 9.0e15 || Lt > 9.0e15)
            throw std::range_error("scale ladder overflows exact integer range at k=" +
                                   std::to_string(k));
        if (d > 1 && !is_integer(3.0 * c_tilde * Lt))
            throw ConfigError("lateral lattice step 3*c_tilde*Ltilde_k must be integral (k=" +
                              std::to_string(k) + ")");
        A += L;
        At += Lt;
        h.L.push_back(L);
        h.Ltilde.push_back(Lt);
        h.A.push_back(A);
        h.Atilde.push_back(At);
        h.sep_ok.push_back(k == 0 || (h.A[static_cast<std::size_t>(k - 1)] <= L / 11.0 &&
                                      h.Atilde[static_cast<std::size_t>(k - 1)] <= Lt / 11.0));
        L *= static_cast<double>(N0);
        Lt *= static_cast<double>(Ntilde0);
    }
    return h;
}

ScaleHierarchy make_production_hierarchy(int d, std::int64_t L0, double c_tilde, int k_max) {
    std::int64_t d3 = static_cast<std::int64_t>(d) * d * d;
    std::int64_t N0 = 1100 * d3;
    std::int64_t Nt0 = 11 * d3 * N0 * N0;
    ScaleHierarchy h = make_hierarchy(d, L0, N0, Nt0, c_tilde, k_max);
    h.production_defaults = true;
    return h;
}

void BoxSpec::bounds(int axis, double& lo, double& hi, bool& include_lo) const {
    const double cLt = c_tilde * Ltilde;
    switch (kind) {
        case BoxKind::B1tilde:
            lo = 0.0;
            hi = (axis == 0) ? L : 3.0 * cLt;
            include_lo = true;
            return;
        case BoxKind::B1dot:
            lo = 0.0;
            hi = (axis == 0) ? L : 3.0 * cLt;
            include_lo = false;
            return;
        case BoxKind::B2:
            if (axis == 0) {
                lo = -L;
                hi = L + L / 11.0;
            } else {
                lo = -cLt;
                hi = 4.0 * cLt;
            }
            include_lo = true;
            return;
        case BoxKind::B0L:
            if (axis == 0) {
                lo = -L;
                hi = L;
            } else {
                lo = -2.0 * L * L * L;
                hi = 2.0 * L * L * L;
            }
            include_lo = false;
            return;
        case BoxKind::SlabU:
            lo = -L;
            hi = L;
            include_lo = false;
            return;
    }
    throw ConfigError("unreachable box kind");
}

bool BoxSpec::contains(const Point& p) const {
    double y[kMaxDim];
    dir.frame_coords(p, anchor, y);
    for (int i = 0; i < d; ++i) {
        double lo, hi;
        bool inc;
        bounds(i, lo, hi, inc);
        if (inc ? (y[i] < lo || y[i] >= hi) : (y[i] <= lo || y[i] >= hi)) return false;
    }
    return true;
}

bool BoxSpec::has_plus_face() const {
    return kind == BoxKind::B2 || kind == BoxKind::B0L || kind == BoxKind::SlabU;
}

double BoxSpec::plus_threshold() const {
    switch (kind) {
        case BoxKind::B2:
            return L + L / 11.0;
        case BoxKind::B0L:
        case BoxKind::SlabU:
            return L;
        default:
            throw ConfigError("box kind has no plus face");
    }
}

Membership BoxSpec::classify(const Point& p) const {
    if (contains(p)) return Membership::Interior;
    Point q = p;
    bool onboundary = false;
    for (int i = 0; i < d && !onboundary; ++i) {
        q[i] = p[i] + 1;
        if (contains(q)) onboundary = true;
        q[i] = p[i] - 1;
        if (contains(q)) onboundary = true;
        q[i] = p[i];
    }
    if (!onboundary) return Membership::Exterior;
    if (has_plus_face()) {
        double y[kMaxDim];
        dir.frame_coords(p, anchor, y);
        if (y[0] >= plus_threshold()) return Membership::BoundaryPlus;
    }
    return Membership::Boundary;
}

LatticeBox BoxSpec::lattice_box() const {
    if (!dir.axis_aligned)
        throw ConfigError("lattice_box requires an axis-aligned direction");
    LatticeBox b;
    b.d = d;
    for (int i = 0; i < d; ++i) {
        double lo, hi;
        bool inc;
        bounds(i, lo, hi, inc);
        std::int64_t ilo, ihi;
        interval_to_int(lo, hi, inc, ilo, ihi);
        b.lo[static_cast<std::size_t>(i)] = anchor[i] + ilo;
        b.hi[static_cast<std::size_t>(i)] = anchor[i] + ihi;
    }
    return b;
}

namespace {

BoxSpec make_box(BoxKind kind, int d, const Point& anchor, const Direction& dir, double L,
                 double Lt, double c_tilde) {
    if (dir.d != d) throw ConfigError("direction dimension mismatch");
    BoxSpec b;
    b.kind = kind;
    b.d = d;
    b.anchor = anchor;
    b.dir = dir;
    b.L = L;
    b.Ltilde = Lt;
    b.c_tilde = c_tilde;
    return b;
}

double scale_L(const ScaleHierarchy& h, int k) {
    if (k < 0 || k > h.k_max) throw ConfigError("scale index out of range");
    return h.L[static_cast<std::size_t>(k)];
}

}  // namespace

BoxSpec box_b1tilde(const ScaleHierarchy& h, int k, const Point& anchor, const Direction& dir) {
    return make_box(BoxKind::B1tilde, h.d, anchor, dir, scale_L(h, k),
                    h.Ltilde[static_cast<std::size_t>(k)], h.c_tilde);
}
BoxSpec box_b1dot(const ScaleHierarchy& h, int k, const Point& anchor, const Direction& dir) {
    return make_box(BoxKind::B1dot, h.d, anchor, dir, scale_L(h, k),
                    h.Ltilde[static_cast<std::size_t>(k)], h.c_tilde);
}
BoxSpec box_b2(const ScaleHierarchy& h, int k, const Point& anchor, const Direction& dir) {
    return make_box(BoxKind::B2, h.d, anchor, dir, scale_L(h, k),
                    h.Ltilde[static_cast<std::size_t>(k)], h.c_tilde);
}
BoxSpec box_b1tilde_free(int d, double c, double L, const Point& anchor, const Direction& dir) {
    return make_box(BoxKind::B1tilde, d, anchor, dir, L, L, c);
}
BoxSpec box_b2_free(int d, double c, double L, const Point& anchor, const Direction& dir) {
    return make_box(BoxKind::B2, d, anchor, dir, L, L, c);
}
BoxSpec box_b0(int d, double L, const Direction& dir) {
    return make_box(BoxKind::B0L, d, Point{}, dir, L, L, 1.0);
}
BoxSpec box_slab_u(double L) {
    Direction e1 = make_direction(1, {1.0});
    return make_box(BoxKind::SlabU, 1, Point{}, e1, L, L, 1.0);
}

std::vector<Point> lattice_points(const ScaleHierarchy& h, int k, const LatticeBox& window) {
    if (window.d != h.d) throw ConfigError("window dimension mismatch");
    double Lk = scale_L(h, k);
    double lat = 3.0 * h.c_tilde * h.Ltilde[static_cast<std::size_t>(k)];
    if (!is_integer(Lk) || (h.d > 1 && !is_integer(lat)))
        throw ConfigError("anchor lattice steps must be integral");
    std::array<std::int64_t, kMaxDim> step{};
    step[0] = static_cast<std::int64_t>(Lk);
    for (int i = 1; i < h.d; ++i) step[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(lat);

    std::vector<Point> pts;
    // first multiple of step >= lo, per axis
    std::array<std::int64_t, kMaxDim> first{}, count{};
    std::int64_t total = 1;
    for (int i = 0; i < h.d; ++i) {
        std::int64_t s = step[static_cast<std::size_t>(i)];
        std::int64_t lo = window.lo[static_cast<std::size_t>(i)];
        std::int64_t hi = window.hi[static_cast<std::size_t>(i)];
        std::int64_t f = (lo >= 0) ? ((lo + s - 1) / s) * s : -((-lo) / s) * s;
        if (f < lo) f += s;
        first[static_cast<std::size_t>(i)] = f;
        std::int64_t c = (f >= hi) ? 0 : (hi - 1 - f) / s + 1;
        count[static_cast<std::size_t>(i)] = c;
        total *= c;
    }
    if (total == 0) return pts;
    pts.reserve(static_cast<std::size_t>(total));
    std::array<std::int64_t, kMaxDim> idx{};
    for (std::int64_t n = 0; n < total; ++n) {
        Point p;
        std::int64_t rem = n;
        for (int i = h.d - 1; i >= 0; --i) {
            idx[static_cast<std::size_t>(i)] = rem % count[static_cast<std::size_t>(i)];
            rem /= count[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < h.d; ++i)
            p[i] = first[static_cast<std::size_t>(i)] +
                   idx[static_cast<std::size_t>(i)] * step[static_cast<std::size_t>(i)];
        pts.push_back(p);
    }
    return pts;
}

std::vector<Point> quasi_cover(const ScaleHierarchy& h, int k, const Point& parent_anchor) {
    if (k < 1 || k > h.k_max) throw ConfigError("quasi_cover needs a scale k >= 1");
    Direction e1 = make_direction(h.d, [&] {
        std::vector<double> v(static_cast<std::size_t>(h.d), 0.0);
        v[0] = 1.0;
        return v;
    }());
    LatticeBox parent = box_b2(h, k, parent_anchor, e1).lattice_box();

    // Candidate anchors: pad the parent by one child box on every side, then
    // keep those whose inner open box sits inside the parent lattice box.
    double Lc = h.L[static_cast<std::size_t>(k - 1)];
    double latc = 3.0 * h.c_tilde * h.Ltilde[static_cast<std::size_t>(k - 1)];
    LatticeBox search = parent;
    search.lo[0] -= static_cast<std::int64_t>(Lc) + 1;
    search.hi[0] += static_cast<std::int64_t>(Lc) + 1;
    for (int i = 1; i < h.d; ++i) {
        search.lo[static_cast<std::size_t>(i)] -= static_cast<std::int64_t>(latc) + 1;
        search.hi[static_cast<std::size_t>(i)] += static_cast<std::int64_t>(latc) + 1;
    }
    std::vector<Point> out;
    for (const Point& y : lattice_points(h, k - 1, search)) {
        LatticeBox inner = box_b1dot(h, k - 1, y, e1).lattice_box();
        if (!inner.empty() && parent.contains_box(inner)) out.push_back(y);
    }
    return out;
}

std::vector<Point> tile_uncovered(const ScaleHierarchy& h, int k, const Point& parent_anchor,
                                  std::int64_t max_sites) {
    Direction e1 = make_direction(h.d, [&] {
        std::vector<double> v(static_cast<std::size_t>(h.d), 0.0);
        v[0] = 1.0;
        return v;
    }());
    LatticeBox parent = box_b2(h, k, parent_anchor, e1).lattice_box();
    if (parent.site_count() > max_sites)
        throw CapacityError("tile check needs " + std::to_string(parent.site_count()) +
                            " sites, cap " + std::to_string(max_sites));
    std::vector<LatticeBox> covers;
    for (const Point& y : quasi_cover(h, k, parent_anchor))
        covers.push_back(box_b1tilde(h, k - 1, y, e1).lattice_box());
    std::vector<Point> uncovered;
    const std::int64_t n = parent.site_count();
    for (std::int64_t i = 0; i < n; ++i) {
        Point p = parent.site_at(i);
        bool hit = false;
        for (const auto& c : covers)
            if (c.contains(p)) {
                hit = true;
                break;
            }
        if (!hit) uncovered.push_back(p);
    }
    return uncovered;
}

LatticeBox dependency_region(const ScaleHierarchy& h, int k, const Point& anchor) {
    if (k < 0 || k > h.k_max) throw ConfigError("scale index out of range");
    double Lk = h.L[static_cast<std::size_t>(k)];
    double Ak = h.A[static_cast<std::size_t>(k)];
    double cLt = h.c_tilde * h.Ltilde[static_cast<std::size_t>(k)];
    double cAt = h.c_tilde * h.Atilde[static_cast<std::size_t>(k)];
    LatticeBox b;
    b.d = h.d;
    std::int64_t ilo, ihi;
    interval_to_int(-Ak, Lk + Ak / 11.0, true, ilo, ihi);
    b.lo[0] = anchor[0] + ilo;
    b.hi[0] = anchor[0] + ihi;
    for (int i = 1; i < h.d; ++i) {
        interval_to_int(-cAt, 3.0 * cLt + cAt, true, ilo, ihi);
        b.lo[static_cast<std::size_t>(i)] = anchor[i] + ilo;
        b.hi[static_cast<std::size_t>(i)] = anchor[i] + ihi;
    }
    return b;
}

std::int64_t StripIndexer::index(const Point& p) const {
    return static_cast<std::int64_t>(std::floor(dir.dot(p) / width + 0.5));
}

bool StripIndexer::in_strip(const Point& p, std::int64_t i) const {
    const double plane = static_cast<double>(i) * width;
    const double a = dir.dot(p) - plane;
    Point q = p;
    for (int ax = 0; ax < dir.d; ++ax) {
        for (int s = -1; s <= 1; s += 2) {
            q[ax] = p[ax] + s;
            double b = dir.dot(q) - plane;
            if (a * b <= 0.0) return true;
            q[ax] = p[ax];
        }
    }
    return false;
}

bool StripIndexer::in_truncated_strip(const Point& p, std::int64_t i, const Point& ref,
                                      double lateral_halfwidth) const {
    if (!in_strip(p, i)) return false;
    double y[kMaxDim];
    dir.frame_coords(p, ref, y);
    for (int ax = 1; ax < dir.d; ++ax)
        if (std::abs(y[ax]) >= lateral_halfwidth) return false;
    return true;
}

}  // namespace rwre
