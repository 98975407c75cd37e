#pragma once
// Multiscale geometry: the renormalization scale ladder, anchor lattices,
// rotated boxes and their boundary faces, quasi-covers and dependency regions,
// and strip indexing along a direction.
//
// Continuous boxes are half-open [lo, hi) per axis in the rotated frame
// before intersecting with Z^d, except the kinds the definitions give with
// strict inequalities (the inner open box and the |x| < L slabs). Extents
// like L + L/11 are computed in that exact form so integer endpoints land
// exactly.

#include <cstdint>
#include <vector>

#include "rwre/errors.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

struct Direction {
    int d = 1;
    std::vector<double> ell;  // unit vector
    std::vector<double> R;    // d x d row-major; symmetric Householder, R e1 = ell
    bool axis_aligned = true;

    double dot(const Point& p) const {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += ell[static_cast<std::size_t>(i)] * static_cast<double>(p[i]);
        return s;
    }
    // Coordinates of (p - anchor) in the rotated frame. R is symmetric, so
    // applying R is the same as applying R^T.
    void frame_coords(const Point& p, const Point& anchor, double* out) const;
    // i-th column of R: the image of e_{i+1}; columns 2..d span ell-perp.
    std::vector<double> basis(int i) const;
};

Direction make_direction(int d, std::vector<double> ell_raw);

struct ScaleHierarchy {
    int d = 1;
    std::int64_t L0 = 0;
    std::int64_t N0 = 0;
    std::int64_t Ntilde0 = 0;
    double c_tilde = 1.0;
    int k_max = 0;
    bool production_defaults = false;

    std::vector<double> L;       // L_k = N0^k L0
    std::vector<double> Ltilde;  // Ltilde_k = Ntilde0^k L0
    std::vector<double> A;       // A_k = sum_{i<=k} L_i
    std::vector<double> Atilde;  // same for Ltilde
    std::vector<bool> sep_ok;    // A_{k-1} <= L_k/11 and Atilde_{k-1} <= Ltilde_k/11

    bool separation_ok() const {
        for (bool b : sep_ok)
            if (!b) return false;
        return true;
    }
};

// Scaled-down overrides are allowed; separation violations are recorded in
// sep_ok rather than rejected. Overflowing scales are a range error.
ScaleHierarchy make_hierarchy(int d, std::int64_t L0, std::int64_t N0, std::int64_t Ntilde0,
                              double c_tilde, int k_max);
// N0 = 1100 d^3, Ntilde0 = 11 d^3 N0^2.
ScaleHierarchy make_production_hierarchy(int d, std::int64_t L0, double c_tilde, int k_max);

enum class BoxKind {
    B1tilde,  // [0, L) x [0, 3 c Lt)^{d-1}
    B1dot,    // (0, L) x (0, 3 c Lt)^{d-1}, the open inner box
    B2,       // [-L, L + L/11) x [-c Lt, 4 c Lt)^{d-1}
    B0L,      // (-L, L) x (-2L^3, 2L^3)^{d-1}, strict
    SlabU,    // (-L, L), d = 1 slab, strict
};

enum class Membership { Interior, Boundary, BoundaryPlus, Exterior };

struct BoxSpec {
    BoxKind kind = BoxKind::B2;
    int d = 1;
    Point anchor{};
    Direction dir;
    double L = 0.0;
    double Ltilde = 0.0;
    double c_tilde = 1.0;

    bool contains(const Point& p) const;
    Membership classify(const Point& p) const;
    // Threshold t such that the plus face is {z in boundary : (z-anchor).ell >= t}.
    // Only B2, B0L and SlabU have a plus face.
    double plus_threshold() const;
    bool has_plus_face() const;

    // Integer box of the lattice content; axis-aligned directions only.
    LatticeBox lattice_box() const;

    // Per-axis continuous bounds in the rotated frame and whether the lower
    // endpoint is included (upper endpoints are always excluded; strict kinds
    // exclude both and are handled via open_low).
    void bounds(int axis, double& lo, double& hi, bool& include_lo) const;
};

BoxSpec box_b1tilde(const ScaleHierarchy& h, int k, const Point& anchor, const Direction& dir);
BoxSpec box_b1dot(const ScaleHierarchy& h, int k, const Point& anchor, const Direction& dir);
BoxSpec box_b2(const ScaleHierarchy& h, int k, const Point& anchor, const Direction& dir);
// Scale-free variants used by the drift-condition estimators (Ltilde = L).
BoxSpec box_b1tilde_free(int d, double c, double L, const Point& anchor, const Direction& dir);
BoxSpec box_b2_free(int d, double c, double L, const Point& anchor, const Direction& dir);
BoxSpec box_b0(int d, double L, const Direction& dir);
BoxSpec box_slab_u(double L);

// Anchor lattice L_k = L_k Z x (3 c Ltilde_k Z)^{d-1} restricted to a window.
// The lateral step 3 c Ltilde_k must be integral (validated).
std::vector<Point> lattice_points(const ScaleHierarchy& h, int k, const LatticeBox& window);

// Scale-(k-1) anchors y whose inner open box is contained in the parent's B2
// (lattice containment). Axis-aligned directions only.
std::vector<Point> quasi_cover(const ScaleHierarchy& h, int k, const Point& parent_anchor);

// Parent-B2 sites not covered by any quasi-cover child's B1tilde. Empty at
// production-compatible scales (11 | N0); a right-edge sliver otherwise.
std::vector<Point> tile_uncovered(const ScaleHierarchy& h, int k, const Point& parent_anchor,
                                  std::int64_t max_sites = 2'000'000);

// All transitions the classification of B2(x, k) may read: the box itself
// plus every descendant's boxes, padded by the running scale sums.
LatticeBox dependency_region(const ScaleHierarchy& h, int k, const Point& anchor);

// Band index along ell: I(z) = i on z.ell in [i W - W/2, i W + W/2).
struct StripIndexer {
    Direction dir;
    double width = 0.0;

    std::int64_t index(const Point& p) const;
    // Divider strip H_i: some unit neighbor lies on the other side of (or on)
    // the hyperplane z.ell = i W.
    bool in_strip(const Point& p, std::int64_t i) const;
    // Truncated strip: additionally every lateral frame coordinate relative
    // to ref stays strictly below lateral_halfwidth in absolute value.
    bool in_truncated_strip(const Point& p, std::int64_t i, const Point& ref,
                            double lateral_halfwidth) const;
};

}  // namespace rwre
