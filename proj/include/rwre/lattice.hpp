#pragma once
// Integer lattice primitives shared by the environment, geometry and walk code.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwre {

// Hard cap on the ambient dimension. Walk state and transition rows are kept
// in fixed-size arrays so the simulation loop never allocates.
inline constexpr int kMaxDim = 6;

struct Point {
    std::array<std::int64_t, kMaxDim> coord{};

    std::int64_t& operator[](int i) { return coord[static_cast<std::size_t>(i)]; }
    std::int64_t operator[](int i) const { return coord[static_cast<std::size_t>(i)]; }
    bool operator==(const Point&) const = default;
};

inline Point make_point(std::initializer_list<std::int64_t> coords) {
    if (coords.size() > static_cast<std::size_t>(kMaxDim))
        throw std::invalid_argument("point has too many coordinates");
    Point p;
    int i = 0;
    for (auto c : coords) p[i++] = c;
    return p;
}

// Axis-aligned half-open integer box: sites z with lo[i] <= z[i] < hi[i].
struct LatticeBox {
    int d = 1;
    std::array<std::int64_t, kMaxDim> lo{};
    std::array<std::int64_t, kMaxDim> hi{};

    bool contains(const Point& p) const {
        for (int i = 0; i < d; ++i)
            if (p[i] < lo[static_cast<std::size_t>(i)] || p[i] >= hi[static_cast<std::size_t>(i)]) return false;
        return true;
    }

    std::int64_t extent(int i) const { return hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]; }

    std::int64_t site_count() const {
        std::int64_t n = 1;
        for (int i = 0; i < d; ++i) {
            std::int64_t e = extent(i);
            if (e <= 0) return 0;
            if (n > (INT64_MAX / e)) throw std::overflow_error("lattice box site count overflow");
            n *= e;
        }
        return n;
    }

    // Row-major linear index; caller guarantees containment.
    std::int64_t index_of(const Point& p) const {
        std::int64_t idx = 0;
        for (int i = 0; i < d; ++i) idx = idx * extent(i) + (p[i] - lo[static_cast<std::size_t>(i)]);
        return idx;
    }

    Point site_at(std::int64_t idx) const {
        Point p;
        for (int i = d - 1; i >= 0; --i) {
            std::int64_t e = extent(i);
            p[i] = lo[static_cast<std::size_t>(i)] + idx % e;
            idx /= e;
        }
        return p;
    }

    bool intersects(const LatticeBox& o) const {
        for (int i = 0; i < d; ++i) {
            auto l = std::max(lo[static_cast<std::size_t>(i)], o.lo[static_cast<std::size_t>(i)]);
            auto h = std::min(hi[static_cast<std::size_t>(i)], o.hi[static_cast<std::size_t>(i)]);
            if (l >= h) return false;
        }
        return true;
    }

    bool contains_box(const LatticeBox& o) const {
        for (int i = 0; i < d; ++i) {
            if (o.extent(i) <= 0) continue;  // empty along this axis
            if (o.lo[static_cast<std::size_t>(i)] < lo[static_cast<std::size_t>(i)] ||
                o.hi[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) return false;
        }
        return true;
    }

    bool empty() const {
        for (int i = 0; i < d; ++i)
            if (extent(i) <= 0) return true;
        return false;
    }

    std::string to_string() const {
        std::string s = "[";
        for (int i = 0; i < d; ++i) {
            if (i) s += " x ";
            s += "[" + std::to_string(lo[static_cast<std::size_t>(i)]) + "," +
                 std::to_string(hi[static_cast<std::size_t>(i)]) + ")";
        }
        return s + "]";
    }
};

inline std::int64_t l1_norm(const Point& p, int d) {
    std::int64_t s = 0;
    for (int i = 0; i < d; ++i) s += std::llabs(p[i]);
    return s;
}

}  // namespace rwre
