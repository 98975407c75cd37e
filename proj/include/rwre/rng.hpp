#pragma once
// Deterministic RNG streams. Every random quantity in the lab is derived by
// hashing (master seed, purpose tag, coordinates / trial index), so results
// are reproducible regardless of thread count or evaluation order, and
// environments extend to new sites without replaying old draws.

#include <cstdint>
#include <limits>

#include "rwre/lattice.hpp"

namespace rwre {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t v) {
    std::uint64_t s = v;
    return splitmix64(s);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}

// Small counter-free engine; satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }
    result_type operator()() { return splitmix64(state_); }

    double u01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

// Stream tags keep unrelated consumers of the same master seed independent.
enum class StreamTag : std::uint64_t {
    EnvSite = 1,
    Trial = 2,
    EnvOfTrial = 3,
    NullMark = 4,
    Scratch = 5,
};

inline std::uint64_t site_seed(std::uint64_t master, StreamTag tag, const Point& p, int d) {
    std::uint64_t h = hash_combine(master, static_cast<std::uint64_t>(tag));
    for (int i = 0; i < d; ++i) h = hash_combine(h, static_cast<std::uint64_t>(p[i]));
    return h;
}

inline std::uint64_t derived_seed(std::uint64_t master, StreamTag tag, std::uint64_t a,
                                  std::uint64_t b = 0) {
    std::uint64_t h = hash_combine(master, static_cast<std::uint64_t>(tag));
    h = hash_combine(h, a);
    return hash_combine(h, b);
}

}  // namespace rwre
