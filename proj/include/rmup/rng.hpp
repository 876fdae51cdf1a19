#pragma once

#include <cstdint>
#include <random>

#include "rmup/stats.hpp"

namespace rmup {

// splitmix64 step; used both as a stream-key mixer and for rank-tie hashing.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ b); }

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ c);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return mix64(mix64(a, b, c) ^ d);
}

// Deterministic substream of uniforms/normals keyed by a mixed 64-bit value.
// Normal draws go through the inverse CDF so the stream depends only on the
// engine, never on a library's distribution internals.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) : gen_(mix64(key)) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform on (0,1), never exactly 0 or 1
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    }

    double normal() { return stats::normal_quantile(uniform()); }

private:
    std::mt19937_64 gen_;
};

}  // namespace rmup
