#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "rmup/ensemble.hpp"

namespace rmup {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t state = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        state ^= p[i];
        state *= 0x100000001b3ull;
    }
    return state;
}

// Digest of the given block columns (all variables, all realisations).
inline std::uint64_t column_digest(const Ensemble& e, std::span<const int> blocks) {
    std::uint64_t state = kFnvOffset;
    for (int v = 0; v < e.n_vars(); ++v)
        for (int b : blocks) {
            const auto m = e.members(v, b);
            state = fnv1a(m.data(), m.size() * sizeof(double), state);
        }
    return state;
}

inline std::uint64_t file_digest(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for digest: " + path.string());
    std::uint64_t state = kFnvOffset;
    char buf[1 << 16];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0)
        state = fnv1a(buf, static_cast<std::size_t>(f.gcount()), state);
    return state;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

}  // namespace rmup
