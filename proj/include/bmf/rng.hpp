#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bmf::rng {

/// All random draws in the library go through these helpers on top of
/// std::mt19937_64, whose output stream is pinned by the standard. The
/// standard distributions are not portable across library implementations,
/// so they are not used anywhere; a seed fully determines every result.
using Engine = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection; bound must be positive.
inline std::uint64_t uniform_below(Engine& gen, std::uint64_t bound) {
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    for (;;) {
        const std::uint64_t u = gen();
        if (u < limit) return u % bound;
    }
}

/// Bernoulli(theta) bit from the top 53 bits of one engine draw.
inline bool bernoulli(Engine& gen, double theta) {
    constexpr double two53 = 9007199254740992.0;
    const auto threshold = static_cast<std::uint64_t>(theta * two53);
    return (gen() >> 11) < threshold;
}

/// k distinct values from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(Engine& gen, std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t r = i + static_cast<std::size_t>(uniform_below(gen, n - i));
        std::swap(pool[i], pool[r]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace bmf::rng
