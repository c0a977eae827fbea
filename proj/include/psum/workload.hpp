#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"

namespace psum {

/*
 * splitmix64: state += 0x9e3779b97f4a7c15, then the output is the state
 * pushed through two xor-shift-multiply rounds. Spelled out here so the
 * streams can be regenerated outside this code base.
 */
class splitmix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr splitmix64(std::uint64_t seed) : m_state(seed) {}

    constexpr std::uint64_t operator()() {
        std::uint64_t z = (m_state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t(0); }

    /// Uniform in [0, n): high 64 bits of the 128-bit product x * n.
    constexpr std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

private:
    std::uint64_t m_state;
};

inline constexpr std::uint64_t default_seed = 0x5eed;
inline constexpr std::size_t default_queries = 10000;

/// Update amount for index i: i itself, or i mod 256 - 128 when deltas are
/// restricted to 8 bits.
constexpr value_t workload_delta(std::size_t i, unsigned delta_bits) {
    return delta_bits == 8 ? static_cast<value_t>(i % 256) - 128 : static_cast<value_t>(i);
}

struct workload {
    std::size_t n = 0;
    std::uint64_t seed = default_seed;
    unsigned delta_bits = 64;
    std::vector<value_t> values;       // initial array
    std::vector<std::size_t> indexes;  // used for both sum(i) and update(i, delta(i))

    value_t delta(std::size_t i) const { return workload_delta(i, delta_bits); }
};

/*
 * One generator seeded with `seed` draws `count` indexes in [0, n) first,
 * then the n initial values as raw 64-bit words.
 */
inline workload make_workload(std::size_t n, std::size_t count = default_queries,
                              std::uint64_t seed = default_seed, unsigned delta_bits = 64) {
    require_nonempty(n);
    require(delta_bits == 8 || delta_bits == 64, "delta width must be 8 or 64 bits");
    workload w;
    w.n = n;
    w.seed = seed;
    w.delta_bits = delta_bits;
    splitmix64 rng(seed);
    w.indexes.resize(count);
    for (auto& i : w.indexes) i = rng.below(n);
    w.values.resize(n);
    for (auto& v : w.values) v = static_cast<value_t>(rng());
    return w;
}

}  // namespace psum
