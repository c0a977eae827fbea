#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <type_traits>

#if defined(__AVX2__) || defined(__SSE2__)
#include <immintrin.h>
#endif

#include "common.hpp"

namespace psum {

enum class simd_mode {
    scalar,         // plain loop over the affected lanes
    lane_parallel,  // broadcast delta, mask with the table row, add all lanes at once
};

#if defined(PSUM_SCALAR_ONLY)
inline constexpr simd_mode default_simd_mode = simd_mode::scalar;
#else
inline constexpr simd_mode default_simd_mode = simd_mode::lane_parallel;
#endif

constexpr bool avx2_enabled() {
#if defined(__AVX2__)
    return true;
#else
    return false;
#endif
}

/*
 * rows[t] has its first t lanes zero and the remaining S - t lanes all-ones,
 * for t = 0..S. Adding (delta & rows[t]) lane-wise therefore updates exactly
 * the suffix starting at lane t; row 0 updates every lane.
 */
template <typename Lane, std::size_t S>
struct alignas(32) mask_table {
    using unsigned_lane = std::make_unsigned_t<Lane>;
    std::array<std::array<unsigned_lane, S>, S + 1> rows;

    static constexpr mask_table make() {
        mask_table table{};
        for (std::size_t t = 0; t <= S; ++t) {
            for (std::size_t j = 0; j != S; ++j) {
                table.rows[t][j] = j < t ? unsigned_lane(0) : unsigned_lane(~unsigned_lane(0));
            }
        }
        return table;
    }
};

template <typename Lane, std::size_t S>
inline constexpr mask_table<Lane, S> masks = mask_table<Lane, S>::make();

namespace detail {

template <typename Lane>
constexpr Lane lane_add(Lane a, Lane b) {
    using U = std::make_unsigned_t<Lane>;
    return static_cast<Lane>(static_cast<U>(static_cast<U>(a) + static_cast<U>(b)));
}

template <typename Lane, std::size_t S>
void suffix_add_masked(Lane* lanes, std::size_t t, Lane delta) {
    using U = std::make_unsigned_t<Lane>;
    const auto& row = masks<Lane, S>.rows[t];
    const U broadcast = static_cast<U>(delta);
    for (std::size_t j = 0; j != S; ++j) {
        lanes[j] = static_cast<Lane>(static_cast<U>(static_cast<U>(lanes[j]) + (broadcast & row[j])));
    }
}

}  // namespace detail

/// lanes[j] += delta for every j >= t, wrapping. 0 <= t <= S.
template <simd_mode Mode, std::size_t S, typename Lane>
inline void suffix_add(Lane* lanes, std::size_t t, Lane delta) {
    static_assert(std::is_same_v<Lane, std::int64_t> || std::is_same_v<Lane, std::int16_t>);
    assert(t <= S);
    if constexpr (Mode == simd_mode::scalar) {
        for (std::size_t j = t; j < S; ++j) lanes[j] = detail::lane_add(lanes[j], delta);
    } else {
#if defined(__AVX2__)
        if constexpr (std::is_same_v<Lane, std::int64_t> && S % 4 == 0) {
            const __m256i d = _mm256_set1_epi64x(delta);
            const auto* row = masks<Lane, S>.rows[t].data();
            for (std::size_t g = 0; g != S; g += 4) {
                __m256i* p = reinterpret_cast<__m256i*>(lanes + g);
                __m256i mask = _mm256_load_si256(reinterpret_cast<const __m256i*>(row + g));
                _mm256_storeu_si256(p, _mm256_add_epi64(_mm256_loadu_si256(p),
                                                        _mm256_and_si256(d, mask)));
            }
            return;
        } else if constexpr (std::is_same_v<Lane, std::int16_t> && S == 16) {
            __m256i* p = reinterpret_cast<__m256i*>(lanes);
            __m256i mask = _mm256_load_si256(
                reinterpret_cast<const __m256i*>(masks<Lane, S>.rows[t].data()));
            _mm256_storeu_si256(p, _mm256_add_epi16(_mm256_loadu_si256(p),
                                                    _mm256_and_si256(_mm256_set1_epi16(delta), mask)));
            return;
        } else if constexpr (std::is_same_v<Lane, std::int16_t> && S == 8) {
            __m128i* p = reinterpret_cast<__m128i*>(lanes);
            __m128i mask = _mm_load_si128(
                reinterpret_cast<const __m128i*>(masks<Lane, S>.rows[t].data()));
            _mm_storeu_si128(p, _mm_add_epi16(_mm_loadu_si128(p),
                                              _mm_and_si128(_mm_set1_epi16(delta), mask)));
            return;
        }
#endif
        detail::suffix_add_masked<Lane, S>(lanes, t, delta);
    }
}

}  // namespace psum
