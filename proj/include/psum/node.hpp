#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "common.hpp"
#include "simd.hpp"

namespace psum {

/*
 * Small-array prefix-sum blocks of `fanout` keys, serialized into raw bytes so
 * that trees can address them by byte offset. Every layout exposes the same
 * static interface:
 *
 *   build(values, out)   write a node for `fanout` input values to `out`
 *   sum(ptr, i)          prefix sum of the block up to and including i
 *   update(ptr, i, d)    add d to the i-th input value
 *   back(ptr)            block total, in O(1)
 *
 * All multi-byte fields are native-endian. Nodes are 32-byte multiples so a
 * tree of nodes keeps every field aligned for vector loads.
 */

namespace detail {

constexpr std::size_t isqrt(std::size_t b) {
    std::size_t s = 0;
    while ((s + 1) * (s + 1) <= b) ++s;
    return s;
}

template <typename T>
T* field(std::byte* base, std::size_t offset) {
    return reinterpret_cast<T*>(base + offset);
}

template <typename T>
const T* field(const std::byte* base, std::size_t offset) {
    return reinterpret_cast<const T*>(base + offset);
}

}  // namespace detail

/// b keys kept in plain prefix-sum; update is one suffix add over all keys.
/// Layout: keys[b] (int64).
template <std::size_t B, simd_mode Mode = default_simd_mode>
struct flat_node {
    static_assert(B >= 2 && (B & (B - 1)) == 0);
    static constexpr std::size_t fanout = B;
    static constexpr std::size_t exact_bytes = 8 * B;
    static constexpr std::size_t bytes = exact_bytes;
    static constexpr bool restricted = false;

    static void build(std::span<const value_t> values, std::byte* out) {
        assert(values.size() == B);
        value_t* keys = detail::field<value_t>(out, 0);
        value_t acc = 0;
        for (std::size_t i = 0; i != B; ++i) keys[i] = acc = wrap_add(acc, values[i]);
    }

    static value_t sum(const std::byte* p, std::size_t i) {
        return detail::field<value_t>(p, 0)[i];
    }

    static void update(std::byte* p, std::size_t i, value_t delta) {
        suffix_add<Mode, B>(detail::field<value_t>(p, 0), i, delta);
    }

    static value_t back(const std::byte* p) { return sum(p, B - 1); }
};

/*
 * Two-level node: the b keys are split into s = sqrt(b) segments, each kept
 * in prefix-sum, plus an s-entry summary holding the prefix sums of the
 * segment totals (summary[0] = 0). sum(i) = summary[i/s] + keys[i]; update
 * is one suffix add on the summary and one inside a single segment.
 *
 * Layout: summary[s] (int64) | keys[b] (int64). 576 bytes for b = 64.
 */
template <std::size_t B, simd_mode Mode = default_simd_mode>
struct two_level_node {
    static constexpr std::size_t fanout = B;
    static constexpr std::size_t segment = detail::isqrt(B);
    static_assert(segment * segment == B && (segment == 4 || segment == 8 || segment == 16),
                  "two-level nodes support b in {16, 64, 256}");

    static constexpr std::size_t summary_offset = 0;
    static constexpr std::size_t keys_offset = 8 * segment;
    static constexpr std::size_t exact_bytes = 8 * (segment + B);
    static constexpr std::size_t bytes = exact_bytes;
    static constexpr bool restricted = false;

    static void build(std::span<const value_t> values, std::byte* out) {
        assert(values.size() == B);
        value_t* summary = detail::field<value_t>(out, summary_offset);
        value_t* keys = detail::field<value_t>(out, keys_offset);
        summary[0] = 0;
        for (std::size_t j = 0; j != segment; ++j) {
            value_t acc = 0;
            for (std::size_t k = 0; k != segment; ++k) {
                acc = wrap_add(acc, values[j * segment + k]);
                keys[j * segment + k] = acc;
            }
            if (j + 1 < segment) summary[j + 1] = wrap_add(summary[j], acc);
        }
    }

    static value_t sum(const std::byte* p, std::size_t i) {
        assert(i < B);
        return wrap_add(detail::field<value_t>(p, summary_offset)[i / segment],
                        detail::field<value_t>(p, keys_offset)[i]);
    }

    static void update(std::byte* p, std::size_t i, value_t delta) {
        assert(i < B);
        const std::size_t j = i / segment;
        suffix_add<Mode, segment>(detail::field<value_t>(p, summary_offset), j + 1, delta);
        suffix_add<Mode, segment>(detail::field<value_t>(p, keys_offset) + j * segment,
                                  i % segment, delta);
    }

    static value_t back(const std::byte* p) { return sum(p, B - 1); }

    static std::span<const value_t, segment> summary(const std::byte* p) {
        return std::span<const value_t, segment>(detail::field<value_t>(p, summary_offset), segment);
    }
    static std::span<const value_t, B> keys(const std::byte* p) {
        return std::span<const value_t, B>(detail::field<value_t>(p, keys_offset), B);
    }
};

/*
 * Two-level node for 8-bit deltas. Updates go to 16-bit buffers mirroring
 * the summary and keys (also kept in prefix-sum), so a single vector add
 * covers a whole buffer row. A wrapping 8-bit counter, initialized to 255,
 * flushes the buffers into the 64-bit fields every 256 updates: at most
 * 256 deltas of magnitude <= 128 accumulate, which stays inside int16.
 *
 * Layout: summary[s] (int64) | keys[b] (int64) | summary_buffer[s] (int16)
 *       | keys_buffer[b] (int16) | updates (uint8) | zero padding to 32 bytes.
 * Exact size is 10b + 10s + 1 bytes (721 for b = 64, 2721 for b = 256).
 */
template <std::size_t B, simd_mode Mode = default_simd_mode>
struct restricted_node {
    using base = two_level_node<B, Mode>;
    static constexpr std::size_t fanout = B;
    static constexpr std::size_t segment = base::segment;

    static constexpr std::size_t summary_offset = base::summary_offset;
    static constexpr std::size_t keys_offset = base::keys_offset;
    static constexpr std::size_t summary_buffer_offset = base::exact_bytes;
    static constexpr std::size_t keys_buffer_offset = summary_buffer_offset + 2 * segment;
    static constexpr std::size_t counter_offset = keys_buffer_offset + 2 * B;
    static constexpr std::size_t exact_bytes = counter_offset + 1;
    static constexpr std::size_t bytes = round_up(exact_bytes, 32);
    static constexpr bool restricted = true;

    static void build(std::span<const value_t> values, std::byte* out) {
        base::build(values, out);
        std::memset(out + summary_buffer_offset, 0, bytes - summary_buffer_offset);
        *detail::field<std::uint8_t>(out, counter_offset) = 255;
    }

    static value_t sum(const std::byte* p, std::size_t i) {
        assert(i < B);
        const std::size_t j = i / segment;
        value_t s = wrap_add(detail::field<value_t>(p, summary_offset)[j],
                             detail::field<value_t>(p, keys_offset)[i]);
        s = wrap_add(s, detail::field<std::int16_t>(p, summary_buffer_offset)[j]);
        return wrap_add(s, detail::field<std::int16_t>(p, keys_buffer_offset)[i]);
    }

    /// delta must fit in 8 signed bits.
    static void update(std::byte* p, std::size_t i, value_t delta) {
        assert(i < B);
        require_delta8(delta);
        std::uint8_t& updates = *detail::field<std::uint8_t>(p, counter_offset);
        if (++updates == 0) flush(p);
        const std::size_t j = i / segment;
        const auto d = static_cast<std::int16_t>(delta);
        suffix_add<Mode, segment>(detail::field<std::int16_t>(p, summary_buffer_offset), j + 1, d);
        suffix_add<Mode, segment>(detail::field<std::int16_t>(p, keys_buffer_offset) + j * segment,
                                  i % segment, d);
    }

    static value_t back(const std::byte* p) { return sum(p, B - 1); }

    /// Folds the buffers into summary/keys and zeroes them.
    static void flush(std::byte* p) {
        value_t* summary = detail::field<value_t>(p, summary_offset);
        value_t* keys = detail::field<value_t>(p, keys_offset);
        std::int16_t* sbuf = detail::field<std::int16_t>(p, summary_buffer_offset);
        std::int16_t* kbuf = detail::field<std::int16_t>(p, keys_buffer_offset);
        for (std::size_t j = 0; j != segment; ++j) summary[j] = wrap_add(summary[j], sbuf[j]);
        for (std::size_t i = 0; i != B; ++i) keys[i] = wrap_add(keys[i], kbuf[i]);
        std::memset(sbuf, 0, 2 * (segment + B));
    }

    static std::span<const std::int16_t, segment> summary_buffer(const std::byte* p) {
        return std::span<const std::int16_t, segment>(
            detail::field<std::int16_t>(p, summary_buffer_offset), segment);
    }
    static std::span<const std::int16_t, B> keys_buffer(const std::byte* p) {
        return std::span<const std::int16_t, B>(detail::field<std::int16_t>(p, keys_buffer_offset), B);
    }
    static std::uint8_t counter(const std::byte* p) {
        return *detail::field<std::uint8_t>(p, counter_offset);
    }
};

template <typename N>
concept node_layout = requires(std::span<const value_t> v, std::byte* p, const std::byte* cp,
                               std::size_t i, value_t d) {
    { N::fanout } -> std::convertible_to<std::size_t>;
    { N::bytes } -> std::convertible_to<std::size_t>;
    { N::restricted } -> std::convertible_to<bool>;
    N::build(v, p);
    { N::sum(cp, i) } -> std::same_as<value_t>;
    N::update(p, i, d);
    { N::back(cp) } -> std::same_as<value_t>;
};

/// A single owned node, handy on its own and in tests.
template <node_layout Node>
class node_block {
public:
    explicit node_block(std::span<const value_t> values) : m_bytes(Node::bytes) {
        require(values.size() == Node::fanout, "node_block: need exactly `fanout` values");
        Node::build(values, m_bytes.data());
    }

    static constexpr std::size_t fanout = Node::fanout;

    std::size_t size() const { return Node::fanout; }
    value_t sum(std::size_t i) const { return Node::sum(m_bytes.data(), i); }
    void update(std::size_t i, value_t delta) { Node::update(m_bytes.data(), i, delta); }
    value_t back() const { return Node::back(m_bytes.data()); }

    std::byte* data() { return m_bytes.data(); }
    const std::byte* data() const { return m_bytes.data(); }

private:
    aligned_bytes m_bytes;
};

}  // namespace psum
