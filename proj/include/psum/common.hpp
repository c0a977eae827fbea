#pragma once

#include <bit>
#include <cassert>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace psum {

using value_t = std::int64_t;

// Two's-complement wrapping arithmetic. Values are full-width random
// integers, so every structure and the oracle must overflow identically.
constexpr value_t wrap_add(value_t a, value_t b) noexcept {
    return static_cast<value_t>(static_cast<std::uint64_t>(a) +
                                static_cast<std::uint64_t>(b));
}

constexpr value_t wrap_sub(value_t a, value_t b) noexcept {
    return static_cast<value_t>(static_cast<std::uint64_t>(a) -
                                static_cast<std::uint64_t>(b));
}

constexpr value_t wrap_mul(value_t a, value_t b) noexcept {
    return static_cast<value_t>(static_cast<std::uint64_t>(a) *
                                static_cast<std::uint64_t>(b));
}

/// Raised on contract violations reachable from user input: empty arrays,
/// out-of-range indexes in checked mode, out-of-range restricted deltas,
/// unsupported fanouts.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const char* what) {
    if (!condition) throw usage_error(what);
}

inline void require_nonempty(std::size_t n) {
    require(n >= 1, "prefix-sum structures need at least one element");
}

// Signed 8-bit update range accepted by restricted nodes.
inline constexpr value_t delta8_min = -128;
inline constexpr value_t delta8_max = 127;

constexpr bool fits_delta8(value_t delta) noexcept {
    return delta >= delta8_min && delta <= delta8_max;
}

inline void require_delta8(value_t delta) {
    require(fits_delta8(delta), "delta must lie in [-128, 127] for restricted nodes");
}

/* bit tricks */

/// p & (p - 1): parent in the Fenwick interrogation tree.
constexpr std::uint64_t lsb_clear(std::uint64_t p) noexcept { return p & (p - 1); }

/// p & -p: step to the parent in the Fenwick updating tree.
constexpr std::uint64_t lsb_isolate(std::uint64_t p) noexcept { return p & (~p + 1); }

constexpr std::uint64_t ceil_log2(std::uint64_t x) noexcept {
    return x <= 1 ? 0 : 64 - std::countl_zero(x - 1);
}

constexpr std::uint64_t floor_log2(std::uint64_t x) noexcept {
    return 63 - std::countl_zero(x);
}

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) noexcept {
    return (a + b - 1) / b;
}

constexpr std::uint64_t round_up(std::uint64_t x, std::uint64_t multiple) noexcept {
    return ceil_div(x, multiple) * multiple;
}

/* access tracing */

// Structures report every array cell they touch to a tracer. The default
// tracer compiles to nothing; the analysis paths plug in a recorder.
struct null_tracer {
    constexpr void touch(std::size_t) const noexcept {}
};

class access_log {
public:
    explicit access_log(std::vector<std::size_t>* sink) : m_sink(sink) {}
    void touch(std::size_t position) const { m_sink->push_back(position); }

private:
    std::vector<std::size_t>* m_sink;
};

class access_counter {
public:
    explicit access_counter(std::uint64_t* count) : m_count(count) {}
    void touch(std::size_t) const noexcept { ++*m_count; }

private:
    std::uint64_t* m_count;
};

template <typename T>
concept tracer = requires(const T& t, std::size_t p) { t.touch(p); };

/* storage */

// Cache-line aligned, zero-initialized byte buffer for serialized nodes.
class aligned_bytes {
public:
    static constexpr std::size_t alignment = 64;

    aligned_bytes() = default;

    explicit aligned_bytes(std::size_t size) : m_size(size) {
        if (size == 0) return;
        void* raw = std::aligned_alloc(alignment, round_up(size, alignment));
        if (!raw) throw std::bad_alloc();
        std::memset(raw, 0, size);
        m_data.reset(static_cast<std::byte*>(raw));
    }

    aligned_bytes(const aligned_bytes& other) : aligned_bytes(other.m_size) {
        if (m_size) std::memcpy(m_data.get(), other.m_data.get(), m_size);
    }

    aligned_bytes& operator=(const aligned_bytes& other) {
        if (this != &other) {
            aligned_bytes copy(other);
            swap(copy);
        }
        return *this;
    }

    aligned_bytes(aligned_bytes&& other) noexcept { swap(other); }
    aligned_bytes& operator=(aligned_bytes&& other) noexcept {
        aligned_bytes tmp(std::move(other));
        swap(tmp);
        return *this;
    }

    void swap(aligned_bytes& other) noexcept {
        std::swap(m_data, other.m_data);
        std::swap(m_size, other.m_size);
    }

    std::byte* data() noexcept { return m_data.get(); }
    const std::byte* data() const noexcept { return m_data.get(); }
    std::size_t size() const noexcept { return m_size; }

private:
    struct deleter {
        void operator()(std::byte* p) const noexcept { std::free(p); }
    };
    std::unique_ptr<std::byte[], deleter> m_data;
    std::size_t m_size = 0;
};

/// The common contract: build from an array, then interleave sum/update.
template <typename S>
concept prefix_sum_structure =
    requires(S& s, const S& cs, std::size_t i, value_t delta) {
        { cs.size() } -> std::convertible_to<std::size_t>;
        { cs.sum(i) } -> std::same_as<value_t>;
        s.update(i, delta);
    };

}  // namespace psum
