#pragma once

#include <span>
#include <vector>

#include "common.hpp"

namespace psum {

/// Physical slot of logical cell i once a hole is left after every d cells.
constexpr std::size_t remap(std::size_t i, std::size_t d) noexcept { return i + i / d; }

/*
 * Fenwick cell values for `values`, in logical order: out[0] = 0 and out[q]
 * holds the sum of A[q - lsb(q), q). Built top-down: the cells at base + 2^j
 * take prefix sums of the current range, then each A[2^j, 2^(j+1) - 1) slice
 * is handled the same way with base moved forward.
 */
inline std::vector<value_t> fenwick_build_recursive(std::span<const value_t> values) {
    const std::size_t n = values.size();
    std::vector<value_t> cells(n + 1, 0);
    auto build = [&](auto&& self, std::size_t base, std::size_t len) -> void {
        value_t prefix = 0;
        std::size_t taken = 0;
        for (std::size_t w = 1; w <= len; w <<= 1) {
            for (; taken < w; ++taken) prefix = wrap_add(prefix, values[base + taken]);
            cells[base + w] = prefix;
        }
        for (std::size_t w = 1; w <= len; w <<= 1) {
            std::size_t sub = std::min(w - 1, len - w);
            if (sub) self(self, base + w, sub);
        }
    };
    build(build, 0, n);
    return cells;
}

/// Same cells in O(n): each cell forwards its total to the next cell whose
/// range contains it.
inline std::vector<value_t> fenwick_build_linear(std::span<const value_t> values) {
    const std::size_t n = values.size();
    std::vector<value_t> cells(n + 1, 0);
    for (std::size_t q = 1; q <= n; ++q) cells[q] = values[q - 1];
    for (std::size_t q = 1; q <= n; ++q) {
        std::size_t r = q + lsb_isolate(q);
        if (r <= n) cells[r] = wrap_add(cells[r], cells[q]);
    }
    return cells;
}

/*
 * Classic Fenwick tree (Holed = false), or the same tree with one unused
 * slot after every d cells (Holed = true) so that the power-of-two strided
 * cells visited by a query do not all collide in the same cache set.
 * Tracers see physical slot indexes.
 */
template <bool Holed = false, tracer Tracer = null_tracer>
class basic_fenwick_tree {
public:
    static constexpr bool holed = Holed;
    static constexpr std::size_t default_spacing = std::size_t(1) << 14;

    explicit basic_fenwick_tree(std::span<const value_t> values,
                                std::size_t spacing = default_spacing, Tracer tracer = {})
        : m_size(values.size()), m_tracer(tracer) {
        require_nonempty(m_size);
        if constexpr (Holed) {
            require(spacing >= 1 && std::has_single_bit(spacing), "hole spacing must be a power of two");
            m_shift = floor_log2(spacing);
        }
        std::vector<value_t> cells = fenwick_build_linear(values);
        if constexpr (Holed) {
            m_tree.assign(storage_words(m_size, spacing), 0);
            for (std::size_t q = 0; q <= m_size; ++q) m_tree[slot(q)] = cells[q];
        } else {
            m_tree = std::move(cells);
        }
    }

    static constexpr std::size_t storage_words(std::size_t n, std::size_t spacing = default_spacing) {
        if constexpr (Holed) return n + 1 + n / spacing;
        return n + 1;
    }

    std::size_t size() const { return m_size; }
    std::size_t spacing() const { return std::size_t(1) << m_shift; }
    std::span<const value_t> data() const { return m_tree; }
    std::span<value_t> data() { return m_tree; }

    std::size_t slot(std::size_t q) const {
        if constexpr (Holed) return q + (q >> m_shift);
        return q;
    }

    /// Cell q as a logical value, independent of the holes.
    value_t cell(std::size_t q) const { return m_tree[slot(q)]; }

    value_t sum(std::size_t i) const {
        assert(i < m_size);
        value_t s = 0;
        for (std::size_t p = i + 1; p; p = lsb_clear(p)) {
            std::size_t k = slot(p);
            m_tracer.touch(k);
            s = wrap_add(s, m_tree[k]);
        }
        return s;
    }

    void update(std::size_t i, value_t delta) {
        assert(i < m_size);
        for (std::size_t p = i + 1; p <= m_size; p += lsb_isolate(p)) {
            std::size_t k = slot(p);
            m_tracer.touch(k);
            m_tree[k] = wrap_add(m_tree[k], delta);
        }
    }

private:
    std::size_t m_size;
    std::size_t m_shift = 0;
    std::vector<value_t> m_tree;
    [[no_unique_address]] Tracer m_tracer;
};

template <tracer Tracer = null_tracer>
using fenwick_tree = basic_fenwick_tree<false, Tracer>;

template <tracer Tracer = null_tracer>
using holed_fenwick_tree = basic_fenwick_tree<true, Tracer>;

}  // namespace psum
