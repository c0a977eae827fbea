#pragma once

#include <span>
#include <vector>

#include "common.hpp"
#include "node.hpp"

namespace psum {

/// Base-b digits of p, least significant first. b must be a power of two.
inline std::vector<std::size_t> digits(std::uint64_t p, std::size_t b) {
    assert(p >= 1 && std::has_single_bit(b) && b >= 2);
    const std::size_t shift = floor_log2(b);
    std::vector<std::size_t> out;
    for (; p; p >>= shift) out.push_back(p & (b - 1));
    return out;
}

/*
 * Fenwick cells over base b, in logical order (out[0] = 0). Cell q with
 * lowest nonzero base-b digit d at position j covers A[q - d*b^j, q).
 * Built by partitioning [l, limit] at the endpoints l + m*b^j
 * (m = 1..b-1), storing each prefix sum, then recursing into the gaps
 * between consecutive endpoints one digit lower.
 */
inline std::vector<value_t> bary_fenwick_cells(std::span<const value_t> values, std::size_t b) {
    require(b >= 2 && std::has_single_bit(b), "fanout must be a power of two");
    const std::size_t n = values.size();
    std::vector<value_t> cells(n + 1, 0);
    if (n == 0) return cells;

    std::size_t top = 1;
    while (top <= n / b) top *= b;  // largest power of b not above n

    auto build = [&](auto&& self, std::size_t l, std::size_t width, std::size_t limit) -> void {
        value_t prefix = 0;
        std::size_t taken = 0;
        for (std::size_t m = 1; m < b; ++m) {
            std::size_t r = m * width;
            if (l + r > limit) break;
            for (; taken < r; ++taken) prefix = wrap_add(prefix, values[l + taken]);
            cells[l + r] = prefix;
        }
        if (width == 1) return;
        for (std::size_t m = 0; m < b; ++m) {
            std::size_t start = l + m * width;
            if (start >= limit) break;
            self(self, start, width / b, std::min(limit, start + width - 1));
        }
    };
    build(build, 0, top, n);
    return cells;
}

/*
 * b-ary Fenwick tree. Cells 1..n are packed b at a time into nodes: node k
 * holds cells kb+1 .. (k+1)b, with node.sum(m) returning cell kb+1+m. Cells
 * that are multiples of b sit at the end of their node and are read with
 * back(). An update adds to a suffix of one node (all affected low-level
 * cells plus the first affected cell above them) and to the last key of up
 * to b-1 nodes per higher digit.
 *
 * Tracers see logical cell indexes.
 */
template <node_layout Node, tracer Tracer = null_tracer>
class fenwick_tree_bary {
public:
    using node_type = Node;
    static constexpr std::size_t fanout = Node::fanout;
    static constexpr std::size_t log_fanout = floor_log2(fanout);
    static_assert(std::has_single_bit(fanout));
    static_assert(!Node::restricted, "b-ary Fenwick trees take general nodes");

    explicit fenwick_tree_bary(std::span<const value_t> values, Tracer tracer = {})
        : m_size(values.size()), m_tracer(tracer) {
        require_nonempty(m_size);
        std::vector<value_t> cells = bary_fenwick_cells(values, fanout);
        const std::size_t nodes = ceil_div(m_size, fanout);
        m_bytes = aligned_bytes(nodes * Node::bytes);
        std::vector<value_t> inputs(fanout);
        for (std::size_t k = 0; k != nodes; ++k) {
            for (std::size_t m = 0; m != fanout; ++m) {
                std::size_t q = k * fanout + 1 + m;
                if (q > m_size) inputs[m] = 0;
                else inputs[m] = m ? wrap_sub(cells[q], cells[q - 1]) : cells[q];
            }
            Node::build(inputs, node_ptr(k));
        }
    }

    static std::size_t storage_bytes(std::size_t n) { return ceil_div(n, fanout) * Node::bytes; }

    std::size_t size() const { return m_size; }
    std::size_t bytes() const { return m_bytes.size(); }

    /// Logical cell q, 1 <= q <= n.
    value_t cell(std::size_t q) const {
        assert(q >= 1 && q <= m_size);
        return Node::sum(node_ptr((q - 1) >> log_fanout), (q - 1) & (fanout - 1));
    }

    value_t sum(std::size_t i) const {
        assert(i < m_size);
        const std::size_t p = i + 1;
        value_t s = 0;
        // Walk the digits from the top; each nonzero one names a cell.
        std::size_t level = (floor_log2(p) / log_fanout) * log_fanout;
        std::size_t q = 0;
        for (;;) {
            std::size_t d = (p >> level) & (fanout - 1);
            if (d) {
                q += d << level;
                m_tracer.touch(q);
                s = wrap_add(s, level ? Node::back(node_ptr((q >> log_fanout) - 1))
                                      : Node::sum(node_ptr((q - 1) >> log_fanout),
                                                  (q - 1) & (fanout - 1)));
            }
            if (level == 0) break;
            level -= log_fanout;
        }
        return s;
    }

    void update(std::size_t i, value_t delta) {
        assert(i < m_size);
        const std::size_t d0 = i & (fanout - 1);
        const std::size_t base = i - d0;
        Node::update(node_ptr(base >> log_fanout), d0, delta);
        for (std::size_t k = d0 + 1; k < fanout && base + k <= m_size; ++k) m_tracer.touch(base + k);

        // The first cell above level 0 equals base + b and was covered by
        // the suffix add on the level-0 node.
        bool first_seen = false;
        for (std::size_t level = log_fanout; (std::size_t(1) << level) <= m_size; level += log_fanout) {
            const std::size_t width = std::size_t(1) << level;
            const std::size_t d = (i >> level) & (fanout - 1);
            const std::size_t prefix = (i >> (level + log_fanout)) << (level + log_fanout);
            for (std::size_t k = d + 1; k < fanout; ++k) {
                const std::size_t q = prefix + k * width;
                if (q > m_size) break;
                m_tracer.touch(q);
                if (!first_seen && k == d + 1) continue;
                Node::update(node_ptr((q >> log_fanout) - 1), fanout - 1, delta);
            }
            if (d + 1 < fanout) first_seen = true;
        }
    }

private:
    std::size_t m_size;
    aligned_bytes m_bytes;
    [[no_unique_address]] Tracer m_tracer;

    std::byte* node_ptr(std::size_t k) { return m_bytes.data() + k * Node::bytes; }
    const std::byte* node_ptr(std::size_t k) const { return m_bytes.data() + k * Node::bytes; }
};

}  // namespace psum
