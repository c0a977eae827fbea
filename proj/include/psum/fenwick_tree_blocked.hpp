#pragma once

#include <span>
#include <vector>

#include "common.hpp"
#include "node.hpp"

namespace psum {

/*
 * Classic Fenwick tree over blocks of b elements, one node per block.
 * Node p (1-based) takes as inputs the total of the blocks in
 * (p - lsb(p), p - 1] added to block p's first element, followed by block
 * p's remaining elements. So node p's sum(i) is the prefix over that whole
 * Fenwick range up to element i of block p, and back() covers the range
 * (p - lsb(p), p] as a classic cell would.
 *
 * With Holed = true, node p is stored at slot (p - 1) + (p - 1) / d.
 * Tracers see physical node slots.
 */
template <node_layout Node, bool Holed = false, tracer Tracer = null_tracer>
class fenwick_tree_blocked {
public:
    using node_type = Node;
    static constexpr std::size_t fanout = Node::fanout;
    static constexpr bool holed = Holed;
    static constexpr std::size_t default_spacing = std::size_t(1) << 14;

    explicit fenwick_tree_blocked(std::span<const value_t> values,
                                  std::size_t spacing = default_spacing, Tracer tracer = {})
        : m_size(values.size()), m_blocks(ceil_div(values.size(), fanout)), m_tracer(tracer) {
        require_nonempty(m_size);
        if constexpr (Holed) {
            require(spacing >= 1 && std::has_single_bit(spacing), "hole spacing must be a power of two");
            m_shift = floor_log2(spacing);
        }
        m_bytes = aligned_bytes(slots(m_size, spacing) * Node::bytes);

        // prefix[p] = total of blocks 1..p
        std::vector<value_t> prefix(m_blocks + 1, 0);
        for (std::size_t i = 0; i != m_size; ++i) {
            std::size_t p = i / fanout + 1;
            prefix[p] = wrap_add(prefix[p], values[i]);
        }
        for (std::size_t p = 1; p <= m_blocks; ++p) prefix[p] = wrap_add(prefix[p], prefix[p - 1]);

        std::vector<value_t> inputs(fanout);
        for (std::size_t p = 1; p <= m_blocks; ++p) {
            std::size_t first = (p - 1) * fanout;
            for (std::size_t k = 0; k != fanout; ++k) {
                inputs[k] = first + k < m_size ? values[first + k] : 0;
            }
            inputs[0] = wrap_add(inputs[0], wrap_sub(prefix[p - 1], prefix[p - lsb_isolate(p)]));
            Node::build(inputs, node_ptr(p));
        }
    }

    /// Node slots for n elements, holes included.
    static constexpr std::size_t slots(std::size_t n, std::size_t spacing = default_spacing) {
        std::size_t m = ceil_div(n, fanout);
        if constexpr (Holed) return m + (m - 1) / spacing;
        return m;
    }

    static constexpr std::size_t storage_bytes(std::size_t n, std::size_t spacing = default_spacing) {
        return slots(n, spacing) * Node::bytes;
    }

    std::size_t size() const { return m_size; }
    std::size_t blocks() const { return m_blocks; }
    std::size_t bytes() const { return m_bytes.size(); }

    std::size_t slot(std::size_t p) const {
        if constexpr (Holed) return (p - 1) + ((p - 1) >> m_shift);
        return p - 1;
    }

    value_t sum(std::size_t i) const {
        assert(i < m_size);
        std::size_t p = i / fanout + 1;
        value_t s = Node::sum(node_ptr(p), i % fanout);
        for (p = lsb_clear(p); p; p = lsb_clear(p)) s = wrap_add(s, Node::back(node_ptr(p)));
        return s;
    }

    void update(std::size_t i, value_t delta) {
        assert(i < m_size);
        if constexpr (Node::restricted) require_delta8(delta);
        std::size_t p = i / fanout + 1;
        Node::update(node_ptr(p), i % fanout, delta);
        for (p += lsb_isolate(p); p <= m_blocks; p += lsb_isolate(p)) {
            Node::update(node_ptr(p), 0, delta);
        }
    }

private:
    std::size_t m_size;
    std::size_t m_blocks;
    std::size_t m_shift = 0;
    aligned_bytes m_bytes;
    [[no_unique_address]] Tracer m_tracer;

    std::byte* node_ptr(std::size_t p) {
        std::size_t k = slot(p);
        m_tracer.touch(k);
        return m_bytes.data() + k * Node::bytes;
    }
    const std::byte* node_ptr(std::size_t p) const {
        std::size_t k = slot(p);
        m_tracer.touch(k);
        return m_bytes.data() + k * Node::bytes;
    }
};

}  // namespace psum
