#pragma once

#include <span>
#include <vector>

#include "common.hpp"
#include "fenwick_tree.hpp"
#include "node.hpp"

namespace psum {

/*
 * Fenwick tree cut off at block granularity. The upper part is a classic
 * (optionally holed) Fenwick tree over the ceil(n/b) block totals; the
 * lower part is a plain array of nodes, node j holding block j in
 * prefix-sum. A query adds the upper prefix over the blocks before j to
 * one node lookup.
 */
template <node_layout Node, bool Holed = false>
class fenwick_tree_truncated {
public:
    using node_type = Node;
    using upper_type = basic_fenwick_tree<Holed>;
    static constexpr std::size_t fanout = Node::fanout;
    static constexpr bool holed = Holed;

    explicit fenwick_tree_truncated(std::span<const value_t> values,
                                    std::size_t spacing = upper_type::default_spacing)
        : m_size(values.size()),
          m_blocks(ceil_div(values.size(), fanout)),
          m_upper((require_nonempty(values.size()), block_totals(values)), spacing),
          m_lower(m_blocks * Node::bytes) {
        std::vector<value_t> inputs(fanout);
        for (std::size_t j = 0; j != m_blocks; ++j) {
            std::size_t first = j * fanout;
            for (std::size_t k = 0; k != fanout; ++k) {
                inputs[k] = first + k < m_size ? values[first + k] : 0;
            }
            Node::build(inputs, node_ptr(j));
        }
    }

    /// Words taken by an unholed upper part.
    static constexpr std::size_t upper_words(std::size_t n) { return ceil_div(n, fanout) + 1; }

    static constexpr std::size_t storage_bytes(std::size_t n,
                                               std::size_t spacing = upper_type::default_spacing) {
        return 8 * upper_type::storage_words(ceil_div(n, fanout), spacing) +
               ceil_div(n, fanout) * Node::bytes;
    }

    std::size_t size() const { return m_size; }
    std::size_t blocks() const { return m_blocks; }
    const upper_type& upper() const { return m_upper; }

    value_t sum(std::size_t i) const {
        assert(i < m_size);
        const std::size_t j = i / fanout;
        value_t s = Node::sum(node_ptr(j), i % fanout);
        return j ? wrap_add(s, m_upper.sum(j - 1)) : s;
    }

    void update(std::size_t i, value_t delta) {
        assert(i < m_size);
        if constexpr (Node::restricted) require_delta8(delta);
        const std::size_t j = i / fanout;
        m_upper.update(j, delta);
        Node::update(node_ptr(j), i % fanout, delta);
    }

private:
    std::size_t m_size;
    std::size_t m_blocks;
    upper_type m_upper;
    aligned_bytes m_lower;

    static std::vector<value_t> block_totals(std::span<const value_t> values) {
        std::vector<value_t> totals(ceil_div(values.size(), fanout), 0);
        for (std::size_t i = 0; i != values.size(); ++i) {
            totals[i / fanout] = wrap_add(totals[i / fanout], values[i]);
        }
        return totals;
    }

    std::byte* node_ptr(std::size_t j) { return m_lower.data() + j * Node::bytes; }
    const std::byte* node_ptr(std::size_t j) const { return m_lower.data() + j * Node::bytes; }
};

}  // namespace psum
