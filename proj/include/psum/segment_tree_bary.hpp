#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "common.hpp"
#include "node.hpp"

namespace psum {

struct tree_plan {
    std::size_t n = 0;
    std::size_t b = 0;
    std::size_t height = 0;
    std::vector<std::size_t> nodes_per_level;  // root level first

    std::size_t total_nodes() const {
        std::size_t total = 0;
        for (std::size_t k : nodes_per_level) total += k;
        return total;
    }
};

constexpr bool supported_bary_fanout(std::size_t b) { return b == 16 || b == 64 || b == 256; }

/// Shape of a b-ary tree over n leaves: height ceil(log_b n), at least 1.
inline tree_plan plan(std::size_t n, std::size_t b) {
    require_nonempty(n);
    require(supported_bary_fanout(b), "fanout must be one of 16, 64, 256");
    tree_plan p{n, b, 1, {}};
    for (std::size_t leaves = b; leaves < n; ++p.height) {
        if (leaves > n / b) {  // next power reaches n; avoid overflow
            ++p.height;
            break;
        }
        leaves *= b;
    }
    p.nodes_per_level.assign(p.height, 0);
    std::size_t count = ceil_div(n, b);
    for (std::size_t l = p.height; l-- > 0;) {
        p.nodes_per_level[l] = count;
        count = ceil_div(count, b);
    }
    return p;
}

/*
 * b-ary segment tree: H levels of serialized nodes, root level first, each
 * level's nodes left to right. A leaf-level node holds b consecutive input
 * values; an internal node's inputs are its children's subtree totals. Both
 * operations touch exactly one node per level along the root-to-leaf path;
 * the path is resolved with one dispatch on H into fully unrolled code.
 */
template <node_layout Node>
class segment_tree_bary {
public:
    using node_type = Node;
    static constexpr std::size_t fanout = Node::fanout;
    static constexpr std::size_t log_fanout = floor_log2(fanout);
    // 16-way trees only serve as a small test shape; they get one extra level
    // so that they still reach 10^5 elements.
    static constexpr std::size_t max_height = fanout == 16 ? 5 : 4;
    static_assert(supported_bary_fanout(fanout));

    explicit segment_tree_bary(std::span<const value_t> values)
        : m_plan(plan(values.size(), fanout)) {
        require(m_plan.height <= max_height, "input too large for this fanout (tree would exceed its level cap)");
        std::size_t offset = 0;
        for (std::size_t l = 0; l != m_plan.height; ++l) {
            m_level_offset[l] = offset;
            offset += m_plan.nodes_per_level[l];
        }
        m_bytes = aligned_bytes(offset * Node::bytes);

        std::vector<value_t> inputs(values.begin(), values.end());
        std::vector<value_t> block(fanout);
        for (std::size_t l = m_plan.height; l-- > 0;) {
            std::vector<value_t> totals(m_plan.nodes_per_level[l]);
            for (std::size_t k = 0; k != totals.size(); ++k) {
                std::size_t first = k * fanout;
                std::size_t count = std::min(fanout, inputs.size() - first);
                std::fill(block.begin(), block.end(), value_t(0));
                std::copy_n(inputs.begin() + first, count, block.begin());
                std::byte* node = node_ptr(l, k);
                Node::build(block, node);
                totals[k] = Node::back(node);
            }
            inputs = std::move(totals);
        }
    }

    static std::size_t storage_bytes(std::size_t n) {
        return plan(n, fanout).total_nodes() * Node::bytes;
    }

    std::size_t size() const { return m_plan.n; }
    std::size_t height() const { return m_plan.height; }
    const tree_plan& shape() const { return m_plan; }
    std::size_t bytes() const { return m_bytes.size(); }

    std::byte* node_ptr(std::size_t level, std::size_t k) {
        return m_bytes.data() + (m_level_offset[level] + k) * Node::bytes;
    }
    const std::byte* node_ptr(std::size_t level, std::size_t k) const {
        return m_bytes.data() + (m_level_offset[level] + k) * Node::bytes;
    }

    value_t sum(std::size_t i) const {
        assert(i < size());
        switch (m_plan.height) {
            case 1: return sum_path<1>(i);
            case 2: return sum_path<2>(i);
            case 3: return sum_path<3>(i);
            case 4: return sum_path<4>(i);
            default:
                if constexpr (max_height >= 5) return sum_path<5>(i);
                __builtin_unreachable();
        }
    }

    void update(std::size_t i, value_t delta) {
        assert(i < size());
        if constexpr (Node::restricted) require_delta8(delta);
        switch (m_plan.height) {
            case 1: update_path<1>(i, delta); break;
            case 2: update_path<2>(i, delta); break;
            case 3: update_path<3>(i, delta); break;
            case 4: update_path<4>(i, delta); break;
            default:
                if constexpr (max_height >= 5) update_path<5>(i, delta);
                break;
        }
    }

private:
    tree_plan m_plan;
    std::array<std::size_t, max_height> m_level_offset{};
    aligned_bytes m_bytes;

    // Child index taken at level L of a height-H tree, and the node visited there.
    template <std::size_t H, std::size_t L>
    static constexpr std::size_t digit(std::size_t i) {
        return (i >> (log_fanout * (H - 1 - L))) & (fanout - 1);
    }
    template <std::size_t H, std::size_t L>
    static constexpr std::size_t node_in_level(std::size_t i) {
        return i >> (log_fanout * (H - L));
    }

    template <std::size_t H, std::size_t L>
    value_t level_sum(std::size_t i) const {
        const std::byte* node = node_ptr(L, node_in_level<H, L>(i));
        const std::size_t c = digit<H, L>(i);
        if constexpr (L + 1 == H) {
            return Node::sum(node, c);
        } else {
            return c ? Node::sum(node, c - 1) : value_t(0);
        }
    }

    template <std::size_t H>
    value_t sum_path(std::size_t i) const {
        return [&]<std::size_t... L>(std::index_sequence<L...>) {
            return static_cast<value_t>(
                (std::uint64_t(0) + ... + static_cast<std::uint64_t>(level_sum<H, L>(i))));
        }(std::make_index_sequence<H>{});
    }

    template <std::size_t H>
    void update_path(std::size_t i, value_t delta) {
        [&]<std::size_t... L>(std::index_sequence<L...>) {
            (Node::update(node_ptr(L, node_in_level<H, L>(i)), digit<H, L>(i), delta), ...);
        }(std::make_index_sequence<H>{});
    }
};

}  // namespace psum
