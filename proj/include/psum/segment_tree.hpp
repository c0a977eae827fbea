#pragma once

#include <span>
#include <vector>

#include "common.hpp"

namespace psum {

enum class traversal { branchy, branch_free, two_loop };

constexpr const char* to_string(traversal t) {
    switch (t) {
        case traversal::branchy: return "branchy";
        case traversal::branch_free: return "branchfree";
        case traversal::two_loop: return "twoloop";
    }
    return "?";
}

/// Cache capacities in 64-bit words. Defaults: 32 KiB L1d, 1 MiB L2,
/// 19.25 MiB L3.
struct cache_hierarchy {
    std::size_t l1_words = 4096;
    std::size_t l2_words = 131072;
    std::size_t l3_words = 2523136;
};

/// Node index below which the two-loop traversal switches from the branchy
/// loop to the branch-free one.
constexpr std::size_t two_loop_threshold(std::size_t n, const cache_hierarchy& caches = {}) {
    return n > caches.l3_words ? caches.l1_words : caches.l2_words;
}

/*
 * Top-down segment tree over the array zero-padded to P = 2^ceil(log2 n)
 * leaves. Children of node p live at 2p+1 and 2p+2; leaves occupy
 * tree[P-1, 2P-1).
 */
class segment_tree_topdown {
public:
    explicit segment_tree_topdown(std::span<const value_t> values)
        : m_size(values.size()) {
        require_nonempty(m_size);
        m_leaves = std::size_t(1) << ceil_log2(m_size);
        m_tree.assign(2 * m_leaves - 1, 0);
        for (std::size_t i = 0; i != m_size; ++i) m_tree[m_leaves - 1 + i] = values[i];
        for (std::size_t p = m_leaves - 1; p-- > 0;) {
            m_tree[p] = wrap_add(m_tree[2 * p + 1], m_tree[2 * p + 2]);
        }
    }

    static constexpr std::size_t storage_words(std::size_t n) {
        return (std::size_t(2) << ceil_log2(n)) - 1;
    }

    std::size_t size() const { return m_size; }
    std::size_t padded_size() const { return m_leaves; }
    std::span<const value_t> data() const { return m_tree; }
    std::span<value_t> data() { return m_tree; }

    value_t sum(std::size_t i) const { return sum_with<traversal::branch_free>(i); }
    void update(std::size_t i, value_t delta) { update_with<traversal::branch_free>(i, delta); }

    template <traversal Policy>
    value_t sum_with(std::size_t i) const {
        static_assert(Policy != traversal::two_loop, "top-down trees have no two-loop traversal");
        assert(i < m_size);
        std::size_t p = 0, lo = 0, width = m_leaves;
        value_t s = 0;
        while (width > 1) {
            std::size_t half = width / 2;
            if constexpr (Policy == traversal::branchy) {
                if (i >= lo + half) {
                    s = wrap_add(s, m_tree[2 * p + 1]);
                    p = 2 * p + 2;
                    lo += half;
                } else {
                    p = 2 * p + 1;
                }
            } else {
                std::uint64_t right = i >= lo + half;
                s = wrap_add(s, m_tree[2 * p + 1] & static_cast<value_t>(0 - right));
                p = 2 * p + 1 + right;
                lo += half * right;
            }
            width = half;
        }
        return wrap_add(s, m_tree[p]);
    }

    template <traversal Policy>
    void update_with(std::size_t i, value_t delta) {
        static_assert(Policy != traversal::two_loop, "top-down trees have no two-loop traversal");
        assert(i < m_size);
        std::size_t p = 0, lo = 0, width = m_leaves;
        while (width > 1) {
            m_tree[p] = wrap_add(m_tree[p], delta);
            std::size_t half = width / 2;
            if constexpr (Policy == traversal::branchy) {
                if (i >= lo + half) {
                    p = 2 * p + 2;
                    lo += half;
                } else {
                    p = 2 * p + 1;
                }
            } else {
                std::uint64_t right = i >= lo + half;
                p = 2 * p + 1 + right;
                lo += half * right;
            }
            width = half;
        }
        m_tree[p] = wrap_add(m_tree[p], delta);
    }

private:
    std::size_t m_size;
    std::size_t m_leaves;
    std::vector<value_t> m_tree;
};

enum class node_content {
    regular,   // internal node = sum of its whole subtree
    left_sum,  // internal node = sum of its left subtree only
};

/*
 * Bottom-up segment tree in exactly 2n-1 words. Leaves are circularly
 * displaced: the first m-begin leaves sit in tree[begin, m) and the rest in
 * tree[n-1, begin), where m = 2n-1 and begin = 2^ceil(log2 n) - 1. This keeps
 * the 2p+1 / 2p+2 child arithmetic valid for any n, and left children always
 * land on odd positions.
 */
template <node_content Content = node_content::regular,
          traversal Policy = traversal::branch_free,
          tracer Tracer = null_tracer>
class segment_tree_bottomup {
public:
    static constexpr node_content content = Content;
    static constexpr traversal policy = Policy;
    static constexpr std::size_t auto_threshold = std::size_t(-1);

    explicit segment_tree_bottomup(std::span<const value_t> values,
                                   std::size_t threshold = auto_threshold,
                                   Tracer tracer = {})
        : m_size(values.size()), m_tracer(tracer) {
        require_nonempty(m_size);
        m_threshold = threshold == auto_threshold ? two_loop_threshold(m_size) : threshold;
        std::size_t m = 2 * m_size - 1;
        m_begin = (std::size_t(1) << ceil_log2(m_size)) - 1;
        m_tree.assign(m, 0);
        std::size_t j = 0;
        for (std::size_t p = m_begin; p < m; ++p, ++j) m_tree[p] = values[j];
        for (std::size_t p = m_size - 1; p < m_begin; ++p, ++j) m_tree[p] = values[j];
        if (m > 1) visit(0);
    }

    static constexpr std::size_t storage_words(std::size_t n) { return 2 * n - 1; }

    std::size_t size() const { return m_size; }
    std::size_t begin_position() const { return m_begin; }
    std::size_t threshold() const { return m_threshold; }
    std::span<const value_t> data() const { return m_tree; }
    std::span<value_t> data() { return m_tree; }

    /// Array position of the i-th leaf.
    std::size_t leaf(std::size_t i) const {
        std::size_t p = m_begin + i;
        return p < m_tree.size() ? p : p - m_size;
    }

    value_t sum(std::size_t i) const { return sum_with<Policy>(i); }
    void update(std::size_t i, value_t delta) { update_with<Policy>(i, delta); }

    template <traversal P>
    value_t sum_with(std::size_t i) const {
        assert(i < m_size);
        std::size_t p = leaf(i);
        value_t s = read(p);
        if constexpr (P == traversal::branchy) {
            sum_branchy(p, s, 0);
        } else if constexpr (P == traversal::branch_free) {
            sum_branch_free(p, s);
        } else {
            sum_branchy(p, s, m_threshold);
            sum_branch_free(p, s);
        }
        return s;
    }

    template <traversal P>
    void update_with(std::size_t i, value_t delta) {
        assert(i < m_size);
        std::size_t p = leaf(i);
        add(p, delta);
        if constexpr (Content == node_content::regular) {
            // every ancestor receives delta: already branch-free
            while (p) {
                p = (p - 1) >> 1;
                add(p, delta);
            }
        } else if constexpr (P == traversal::branchy) {
            update_left_branchy(p, delta, 0);
        } else if constexpr (P == traversal::branch_free) {
            update_left_branch_free(p, delta);
        } else {
            update_left_branchy(p, delta, m_threshold);
            update_left_branch_free(p, delta);
        }
    }

private:
    std::size_t m_size;
    std::size_t m_begin;
    std::size_t m_threshold;
    std::vector<value_t> m_tree;
    [[no_unique_address]] Tracer m_tracer;

    value_t read(std::size_t p) const {
        m_tracer.touch(p);
        return m_tree[p];
    }

    void add(std::size_t p, value_t delta) {
        m_tracer.touch(p);
        m_tree[p] = wrap_add(m_tree[p], delta);
    }

    // Returns the total of the subtree rooted at p.
    value_t visit(std::size_t p) {
        std::size_t l = 2 * p + 1;
        if (l >= m_tree.size()) return m_tree[p];
        value_t left = visit(l);
        value_t right = visit(l + 1);
        if constexpr (Content == node_content::regular) {
            m_tree[p] = wrap_add(left, right);
            return m_tree[p];
        } else {
            m_tree[p] = left;
            return wrap_add(left, right);
        }
    }

    // Position of the value to add when p is a right child (even p).
    static std::size_t left_part(std::size_t p) {
        if constexpr (Content == node_content::regular) {
            return p - 1;  // left sibling
        } else {
            return (p - 1) >> 1;  // parent holds the left-subtree sum
        }
    }

    void sum_branchy(std::size_t& p, value_t& s, std::size_t stop) const {
        while (p > stop) {
            if ((p & 1) == 0) s = wrap_add(s, read(left_part(p)));
            p = (p - 1) >> 1;
        }
    }

    void sum_branch_free(std::size_t& p, value_t& s) const {
        while (p) {
            value_t mask = static_cast<value_t>((p & 1) - 1);  // all ones iff right child
            s = wrap_add(s, read(left_part(p)) & mask);
            p = (p - 1) >> 1;
        }
    }

    void update_left_branchy(std::size_t& p, value_t delta, std::size_t stop) {
        while (p > stop) {
            std::size_t parent = (p - 1) >> 1;
            if (p & 1) add(parent, delta);
            p = parent;
        }
    }

    void update_left_branch_free(std::size_t& p, value_t delta) {
        while (p) {
            std::size_t parent = (p - 1) >> 1;
            add(parent, delta & static_cast<value_t>(0 - (p & 1)));
            p = parent;
        }
    }
};

}  // namespace psum
