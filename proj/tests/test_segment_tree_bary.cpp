#include <gtest/gtest.h>

#include <cstring>
#include <vector>

#include "oracle_support.hpp"
#include "psum/segment_tree_bary.hpp"

using namespace psum;
using psum::testing::A16;

namespace {

TEST(Plan, Heights) {
    EXPECT_EQ(plan(std::size_t(1) << 24, 256).height, 3u);
    EXPECT_EQ(plan((std::size_t(1) << 24) + 1, 256).height, 4u);
    EXPECT_EQ(plan(std::size_t(1) << 32, 256).height, 4u);
    EXPECT_LE(plan(std::size_t(1) << 32, 256).height, 4u);
    EXPECT_EQ(plan(64, 64).height, 1u);
    EXPECT_EQ(plan(1, 64).height, 1u);
    EXPECT_EQ(plan(65, 64).height, 2u);
    auto p = plan(4096, 64);
    EXPECT_EQ(p.height, 2u);
    EXPECT_EQ(p.nodes_per_level, (std::vector<std::size_t>{1, 64}));
    auto q = plan(100000, 64);
    EXPECT_EQ(q.height, 3u);
    EXPECT_EQ(q.nodes_per_level, (std::vector<std::size_t>{1, 25, 1563}));
}

TEST(Plan, RejectsUnsupportedFanout) {
    EXPECT_THROW(plan(100, 32), usage_error);
    EXPECT_THROW(plan(100, 2), usage_error);
    EXPECT_THROW(plan(0, 64), usage_error);
}

TEST(Plan, HeightIsCeilLog) {
    for (std::size_t b : {16, 64, 256}) {
        for (std::size_t n = 1; n <= 70000; n += 13) {
            std::size_t h = 1, cap = b;
            while (cap < n) cap *= b, ++h;
            ASSERT_EQ(plan(n, b).height, h) << n;
        }
    }
}

TEST(BarySegmentTree, SingleNodeA16MatchesNode) {
    segment_tree_bary<two_level_node<16>> t(A16);
    EXPECT_EQ(t.height(), 1u);
    node_block<two_level_node<16>> node(A16);
    EXPECT_EQ(std::memcmp(t.node_ptr(0, 0), node.data(), two_level_node<16>::bytes), 0);
    EXPECT_EQ(t.sum(10), 144);
}

TEST(BarySegmentTree, AllOnes4096) {
    std::vector<value_t> ones(4096, 1);
    segment_tree_bary<two_level_node<64>> t(ones);
    EXPECT_EQ(t.height(), 2u);
    EXPECT_EQ(t.bytes(), 65 * 576u);
    for (std::size_t c = 0; c != 64; ++c) EXPECT_EQ(two_level_node<64>::sum(t.node_ptr(0, 0), c), value_t(64 * (c + 1)));
    EXPECT_EQ(t.sum(4095), 4096);
    EXPECT_EQ(t.sum(63), 64);
    EXPECT_EQ(t.sum(64), 65);
}

TEST(BarySegmentTree, UpdateExampleA16) {
    segment_tree_bary<two_level_node<16>> t(A16);
    naive_oracle o(A16);
    t.update(9, -37);
    o.update(9, -37);
    for (std::size_t i = 0; i != 16; ++i) EXPECT_EQ(t.sum(i), o.sum(i));
}

TEST(BarySegmentTree, UpdateLastTouchesOnlyLastKeys) {
    std::vector<value_t> ones(4096, 1);
    segment_tree_bary<two_level_node<64>> t(ones);
    t.update(4095, 10);
    const std::byte* root = t.node_ptr(0, 0);
    EXPECT_EQ(two_level_node<64>::sum(root, 62), 63 * 64);
    EXPECT_EQ(two_level_node<64>::sum(root, 63), 4096 + 10);
    const std::byte* leaf = t.node_ptr(1, 63);
    EXPECT_EQ(two_level_node<64>::sum(leaf, 62), 63);
    EXPECT_EQ(two_level_node<64>::sum(leaf, 63), 64 + 10);
    EXPECT_EQ(t.sum(4094), 4095);
    EXPECT_EQ(t.sum(4095), 4106);
}

TEST(BarySegmentTree, TotalEqualsOracle) {
    for (std::size_t n : {1, 100, 5000, 70000}) {
        auto a = psum::testing::random_values(n, n);
        segment_tree_bary<two_level_node<64>> t(a);
        EXPECT_EQ(t.sum(n - 1), naive_oracle(a).sum(n - 1));
    }
}

TEST(BarySegmentTree, HeightCap) {
    // 16-way trees stop at 5 levels: 16^5 elements
    std::vector<value_t> big((std::size_t(1) << 20) + 1, 0);
    EXPECT_THROW(segment_tree_bary<two_level_node<16>>{big}, usage_error);
    std::vector<value_t> fits(std::size_t(1) << 20, 0);
    EXPECT_EQ(segment_tree_bary<two_level_node<16>>(fits).height(), 5u);
}

template <typename Node>
void check_oracle(unsigned delta_bits) {
    for (std::size_t n : psum::testing::edge_sizes) {
        auto a = psum::testing::random_values(n, n * 5);
        segment_tree_bary<Node> t(a);
        psum::testing::expect_matches_oracle(t, a, 1000, n, delta_bits);
    }
    auto a = psum::testing::random_values(100000, 5);
    segment_tree_bary<Node> t(a);
    psum::testing::expect_matches_oracle(t, a, 1000, 100000, delta_bits);
}

TEST(BarySegmentTree, MatchesOracleGeneral) {
    check_oracle<two_level_node<16>>(64);
    check_oracle<two_level_node<64>>(64);
    check_oracle<two_level_node<256>>(64);
}

TEST(BarySegmentTree, MatchesOracleRestricted) {
    check_oracle<restricted_node<16>>(8);
    check_oracle<restricted_node<64>>(8);
    check_oracle<restricted_node<256>>(8);
}

TEST(BarySegmentTree, RestrictedEqualsGeneral) {
    auto a = psum::testing::random_values(70000, 1);
    segment_tree_bary<two_level_node<64>> g(a);
    segment_tree_bary<restricted_node<64>> r(a);
    splitmix64 rng(2);
    for (int k = 0; k != 20000; ++k) {
        std::size_t i = rng.below(a.size());
        value_t d = value_t(rng.below(256)) - 128;
        g.update(i, d);
        r.update(i, d);
        std::size_t q = rng.below(a.size());
        ASSERT_EQ(r.sum(q), g.sum(q));
    }
}

TEST(BarySegmentTree, RestrictedRejectsWideDelta) {
    segment_tree_bary<restricted_node<64>> t(psum::testing::random_values(1000, 1));
    value_t before = t.sum(999);
    EXPECT_THROW(t.update(5, 1000), usage_error);
    EXPECT_EQ(t.sum(999), before);
}

// Reference traversal: one loop over the levels, no height dispatch.
template <typename Node>
value_t loop_sum(const segment_tree_bary<Node>& t, std::size_t i) {
    constexpr std::size_t b = Node::fanout;
    const std::size_t H = t.height();
    value_t s = 0;
    for (std::size_t l = 0; l != H; ++l) {
        std::size_t span = 1;
        for (std::size_t k = l + 1; k != H; ++k) span *= b;
        const std::size_t node = i / (span * b);
        const std::size_t c = (i / span) % b;
        const std::byte* p = t.node_ptr(l, node);
        if (l + 1 == H) s = wrap_add(s, Node::sum(p, c));
        else if (c > 0) s = wrap_add(s, Node::sum(p, c - 1));
    }
    return s;
}

TEST(BarySegmentTree, SpecializedPathsMatchLoopReference) {
    for (std::size_t n : {10, 300, 5000, 70000, 300000}) {
        auto a = psum::testing::random_values(n, n);
        segment_tree_bary<two_level_node<16>> t16(a);
        segment_tree_bary<two_level_node<64>> t64(a);
        segment_tree_bary<two_level_node<256>> t256(a);
        splitmix64 rng(n);
        for (int k = 0; k != 2000; ++k) {
            std::size_t i = rng.below(n);
            if (k % 3 == 0) {
                value_t d = value_t(rng());
                t64.update(i, d);
                t256.update(i, d);
                if (n <= (std::size_t(1) << 20)) t16.update(i, d);
            }
            ASSERT_EQ(t64.sum(i), loop_sum(t64, i));
            ASSERT_EQ(t256.sum(i), loop_sum(t256, i));
            ASSERT_EQ(t16.sum(i), loop_sum(t16, i));
        }
    }
}

TEST(BarySegmentTree, StorageBytes) {
    EXPECT_EQ(segment_tree_bary<two_level_node<64>>::storage_bytes(4096), 65 * 576u);
    EXPECT_EQ(segment_tree_bary<restricted_node<256>>::storage_bytes(std::size_t(1) << 24),
              (1 + 256 + 65536) * 2752u);
}

}  // namespace
