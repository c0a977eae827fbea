#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "oracle_support.hpp"
#include "psum/fenwick_tree.hpp"
#include "psum/fenwick_tree_bary.hpp"
#include "psum/fenwick_tree_blocked.hpp"
#include "psum/fenwick_tree_truncated.hpp"

using namespace psum;
using psum::testing::A16;

namespace {

TEST(Digits, Examples) {
    EXPECT_EQ(digits(38, 4), (std::vector<std::size_t>{2, 1, 2}));
    EXPECT_EQ(digits(1, 4), (std::vector<std::size_t>{1}));
    EXPECT_EQ(digits(1, 256), (std::vector<std::size_t>{1}));
    EXPECT_EQ(digits(256, 256), (std::vector<std::size_t>{0, 1}));
}

TEST(Digits, CountMatchesFormula) {
    for (std::size_t b : {2, 4, 16, 64, 256}) {
        for (std::size_t n : {1, 5, 100, 4096, 100000}) {
            std::size_t expected = ceil_div(ceil_log2(n + 1), floor_log2(b));
            std::size_t most = 0;
            for (std::size_t p = 1; p <= n; ++p) most = std::max(most, digits(p, b).size());
            EXPECT_EQ(most, expected) << "b=" << b << " n=" << n;
        }
    }
}

// Cell q with lowest nonzero digit d at position j covers A[q - d*b^j, q).
std::size_t cell_width(std::size_t q, std::size_t b) {
    std::size_t w = 1;
    while (q % b == 0) q /= b, w *= b;
    return (q % b) * w;
}

TEST(BaryFenwickBuild, BinaryEqualsClassic) {
    for (std::size_t n = 1; n <= 1000; n += 7) {
        auto a = psum::testing::random_values(n, n);
        ASSERT_EQ(bary_fenwick_cells(a, 2), fenwick_build_recursive(a)) << n;
    }
}

TEST(BaryFenwickBuild, A16Base4) {
    auto cells = bary_fenwick_cells(A16, 4);
    const std::vector<value_t> expected = {0, 13, 12, 14, 37, -4, 227, 240, 282, 2, -86, -138, 144, 4, 94, 97, 229};
    EXPECT_EQ(cells, expected);
    EXPECT_EQ(cells[8], 282);
}

TEST(BaryFenwickBuild, SingleElement) {
    std::vector<value_t> a = {9};
    for (std::size_t b : {2, 4, 64}) EXPECT_EQ(bary_fenwick_cells(a, b), (std::vector<value_t>{0, 9}));
}

TEST(BaryFenwickBuild, CellInvariant) {
    for (std::size_t b : {2, 4, 8, 16, 64, 256}) {
        for (std::size_t n : {1, 3, 17, 64, 65, 1000, 5000}) {
            auto a = psum::testing::random_values(n, b + n);
            auto cells = bary_fenwick_cells(a, b);
            for (std::size_t q = 1; q <= n; ++q) {
                value_t s = 0;
                for (std::size_t k = q - cell_width(q, b); k != q; ++k) s = wrap_add(s, a[k]);
                ASSERT_EQ(cells[q], s) << "b=" << b << " n=" << n << " q=" << q;
            }
        }
    }
}

TEST(BaryFenwick, CellsStoredInNodes) {
    auto a = psum::testing::random_values(3000, 4);
    fenwick_tree_bary<two_level_node<64>> t(a);
    auto cells = bary_fenwick_cells(a, 64);
    for (std::size_t q = 1; q <= a.size(); ++q) ASSERT_EQ(t.cell(q), cells[q]);
}

TEST(BaryFenwick, SumExample) {
    auto a = psum::testing::random_values(64, 3);
    std::vector<std::size_t> log;
    fenwick_tree_bary<flat_node<4>, access_log> t(a, access_log(&log));
    t.sum(37);
    EXPECT_EQ(log, (std::vector<std::size_t>{32, 36, 38}));
    log.clear();
    t.sum(15);  // 16 = 100 in base 4
    EXPECT_EQ(log, (std::vector<std::size_t>{16}));

    fenwick_tree_bary<flat_node<4>> small(A16);
    EXPECT_EQ(small.sum(10), 144);
}

TEST(BaryFenwick, A16AllFanouts) {
    EXPECT_EQ(fenwick_tree_bary<flat_node<2>>(A16).sum(10), 144);
    EXPECT_EQ(fenwick_tree_bary<flat_node<4>>(A16).sum(10), 144);
    EXPECT_EQ(fenwick_tree_bary<two_level_node<16>>(A16).sum(10), 144);
    EXPECT_EQ(fenwick_tree_bary<two_level_node<64>>(A16).sum(10), 144);
}

std::set<std::size_t> covering_cells(std::size_t i, std::size_t n, std::size_t b) {
    std::set<std::size_t> out;
    for (std::size_t q = 1; q <= n; ++q) {
        if (q - cell_width(q, b) <= i && i < q) out.insert(q);
    }
    return out;
}

TEST(BaryFenwick, UpdateTouchesExactlyTheCoveringCells) {
    for (std::size_t n : {1, 15, 16, 17, 63, 64, 65, 300, 4096, 5000}) {
        auto a = psum::testing::random_values(n, n);
        std::vector<std::size_t> log4, log64;
        fenwick_tree_bary<flat_node<4>, access_log> t4(a, access_log(&log4));
        fenwick_tree_bary<two_level_node<64>, access_log> t64(a, access_log(&log64));
        splitmix64 rng(n);
        for (int k = 0; k != 200; ++k) {
            std::size_t i = rng.below(n);
            log4.clear();
            log64.clear();
            t4.update(i, 1);
            t64.update(i, 1);
            EXPECT_EQ(std::set<std::size_t>(log4.begin(), log4.end()), covering_cells(i, n, 4));
            EXPECT_EQ(std::set<std::size_t>(log64.begin(), log64.end()), covering_cells(i, n, 64));
            EXPECT_EQ(log4.size(), covering_cells(i, n, 4).size());
            EXPECT_LE(log4.size(), 3 * digits(n, 4).size());
            EXPECT_LE(log64.size(), 63 * digits(n, 64).size());
        }
    }
}

TEST(BaryFenwick, SumReadsOneCellPerNonzeroDigit) {
    auto a = psum::testing::random_values(100000, 1);
    std::vector<std::size_t> log;
    fenwick_tree_bary<two_level_node<16>, access_log> t(a, access_log(&log));
    splitmix64 rng(4);
    for (int k = 0; k != 1000; ++k) {
        std::size_t i = rng.below(a.size());
        log.clear();
        t.sum(i);
        auto d = digits(i + 1, 16);
        EXPECT_EQ(log.size(), std::size_t(std::count_if(d.begin(), d.end(), [](auto x) { return x != 0; })));
    }
}

TEST(BaryFenwick, BinaryVisitsSameCellsAsClassic) {
    const std::size_t n = 1000;
    auto a = psum::testing::random_values(n, 12);
    std::vector<std::size_t> classic_log, bary_log;
    fenwick_tree<access_log> classic(a, fenwick_tree<access_log>::default_spacing, access_log(&classic_log));
    fenwick_tree_bary<flat_node<2>, access_log> bary(a, access_log(&bary_log));
    splitmix64 rng(13);
    for (int k = 0; k != 1000; ++k) {
        std::size_t i = rng.below(n);
        classic_log.clear();
        bary_log.clear();
        if (k & 1) {
            value_t d = value_t(rng());
            classic.update(i, d);
            bary.update(i, d);
        } else {
            ASSERT_EQ(bary.sum(i), classic.sum(i));
        }
        std::sort(classic_log.begin(), classic_log.end());
        std::sort(bary_log.begin(), bary_log.end());
        ASSERT_EQ(bary_log, classic_log) << "op " << k << " i=" << i;
    }
}

TEST(BaryFenwick, LastIndexWithPowerSize) {
    // n = 4^3: the cells covering n-1 are 64 only (63 = 333 in base 4 has
    // every digit at b-1 except above the top)
    std::vector<value_t> a(64, 1);
    std::vector<std::size_t> log;
    fenwick_tree_bary<flat_node<4>, access_log> t(a, access_log(&log));
    t.update(63, 5);
    EXPECT_EQ(log, (std::vector<std::size_t>{64}));
    EXPECT_EQ(t.sum(63), 69);
    EXPECT_EQ(t.sum(62), 63);
}

template <typename S>
void check_oracle_all_sizes(unsigned delta_bits = 64) {
    for (std::size_t n : psum::testing::edge_sizes) {
        auto a = psum::testing::random_values(n, n * 11);
        S t(a);
        psum::testing::expect_matches_oracle(t, a, 1000, n, delta_bits);
    }
    auto a = psum::testing::random_values(100000, 6);
    S t(a);
    psum::testing::expect_matches_oracle(t, a, 1000, 100000, delta_bits);
}

TEST(BaryFenwick, MatchesOracle) {
    check_oracle_all_sizes<fenwick_tree_bary<flat_node<2>>>();
    check_oracle_all_sizes<fenwick_tree_bary<flat_node<4>>>();
    check_oracle_all_sizes<fenwick_tree_bary<flat_node<8>>>();
    check_oracle_all_sizes<fenwick_tree_bary<two_level_node<16>>>();
    check_oracle_all_sizes<fenwick_tree_bary<two_level_node<64>>>();
    check_oracle_all_sizes<fenwick_tree_bary<two_level_node<256>>>();
}

/* blocked */

TEST(BlockedFenwick, SingleBlock) {
    fenwick_tree_blocked<two_level_node<16>> t(A16);
    EXPECT_EQ(t.blocks(), 1u);
    EXPECT_EQ(t.sum(10), 144);
    t.update(9, -37);
    EXPECT_EQ(t.sum(10), 107);
}

TEST(BlockedFenwick, TwoBlocksOfOnes) {
    std::vector<value_t> ones(32, 1);
    fenwick_tree_blocked<two_level_node<16>> t(ones);
    EXPECT_EQ(t.sum(31), 32);
    EXPECT_EQ(t.sum(16), 17);
    EXPECT_EQ(t.sum(15), 16);
}

TEST(BlockedFenwick, NodeContents) {
    // node 4 spans blocks 1..4: its first input folds in the totals of blocks 1..3
    std::vector<value_t> ones(64, 1);
    fenwick_tree_blocked<two_level_node<16>> t(ones);
    EXPECT_EQ(t.sum(48), 49);
    EXPECT_EQ(t.sum(63), 64);
}

TEST(BlockedFenwick, MatchesOracle) {
    check_oracle_all_sizes<fenwick_tree_blocked<two_level_node<16>>>();
    check_oracle_all_sizes<fenwick_tree_blocked<two_level_node<64>>>();
    check_oracle_all_sizes<fenwick_tree_blocked<two_level_node<256>>>();
    check_oracle_all_sizes<fenwick_tree_blocked<restricted_node<64>>>(8);
    check_oracle_all_sizes<fenwick_tree_blocked<restricted_node<256>>>(8);
}

TEST(BlockedFenwick, HoledMatchesOracle) {
    for (std::size_t d : {1, 2, 8, 16384}) {
        for (std::size_t n : {1, 17, 1000, 100000}) {
            auto a = psum::testing::random_values(n, n + d);
            fenwick_tree_blocked<two_level_node<16>, true> t(a, d);
            EXPECT_EQ(t.bytes(), decltype(t)::storage_bytes(n, d));
            psum::testing::expect_matches_oracle(t, a, 1000, n);
        }
    }
}

TEST(BlockedFenwick, HoleSlots) {
    std::vector<value_t> a(16 * 20, 1);
    fenwick_tree_blocked<two_level_node<16>, true> t(a, 4);
    EXPECT_EQ(t.slot(1), 0u);
    EXPECT_EQ(t.slot(4), 3u);
    EXPECT_EQ(t.slot(5), 5u);
    EXPECT_EQ(t.slot(20), 23u);
    EXPECT_EQ(decltype(t)::slots(16 * 20, 4), 24u);
}

TEST(BlockedFenwick, AverageNodeReads) {
    // popcount(block + 1) nodes read plus the implicit root
    const std::size_t n = std::size_t(1) << 20, b = 64;
    std::uint64_t touches = 0;
    auto a = psum::testing::random_values(n, 2);
    fenwick_tree_blocked<two_level_node<64>, false, access_counter> t(a, 16384, access_counter(&touches));
    touches = 0;
    splitmix64 rng(default_seed);
    const int queries = 10000;
    for (int k = 0; k != queries; ++k) t.sum(rng.below(n));
    double avg = double(touches) / queries + 1.0;
    double expected = 0.5 * double(ceil_log2(ceil_div(n + 1, b))) + 1.0;
    EXPECT_NEAR(avg, expected, 0.1 * expected);
}

/* truncated */

TEST(TruncatedFenwick, SingleBlock) {
    fenwick_tree_truncated<two_level_node<16>> t(A16);
    EXPECT_EQ(t.blocks(), 1u);
    EXPECT_EQ(t.sum(10), 144);
    EXPECT_EQ(t.upper().sum(0), 229);
}

TEST(TruncatedFenwick, UpperSize) {
    EXPECT_EQ(fenwick_tree_truncated<two_level_node<256>>::upper_words(std::size_t(1) << 28),
              (std::size_t(1) << 20) + 1);
    auto a = psum::testing::random_values(100000, 3);
    fenwick_tree_truncated<two_level_node<256>> t(a);
    EXPECT_EQ(t.upper().data().size(), ceil_div(100000, 256) + 1);
}

TEST(TruncatedFenwick, UpperHoldsBlockTotals) {
    auto a = psum::testing::random_values(1000, 8);
    fenwick_tree_truncated<two_level_node<64>> t(a);
    for (std::size_t j = 0; j != t.blocks(); ++j) {
        value_t s = 0;
        for (std::size_t k = j * 64; k < std::min<std::size_t>(1000, (j + 1) * 64); ++k) s = wrap_add(s, a[k]);
        EXPECT_EQ(access(t.upper(), j), s);
    }
}

TEST(TruncatedFenwick, MatchesOracle) {
    check_oracle_all_sizes<fenwick_tree_truncated<two_level_node<16>>>();
    check_oracle_all_sizes<fenwick_tree_truncated<two_level_node<64>>>();
    check_oracle_all_sizes<fenwick_tree_truncated<two_level_node<256>>>();
    check_oracle_all_sizes<fenwick_tree_truncated<restricted_node<64>>>(8);
    check_oracle_all_sizes<fenwick_tree_truncated<restricted_node<256>>>(8);
    check_oracle_all_sizes<fenwick_tree_truncated<two_level_node<64>, true>>();
}

TEST(TruncatedFenwick, HoledUpper) {
    auto a = psum::testing::random_values(100000, 9);
    fenwick_tree_truncated<two_level_node<16>, true> t(a, 8);
    EXPECT_EQ(t.upper().data().size(), 6250u + 1 + 6250 / 8);
    psum::testing::expect_matches_oracle(t, a, 1000, 3);
}

TEST(Variants, RestrictedRejectWideDelta) {
    auto a = psum::testing::random_values(1000, 1);
    fenwick_tree_blocked<restricted_node<64>> blocked(a);
    fenwick_tree_truncated<restricted_node<64>> truncated(a);
    value_t b0 = blocked.sum(999), t0 = truncated.sum(999);
    EXPECT_THROW(blocked.update(3, 300), usage_error);
    EXPECT_THROW(truncated.update(3, -300), usage_error);
    EXPECT_EQ(blocked.sum(999), b0);
    EXPECT_EQ(truncated.sum(999), t0);
}

}  // namespace
