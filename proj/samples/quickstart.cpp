// Build a few structures over the same array and query them.
#include <iostream>
#include <vector>

#include "psum/psum.hpp"

int main() {
    std::vector<psum::value_t> a = {13, -1, 2, 23, -4, 231, 13, 5, 2, -88, -52, 0, 4, 90, 3, -12};

    psum::fenwick_tree<> ft(a);
    psum::segment_tree_bottomup<> st(a);
    psum::segment_tree_bary<psum::two_level_node<16>> bst(a);

    std::cout << "sum(10): ft=" << ft.sum(10) << " st=" << st.sum(10) << " bary=" << bst.sum(10) << '\n';

    ft.update(10, -37);
    st.update(10, -37);
    bst.update(10, -37);
    std::cout << "after update(10, -37): ft=" << ft.sum(10) << " st=" << st.sum(10)
              << " bary=" << bst.sum(10) << '\n';

    std::cout << "range_sum(8, 10) = " << psum::range_sum(ft, 8, 10) << '\n';

    // 8-bit deltas with buffered nodes
    std::vector<psum::value_t> big(100000, 1);
    psum::segment_tree_bary<psum::restricted_node<64>> rst(big);
    for (std::size_t i = 0; i < big.size(); i += 7) rst.update(i, -1);
    std::cout << "restricted total: " << rst.sum(big.size() - 1) << '\n';
}
