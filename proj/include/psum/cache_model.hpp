#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include "common.hpp"
#include "fenwick_tree.hpp"
#include "segment_tree.hpp"
#include "workload.hpp"

namespace psum {

/// A set-associative cache, reduced to how addresses map onto sets.
struct cache_config {
    std::size_t line_bytes = 64;
    std::size_t ways = 8;
    std::size_t total_bytes = 32768;

    constexpr std::size_t sets() const { return total_bytes / (ways * line_bytes); }
};

/// Set holding the byte at `offset`, with the structure's storage assumed
/// to start on a line boundary.
constexpr std::size_t set_of(std::size_t offset, const cache_config& cfg = {}) {
    return (offset / cfg.line_bytes) % cfg.sets();
}

struct set_histogram {
    std::vector<std::size_t> lines_per_set;  // distinct lines mapped to each set
    std::size_t total_lines = 0;

    double share(std::size_t set) const {
        return total_lines ? double(lines_per_set[set]) / double(total_lines) : 0.0;
    }

    double max_share() const {
        double best = 0;
        for (std::size_t s = 0; s != lines_per_set.size(); ++s) best = std::max(best, share(s));
        return best;
    }

    void write_csv(std::ostream& out) const {
        out << "set_id,distinct_lines,share\n";
        for (std::size_t s = 0; s != lines_per_set.size(); ++s) {
            out << s << ',' << lines_per_set[s] << ',' << share(s) << '\n';
        }
    }
};

/// Histogram of distinct lines per set for a list of touched byte offsets.
inline set_histogram histogram_of(std::vector<std::size_t> byte_offsets, const cache_config& cfg = {}) {
    for (auto& o : byte_offsets) o /= cfg.line_bytes;
    std::sort(byte_offsets.begin(), byte_offsets.end());
    byte_offsets.erase(std::unique(byte_offsets.begin(), byte_offsets.end()), byte_offsets.end());
    set_histogram h;
    h.lines_per_set.assign(cfg.sets(), 0);
    h.total_lines = byte_offsets.size();
    for (std::size_t line : byte_offsets) ++h.lines_per_set[line % cfg.sets()];
    return h;
}

enum class cache_structure { fenwick, holed_fenwick, bottomup_segtree };

/*
 * Runs `queries` random sum queries on the chosen structure over a random
 * array of n values and records every word it reads. Word positions are
 * physical (holes included), 8 bytes each.
 */
inline set_histogram trace_histogram(cache_structure kind, std::size_t n,
                                     std::size_t queries = default_queries,
                                     std::uint64_t seed = default_seed, const cache_config& cfg = {}) {
    const workload w = make_workload(n, queries, seed);
    std::vector<std::size_t> words;
    auto run = [&](const auto& s) {
        value_t checksum = 0;
        for (std::size_t i : w.indexes) checksum = wrap_add(checksum, s.sum(i));
        return checksum;
    };
    switch (kind) {
        case cache_structure::fenwick: {
            fenwick_tree<access_log> t(w.values, fenwick_tree<access_log>::default_spacing,
                                       access_log(&words));
            run(t);
            break;
        }
        case cache_structure::holed_fenwick: {
            holed_fenwick_tree<access_log> t(w.values, holed_fenwick_tree<access_log>::default_spacing,
                                             access_log(&words));
            run(t);
            break;
        }
        case cache_structure::bottomup_segtree: {
            using tree = segment_tree_bottomup<node_content::regular, traversal::branch_free, access_log>;
            tree t(w.values, tree::auto_threshold, access_log(&words));
            run(t);
            break;
        }
    }
    for (auto& p : words) p *= sizeof(value_t);
    return histogram_of(std::move(words), cfg);
}

}  // namespace psum
