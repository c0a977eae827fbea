#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "common.hpp"
#include "workload.hpp"

namespace psum {

/// Rounded powers of 10^(1/10) inside [min_n, max_n], ascending, no
/// duplicates. A range too narrow to hold one falls back to {min_n}.
inline std::vector<std::size_t> n_grid(std::size_t min_n, std::size_t max_n) {
    require(min_n >= 1 && min_n <= max_n, "n grid needs 1 <= min <= max");
    std::vector<std::size_t> grid;
    for (int k = 0;; ++k) {
        double x = std::round(std::pow(10.0, k / 10.0));
        if (x > double(max_n)) break;
        auto n = static_cast<std::size_t>(x);
        if (n >= min_n && (grid.empty() || grid.back() != n)) grid.push_back(n);
    }
    if (grid.empty()) grid.push_back(min_n);
    return grid;
}

enum class bench_op { sum, update };

constexpr const char* to_string(bench_op op) { return op == bench_op::sum ? "sum" : "update"; }

inline bench_op parse_op(const std::string& s) {
    if (s == "sum") return bench_op::sum;
    if (s == "update") return bench_op::update;
    throw usage_error("operation must be sum or update");
}

struct bench_record {
    std::string structure;
    bench_op op = bench_op::sum;
    std::size_t n = 0;
    std::size_t b = 0;  // 0 when the structure has no fanout
    unsigned delta_bits = 64;
    std::string policy = "none";
    std::size_t reps = 0;
    double ns_min = 0, ns_avg = 0, ns_max = 0;
    std::uint64_t seed = 0;
    value_t checksum = 0;  // not part of the CSV
};

struct pass_timing {
    double ns_min = 0, ns_avg = 0, ns_max = 0;
    value_t checksum = 0;
};

/*
 * One untimed warm-up pass over the whole index stream, then `reps` timed
 * passes; each pass reports elapsed / count. The sum checksum is the
 * wrapping total of every result of one pass. The update checksum is
 * sum(n-1) at the end, which includes the warm-up's updates.
 */
template <typename S>
pass_timing time_passes(S& s, bench_op op, const workload& w, std::size_t reps) {
    require(reps >= 1, "need at least one repetition");
    require(!w.indexes.empty(), "need at least one query");
    using clock = std::chrono::steady_clock;
    const auto& idx = w.indexes;
    std::vector<value_t> deltas(idx.size());
    for (std::size_t k = 0; k != idx.size(); ++k) deltas[k] = w.delta(idx[k]);

    value_t checksum = 0;
    auto pass = [&] {
        if (op == bench_op::sum) {
            value_t c = 0;
            for (std::size_t i : idx) c = wrap_add(c, s.sum(i));
            checksum = c;
        } else {
            for (std::size_t k = 0; k != idx.size(); ++k) s.update(idx[k], deltas[k]);
        }
    };

    pass();
    pass_timing t;
    t.ns_min = std::numeric_limits<double>::infinity();
    double total = 0;
    for (std::size_t r = 0; r != reps; ++r) {
        auto start = clock::now();
        pass();
        auto stop = clock::now();
        double ns = std::chrono::duration<double, std::nano>(stop - start).count() / double(idx.size());
        t.ns_min = std::min(t.ns_min, ns);
        t.ns_max = std::max(t.ns_max, ns);
        total += ns;
    }
    t.ns_avg = total / double(reps);
    // keep min <= avg <= max exact despite rounding in the division
    t.ns_avg = std::clamp(t.ns_avg, t.ns_min, t.ns_max);
    t.checksum = op == bench_op::sum ? checksum : s.sum(s.size() - 1);
    return t;
}

/* CSV */

inline constexpr const char* csv_header =
    "structure,op,n,b,delta_bits,policy,reps,ns_min,ns_avg,ns_max,seed";

inline void sort_records(std::vector<bench_record>& records) {
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::tuple(a.structure, int(a.op), a.n) < std::tuple(b.structure, int(b.op), b.n);
    });
}

inline void write_csv(std::ostream& out, std::vector<bench_record> records) {
    sort_records(records);
    out << csv_header << '\n';
    for (const auto& r : records) {
        out << r.structure << ',' << to_string(r.op) << ',' << r.n << ',' << r.b << ','
            << r.delta_bits << ',' << r.policy << ',' << r.reps << ',' << r.ns_min << ','
            << r.ns_avg << ',' << r.ns_max << ',' << r.seed << '\n';
    }
}

inline std::vector<bench_record> read_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == csv_header, "unexpected CSV header");
    std::vector<bench_record> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        require(f.size() == 11, "CSV row needs 11 fields");
        bench_record r;
        try {
            r.structure = f[0];
            r.op = parse_op(f[1]);
            r.n = std::stoull(f[2]);
            r.b = std::stoull(f[3]);
            r.delta_bits = static_cast<unsigned>(std::stoul(f[4]));
            r.policy = f[5];
            r.reps = std::stoull(f[6]);
            r.ns_min = std::stod(f[7]);
            r.ns_avg = std::stod(f[8]);
            r.ns_max = std::stod(f[9]);
            r.seed = std::stoull(f[10]);
        } catch (const std::logic_error&) {
            throw usage_error("malformed CSV row: " + line);
        }
        records.push_back(std::move(r));
    }
    return records;
}

/* speedup tables */

struct n_bucket {
    std::size_t lo, hi;  // lo < n <= hi
    const char* label;
};

inline const std::vector<n_bucket>& speedup_buckets() {
    static const std::vector<n_bucket> buckets = {
        {std::size_t(1) << 8, std::size_t(1) << 16, "2^8 < n <= 2^16"},
        {std::size_t(1) << 16, std::size_t(1) << 22, "2^16 < n <= 2^22"},
        {std::size_t(1) << 22, std::size_t(1) << 30, "2^22 < n <= 2^30"},
    };
    return buckets;
}

struct speedup_cell {
    double factor = 0;  // geometric mean of baseline / candidate
    std::size_t samples = 0;
};

/// speedup[op][bucket]. Every (op, n) must appear in both inputs.
inline std::map<bench_op, std::vector<speedup_cell>> speedup_table(
    const std::vector<bench_record>& baseline, const std::vector<bench_record>& candidate) {
    std::map<std::pair<bench_op, std::size_t>, double> base, cand;
    for (const auto& r : baseline) base[{r.op, r.n}] = r.ns_avg;
    for (const auto& r : candidate) cand[{r.op, r.n}] = r.ns_avg;
    require(!base.empty(), "baseline has no records");
    for (const auto& [key, _] : base) {
        if (!cand.count(key)) {
            throw usage_error(std::string("candidate lacks ") + to_string(key.first) +
                              " at n=" + std::to_string(key.second));
        }
    }
    for (const auto& [key, _] : cand) {
        if (!base.count(key)) {
            throw usage_error(std::string("baseline lacks ") + to_string(key.first) +
                              " at n=" + std::to_string(key.second));
        }
    }

    const auto& buckets = speedup_buckets();
    std::map<bench_op, std::vector<double>> log_sum;
    std::map<bench_op, std::vector<speedup_cell>> table;
    for (const auto& [key, b] : base) {
        auto& cells = table[key.first];
        auto& logs = log_sum[key.first];
        cells.resize(buckets.size());
        logs.resize(buckets.size());
        for (std::size_t k = 0; k != buckets.size(); ++k) {
            if (key.second > buckets[k].lo && key.second <= buckets[k].hi) {
                logs[k] += std::log(b / cand.at(key));
                ++cells[k].samples;
            }
        }
    }
    for (auto& [op, cells] : table) {
        for (std::size_t k = 0; k != cells.size(); ++k) {
            if (cells[k].samples) cells[k].factor = std::exp(log_sum[op][k] / double(cells[k].samples));
        }
    }
    return table;
}

inline void write_speedup_table(std::ostream& out,
                                const std::map<bench_op, std::vector<speedup_cell>>& table) {
    const auto& buckets = speedup_buckets();
    out << "op";
    for (const auto& b : buckets) out << " | " << b.label;
    out << '\n';
    for (const auto& [op, cells] : table) {
        out << to_string(op);
        for (const auto& c : cells) {
            out << " | ";
            if (c.samples) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2fx", c.factor);
                out << buf;
            } else {
                out << '-';
            }
        }
        out << '\n';
    }
}

}  // namespace psum
