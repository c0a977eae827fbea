#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "naive_oracle.hpp"
#include "registry.hpp"
#include "workload.hpp"

namespace psum {

struct verify_result {
    structure_config config;
    std::size_t n = 0;
    bool passed = true;
    std::string failure;  // first mismatch: op, index, expected, got
};

/*
 * Builds the structure and a naive_oracle from the same random array, then
 * runs `ops` random operations (half updates, half sums) through the checked
 * adapter, comparing every sum. Finishes with a sweep over all prefixes.
 * Deltas are random 64-bit words, or uniform in [-128, 127] for 8-bit
 * configurations.
 */
inline verify_result verify_structure(const structure_config& config, std::size_t n,
                                      std::uint64_t seed = default_seed, std::size_t ops = 1000,
                                      bool inject_fault = false) {
    verify_result r;
    r.config = normalize(config);
    r.n = n;
    const workload w = make_workload(n, 0, seed);
    auto s = make_structure(r.config, w.values);
    if (inject_fault) require(s->inject_fault(), "this structure has no fault-injection hook");
    naive_oracle oracle(w.values);
    checked<structure_base> guarded(*s);

    auto fail = [&](const char* op, std::size_t i, value_t expected, value_t got) {
        std::ostringstream out;
        out << "op=" << op << " index=" << i << " expected=" << expected << " got=" << got;
        r.passed = false;
        r.failure = out.str();
        return r;
    };

    splitmix64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)));
    for (std::size_t k = 0; k != ops; ++k) {
        const std::size_t i = rng.below(n);
        if (rng() & 1) {
            value_t delta = r.config.delta_bits == 8 ? static_cast<value_t>(rng.below(256)) - 128
                                                     : static_cast<value_t>(rng());
            guarded.update(i, delta);
            oracle.update(i, delta);
        } else {
            value_t expected = oracle.sum(i), got = guarded.sum(i);
            if (expected != got) return fail("sum", i, expected, got);
        }
    }
    value_t prefix = 0;
    for (std::size_t i = 0; i != n; ++i) {
        prefix = wrap_add(prefix, oracle.access(i));
        value_t got = guarded.sum(i);
        if (got != prefix) return fail("sweep-sum", i, prefix, got);
    }
    return r;
}

/// Every structure configuration exercised by `verify`.
inline std::vector<structure_config> verification_configs() {
    std::vector<structure_config> out;
    auto add = [&](std::string name, std::size_t b = 0, unsigned bits = 64, std::string policy = {},
                   std::size_t spacing = std::size_t(1) << 14) {
        out.push_back({std::move(name), b, bits, std::move(policy), spacing});
    };
    for (const char* p : {"branchy", "branchfree"}) add("st-topdown", 0, 64, p);
    for (const char* name : {"st-bottomup", "st-leftsum"}) {
        for (const char* p : {"branchy", "branchfree", "twoloop"}) add(name, 0, 64, p);
    }
    add("ft");
    add("ft-holed");
    add("ft-holed", 0, 64, "", 8);  // holes close enough to matter at small n
    for (std::size_t b : {16, 64, 256}) {
        for (unsigned bits : {64u, 8u}) add("st-bary", b, bits);
    }
    for (std::size_t b : {2, 4, 16, 64, 256}) add("ft-bary", b);
    for (const char* name : {"ft-blocked", "ft-truncated"}) {
        for (std::size_t b : {16, 64, 256}) {
            for (unsigned bits : {64u, 8u}) add(name, b, bits);
        }
    }
    add("ft-blocked-holed", 16, 64, "", 4);
    add("ft-blocked-holed", 64, 8, "", 2);
    add("ft-truncated-holed", 16, 64, "", 4);
    add("ft-truncated-holed", 64, 8, "", 2);
    return out;
}

/// The sizes used by `verify`, capped at max_n.
inline std::vector<std::size_t> verification_sizes(std::size_t max_n = 100000) {
    std::vector<std::size_t> out;
    for (std::size_t n : {1, 2, 3, 15, 16, 17, 63, 64, 65, 255, 256, 257, 1000, 4096, 100000}) {
        if (n <= max_n) out.push_back(n);
    }
    return out;
}

}  // namespace psum
