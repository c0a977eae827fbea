#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "psum/psum.hpp"

using namespace psum;

namespace {

struct structure_options {
    std::string name;
    std::size_t b = 0;
    unsigned delta_bits = 64;
    std::string policy;
    std::size_t spacing = std::size_t(1) << 14;

    structure_config config() const { return {name, b, delta_bits, policy, spacing}; }
};

void add_structure_options(CLI::App* cmd, structure_options& o, bool with_policy) {
    cmd->add_option("--structure", o.name, "structure name")->required();
    cmd->add_option("--b", o.b, "node fanout");
    cmd->add_option("--delta-bits", o.delta_bits, "update width, 8 or 64")->check(CLI::IsMember({8, 64}));
    if (with_policy) {
        cmd->add_option("--policy", o.policy, "segment-tree traversal")
            ->check(CLI::IsMember({"branchy", "branchfree", "twoloop"}));
    }
    cmd->add_option("--d", o.spacing, "hole spacing for holed layouts");
}

int run_verify(std::uint64_t seed, std::size_t max_n, const std::vector<std::string>& only,
               bool inject_fault) {
    int failures = 0;
    for (const auto& config : verification_configs()) {
        if (!only.empty() && std::find(only.begin(), only.end(), config.name) == only.end()) continue;
        for (std::size_t n : verification_sizes(max_n)) {
            verify_result r;
            try {
                r = verify_structure(config, n, seed, 1000, inject_fault);
            } catch (const usage_error&) {
                if (inject_fault) continue;  // no hook for this structure
                throw;
            }
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.config.label() << " n=" << n;
            if (!r.passed) std::cout << ' ' << r.failure;
            std::cout << '\n';
            failures += !r.passed;
        }
    }
    std::cout << (failures ? "verify: FAILED (" + std::to_string(failures) + " mismatches)"
                           : std::string("verify: all passed"))
              << '\n';
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prefix-sum data structures: verification, benchmarks, cache and space analysis"};
    app.require_subcommand(1);

    // verify
    std::uint64_t seed = default_seed;
    std::size_t max_n = 100000;
    std::vector<std::string> only;
    bool inject_fault = false;
    auto* verify = app.add_subcommand("verify", "cross-check every structure against the naive oracle");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--max-n", max_n, "largest n to check");
    verify->add_option("--structure", only, "restrict to these structure names");
    verify->add_flag("--inject-fault", inject_fault, "corrupt one stored word (self-test)")->group("");

    // bench
    structure_options bench_structure;
    std::string op_name = "sum", out_path;
    std::size_t min_n = 256, bench_max_n = 100000000, queries = default_queries, reps = 5;
    auto* bench = app.add_subcommand("bench", "time sum or update over a grid of n");
    add_structure_options(bench, bench_structure, true);
    bench->add_option("--op", op_name, "sum or update")->check(CLI::IsMember({"sum", "update"}));
    bench->add_option("--min-n", min_n, "smallest n");
    bench->add_option("--max-n", bench_max_n, "largest n");
    bench->add_option("--queries", queries, "operations per pass");
    bench->add_option("--reps", reps, "timed passes per n");
    bench->add_option("--seed", seed, "random seed");
    bench->add_option("--out", out_path, "CSV output file")->required();

    // cachehist
    std::string hist_structure;
    std::size_t hist_n = 10000000;
    auto* cachehist = app.add_subcommand("cachehist", "distinct cache lines per set under random sums");
    cachehist->add_option("--structure", hist_structure, "ft, ft-holed or st")
        ->required()
        ->check(CLI::IsMember({"ft", "ft-holed", "st"}));
    cachehist->add_option("--n", hist_n, "array size");
    cachehist->add_option("--queries", queries, "number of sum queries");
    cachehist->add_option("--seed", seed, "random seed");

    // space
    structure_options space_structure;
    std::size_t space_n = 0;
    auto* space = app.add_subcommand("space", "storage size from the size formulas");
    add_structure_options(space, space_structure, false);
    space->add_option("--n", space_n, "array size")->required();

    // speedup
    std::string baseline_path, candidate_path;
    auto* speedup = app.add_subcommand("speedup", "geometric-mean speedup of candidate over baseline");
    speedup->add_option("--baseline", baseline_path, "baseline CSV")->required()->check(CLI::ExistingFile);
    speedup->add_option("--candidate", candidate_path, "candidate CSV")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) return run_verify(seed, max_n, only, inject_fault);

        if (*bench) {
            const structure_config config = normalize(bench_structure.config());
            const bench_op op = parse_op(op_name);
            std::vector<bench_record> records;
            for (std::size_t n : n_grid(min_n, bench_max_n)) {
                const workload w = make_workload(n, queries, seed, config.delta_bits);
                auto s = make_structure(config, w.values);
                const pass_timing t = s->time(op, w, reps);
                records.push_back({config.name, op, n, config.b, config.delta_bits, config.policy, reps,
                                   t.ns_min, t.ns_avg, t.ns_max, seed, t.checksum});
                std::cerr << config.label() << ' ' << to_string(op) << " n=" << n << " avg=" << t.ns_avg
                          << "ns checksum=" << t.checksum << '\n';
            }
            std::ofstream out(out_path);
            if (!out) throw usage_error("cannot open " + out_path);
            write_csv(out, records);
            return 0;
        }

        if (*cachehist) {
            cache_structure kind = hist_structure == "ft"         ? cache_structure::fenwick
                                   : hist_structure == "ft-holed" ? cache_structure::holed_fenwick
                                                                  : cache_structure::bottomup_segtree;
            const set_histogram h = trace_histogram(kind, hist_n, queries, seed);
            h.write_csv(std::cout);
            std::cerr << "distinct lines: " << h.total_lines << ", set 0 share: " << h.share(0)
                      << ", max share: " << h.max_share() << '\n';
            return 0;
        }

        if (*space) {
            compute_space(space_structure.config(), space_n).write(std::cout);
            return 0;
        }

        if (*speedup) {
            std::ifstream base(baseline_path), cand(candidate_path);
            write_speedup_table(std::cout, speedup_table(read_csv(base), read_csv(cand)));
            return 0;
        }
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
