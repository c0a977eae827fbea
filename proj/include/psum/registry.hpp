#pragma once

#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "bench.hpp"
#include "common.hpp"
#include "fenwick_tree.hpp"
#include "fenwick_tree_bary.hpp"
#include "fenwick_tree_blocked.hpp"
#include "fenwick_tree_truncated.hpp"
#include "naive_oracle.hpp"
#include "node.hpp"
#include "segment_tree.hpp"
#include "segment_tree_bary.hpp"
#include "workload.hpp"

namespace psum {

/*
 * Run-time selection of a structure by name, for the command-line tool and
 * the cross-structure tests. Names:
 *
 *   st-topdown st-bottomup st-leftsum      policy: branchy | branchfree | twoloop
 *   ft ft-holed                            spacing: hole distance d
 *   st-bary                                b: 16 | 64 | 256, delta_bits: 64 | 8
 *   ft-bary                                b: 2 | 4 | 16 | 64 | 256
 *   ft-blocked ft-blocked-holed            b: 16 | 64 | 256, delta_bits: 64 | 8
 *   ft-truncated ft-truncated-holed        b: 16 | 64 | 256, delta_bits: 64 | 8
 */
struct structure_config {
    std::string name;
    std::size_t b = 0;          // 0: not applicable / default
    unsigned delta_bits = 64;   // 8 selects restricted nodes
    std::string policy;         // empty: default
    std::size_t spacing = std::size_t(1) << 14;

    std::string label() const {
        std::ostringstream out;
        out << name;
        if (b) out << " b=" << b;
        if (delta_bits != 64) out << " delta_bits=" << delta_bits;
        if (!policy.empty() && policy != "none") out << " policy=" << policy;
        if (name.ends_with("holed")) out << " d=" << spacing;
        return out.str();
    }
};

inline const std::vector<std::string>& structure_names() {
    static const std::vector<std::string> names = {
        "st-topdown", "st-bottomup", "st-leftsum", "ft", "ft-holed", "st-bary", "ft-bary",
        "ft-blocked", "ft-blocked-holed", "ft-truncated", "ft-truncated-holed"};
    return names;
}

namespace detail {

inline bool is_segment_tree(const std::string& name) {
    return name == "st-topdown" || name == "st-bottomup" || name == "st-leftsum";
}

inline bool uses_nodes(const std::string& name) {
    return name == "st-bary" || name == "ft-bary" || name.starts_with("ft-blocked") ||
           name.starts_with("ft-truncated");
}

}  // namespace detail

/// Fills defaults and rejects combinations that do not exist.
inline structure_config normalize(structure_config c) {
    bool known = false;
    for (const auto& n : structure_names()) known |= n == c.name;
    if (!known) throw usage_error("unknown structure: " + c.name);
    require(c.delta_bits == 8 || c.delta_bits == 64, "delta_bits must be 8 or 64");

    if (detail::is_segment_tree(c.name)) {
        if (c.policy.empty()) c.policy = "branchfree";
        require(c.policy == "branchy" || c.policy == "branchfree" || c.policy == "twoloop",
                "policy must be branchy, branchfree or twoloop");
        require(!(c.name == "st-topdown" && c.policy == "twoloop"),
                "st-topdown has no twoloop traversal");
    } else {
        require(c.policy.empty() || c.policy == "none", "policy only applies to binary segment trees");
        c.policy = "none";
    }

    if (detail::uses_nodes(c.name)) {
        if (c.b == 0) c.b = 64;
        if (c.name == "ft-bary") {
            require(c.b == 2 || c.b == 4 || c.b == 16 || c.b == 64 || c.b == 256,
                    "ft-bary fanout must be one of 2, 4, 16, 64, 256");
            require(c.delta_bits == 64, "ft-bary has no restricted variant");
        } else {
            require(supported_bary_fanout(c.b), "fanout must be one of 16, 64, 256");
        }
    } else {
        require(c.b == 0, "fanout only applies to node-based structures");
    }

    if (!detail::uses_nodes(c.name)) {
        require(c.delta_bits == 64, "8-bit deltas need a node-based structure");
    }
    if (c.name.ends_with("holed")) {
        require(c.spacing >= 1 && std::has_single_bit(c.spacing), "hole spacing must be a power of two");
    }
    return c;
}

/// Type-erased handle. Benchmarks call time(), which runs the typed loop
/// inside, so no virtual call sits on the measured path.
class structure_base {
public:
    virtual ~structure_base() = default;
    virtual std::size_t size() const = 0;
    virtual value_t sum(std::size_t i) const = 0;
    virtual void update(std::size_t i, value_t delta) = 0;
    virtual pass_timing time(bench_op op, const workload& w, std::size_t reps) = 0;
    /// Corrupts one stored word read by sum(0). False if the structure has
    /// no word-addressable storage.
    virtual bool inject_fault() = 0;

    const structure_config& config() const { return m_config; }

protected:
    structure_config m_config;
};

namespace detail {

template <typename S>
class structure_model final : public structure_base {
public:
    template <typename... Args>
    explicit structure_model(structure_config c, Args&&... args) : m_s(std::forward<Args>(args)...) {
        m_config = std::move(c);
    }

    std::size_t size() const override { return m_s.size(); }
    value_t sum(std::size_t i) const override { return m_s.sum(i); }
    void update(std::size_t i, value_t delta) override { m_s.update(i, delta); }
    pass_timing time(bench_op op, const workload& w, std::size_t reps) override {
        return time_passes(m_s, op, w, reps);
    }

    bool inject_fault() override {
        if constexpr (requires { m_s.leaf(0); }) {
            auto words = m_s.data();
            words[m_s.leaf(0)] = wrap_add(words[m_s.leaf(0)], 1);
            return true;
        } else if constexpr (requires { m_s.padded_size(); }) {
            auto words = m_s.data();
            words[m_s.padded_size() - 1] = wrap_add(words[m_s.padded_size() - 1], 1);
            return true;
        } else if constexpr (requires { m_s.slot(1); m_s.data(); }) {
            auto words = m_s.data();
            words[m_s.slot(1)] = wrap_add(words[m_s.slot(1)], 1);
            return true;
        } else {
            return false;
        }
    }

private:
    S m_s;
};

template <typename S, typename... Args>
std::unique_ptr<structure_base> make_model(const structure_config& c, Args&&... args) {
    return std::make_unique<structure_model<S>>(c, std::forward<Args>(args)...);
}

/// Calls f(std::type_identity<Node>) for the node type selected by c.b
/// and c.delta_bits.
template <typename F>
std::unique_ptr<structure_base> visit_node(const structure_config& c, F&& f) {
    auto kind = [&]<std::size_t B>() {
        if (c.delta_bits == 8) return f(std::type_identity<restricted_node<B>>{});
        return f(std::type_identity<two_level_node<B>>{});
    };
    switch (c.b) {
        case 16: return kind.template operator()<16>();
        case 64: return kind.template operator()<64>();
        case 256: return kind.template operator()<256>();
    }
    throw usage_error("unsupported fanout");
}

template <traversal P>
std::unique_ptr<structure_base> make_bottomup(const structure_config& c, std::span<const value_t> v) {
    if (c.name == "st-leftsum") return make_model<segment_tree_bottomup<node_content::left_sum, P>>(c, v);
    return make_model<segment_tree_bottomup<node_content::regular, P>>(c, v);
}

}  // namespace detail

inline std::unique_ptr<structure_base> make_structure(structure_config config,
                                                      std::span<const value_t> values) {
    using namespace detail;
    const structure_config c = normalize(std::move(config));
    require_nonempty(values.size());
    const std::string& name = c.name;

    if (name == "st-topdown") {
        // the default sum/update path is branch-free; branchy is selected by wrapping
        if (c.policy == "branchy") {
            struct branchy_topdown : segment_tree_topdown {
                using segment_tree_topdown::segment_tree_topdown;
                value_t sum(std::size_t i) const { return sum_with<traversal::branchy>(i); }
                void update(std::size_t i, value_t d) { update_with<traversal::branchy>(i, d); }
            };
            return make_model<branchy_topdown>(c, values);
        }
        return make_model<segment_tree_topdown>(c, values);
    }
    if (name == "st-bottomup" || name == "st-leftsum") {
        if (c.policy == "branchy") return make_bottomup<traversal::branchy>(c, values);
        if (c.policy == "twoloop") return make_bottomup<traversal::two_loop>(c, values);
        return make_bottomup<traversal::branch_free>(c, values);
    }
    if (name == "ft") return make_model<fenwick_tree<>>(c, values);
    if (name == "ft-holed") return make_model<holed_fenwick_tree<>>(c, values, c.spacing);

    if (name == "ft-bary") {
        switch (c.b) {
            case 2: return make_model<fenwick_tree_bary<flat_node<2>>>(c, values);
            case 4: return make_model<fenwick_tree_bary<flat_node<4>>>(c, values);
            case 16: return make_model<fenwick_tree_bary<two_level_node<16>>>(c, values);
            case 64: return make_model<fenwick_tree_bary<two_level_node<64>>>(c, values);
            case 256: return make_model<fenwick_tree_bary<two_level_node<256>>>(c, values);
        }
        throw usage_error("unsupported fanout");
    }

    return visit_node(c, [&](auto tag) -> std::unique_ptr<structure_base> {
        using Node = typename decltype(tag)::type;
        if (name == "st-bary") return make_model<segment_tree_bary<Node>>(c, values);
        if (name == "ft-blocked") return make_model<fenwick_tree_blocked<Node>>(c, values);
        if (name == "ft-blocked-holed") {
            return make_model<fenwick_tree_blocked<Node, true>>(c, values, c.spacing);
        }
        if (name == "ft-truncated") return make_model<fenwick_tree_truncated<Node>>(c, values);
        return make_model<fenwick_tree_truncated<Node, true>>(c, values, c.spacing);
    });
}

/*
 * Storage for n elements, from the size formulas rather than a built
 * instance, so it works for n far beyond memory. `words` is set for
 * structures stored as plain arrays of 64-bit values; node-based
 * structures report bytes before and after node padding.
 */
struct space_report {
    structure_config config;
    std::size_t n = 0;
    std::size_t words = 0;        // 0 for node-based structures
    std::size_t exact_bytes = 0;  // nodes at their unpadded size
    std::size_t bytes = 0;        // as allocated
    std::size_t node_bytes_exact = 0;
    std::size_t node_bytes = 0;
    double node_overhead = 0;  // extra space of one node over b plain values

    double overhead() const { return double(bytes) / double(8 * n) - 1.0; }

    void write(std::ostream& out) const {
        out << "structure: " << config.label() << '\n' << "n: " << n << '\n';
        if (words) out << "values: " << words << '\n';
        out << "bytes: " << bytes << '\n';
        if (node_bytes) {
            out << "bytes_unpadded: " << exact_bytes << '\n'
                << "node_bytes: " << node_bytes << '\n'
                << "node_bytes_unpadded: " << node_bytes_exact << '\n'
                << "node_overhead: " << node_overhead << '\n';
        }
        out << "overhead_vs_array: " << overhead() << '\n';
    }
};

/// Extra space of a node over its b plain 64-bit values, unpadded.
template <node_layout Node>
constexpr double node_overhead() {
    return double(Node::exact_bytes) / double(8 * Node::fanout) - 1.0;
}

inline space_report compute_space(structure_config config, std::size_t n) {
    using namespace detail;
    space_report r;
    r.config = normalize(std::move(config));
    require_nonempty(n);
    r.n = n;
    const auto& c = r.config;
    const std::string& name = c.name;

    auto word_based = [&](std::size_t words) {
        r.words = words;
        r.bytes = r.exact_bytes = 8 * words;
        return r;
    };
    if (name == "st-topdown") return word_based(segment_tree_topdown::storage_words(n));
    if (name == "st-bottomup" || name == "st-leftsum") return word_based(segment_tree_bottomup<>::storage_words(n));
    if (name == "ft") return word_based(fenwick_tree<>::storage_words(n));
    if (name == "ft-holed") return word_based(holed_fenwick_tree<>::storage_words(n, c.spacing));

    auto node_based = [&]<typename Node>(std::type_identity<Node>, std::size_t nodes,
                                         std::size_t extra_words) {
        r.node_bytes = Node::bytes;
        r.node_bytes_exact = Node::exact_bytes;
        r.node_overhead = node_overhead<Node>();
        r.bytes = nodes * Node::bytes + 8 * extra_words;
        r.exact_bytes = nodes * Node::exact_bytes + 8 * extra_words;
        return r;
    };

    if (name == "ft-bary") {
        const std::size_t nodes = ceil_div(n, c.b);
        switch (c.b) {
            case 2: return node_based(std::type_identity<flat_node<2>>{}, nodes, 0);
            case 4: return node_based(std::type_identity<flat_node<4>>{}, nodes, 0);
            case 16: return node_based(std::type_identity<two_level_node<16>>{}, nodes, 0);
            case 64: return node_based(std::type_identity<two_level_node<64>>{}, nodes, 0);
            default: return node_based(std::type_identity<two_level_node<256>>{}, nodes, 0);
        }
    }

    space_report out;
    visit_node(c, [&](auto tag) -> std::unique_ptr<structure_base> {
        using Node = typename decltype(tag)::type;
        const std::size_t blocks = ceil_div(n, c.b);
        if (name == "st-bary") {
            out = node_based(tag, plan(n, c.b).total_nodes(), 0);
        } else if (name == "ft-blocked") {
            out = node_based(tag, fenwick_tree_blocked<Node>::slots(n), 0);
        } else if (name == "ft-blocked-holed") {
            out = node_based(tag, fenwick_tree_blocked<Node, true>::slots(n, c.spacing), 0);
        } else if (name == "ft-truncated") {
            out = node_based(tag, blocks, fenwick_tree<>::storage_words(blocks));
        } else {
            out = node_based(tag, blocks, holed_fenwick_tree<>::storage_words(blocks, c.spacing));
        }
        return nullptr;
    });
    return out;
}

}  // namespace psum
