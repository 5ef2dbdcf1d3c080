#pragma once
// Discrete Bayesian networks: node and table definitions, structural
// validation, and the immutable Network built from a validated spec.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ftm/error.hpp"

namespace ftm {

inline constexpr double kRowTolerance = 1e-9;

enum class Visibility { Observable, Latent };

struct NodeDef {
    std::string id;
    std::string label;
    std::vector<std::string> states;  // order is significant
    Visibility visibility = Visibility::Latent;
    bool intervenable = false;

    std::optional<std::size_t> state_index(const std::string& s) const {
        auto it = std::find(states.begin(), states.end(), s);
        if (it == states.end()) return std::nullopt;
        return static_cast<std::size_t>(it - states.begin());
    }

    bool operator==(const NodeDef&) const = default;
};

struct Edge {
    std::string id;
    std::string from;
    std::string to;
    bool excluded = false;  // parsed and kept, but not part of the built graph

    bool operator==(const Edge&) const = default;
};

// Conditional probability table. Rows are ordered lexicographically over
// the parent-state tuple (first parent most significant, states in declared
// order); each row is a distribution over the child's states.
struct Cpt {
    std::string child;
    std::vector<std::string> parents;
    std::vector<std::vector<double>> rows;

    bool operator==(const Cpt&) const = default;
};

// Node whose posterior drives a suspicion decision (folk theories), or whose
// ground truth is tallied against it (world models).
struct SuspicionTarget {
    std::string node;
    std::string state;

    bool operator==(const SuspicionTarget&) const = default;
};

// Unvalidated description of a network, as produced by the parser or by hand.
struct NetworkSpec {
    std::string name = "model";
    std::vector<NodeDef> nodes;
    std::vector<Edge> edges;
    std::vector<Cpt> cpts;
    std::optional<SuspicionTarget> suspicion;
};

// Partial (evidence) or full (joint sample) assignment of states to nodes.
using Assignment = std::map<std::string, std::string>;

struct Distribution {
    std::string node;
    std::vector<std::string> states;
    std::vector<double> p;

    double at(const std::string& state) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == state) return p[i];
        fail(ErrorKind::UnknownState, "state '" + state + "' not in distribution of " + node);
    }
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string join(const std::vector<std::string>& xs, const char* sep = ", ") {
    std::string out;
    for (const auto& x : xs) {
        if (!out.empty()) out += sep;
        out += x;
    }
    return out;
}

// Strongly connected components with more than one node, or with a self loop.
inline std::vector<std::vector<std::size_t>> cyclic_components(
    std::size_t n, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    int counter = 0;

    // iterative Tarjan
    struct Frame { std::size_t v; std::size_t next; };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& fr = frames.back();
            if (fr.next < adj[fr.v].size()) {
                std::size_t w = adj[fr.v][fr.next++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[fr.v] = std::min(low[fr.v], index[w]);
                }
                continue;
            }
            std::size_t v = fr.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                bool self_loop = std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
                if (comp.size() > 1 || self_loop) {
                    std::sort(comp.begin(), comp.end());
                    comps.push_back(std::move(comp));
                }
            }
        }
    }
    std::sort(comps.begin(), comps.end());
    return comps;
}

}  // namespace detail

struct BuildOptions {
    bool include_excluded_edges = false;
};

// Every structural and numeric invariant violation in `spec`, located by
// node, edge or row. Findings accumulate; nothing is thrown.
inline ValidationReport validate(const NetworkSpec& spec, BuildOptions opts = {}) {
    ValidationReport report;
    auto add = [&](ErrorKind k, std::string locus, std::string msg, double value = 0.0) {
        report.findings.push_back({k, std::move(locus), std::move(msg), value});
    };

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& nd = spec.nodes[i];
        if (!index.emplace(nd.id, i).second)
            add(ErrorKind::DuplicateId, nd.id, "node id '" + nd.id + "' declared twice");
        if (nd.states.size() < 2)
            add(ErrorKind::TooFewStates, nd.id, "node " + nd.id + " needs at least 2 states");
        std::set<std::string> seen;
        for (const auto& s : nd.states)
            if (!seen.insert(s).second)
                add(ErrorKind::DuplicateState, nd.id, "state '" + s + "' repeated in node " + nd.id);
    }

    std::set<std::string> edge_ids;
    std::vector<std::vector<std::size_t>> adj(spec.nodes.size());
    std::vector<std::vector<std::string>> edge_of;  // parallel to adj
    edge_of.resize(spec.nodes.size());
    std::vector<std::set<std::string>> in_sources(spec.nodes.size());
    for (const auto& e : spec.edges) {
        if (!edge_ids.insert(e.id).second)
            add(ErrorKind::DuplicateId, e.id, "edge id '" + e.id + "' declared twice");
        if (e.excluded && !opts.include_excluded_edges) continue;
        auto f = index.find(e.from);
        auto t = index.find(e.to);
        if (f == index.end() || t == index.end()) {
            add(ErrorKind::DanglingEdge, e.id,
                "edge " + e.id + " references unknown node '" +
                    (f == index.end() ? e.from : e.to) + "'");
            continue;
        }
        adj[f->second].push_back(t->second);
        edge_of[f->second].push_back(e.id);
        in_sources[t->second].insert(e.from);
    }

    for (const auto& comp : detail::cyclic_components(spec.nodes.size(), adj)) {
        std::set<std::size_t> members(comp.begin(), comp.end());
        std::vector<std::string> edges;
        for (auto v : comp)
            for (std::size_t k = 0; k < adj[v].size(); ++k)
                if (members.count(adj[v][k])) edges.push_back(edge_of[v][k]);
        std::sort(edges.begin(), edges.end());
        add(ErrorKind::Cyclic, detail::join(edges),
            "cycle through edges " + detail::join(edges));
    }

    std::map<std::string, const Cpt*> cpt_of;
    for (const auto& c : spec.cpts) {
        if (!index.count(c.child)) {
            add(ErrorKind::UnknownNode, c.child, "table for unknown node '" + c.child + "'");
            continue;
        }
        if (!cpt_of.emplace(c.child, &c).second)
            add(ErrorKind::DuplicateId, c.child, "two tables for node " + c.child);
    }

    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        const auto& nd = spec.nodes[i];
        auto it = cpt_of.find(nd.id);
        if (it == cpt_of.end()) {
            add(ErrorKind::MissingCpt, nd.id, "node " + nd.id + " has no table");
            continue;
        }
        const Cpt& c = *it->second;
        std::set<std::string> parents(c.parents.begin(), c.parents.end());
        if (parents.size() != c.parents.size() || parents != in_sources[i]) {
            std::vector<std::string> want(in_sources[i].begin(), in_sources[i].end());
            add(ErrorKind::ParentSetMismatch, nd.id,
                "table parents of " + nd.id + " are [" + detail::join(c.parents) +
                    "] but in-edges come from [" + detail::join(want) + "]");
        }
        std::size_t expected = 1;
        bool parents_known = true;
        for (const auto& p : c.parents) {
            auto pi = index.find(p);
            if (pi == index.end()) {
                parents_known = false;
                add(ErrorKind::UnknownNode, nd.id, "table of " + nd.id + " names unknown parent '" + p + "'");
                continue;
            }
            expected *= spec.nodes[pi->second].states.size();
        }
        if (parents_known && c.rows.size() != expected) {
            add(ErrorKind::CptShapeMismatch, nd.id,
                "table of " + nd.id + " has " + std::to_string(c.rows.size()) + " rows, expected " +
                    std::to_string(expected),
                static_cast<double>(expected));
        }
        for (std::size_t r = 0; r < c.rows.size(); ++r) {
            const auto& row = c.rows[r];
            std::string locus = nd.id + "[" + std::to_string(r) + "]";
            if (row.size() != nd.states.size()) {
                add(ErrorKind::CptShapeMismatch, locus,
                    "row " + std::to_string(r) + " of " + nd.id + " has " + std::to_string(row.size()) +
                        " entries, expected " + std::to_string(nd.states.size()),
                    static_cast<double>(nd.states.size()));
                continue;
            }
            bool in_range = true;
            double sum = 0.0;
            for (double p : row) {
                if (!(p >= 0.0 && p <= 1.0)) in_range = false;
                sum += p;
            }
            if (!in_range) {
                add(ErrorKind::BadProbability, locus, "row " + std::to_string(r) + " of " + nd.id + " has an entry outside [0,1]");
            } else if (std::abs(sum - 1.0) > kRowTolerance) {
                add(ErrorKind::RowNotNormalized, locus,
                    "row " + std::to_string(r) + " of " + nd.id + " sums to " + detail::fmt_double(sum), sum);
            }
        }
    }

    if (spec.suspicion) {
        auto it = index.find(spec.suspicion->node);
        if (it == index.end())
            add(ErrorKind::UnknownNode, spec.suspicion->node, "suspicion node '" + spec.suspicion->node + "' not declared");
        else if (!spec.nodes[it->second].state_index(spec.suspicion->state))
            add(ErrorKind::UnknownState, spec.suspicion->node,
                "suspicion state '" + spec.suspicion->state + "' not a state of " + spec.suspicion->node);
    }
    return report;
}

// Immutable, validated network. Construct with build_network().
class Network {
public:
    const std::string& name() const { return name_; }
    const std::vector<NodeDef>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Edge>& excluded_edges() const { return excluded_; }
    const std::vector<Cpt>& cpts() const { return cpts_; }
    const std::vector<std::size_t>& topo_order() const { return topo_; }
    const std::optional<SuspicionTarget>& suspicion() const { return suspicion_; }
    std::size_t size() const { return nodes_.size(); }

    std::optional<std::size_t> find(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    std::size_t index_of(const std::string& id) const {
        auto i = find(id);
        if (!i) fail(ErrorKind::UnknownNode, "unknown node '" + id + "'");
        return *i;
    }
    const NodeDef& node(const std::string& id) const { return nodes_[index_of(id)]; }
    const Cpt& cpt(const std::string& id) const { return cpts_[index_of(id)]; }
    std::size_t cardinality(std::size_t i) const { return nodes_[i].states.size(); }

    // parent node indices of node i, in table order
    const std::vector<std::size_t>& parents(std::size_t i) const { return parent_idx_[i]; }
    const std::vector<std::size_t>& children(std::size_t i) const { return child_idx_[i]; }
    bool is_root(const std::string& id) const { return parent_idx_[index_of(id)].empty(); }

    // Row of node i's table selected by a full vector of state indices.
    std::size_t row_index(std::size_t i, const std::vector<std::size_t>& states) const {
        std::size_t r = 0;
        for (auto p : parent_idx_[i]) r = r * nodes_[p].states.size() + states[p];
        return r;
    }

    // State index of `state` for node id, or UnknownState.
    std::size_t state_of(const std::string& id, const std::string& state) const {
        const auto& nd = node(id);
        auto s = nd.state_index(state);
        if (!s) fail(ErrorKind::UnknownState, "'" + state + "' is not a state of " + id);
        return *s;
    }

    NetworkSpec to_spec() const {
        NetworkSpec s;
        s.name = name_;
        s.nodes = nodes_;
        s.edges = edges_;
        s.edges.insert(s.edges.end(), excluded_.begin(), excluded_.end());
        s.cpts = cpts_;
        s.suspicion = suspicion_;
        return s;
    }

private:
    friend Network build_network(const NetworkSpec&, BuildOptions);

    std::string name_;
    std::vector<NodeDef> nodes_;
    std::vector<Edge> edges_;
    std::vector<Edge> excluded_;
    std::vector<Cpt> cpts_;  // aligned with nodes_
    std::vector<std::size_t> topo_;
    std::optional<SuspicionTarget> suspicion_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parent_idx_;
    std::vector<std::vector<std::size_t>> child_idx_;
};

// Validates `spec` and returns the network, or throws ModelError carrying
// every finding. Excluded edges are kept on the side unless
// `opts.include_excluded_edges` is set, in which case they join the graph.
inline Network build_network(const NetworkSpec& spec, BuildOptions opts = {}) {
    auto report = validate(spec, opts);
    if (!report.ok()) throw ModelError(std::move(report.findings));

    Network net;
    net.name_ = spec.name;
    net.nodes_ = spec.nodes;
    net.suspicion_ = spec.suspicion;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) net.index_[spec.nodes[i].id] = i;
    for (const auto& e : spec.edges) {
        Edge copy = e;
        if (e.excluded && !opts.include_excluded_edges) {
            net.excluded_.push_back(copy);
        } else {
            copy.excluded = false;
            net.edges_.push_back(copy);
        }
    }
    const std::size_t n = spec.nodes.size();
    net.cpts_.resize(n);
    for (const auto& c : spec.cpts) net.cpts_[net.index_.at(c.child)] = c;

    net.parent_idx_.resize(n);
    net.child_idx_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& p : net.cpts_[i].parents) {
            auto pi = net.index_.at(p);
            net.parent_idx_[i].push_back(pi);
            net.child_idx_[pi].push_back(i);
        }
    for (auto& ch : net.child_idx_) std::sort(ch.begin(), ch.end());

    // Kahn's algorithm; among ready nodes pick the earliest declared.
    std::vector<std::size_t> indeg(n);
    for (std::size_t i = 0; i < n; ++i) indeg[i] = net.parent_idx_[i].size();
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.insert(i);
    while (!ready.empty()) {
        auto v = *ready.begin();
        ready.erase(ready.begin());
        net.topo_.push_back(v);
        for (auto c : net.child_idx_[v])
            if (--indeg[c] == 0) ready.insert(c);
    }
    return net;
}

inline ValidationReport validate(const Network& net) { return validate(net.to_spec()); }

// Converts an assignment to per-node state indices; unassigned nodes are
// left as npos.
inline constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

inline std::vector<std::size_t> to_state_indices(const Network& net, const Assignment& a) {
    std::vector<std::size_t> out(net.size(), kUnassigned);
    for (const auto& [id, state] : a) out[net.index_of(id)] = net.state_of(id, state);
    return out;
}

// Chain-rule product of table entries selected by a full assignment.
inline double joint_probability(const Network& net, const Assignment& full) {
    auto states = to_state_indices(net, full);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (states[i] == kUnassigned) missing.push_back(net.nodes()[i].id);
    if (!missing.empty())
        fail(ErrorKind::IncompleteAssignment, "missing nodes: " + detail::join(missing));
    double p = 1.0;
    for (auto i : net.topo_order()) p *= net.cpts()[i].rows[net.row_index(i, states)][states[i]];
    return p;
}

}  // namespace ftm
