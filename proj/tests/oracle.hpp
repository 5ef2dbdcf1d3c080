#pragma once
// Brute-force reference used to check the engine. Works directly on
// NetworkSpec tables by enumerating every joint assignment, sharing no code
// with the factor or elimination machinery.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ftm/network.hpp"

namespace oracle {

using ftm::Assignment;
using ftm::NetworkSpec;

inline std::size_t node_pos(const NetworkSpec& s, const std::string& id) {
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        if (s.nodes[i].id == id) return i;
    return static_cast<std::size_t>(-1);
}

inline std::size_t state_pos(const NetworkSpec& s, std::size_t node, const std::string& state) {
    const auto& st = s.nodes[node].states;
    return static_cast<std::size_t>(std::find(st.begin(), st.end(), state) - st.begin());
}

// Chain-rule product for one full assignment given as state indices in
// spec node order.
inline double joint(const NetworkSpec& s, const std::vector<std::size_t>& x) {
    double p = 1.0;
    for (const auto& c : s.cpts) {
        std::size_t row = 0;
        for (const auto& par : c.parents) {
            auto j = node_pos(s, par);
            row = row * s.nodes[j].states.size() + x[j];
        }
        p *= c.rows[row][x[node_pos(s, c.child)]];
    }
    return p;
}

template <class F>
void for_each_assignment(const NetworkSpec& s, F&& f) {
    std::vector<std::size_t> x(s.nodes.size(), 0);
    while (true) {
        f(x);
        std::size_t k = x.size();
        while (true) {
            if (k == 0) return;
            --k;
            if (++x[k] < s.nodes[k].states.size()) break;
            x[k] = 0;
        }
    }
}

// Unnormalized mass of `query` states consistent with `evidence`.
inline std::vector<double> query_mass(const NetworkSpec& s, const Assignment& evidence, const std::string& query) {
    const auto q = node_pos(s, query);
    std::vector<std::pair<std::size_t, std::size_t>> ev;
    for (const auto& [id, st] : evidence) {
        auto j = node_pos(s, id);
        ev.emplace_back(j, state_pos(s, j, st));
    }
    std::vector<double> mass(s.nodes[q].states.size(), 0.0);
    for_each_assignment(s, [&](const std::vector<std::size_t>& x) {
        for (auto [j, st] : ev)
            if (x[j] != st) return;
        mass[x[q]] += joint(s, x);
    });
    return mass;
}

// Posterior of `query`, or nullopt when the evidence has probability zero.
inline std::optional<std::vector<double>> posterior(const NetworkSpec& s, const Assignment& evidence,
                                                    const std::string& query) {
    auto mass = query_mass(s, evidence, query);
    double z = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (z <= 0.0) return std::nullopt;
    for (auto& m : mass) m /= z;
    return mass;
}

inline double evidence_probability(const NetworkSpec& s, const Assignment& evidence) {
    double total = 0.0;
    for (double m : query_mass(s, evidence, s.nodes.front().id)) total += m;
    return total;
}

inline double total_mass(const NetworkSpec& s) {
    double t = 0.0;
    for_each_assignment(s, [&](const std::vector<std::size_t>& x) { t += joint(s, x); });
    return t;
}

struct RandomOptions {
    std::size_t min_nodes = 2;
    std::size_t max_nodes = 12;
    std::size_t max_parents = 3;
    std::size_t max_states = 2;   // 2 gives binary networks
    double zero_chance = 0.0;     // chance that a table entry is forced to zero
    bool shuffle_declaration = true;
};

// Seeded random DAG with random tables. Node k may only take parents with a
// smaller creation index, so the result is always acyclic; declaration order
// is optionally shuffled so it need not be topological.
inline NetworkSpec random_spec(std::uint64_t seed, const RandomOptions& o = {}) {
    std::mt19937_64 rng(seed);
    auto uniform_int = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    std::uniform_real_distribution<double> u(0.0, 1.0);

    const std::size_t n = uniform_int(o.min_nodes, o.max_nodes);
    NetworkSpec s;
    s.name = "random" + std::to_string(seed);
    std::vector<ftm::NodeDef> created;
    for (std::size_t k = 0; k < n; ++k) {
        ftm::NodeDef d;
        d.id = "X" + std::to_string(k);
        d.label = "random node " + std::to_string(k);
        const std::size_t card = uniform_int(2, std::max<std::size_t>(2, o.max_states));
        for (std::size_t t = 0; t < card; ++t) d.states.push_back("s" + std::to_string(t));
        d.visibility = u(rng) < 0.5 ? ftm::Visibility::Observable : ftm::Visibility::Latent;
        d.intervenable = u(rng) < 0.5;
        created.push_back(d);
    }
    std::size_t edge_no = 0;
    std::vector<std::vector<std::string>> parents(n);
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<std::size_t> pool(k);
        std::iota(pool.begin(), pool.end(), 0);
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::size_t np = uniform_int(0, std::min(o.max_parents, k));
        for (std::size_t j = 0; j < np; ++j) {
            parents[k].push_back(created[pool[j]].id);
            s.edges.push_back({"E" + std::to_string(++edge_no), created[pool[j]].id, created[k].id, false});
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        ftm::Cpt c{created[k].id, parents[k], {}};
        std::size_t rows = 1;
        for (const auto& p : parents[k])
            for (const auto& d : created)
                if (d.id == p) rows *= d.states.size();
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> row(created[k].states.size());
            double z = 0.0;
            for (auto& v : row) {
                v = (o.zero_chance > 0.0 && u(rng) < o.zero_chance) ? 0.0 : 0.05 + u(rng);
                z += v;
            }
            if (z == 0.0) {
                row[0] = 1.0;
                z = 1.0;
            }
            for (auto& v : row) v /= z;
            c.rows.push_back(row);
        }
        s.cpts.push_back(c);
    }
    if (o.shuffle_declaration) {
        std::shuffle(created.begin(), created.end(), rng);
        std::shuffle(s.cpts.begin(), s.cpts.end(), rng);
        std::shuffle(s.edges.begin(), s.edges.end(), rng);
    }
    s.nodes = created;
    return s;
}

// Random partial assignment over up to `max_size` nodes, never including
// `exclude`.
inline Assignment random_evidence(const NetworkSpec& s, std::mt19937_64& rng, std::size_t max_size,
                                  const std::string& exclude = {}) {
    std::vector<std::size_t> pool(s.nodes.size());
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, std::min(max_size, pool.size()))(rng);
    Assignment a;
    for (std::size_t i = 0; i < pool.size() && a.size() < k; ++i) {
        const auto& d = s.nodes[pool[i]];
        if (d.id == exclude) continue;
        a[d.id] = d.states[std::uniform_int_distribution<std::size_t>(0, d.states.size() - 1)(rng)];
    }
    return a;
}

}  // namespace oracle
