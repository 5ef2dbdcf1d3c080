#pragma once
// Exact posterior marginals by variable elimination.

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/factor.hpp"
#include "ftm/network.hpp"

namespace ftm {

namespace detail {

struct EliminationState {
    std::vector<Factor> factors;
    std::vector<std::string> hidden;  // variables still to eliminate
};

inline EliminationState reduced_factors(const Network& net, const std::vector<std::size_t>& ev,
                                        const std::string& query) {
    EliminationState st;
    for (std::size_t i = 0; i < net.size(); ++i) {
        Factor f = cpt_factor(net, i);
        for (std::size_t k = 0; k < net.size(); ++k)
            if (ev[k] != kUnassigned && f.position(net.nodes()[k].id) >= 0)
                f = factor_reduce(f, net.nodes()[k].id, ev[k]);
        st.factors.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < net.size(); ++i)
        if (ev[i] == kUnassigned && net.nodes()[i].id != query) st.hidden.push_back(net.nodes()[i].id);
    return st;
}

inline void eliminate(std::vector<Factor>& factors, const std::string& var) {
    Factor prod = Factor::scalar(1.0);
    std::vector<Factor> rest;
    for (auto& f : factors) {
        if (f.position(var) >= 0)
            prod = factor_product(prod, f);
        else
            rest.push_back(std::move(f));
    }
    rest.push_back(factor_sum_out(prod, var));
    factors = std::move(rest);
}

// Number of distinct neighbours of `var` in the interaction graph.
inline std::size_t degree(const std::vector<Factor>& factors, const std::string& var) {
    std::set<std::string> nb;
    for (const auto& f : factors)
        if (f.position(var) >= 0)
            for (const auto& v : f.scope)
                if (v != var) nb.insert(v);
    return nb.size();
}

inline Distribution finish(const Network& net, std::vector<Factor>& factors, const std::string& query) {
    Factor prod = Factor::scalar(1.0);
    for (const auto& f : factors) prod = factor_product(prod, f);
    const auto& nd = net.node(query);
    Distribution d{query, nd.states, std::vector<double>(nd.states.size(), 0.0)};
    double z = 0.0;
    for (double w : prod.table) z += w;
    if (!(z > 0.0)) fail(ErrorKind::ImpossibleEvidence, "evidence has probability zero");
    for (std::size_t s = 0; s < d.p.size(); ++s) d.p[s] = prod.table[s] / z;
    return d;
}

inline std::vector<std::size_t> checked_evidence(const Network& net, const Assignment& evidence,
                                                 const std::string& query) {
    net.index_of(query);
    return to_state_indices(net, evidence);
}

}  // namespace detail

// Min-degree elimination order for the hidden variables of a query, ties
// broken by declaration order. Degrees are recomputed after each step.
inline std::vector<std::string> elimination_order(const Network& net, const Assignment& evidence,
                                                  const std::string& query) {
    auto ev = detail::checked_evidence(net, evidence, query);
    auto st = detail::reduced_factors(net, ev, query);
    std::vector<std::string> order;
    auto hidden = st.hidden;
    while (!hidden.empty()) {
        std::size_t best = 0, best_deg = detail::degree(st.factors, hidden[0]);
        for (std::size_t k = 1; k < hidden.size(); ++k) {
            auto d = detail::degree(st.factors, hidden[k]);
            if (d < best_deg) {
                best = k;
                best_deg = d;
            }
        }
        detail::eliminate(st.factors, hidden[best]);
        order.push_back(hidden[best]);
        hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return order;
}

// Posterior of `query` given `evidence`, eliminating hidden variables in the
// given order (which must be a permutation of them).
inline Distribution posterior(const Network& net, const Assignment& evidence, const std::string& query,
                              std::span<const std::string> order) {
    auto ev = detail::checked_evidence(net, evidence, query);
    auto st = detail::reduced_factors(net, ev, query);
    std::vector<std::string> sorted_order(order.begin(), order.end());
    std::sort(sorted_order.begin(), sorted_order.end());
    auto hidden = st.hidden;
    std::sort(hidden.begin(), hidden.end());
    if (sorted_order != hidden)
        fail(ErrorKind::InvalidArgument, "elimination order must list each hidden variable exactly once");

    for (const auto& v : order) detail::eliminate(st.factors, v);

    auto qi = net.index_of(query);
    if (ev[qi] != kUnassigned) {
        double pe = 1.0;
        for (const auto& f : st.factors) pe *= f.table.at(0);
        if (!(pe > 0.0)) fail(ErrorKind::ImpossibleEvidence, "evidence has probability zero");
        Distribution d{query, net.nodes()[qi].states, std::vector<double>(net.cardinality(qi), 0.0)};
        d.p[ev[qi]] = 1.0;
        return d;
    }
    return detail::finish(net, st.factors, query);
}

inline Distribution posterior(const Network& net, const Assignment& evidence, const std::string& query) {
    auto order = elimination_order(net, evidence, query);
    return posterior(net, evidence, query, order);
}

inline Distribution marginal(const Network& net, const std::string& query) { return posterior(net, {}, query); }

// P(evidence), by eliminating every unobserved variable.
inline double evidence_probability(const Network& net, const Assignment& evidence) {
    auto ev = to_state_indices(net, evidence);
    std::vector<Factor> factors;
    for (std::size_t i = 0; i < net.size(); ++i) {
        Factor f = cpt_factor(net, i);
        for (std::size_t k = 0; k < net.size(); ++k)
            if (ev[k] != kUnassigned && f.position(net.nodes()[k].id) >= 0)
                f = factor_reduce(f, net.nodes()[k].id, ev[k]);
        factors.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (ev[i] != kUnassigned) continue;
        detail::eliminate(factors, net.nodes()[i].id);
    }
    double p = 1.0;
    for (const auto& f : factors) p *= f.table.at(0);
    return p;
}

}  // namespace ftm
