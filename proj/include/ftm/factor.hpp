#pragma once
// Table factors over discrete variables: the product / sum-out / reduce
// algebra used by variable elimination.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/network.hpp"

namespace ftm {

// Non-negative weights over the joint states of `scope`. The table is
// row-major with the first scope variable most significant.
struct Factor {
    std::vector<std::string> scope;
    std::vector<std::size_t> cards;
    std::vector<double> table;

    static Factor scalar(double w) { return Factor{{}, {}, {w}}; }

    std::size_t size() const { return table.size(); }

    std::ptrdiff_t position(const std::string& var) const {
        auto it = std::find(scope.begin(), scope.end(), var);
        return it == scope.end() ? -1 : it - scope.begin();
    }

    // Flat index of a joint state given per-scope-variable indices.
    std::size_t offset(const std::vector<std::size_t>& idx) const {
        std::size_t o = 0;
        for (std::size_t k = 0; k < cards.size(); ++k) o = o * cards[k] + idx[k];
        return o;
    }

    double at(const std::vector<std::size_t>& idx) const { return table[offset(idx)]; }
};

namespace detail {

// Odometer over a mixed-radix index vector; returns false after the last one.
inline bool advance(std::vector<std::size_t>& idx, const std::vector<std::size_t>& cards) {
    for (std::size_t k = cards.size(); k-- > 0;) {
        if (++idx[k] < cards[k]) return true;
        idx[k] = 0;
    }
    return false;
}

inline std::vector<std::size_t> strides_in(const Factor& f, const std::vector<std::string>& scope) {
    // stride of each variable of `scope` inside f (0 when absent)
    std::vector<std::size_t> own(f.scope.size());
    std::size_t s = 1;
    for (std::size_t k = f.scope.size(); k-- > 0;) {
        own[k] = s;
        s *= f.cards[k];
    }
    std::vector<std::size_t> out(scope.size(), 0);
    for (std::size_t k = 0; k < scope.size(); ++k) {
        auto p = f.position(scope[k]);
        if (p >= 0) out[k] = own[static_cast<std::size_t>(p)];
    }
    return out;
}

}  // namespace detail

// Factor for node i's table: scope is (parents..., node).
inline Factor cpt_factor(const Network& net, std::size_t i) {
    Factor f;
    for (auto p : net.parents(i)) {
        f.scope.push_back(net.nodes()[p].id);
        f.cards.push_back(net.cardinality(p));
    }
    f.scope.push_back(net.nodes()[i].id);
    f.cards.push_back(net.cardinality(i));
    f.table.reserve(net.cpts()[i].rows.size() * net.cardinality(i));
    for (const auto& row : net.cpts()[i].rows) f.table.insert(f.table.end(), row.begin(), row.end());
    return f;
}

inline Factor factor_product(const Factor& f, const Factor& g) {
    Factor out;
    out.scope = f.scope;
    out.cards = f.cards;
    for (std::size_t k = 0; k < g.scope.size(); ++k) {
        auto p = f.position(g.scope[k]);
        if (p >= 0) {
            if (f.cards[static_cast<std::size_t>(p)] != g.cards[k])
                fail(ErrorKind::CardinalityMismatch,
                     "variable " + g.scope[k] + " has cardinality " + std::to_string(f.cards[p]) +
                         " in one factor and " + std::to_string(g.cards[k]) + " in the other");
            continue;
        }
        out.scope.push_back(g.scope[k]);
        out.cards.push_back(g.cards[k]);
    }
    std::size_t total = 1;
    for (auto c : out.cards) total *= c;
    out.table.assign(total, 0.0);

    auto sf = detail::strides_in(f, out.scope);
    auto sg = detail::strides_in(g, out.scope);
    std::vector<std::size_t> idx(out.scope.size(), 0);
    std::size_t fi = 0, gi = 0;
    for (std::size_t o = 0; o < total; ++o) {
        out.table[o] = f.table[fi] * g.table[gi];
        // odometer step with incremental offsets
        for (std::size_t k = out.cards.size(); k-- > 0;) {
            if (++idx[k] < out.cards[k]) {
                fi += sf[k];
                gi += sg[k];
                break;
            }
            fi -= sf[k] * (out.cards[k] - 1);
            gi -= sg[k] * (out.cards[k] - 1);
            idx[k] = 0;
        }
    }
    return out;
}

inline Factor factor_sum_out(const Factor& f, const std::string& var) {
    auto p = f.position(var);
    if (p < 0) fail(ErrorKind::VarNotInScope, "variable " + var + " is not in the factor's scope");
    const auto pos = static_cast<std::size_t>(p);

    Factor out;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
        if (k == pos) continue;
        out.scope.push_back(f.scope[k]);
        out.cards.push_back(f.cards[k]);
    }
    std::size_t inner = 1;
    for (std::size_t k = pos + 1; k < f.cards.size(); ++k) inner *= f.cards[k];
    const std::size_t card = f.cards[pos];
    const std::size_t outer = f.table.size() / (inner * card);
    out.table.assign(outer * inner, 0.0);
    for (std::size_t a = 0; a < outer; ++a)
        for (std::size_t s = 0; s < card; ++s)
            for (std::size_t b = 0; b < inner; ++b)
                out.table[a * inner + b] += f.table[(a * card + s) * inner + b];
    return out;
}

// Restricts `var` to one state and drops it from the scope.
inline Factor factor_reduce(const Factor& f, const std::string& var, std::size_t state) {
    auto p = f.position(var);
    if (p < 0) fail(ErrorKind::VarNotInScope, "variable " + var + " is not in the factor's scope");
    const auto pos = static_cast<std::size_t>(p);
    if (state >= f.cards[pos]) fail(ErrorKind::UnknownState, "state index out of range for " + var);

    Factor out;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
        if (k == pos) continue;
        out.scope.push_back(f.scope[k]);
        out.cards.push_back(f.cards[k]);
    }
    std::size_t inner = 1;
    for (std::size_t k = pos + 1; k < f.cards.size(); ++k) inner *= f.cards[k];
    const std::size_t card = f.cards[pos];
    const std::size_t outer = f.table.size() / (inner * card);
    out.table.resize(outer * inner);
    for (std::size_t a = 0; a < outer; ++a)
        for (std::size_t b = 0; b < inner; ++b)
            out.table[a * inner + b] = f.table[(a * card + state) * inner + b];
    return out;
}

}  // namespace ftm
