#pragma once
// Noisy-OR tables for binary nodes. The first declared state of every node
// is its "present" state; each present parent independently produces the
// child with its weight, plus a leak. An optional guard parent must be
// present for the child to occur at all.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/network.hpp"

namespace ftm {

// Table entries are rounded to 10 decimals so that stored models stay
// readable; rows still sum to one within 1e-10.
inline double clean_probability(double v) { return std::round(v * 1e10) / 1e10; }

inline std::vector<double> binary_row(double q) {
    const double c = clean_probability(q);
    return {c, clean_probability(1.0 - c)};
}

struct NoisyOr {
    double leak = 0.0;
    std::vector<std::string> causes;  // parents other than the guard, in table order
    std::vector<double> weights;      // parallel to causes
    std::optional<std::string> guard;

    double weight(const std::string& parent) const {
        for (std::size_t k = 0; k < causes.size(); ++k)
            if (causes[k] == parent) return weights[k];
        fail(ErrorKind::UnknownNode, parent + " is not a noisy-OR cause");
    }
};

// Table for `child` with the given parent order; every parent must be binary
// and appear either as a cause or as the guard.
inline Cpt noisy_or_table(const std::string& child, const std::vector<std::string>& parents,
                          const NoisyOr& params) {
    Cpt c{child, parents, {}};
    const std::size_t k = parents.size();
    for (std::size_t r = 0; r < (std::size_t{1} << k); ++r) {
        // bit (k-1-j) of r is parent j's state index; 0 means present
        double absent = 1.0 - params.leak;
        bool guard_off = false;
        for (std::size_t j = 0; j < k; ++j) {
            bool present = ((r >> (k - 1 - j)) & 1u) == 0;
            if (params.guard && parents[j] == *params.guard) {
                if (!present) guard_off = true;
                continue;
            }
            if (present) absent *= 1.0 - params.weight(parents[j]);
        }
        double q = guard_off ? 0.0 : 1.0 - absent;
        c.rows.push_back(binary_row(q));
    }
    return c;
}

inline Cpt prior_table(const std::string& child, double p_present) {
    return Cpt{child, {}, {binary_row(p_present)}};
}

// Recovers noisy-OR parameters from node `id`'s table when the node and its
// parents are binary and the table is noisy-OR up to the stored rounding.
inline std::optional<NoisyOr> extract_noisy_or(const Network& net, const std::string& id) {
    const auto i = net.index_of(id);
    if (net.cardinality(i) != 2) return std::nullopt;
    const auto& cpt = net.cpts()[i];
    const std::size_t k = cpt.parents.size();
    if (k == 0) return std::nullopt;
    for (auto p : net.parents(i))
        if (net.cardinality(p) != 2) return std::nullopt;

    auto p_present = [&](std::size_t r) { return cpt.rows[r][0]; };
    const std::size_t all_off = (std::size_t{1} << k) - 1;

    std::optional<std::size_t> guard_pos;
    for (std::size_t j = 0; j < k && !guard_pos; ++j) {
        const std::size_t bit = std::size_t{1} << (k - 1 - j);
        bool zero_when_off = true, some_positive = false;
        for (std::size_t r = 0; r <= all_off; ++r) {
            if (r & bit) {
                if (p_present(r) != 0.0) zero_when_off = false;
            } else if (p_present(r) > 0.0) {
                some_positive = true;
            }
        }
        if (zero_when_off && some_positive && k > 1) guard_pos = j;
    }

    NoisyOr params;
    std::size_t base = all_off;  // every parent absent
    if (guard_pos) {
        params.guard = cpt.parents[*guard_pos];
        base &= ~(std::size_t{1} << (k - 1 - *guard_pos));
    }
    params.leak = p_present(base);
    for (std::size_t j = 0; j < k; ++j) {
        if (guard_pos && j == *guard_pos) continue;
        const std::size_t r = base & ~(std::size_t{1} << (k - 1 - j));
        double w = params.leak >= 1.0 ? 0.0 : clean_probability(1.0 - (1.0 - p_present(r)) / (1.0 - params.leak));
        params.causes.push_back(cpt.parents[j]);
        params.weights.push_back(w);
    }
    auto rebuilt = noisy_or_table(id, cpt.parents, params);
    for (std::size_t r = 0; r <= all_off; ++r)
        if (std::abs(rebuilt.rows[r][0] - p_present(r)) > 1e-9) return std::nullopt;
    return params;
}

}  // namespace ftm
