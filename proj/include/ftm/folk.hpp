#pragma once
// A user's folk theory: a network annotated with what the user can observe,
// what the platform can intervene on, and which node the user's suspicion
// is about.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/inference.hpp"
#include "ftm/network.hpp"

namespace ftm {

inline constexpr const char* kDefaultSuspicionNode = "N4";
inline constexpr const char* kDefaultSuspicionState = "true";

struct FolkTheory {
    Network network;
    std::set<std::string> observable;
    std::set<std::string> intervenable;
    std::string suspicion_node = kDefaultSuspicionNode;
    std::string suspicion_state = kDefaultSuspicionState;
};

namespace detail {

inline SuspicionTarget suspicion_of(const Network& net) {
    if (net.suspicion()) return *net.suspicion();
    return {kDefaultSuspicionNode, kDefaultSuspicionState};
}

}  // namespace detail

// Reads observability and intervenability from the node definitions and the
// suspicion target from the network annotation (N4 = "true" when absent).
inline FolkTheory make_folk_theory(Network net) {
    FolkTheory ft{std::move(net), {}, {}};
    for (const auto& nd : ft.network.nodes()) {
        if (nd.visibility == Visibility::Observable) ft.observable.insert(nd.id);
        if (nd.intervenable) ft.intervenable.insert(nd.id);
    }
    auto target = detail::suspicion_of(ft.network);
    ft.suspicion_node = target.node;
    ft.suspicion_state = target.state;
    const auto& nd = ft.network.node(ft.suspicion_node);  // UnknownNode if absent
    if (nd.visibility != Visibility::Latent || ft.observable.count(ft.suspicion_node))
        fail(ErrorKind::NotLatent, "suspicion node " + ft.suspicion_node + " must be latent");
    ft.network.state_of(ft.suspicion_node, ft.suspicion_state);
    return ft;
}

inline void check_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        fail(ErrorKind::InvalidThreshold, "threshold " + detail::fmt_double(threshold) + " is outside [0,1]");
}

inline double suspicion_probability(const FolkTheory& folk, const Assignment& obs) {
    for (const auto& [id, state] : obs)
        if (!folk.observable.count(id))
            fail(ErrorKind::NonObservableEvidence, "node " + id + " is not observable by the user");
    return posterior(folk.network, obs, folk.suspicion_node).at(folk.suspicion_state);
}

inline bool suspects(const FolkTheory& folk, const Assignment& obs, double threshold) {
    check_threshold(threshold);
    return suspicion_probability(folk, obs) >= threshold;
}

// The observed cue whose single counterfactual flip lowers suspicion the
// most. For a multi-state cue the flip goes to whichever other state lowers
// suspicion most, skipping states the theory deems impossible. Cues whose
// flip does not lower suspicion are not candidates; ties go to the earlier
// declared node.
inline std::optional<std::string> attribute_basis(const FolkTheory& folk, const Assignment& obs) {
    const double base = suspicion_probability(folk, obs);
    std::optional<std::string> best;
    double best_drop = 0.0;
    for (const auto& nd : folk.network.nodes()) {
        auto it = obs.find(nd.id);
        if (it == obs.end()) continue;
        double lowest = base;
        for (const auto& alt : nd.states) {
            if (alt == it->second) continue;
            Assignment flipped = obs;
            flipped[nd.id] = alt;
            try {
                lowest = std::min(lowest, suspicion_probability(folk, flipped));
            } catch (const ModelError& e) {
                if (e.kind() != ErrorKind::ImpossibleEvidence) throw;  // unreachable counterfactual
            }
        }
        double drop = base - lowest;
        if (drop > best_drop) {
            best_drop = drop;
            best = nd.id;
        }
    }
    return best;
}

}  // namespace ftm
