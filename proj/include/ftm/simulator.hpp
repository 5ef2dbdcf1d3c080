#pragma once
// Ground-truth world model, seeded episode generation, and population
// suspicion statistics.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/folk.hpp"
#include "ftm/network.hpp"
#include "ftm/philox.hpp"

namespace ftm {

struct WorldModel {
    Network network;
    std::set<std::string> observable;
    std::string truth_node = kDefaultSuspicionNode;
    std::string truth_state = kDefaultSuspicionState;
};

inline WorldModel make_world_model(Network net) {
    WorldModel w{std::move(net), {}};
    for (const auto& nd : w.network.nodes())
        if (nd.visibility == Visibility::Observable) w.observable.insert(nd.id);
    auto target = detail::suspicion_of(w.network);
    w.truth_node = target.node;
    w.truth_state = target.state;
    w.network.state_of(w.truth_node, w.truth_state);
    return w;
}

struct Episode {
    Assignment ground_truth;
    Assignment observations;
    std::uint64_t index = 0;
    std::uint32_t stream = 0;

    bool operator==(const Episode&) const = default;
};

inline constexpr std::uint32_t kEpisodeStream = 0;

// Ancestral sampling in topological order. Each node consumes one uniform;
// zero-probability states are never chosen.
inline void sample_states(const Network& net, UniformStream& rng, std::vector<std::size_t>& states) {
    states.assign(net.size(), 0);
    for (auto i : net.topo_order()) {
        const auto& row = net.cpts()[i].rows[net.row_index(i, states)];
        const double u = rng.next();
        double cum = 0.0;
        std::size_t pick = row.size();
        std::size_t last_positive = 0;
        for (std::size_t s = 0; s < row.size(); ++s) {
            if (row[s] > 0.0) last_positive = s;
            cum += row[s];
            if (u < cum && row[s] > 0.0) {
                pick = s;
                break;
            }
        }
        states[i] = pick == row.size() ? last_positive : pick;
    }
}

inline Episode sample_episode(const WorldModel& world, std::uint64_t seed, std::uint64_t index,
                              std::uint32_t stream = kEpisodeStream) {
    UniformStream rng(seed, index, stream);
    std::vector<std::size_t> states;
    sample_states(world.network, rng, states);
    Episode ep;
    ep.index = index;
    ep.stream = stream;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& nd = world.network.nodes()[i];
        ep.ground_truth[nd.id] = nd.states[states[i]];
        if (world.observable.count(nd.id)) ep.observations[nd.id] = nd.states[states[i]];
    }
    return ep;
}

struct SuspicionStats {
    std::uint64_t n = 0;
    std::uint64_t suspicious = 0;
    std::uint64_t true_suspicions = 0;
    std::uint64_t false_suspicions = 0;
    std::map<std::string, std::uint64_t> attributions;  // basis cue -> suspicious episodes
    std::uint64_t unattributed = 0;                     // suspicious with no basis cue
    std::uint64_t seed = 0;
    double threshold = 0.5;

    static std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    }
    std::optional<double> suspicion_rate() const { return ratio(suspicious, n); }
    std::optional<double> true_suspicion_rate() const { return ratio(true_suspicions, n); }
    std::optional<double> false_suspicion_rate() const { return ratio(false_suspicions, n); }
    std::optional<double> false_share_among_suspicious() const { return ratio(false_suspicions, suspicious); }
    std::optional<double> true_share_among_suspicious() const { return ratio(true_suspicions, suspicious); }

    bool operator==(const SuspicionStats&) const = default;
};

struct SimulationOptions {
    unsigned workers = 1;
};

namespace detail {

// Maps each folk-observable node to its index in the world network.
inline std::vector<std::size_t> observation_map(const WorldModel& world, const FolkTheory& folk) {
    std::vector<std::size_t> out;
    for (const auto& nd : folk.network.nodes()) {
        if (!folk.observable.count(nd.id)) continue;
        auto wi = world.network.find(nd.id);
        if (!wi || !world.observable.count(nd.id))
            fail(ErrorKind::ObservableMismatch, "folk cue " + nd.id + " is not observable in the world model");
        if (world.network.nodes()[*wi].states != nd.states)
            fail(ErrorKind::ObservableMismatch, "node " + nd.id + " has different states in the two models");
        out.push_back(*wi);
    }
    return out;
}

struct Verdict {
    bool suspicious = false;
    std::optional<std::string> basis;
};

class VerdictCache {
public:
    VerdictCache(const WorldModel& world, const FolkTheory& folk, std::vector<std::size_t> obs_nodes,
                 double threshold)
        : world_(world), folk_(folk), obs_(std::move(obs_nodes)), threshold_(threshold) {}

    const Verdict& get(const std::vector<std::size_t>& states) {
        std::uint64_t code = 0;
        for (auto wi : obs_) code = code * world_.network.cardinality(wi) + states[wi];
        auto it = cache_.find(code);
        if (it != cache_.end()) return it->second;
        Assignment obs;
        for (auto wi : obs_) {
            const auto& nd = world_.network.nodes()[wi];
            obs[nd.id] = nd.states[states[wi]];
        }
        Verdict v;
        v.suspicious = suspicion_probability(folk_, obs) >= threshold_;
        if (v.suspicious) v.basis = attribute_basis(folk_, obs);
        return cache_.emplace(code, std::move(v)).first->second;
    }

private:
    const WorldModel& world_;
    const FolkTheory& folk_;
    std::vector<std::size_t> obs_;
    double threshold_;
    std::unordered_map<std::uint64_t, Verdict> cache_;
};

inline void tally_range(const WorldModel& world, const FolkTheory& folk, const std::vector<std::size_t>& obs,
                        double threshold, std::uint64_t seed, std::uint64_t begin, std::uint64_t end,
                        SuspicionStats& out) {
    VerdictCache cache(world, folk, obs, threshold);
    const auto truth = world.network.index_of(world.truth_node);
    const auto truth_state = world.network.state_of(world.truth_node, world.truth_state);
    std::vector<std::size_t> states;
    for (std::uint64_t e = begin; e < end; ++e) {
        UniformStream rng(seed, e, kEpisodeStream);
        sample_states(world.network, rng, states);
        const auto& v = cache.get(states);
        if (!v.suspicious) continue;
        ++out.suspicious;
        if (states[truth] == truth_state)
            ++out.true_suspicions;
        else
            ++out.false_suspicions;
        if (v.basis)
            ++out.attributions[*v.basis];
        else
            ++out.unattributed;
    }
}

}  // namespace detail

// Scores n seeded episodes against the folk theory and tallies suspicions
// against ground truth. Episode e always draws from stream (seed, e), and
// tallies are integer sums, so results do not depend on the worker count.
inline SuspicionStats simulate_population(const WorldModel& world, const FolkTheory& folk, std::uint64_t n,
                                          double threshold, std::uint64_t seed, SimulationOptions opts = {}) {
    check_threshold(threshold);
    auto obs = detail::observation_map(world, folk);

    SuspicionStats total;
    total.n = n;
    total.seed = seed;
    total.threshold = threshold;

    const unsigned workers = std::max(1u, opts.workers);
    if (workers == 1 || n < 2 * workers) {
        detail::tally_range(world, folk, obs, threshold, seed, 0, n, total);
        return total;
    }

    std::vector<SuspicionStats> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = n * w / workers, end = n * (w + 1) / workers;
        threads.emplace_back([&, w, begin, end] {
            try {
                detail::tally_range(world, folk, obs, threshold, seed, begin, end, parts[w]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (const auto& p : parts) {
        total.suspicious += p.suspicious;
        total.true_suspicions += p.true_suspicions;
        total.false_suspicions += p.false_suspicions;
        total.unattributed += p.unattributed;
        for (const auto& [k, c] : p.attributions) total.attributions[k] += c;
    }
    return total;
}

}  // namespace ftm
