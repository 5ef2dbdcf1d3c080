#pragma once
// Interventions: graph surgery (set-outcome), root-prior replacement
// (set-prior) and table replacement (set-contingency), applied to a world
// model, a folk theory, or both; plus their evaluation by paired simulation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/folk.hpp"
#include "ftm/network.hpp"
#include "ftm/simulator.hpp"

namespace ftm {

// Graph surgery: removes every in-edge of `node` and fixes it at `outcome`.
// Does not check intervenability.
inline Network do_intervene(const Network& net, const std::string& node, const std::string& outcome) {
    const auto i = net.index_of(node);
    const auto s = net.state_of(node, outcome);
    auto spec = net.to_spec();
    std::erase_if(spec.edges, [&](const Edge& e) { return !e.excluded && e.to == node; });
    Cpt& c = spec.cpts[i];
    c.parents.clear();
    std::vector<double> row(net.cardinality(i), 0.0);
    row[s] = 1.0;
    c.rows = {row};
    return build_network(spec);
}

inline Network set_prior(const Network& net, const std::string& node, const Distribution& prior) {
    const auto i = net.index_of(node);
    if (!net.parents(i).empty()) fail(ErrorKind::NotRoot, node + " has parents; edit its table instead");
    if (prior.p.size() != net.cardinality(i))
        fail(ErrorKind::CptShapeMismatch, "prior for " + node + " has " + std::to_string(prior.p.size()) +
                                              " entries, expected " + std::to_string(net.cardinality(i)));
    if (!prior.states.empty() && prior.states != net.nodes()[i].states)
        fail(ErrorKind::UnknownState, "prior states do not match the states of " + node);
    double sum = 0.0;
    for (double p : prior.p) {
        if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::BadProbability, "prior entry outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance)
        throw ModelError({Finding{ErrorKind::NotNormalized, node, "prior sums to " + detail::fmt_double(sum), sum}});
    auto spec = net.to_spec();
    spec.cpts[i].rows = {prior.p};
    return build_network(spec);
}

// Replaces one table. The parent set must stay the same; only strengths change.
inline Network set_contingency(const Network& net, const std::string& node, const Cpt& table) {
    const auto i = net.index_of(node);
    if (table.child != node) fail(ErrorKind::InvalidArgument, "table is for " + table.child + ", not " + node);
    const auto& cur = net.cpts()[i].parents;
    std::set<std::string> want(cur.begin(), cur.end()), got(table.parents.begin(), table.parents.end());
    if (want != got || got.size() != table.parents.size())
        fail(ErrorKind::ParentSetMismatch,
             "table parents [" + detail::join(table.parents) + "] differ from [" + detail::join(cur) + "]");
    auto spec = net.to_spec();
    spec.cpts[i] = table;
    return build_network(spec);
}

enum class InterventionKind { SetOutcome, SetPrior, SetContingency };
enum class AppliesTo { World, Folk, Both };

inline std::string_view to_string(InterventionKind k) {
    switch (k) {
    case InterventionKind::SetOutcome: return "set-outcome";
    case InterventionKind::SetPrior: return "set-prior";
    case InterventionKind::SetContingency: return "set-contingency";
    }
    return "?";
}

inline std::string_view to_string(AppliesTo a) {
    switch (a) {
    case AppliesTo::World: return "world";
    case AppliesTo::Folk: return "folk";
    case AppliesTo::Both: return "both";
    }
    return "?";
}

struct Intervention {
    std::string name;  // free-form description
    InterventionKind kind = InterventionKind::SetOutcome;
    std::string target;
    std::variant<std::string, Distribution, Cpt> payload;
    AppliesTo applies_to = AppliesTo::Folk;

    static Intervention outcome(std::string target, std::string state, AppliesTo to) {
        return {{}, InterventionKind::SetOutcome, target, std::move(state), to};
    }
    static Intervention prior(std::string target, std::vector<double> p, AppliesTo to) {
        return {{}, InterventionKind::SetPrior, target, Distribution{target, {}, std::move(p)}, to};
    }
    static Intervention contingency(Cpt table, AppliesTo to) {
        auto target = table.child;
        return {{}, InterventionKind::SetContingency, target, std::move(table), to};
    }

    std::string describe() const {
        if (!name.empty()) return name;
        std::string out = std::string(to_string(kind)) + " " + target;
        if (kind == InterventionKind::SetOutcome) out += "=" + std::get<std::string>(payload);
        if (kind == InterventionKind::SetPrior) {
            std::vector<std::string> ps;
            for (double p : std::get<Distribution>(payload).p) ps.push_back(detail::fmt_double(p));
            out += "=(" + detail::join(ps, ",") + ")";
        }
        return out + " on " + std::string(to_string(applies_to));
    }
};

// Applies an intervention to a network whose node annotations decide
// intervenability.
inline Network apply_intervention(const Network& net, const Intervention& iv) {
    const auto& nd = net.node(iv.target);
    if (!nd.intervenable) fail(ErrorKind::NotIntervenable, iv.target + " cannot be intervened upon");
    switch (iv.kind) {
    case InterventionKind::SetOutcome: {
        auto* s = std::get_if<std::string>(&iv.payload);
        if (!s) fail(ErrorKind::InvalidArgument, "set-outcome needs a state payload");
        return do_intervene(net, iv.target, *s);
    }
    case InterventionKind::SetPrior: {
        auto* d = std::get_if<Distribution>(&iv.payload);
        if (!d) fail(ErrorKind::InvalidArgument, "set-prior needs a distribution payload");
        return set_prior(net, iv.target, *d);
    }
    case InterventionKind::SetContingency: {
        auto* c = std::get_if<Cpt>(&iv.payload);
        if (!c) fail(ErrorKind::InvalidArgument, "set-contingency needs a table payload");
        return set_contingency(net, iv.target, *c);
    }
    }
    fail(ErrorKind::InvalidArgument, "unknown intervention kind");
}

inline FolkTheory apply_intervention(const FolkTheory& folk, const Intervention& iv) {
    FolkTheory out = folk;
    out.network = apply_intervention(folk.network, iv);
    return out;
}

inline WorldModel apply_intervention(const WorldModel& world, const Intervention& iv) {
    WorldModel out = world;
    out.network = apply_intervention(world.network, iv);
    return out;
}

struct SimulationSettings {
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
    double threshold = 0.5;
    unsigned workers = 1;
};

struct StatDeltas {
    double false_suspicion_rate = 0.0;
    double true_suspicion_rate = 0.0;
    double suspicion_rate = 0.0;
};

struct InterventionReport {
    std::string description;
    Intervention intervention;
    SuspicionStats baseline;
    SuspicionStats post;
    StatDeltas deltas;
    SimulationSettings settings;
};

namespace detail {

inline double rate_or_zero(const std::optional<double>& r) { return r.value_or(0.0); }

inline InterventionReport report_against(const WorldModel& world, const FolkTheory& folk, const Intervention& iv,
                                         const SuspicionStats& baseline, const SimulationSettings& s) {
    WorldModel w = world;
    FolkTheory f = folk;
    if (iv.applies_to != AppliesTo::Folk) w = apply_intervention(world, iv);
    if (iv.applies_to != AppliesTo::World) f = apply_intervention(folk, iv);
    InterventionReport r{iv.describe(), iv, baseline, {}, {}, s};
    r.post = simulate_population(w, f, s.n, s.threshold, s.seed, {s.workers});
    r.deltas.false_suspicion_rate =
        rate_or_zero(r.post.false_suspicion_rate()) - rate_or_zero(baseline.false_suspicion_rate());
    r.deltas.true_suspicion_rate =
        rate_or_zero(r.post.true_suspicion_rate()) - rate_or_zero(baseline.true_suspicion_rate());
    r.deltas.suspicion_rate = rate_or_zero(r.post.suspicion_rate()) - rate_or_zero(baseline.suspicion_rate());
    return r;
}

}  // namespace detail

// Baseline and post-intervention populations share (n, seed), so episode e
// sees the same random draws in both runs.
inline InterventionReport evaluate_intervention(const WorldModel& world, const FolkTheory& folk,
                                                const Intervention& iv, const SimulationSettings& s) {
    check_threshold(s.threshold);
    auto baseline = simulate_population(world, folk, s.n, s.threshold, s.seed, {s.workers});
    return detail::report_against(world, folk, iv, baseline, s);
}

// One report per candidate against a shared baseline, ordered by
// post-intervention false-suspicion rate (stable for ties).
inline std::vector<InterventionReport> sweep_interventions(const WorldModel& world, const FolkTheory& folk,
                                                           const std::vector<Intervention>& ivs,
                                                           const SimulationSettings& s) {
    check_threshold(s.threshold);
    std::vector<InterventionReport> out;
    if (ivs.empty()) return out;
    auto baseline = simulate_population(world, folk, s.n, s.threshold, s.seed, {s.workers});
    for (const auto& iv : ivs) out.push_back(detail::report_against(world, folk, iv, baseline, s));
    std::stable_sort(out.begin(), out.end(), [](const InterventionReport& a, const InterventionReport& b) {
        return detail::rate_or_zero(a.post.false_suspicion_rate()) <
               detail::rate_or_zero(b.post.false_suspicion_rate());
    });
    return out;
}

}  // namespace ftm
