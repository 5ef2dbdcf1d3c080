#pragma once
// JSON wire formats shared by the CLI's machine output, the HTTP service,
// intervention catalogs, calibration settings and run records. Field names
// are documented in docs/wire-format.md.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ftm/calibrate.hpp"
#include "ftm/dsl.hpp"
#include "ftm/error.hpp"
#include "ftm/hash.hpp"
#include "ftm/intervention.hpp"
#include "ftm/network.hpp"
#include "ftm/simulator.hpp"

namespace ftm::io {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::InvalidArgument, std::string("missing field '") + key + "'");
    return j.at(key);
}

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return require(j, key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidArgument, std::string("field '") + key + "': " + e.what());
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get_as<T>(j, key);
}

inline void put_rate(json& j, const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
}

}  // namespace detail

inline json to_json(const Distribution& d) {
    json probs = json::object();
    for (std::size_t i = 0; i < d.states.size(); ++i) probs[d.states[i]] = d.p[i];
    return {{"node", d.node}, {"states", d.states}, {"p", d.p}, {"probabilities", probs}};
}

inline json to_json(const SuspicionStats& s) {
    json j{{"n", s.n},
           {"suspicious", s.suspicious},
           {"true_suspicions", s.true_suspicions},
           {"false_suspicions", s.false_suspicions},
           {"attributions", s.attributions},
           {"unattributed", s.unattributed},
           {"seed", s.seed},
           {"threshold", s.threshold}};
    json rates = json::object();
    detail::put_rate(rates, "suspicion_rate", s.suspicion_rate());
    detail::put_rate(rates, "true_suspicion_rate", s.true_suspicion_rate());
    detail::put_rate(rates, "false_suspicion_rate", s.false_suspicion_rate());
    detail::put_rate(rates, "false_share_among_suspicious", s.false_share_among_suspicious());
    detail::put_rate(rates, "true_share_among_suspicious", s.true_share_among_suspicious());
    j["rates"] = rates;
    return j;
}

inline json to_json(const Cpt& c) { return {{"child", c.child}, {"parents", c.parents}, {"rows", c.rows}}; }

inline Cpt cpt_from_json(const json& j, const std::string& child) {
    Cpt c;
    c.child = detail::get_or<std::string>(j, "child", child);
    c.parents = detail::get_or<std::vector<std::string>>(j, "parents", {});
    c.rows = detail::get_as<std::vector<std::vector<double>>>(j, "rows");
    return c;
}

inline AppliesTo applies_to_from_string(const std::string& s) {
    if (s == "world") return AppliesTo::World;
    if (s == "folk") return AppliesTo::Folk;
    if (s == "both") return AppliesTo::Both;
    fail(ErrorKind::InvalidArgument, "applies_to must be world, folk or both, not '" + s + "'");
}

inline json to_json(const Intervention& iv) {
    json j{{"kind", std::string(to_string(iv.kind))},
           {"target", iv.target},
           {"applies_to", std::string(to_string(iv.applies_to))}};
    if (!iv.name.empty()) j["name"] = iv.name;
    switch (iv.kind) {
    case InterventionKind::SetOutcome: j["outcome"] = std::get<std::string>(iv.payload); break;
    case InterventionKind::SetPrior: j["prior"] = std::get<Distribution>(iv.payload).p; break;
    case InterventionKind::SetContingency: j["cpt"] = to_json(std::get<Cpt>(iv.payload)); break;
    }
    return j;
}

// `default_applies_to` is used when the document has no applies_to field.
inline Intervention intervention_from_json(const json& j, AppliesTo default_applies_to = AppliesTo::Folk) {
    Intervention iv;
    iv.name = detail::get_or<std::string>(j, "name", "");
    iv.target = detail::get_as<std::string>(j, "target");
    if (j.contains("applies_to")) iv.applies_to = applies_to_from_string(detail::get_as<std::string>(j, "applies_to"));
    else iv.applies_to = default_applies_to;
    const auto kind = detail::get_as<std::string>(j, "kind");
    if (kind == "set-outcome" || kind == "do") {
        iv.kind = InterventionKind::SetOutcome;
        iv.payload = detail::get_as<std::string>(j, "outcome");
    } else if (kind == "set-prior") {
        iv.kind = InterventionKind::SetPrior;
        iv.payload = Distribution{iv.target, {}, detail::get_as<std::vector<double>>(j, "prior")};
    } else if (kind == "set-contingency") {
        iv.kind = InterventionKind::SetContingency;
        iv.payload = cpt_from_json(detail::require(j, "cpt"), iv.target);
    } else {
        fail(ErrorKind::InvalidArgument, "unknown intervention kind '" + kind + "'");
    }
    return iv;
}

inline std::vector<Intervention> catalog_from_json(const json& j) {
    const json& list = j.is_object() ? detail::require(j, "interventions") : j;
    if (!list.is_array()) fail(ErrorKind::InvalidArgument, "intervention catalog must be an array");
    std::vector<Intervention> out;
    for (const auto& item : list) out.push_back(intervention_from_json(item));
    return out;
}

inline json to_json(const SimulationSettings& s) {
    return {{"n", s.n}, {"seed", s.seed}, {"threshold", s.threshold}};
}

inline json to_json(const InterventionReport& r) {
    return {{"description", r.description},
            {"intervention", to_json(r.intervention)},
            {"baseline", to_json(r.baseline)},
            {"post", to_json(r.post)},
            {"deltas",
             {{"false_suspicion_rate", r.deltas.false_suspicion_rate},
              {"true_suspicion_rate", r.deltas.true_suspicion_rate},
              {"suspicion_rate", r.deltas.suspicion_rate}}},
            {"settings", to_json(r.settings)}};
}

inline json model_document(const Network& net) {
    json nodes = json::array(), edges = json::array(), cpts = json::array();
    for (const auto& nd : net.nodes())
        nodes.push_back({{"id", nd.id},
                         {"label", nd.label},
                         {"states", nd.states},
                         {"visibility", nd.visibility == Visibility::Observable ? "observable" : "latent"},
                         {"intervenable", nd.intervenable}});
    auto spec = canonicalize(net.to_spec());
    for (const auto& e : spec.edges)
        edges.push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}, {"excluded", e.excluded}});
    for (const auto& c : spec.cpts) cpts.push_back(to_json(c));
    json doc{{"name", net.name()}, {"nodes", nodes}, {"edges", edges}, {"cpts", cpts}};
    if (net.suspicion())
        doc["suspicion"] = {{"node", net.suspicion()->node}, {"state", net.suspicion()->state}};
    const auto text = serialize_model(spec);
    doc["text"] = text;
    doc["sha256"] = sha256_hex(text);
    return doc;
}

inline json model_ref(const Network& net) {
    return {{"name", net.name()}, {"sha256", sha256_hex(serialize_model(net))}};
}

// Settings, stats and content hashes of both models: enough to audit and
// reproduce a simulation run.
inline json run_record(const WorldModel& world, const FolkTheory& folk, const SimulationSettings& s,
                       const SuspicionStats& stats) {
    return {{"record", "simulation-run"},
            {"format_version", 1},
            {"rng", "philox4x32-10; key=seed; counter=(block, episode_lo, episode_hi, stream=0)"},
            {"settings", to_json(s)},
            {"models", {{"world", model_ref(world.network)}, {"folk", model_ref(folk.network)}}},
            {"stats", to_json(stats)}};
}

inline ModelSide side_from_string(const std::string& s) {
    if (s == "folk") return ModelSide::Folk;
    if (s == "world") return ModelSide::World;
    fail(ErrorKind::InvalidArgument, "side must be folk or world, not '" + s + "'");
}

inline ParamKind kind_from_string(const std::string& s) {
    if (s == "prior") return ParamKind::Prior;
    if (s == "leak") return ParamKind::Leak;
    if (s == "weight") return ParamKind::Weight;
    fail(ErrorKind::InvalidArgument, "parameter kind must be prior, leak or weight, not '" + s + "'");
}

inline CalibrationSettings calibration_settings_from_json(const json& j) {
    CalibrationSettings s;
    s.grid_points = detail::get_or<std::size_t>(j, "grid_points", s.grid_points);
    s.iterations = detail::get_or<std::size_t>(j, "iterations", s.iterations);
    s.min_span = detail::get_or<double>(j, "min_span", s.min_span);
    s.decimals = detail::get_or<int>(j, "decimals", s.decimals);
    s.population_weight = detail::get_or<double>(j, "population_weight", s.population_weight);
    s.attribution_weight = detail::get_or<double>(j, "attribution_weight", s.attribution_weight);
    s.sim.n = detail::get_or<std::uint64_t>(j, "n", s.sim.n);
    s.sim.seed = detail::get_or<std::uint64_t>(j, "seed", s.sim.seed);
    s.sim.threshold = detail::get_or<double>(j, "threshold", s.sim.threshold);
    for (const auto& p : detail::require(j, "params")) {
        FreeParameter fp;
        fp.side = side_from_string(detail::get_as<std::string>(p, "side"));
        fp.node = detail::get_as<std::string>(p, "node");
        fp.kind = kind_from_string(detail::get_as<std::string>(p, "kind"));
        fp.parent = detail::get_or<std::string>(p, "parent", "");
        fp.lo = detail::get_or<double>(p, "lo", 0.0);
        fp.hi = detail::get_or<double>(p, "hi", 1.0);
        if (!(fp.lo >= 0.0 && fp.lo <= fp.hi && fp.hi <= 1.0))
            fail(ErrorKind::InvalidArgument, fp.name() + ": bounds must satisfy 0 <= lo <= hi <= 1");
        s.params.push_back(fp);
    }
    return s;
}

inline json to_json(const CalibrationResult& r) {
    return {{"loss_trace", r.loss_trace},
            {"accepted_steps", r.accepted_steps},
            {"loss", r.final.loss},
            {"residuals", r.final.residuals},
            {"parameters", r.parameters},
            {"stats", to_json(r.final_stats)},
            {"settings",
             {{"grid_points", r.settings.grid_points},
              {"iterations", r.settings.iterations},
              {"min_span", r.settings.min_span},
              {"n", r.settings.sim.n},
              {"seed", r.settings.sim.seed},
              {"threshold", r.settings.sim.threshold}}},
            {"models", {{"world", model_ref(r.world.network)}, {"folk", model_ref(r.folk.network)}}}};
}

inline json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::SyntaxError, std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace ftm::io
