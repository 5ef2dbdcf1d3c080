#pragma once
// Fits free parameters of a folk theory and a world model so that simulated
// population statistics match survey targets. Deterministic coordinate
// descent over bounded grids: each sweep scans every parameter on a grid
// around its current value and accepts only strict improvements; a sweep
// with no accepted step halves the grid span.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "ftm/error.hpp"
#include "ftm/folk.hpp"
#include "ftm/intervention.hpp"
#include "ftm/noisy_or.hpp"
#include "ftm/simulator.hpp"
#include "ftm/targets.hpp"

namespace ftm {

enum class ModelSide { Folk, World };
enum class ParamKind { Prior, Leak, Weight };

struct FreeParameter {
    ModelSide side = ModelSide::Folk;
    std::string node;
    ParamKind kind = ParamKind::Prior;
    std::string parent;  // Weight only
    double lo = 0.0;
    double hi = 1.0;

    std::string name() const {
        std::string out = side == ModelSide::Folk ? "folk:" : "world:";
        out += node;
        switch (kind) {
        case ParamKind::Prior: return out + ".prior";
        case ParamKind::Leak: return out + ".leak";
        case ParamKind::Weight: return out + ".weight(" + parent + ")";
        }
        return out;
    }
};

struct CalibrationSettings {
    std::vector<FreeParameter> params;
    std::size_t grid_points = 11;
    std::size_t iterations = 60;  // sweep budget
    double min_span = 1e-3;       // stop once the grid half-width falls below this fraction of the range
    int decimals = 6;             // candidate values are rounded to this many decimals
    double population_weight = 4.0;
    double attribution_weight = 1.0;
    SimulationSettings sim;
};

struct LossBreakdown {
    double loss = 0.0;
    std::map<std::string, double> residuals;  // simulated minus target
};

struct CalibrationResult {
    FolkTheory folk;
    WorldModel world;
    std::vector<double> loss_trace;  // initial loss, then one entry per sweep
    std::size_t accepted_steps = 0;
    LossBreakdown final;
    SuspicionStats final_stats;
    std::map<std::string, double> parameters;  // fitted values by FreeParameter::name()
    CalibrationSettings settings;
};

// Weighted squared residuals of (a) the truly-shadowbanned share among
// suspicious episodes and (b) the normalized attribution shares of mapped
// cues. With no suspicious episodes the shares count as zero and a unit
// penalty is added.
inline LossBreakdown calibration_loss(const SuspicionStats& stats, const SurveyTargets& targets,
                                      const CalibrationSettings& settings) {
    LossBreakdown out;
    const double share = stats.true_share_among_suspicious().value_or(0.0);
    const double r_pop = share - targets.shadowbanned_share();
    out.residuals["shadowbanned-share"] = r_pop;
    out.loss += settings.population_weight * r_pop * r_pop;
    if (stats.suspicious == 0) out.loss += 1.0;

    const auto want = targets.normalized_cue_shares();
    std::uint64_t mapped_total = 0;
    for (const auto& [node, t] : want) {
        auto it = stats.attributions.find(node);
        if (it != stats.attributions.end()) mapped_total += it->second;
    }
    for (const auto& [node, t] : want) {
        auto it = stats.attributions.find(node);
        const double got = mapped_total == 0 || it == stats.attributions.end()
                               ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(mapped_total);
        const double r = got - t;
        out.residuals["attribution:" + node] = r;
        out.loss += settings.attribution_weight * r * r;
    }
    return out;
}

inline double get_parameter(const Network& net, const FreeParameter& fp) {
    const auto& cpt = net.cpt(fp.node);
    if (fp.kind == ParamKind::Prior) {
        if (!cpt.parents.empty() || cpt.rows.front().size() != 2)
            fail(ErrorKind::InvalidArgument, fp.name() + ": prior parameters need a binary root");
        return cpt.rows.front()[0];
    }
    auto nor = extract_noisy_or(net, fp.node);
    if (!nor) fail(ErrorKind::InvalidArgument, fp.name() + ": table is not noisy-OR");
    return fp.kind == ParamKind::Leak ? nor->leak : nor->weight(fp.parent);
}

inline Network set_parameter(const Network& net, const FreeParameter& fp, double value) {
    if (!(value >= 0.0 && value <= 1.0)) fail(ErrorKind::BadProbability, fp.name() + " must lie in [0,1]");
    if (fp.kind == ParamKind::Prior) {
        get_parameter(net, fp);
        return set_prior(net, fp.node, Distribution{fp.node, {}, binary_row(value)});
    }
    auto nor = extract_noisy_or(net, fp.node);
    if (!nor) fail(ErrorKind::InvalidArgument, fp.name() + ": table is not noisy-OR");
    if (fp.kind == ParamKind::Leak) {
        nor->leak = value;
    } else {
        auto it = std::find(nor->causes.begin(), nor->causes.end(), fp.parent);
        if (it == nor->causes.end()) fail(ErrorKind::UnknownNode, fp.name() + ": not a noisy-OR cause");
        nor->weights[static_cast<std::size_t>(it - nor->causes.begin())] = value;
    }
    return set_contingency(net, fp.node, noisy_or_table(fp.node, net.cpt(fp.node).parents, *nor));
}

namespace detail {

struct CalibrationPoint {
    FolkTheory folk;
    WorldModel world;
};

inline CalibrationPoint with_parameter(const CalibrationPoint& at, const FreeParameter& fp, double v) {
    CalibrationPoint out = at;
    if (fp.side == ModelSide::Folk)
        out.folk.network = set_parameter(at.folk.network, fp, v);
    else
        out.world.network = set_parameter(at.world.network, fp, v);
    return out;
}

inline double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

}  // namespace detail

inline CalibrationResult calibrate(const FolkTheory& folk, const WorldModel& world, const SurveyTargets& targets,
                                   const CalibrationSettings& settings) {
    if (settings.params.empty()) fail(ErrorKind::NoFreeParameters, "calibration needs at least one free parameter");
    if (settings.grid_points < 2) fail(ErrorKind::InvalidArgument, "grid needs at least two points");
    check_targets(targets, folk.network);
    const auto& sim = settings.sim;

    auto evaluate = [&](const detail::CalibrationPoint& p, SuspicionStats* stats_out = nullptr) {
        auto stats = simulate_population(p.world, p.folk, sim.n, sim.threshold, sim.seed, {sim.workers});
        if (stats_out) *stats_out = stats;
        return calibration_loss(stats, targets, settings).loss;
    };

    detail::CalibrationPoint cur{folk, world};
    for (const auto& fp : settings.params)
        get_parameter(fp.side == ModelSide::Folk ? cur.folk.network : cur.world.network, fp);

    CalibrationResult result;
    result.settings = settings;
    double loss = evaluate(cur);
    result.loss_trace.push_back(loss);

    double span = 0.5;
    for (std::size_t it = 0; it < settings.iterations; ++it) {
        if (loss == 0.0 || span < settings.min_span) break;
        std::size_t accepted = 0;
        for (const auto& fp : settings.params) {
            const Network& net = fp.side == ModelSide::Folk ? cur.folk.network : cur.world.network;
            const double v = get_parameter(net, fp);
            const double width = span * (fp.hi - fp.lo);
            const double a = std::max(fp.lo, v - width), b = std::min(fp.hi, v + width);
            double best_loss = loss, best_v = v;
            for (std::size_t g = 0; g < settings.grid_points; ++g) {
                double c = a + (b - a) * static_cast<double>(g) / static_cast<double>(settings.grid_points - 1);
                c = std::clamp(detail::round_to(c, settings.decimals), fp.lo, fp.hi);
                if (c == v) continue;
                double l;
                try {
                    l = evaluate(detail::with_parameter(cur, fp, c));
                } catch (const ModelError&) {
                    continue;  // candidate makes some observation impossible under the folk theory
                }
                if (l < best_loss) {
                    best_loss = l;
                    best_v = c;
                }
            }
            if (best_loss < loss) {
                cur = detail::with_parameter(cur, fp, best_v);
                loss = best_loss;
                ++accepted;
            }
        }
        result.accepted_steps += accepted;
        result.loss_trace.push_back(loss);
        if (accepted == 0) span /= 2.0;
    }

    result.folk = cur.folk;
    result.world = cur.world;
    evaluate(cur, &result.final_stats);
    result.final = calibration_loss(result.final_stats, targets, settings);
    for (const auto& fp : settings.params)
        result.parameters[fp.name()] =
            get_parameter(fp.side == ModelSide::Folk ? cur.folk.network : cur.world.network, fp);
    return result;
}

}  // namespace ftm
