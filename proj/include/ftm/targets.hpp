#pragma once
// Survey targets: shares of reported bases of suspicion, each mapped to a
// model cue node or left unmapped, plus the population split of suspicious
// users into truly shadowbanned and not.
//
// File format, one entry per line, `#` comments:
//   category,share,mapped
// where `mapped` is a node id, `unmapped`, `population:shadowbanned` or
// `population:not-shadowbanned`.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ftm/dsl.hpp"
#include "ftm/error.hpp"
#include "ftm/network.hpp"

namespace ftm {

inline constexpr const char* kUnmapped = "unmapped";
inline constexpr const char* kPopulationShadowbanned = "population:shadowbanned";
inline constexpr const char* kPopulationNotShadowbanned = "population:not-shadowbanned";

struct SurveyTargets {
    struct Entry {
        std::string category;
        double share = 0.0;
        std::string mapped;

        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    std::optional<double> population_share(const std::string& which) const {
        for (const auto& e : entries)
            if (e.mapped == which) return e.share;
        return std::nullopt;
    }
    double shadowbanned_share() const { return population_share(kPopulationShadowbanned).value_or(0.0); }

    // Cue node -> summed share of every category mapped onto it.
    std::map<std::string, double> cue_shares() const {
        std::map<std::string, double> out;
        for (const auto& e : entries) {
            if (e.mapped == kUnmapped || e.mapped.rfind("population:", 0) == 0) continue;
            out[e.mapped] += e.share;
        }
        return out;
    }

    // cue_shares() normalized to sum to one.
    std::map<std::string, double> normalized_cue_shares() const {
        auto out = cue_shares();
        double total = 0.0;
        for (const auto& [k, v] : out) total += v;
        if (total > 0.0)
            for (auto& [k, v] : out) v /= total;
        return out;
    }
};

inline SurveyTargets parse_targets(std::string_view text) {
    SurveyTargets t;
    std::vector<Finding> problems;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = dsl::split(line, ',');
        for (auto& f : fields) {
            auto a = f.find_first_not_of(" \t"), b = f.find_last_not_of(" \t");
            f = a == std::string::npos ? "" : f.substr(a, b - a + 1);
        }
        const std::string where = "line " + std::to_string(lineno);
        if (fields.size() == 3 && fields[0] == "category" && fields[1] == "share") continue;  // header
        if (fields.size() != 3 || fields[0].empty() || fields[2].empty()) {
            problems.push_back({ErrorKind::SyntaxError, where, where + ": expected 'category,share,mapped'"});
            continue;
        }
        auto share = dsl::parse_probability(fields[1]);
        if (!share || !(*share >= 0.0 && *share <= 1.0)) {
            problems.push_back({ErrorKind::BadProbability, where, where + ": share '" + fields[1] + "' not in [0,1]"});
            continue;
        }
        t.entries.push_back({fields[0], *share, fields[2]});
    }
    auto yes = t.population_share(kPopulationShadowbanned), no = t.population_share(kPopulationNotShadowbanned);
    if (!yes || !no)
        problems.push_back({ErrorKind::InvalidArgument, "population", "both population shares are required"});
    else if (std::abs(*yes + *no - 1.0) > kRowTolerance)
        problems.push_back({ErrorKind::NotNormalized, "population",
                            "population shares sum to " + detail::fmt_double(*yes + *no), *yes + *no});
    if (!problems.empty()) throw ModelError(std::move(problems));
    return t;
}

inline std::string serialize_targets(const SurveyTargets& t) {
    std::string out = "category,share,mapped\n";
    for (const auto& e : t.entries)
        out += e.category + "," + dsl::format_probability(e.share) + "," + e.mapped + "\n";
    return out;
}

// Every mapped cue must be a node of `net`.
inline void check_targets(const SurveyTargets& t, const Network& net) {
    for (const auto& [node, share] : t.cue_shares())
        if (!net.find(node)) fail(ErrorKind::UnknownNode, "targets map onto unknown node '" + node + "'");
}

}  // namespace ftm
