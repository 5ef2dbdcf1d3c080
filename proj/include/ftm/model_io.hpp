#pragma once
// Loading models and targets from disk, and the shipped default instances.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ftm/dsl.hpp"
#include "ftm/error.hpp"
#include "ftm/folk.hpp"
#include "ftm/network.hpp"
#include "ftm/simulator.hpp"
#include "ftm/targets.hpp"

#ifndef FTM_DEFAULT_DATA_DIR
#define FTM_DEFAULT_DATA_DIR "data"
#endif

namespace ftm {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) fail(ErrorKind::Io, "cannot write " + path.string());
}

// Parse diagnostics become findings located by line:column.
inline NetworkSpec parse_or_throw(const std::string& text) {
    auto res = parse_model(text);
    if (!res.ok()) {
        std::vector<Finding> fs;
        for (const auto& d : res.diagnostics)
            fs.push_back({d.kind, std::to_string(d.line) + ":" + std::to_string(d.column), d.str()});
        throw ModelError(std::move(fs));
    }
    return std::move(res.spec);
}

inline Network load_network(const std::filesystem::path& path, BuildOptions opts = {}) {
    return build_network(parse_or_throw(read_file(path)), opts);
}

// FTM_DATA_DIR overrides the directory configured at build time.
inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("FTM_DATA_DIR"); env && *env) return env;
    return FTM_DEFAULT_DATA_DIR;
}

inline FolkTheory default_folk_theory() { return make_folk_theory(load_network(data_dir() / "default-folk.ftm")); }
inline WorldModel default_world_model() { return make_world_model(load_network(data_dir() / "default-world.ftm")); }
inline SurveyTargets default_survey_targets() { return parse_targets(read_file(data_dir() / "survey-targets.csv")); }

}  // namespace ftm
