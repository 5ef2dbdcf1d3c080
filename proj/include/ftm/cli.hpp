#pragma once
// Command-line front end. run_cli() never throws: every failure maps to an
// exit code (0 ok, 2 model or validation error, 3 file error, 4 bad usage).

#include <algorithm>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include "ftm/calibrate.hpp"
#include "ftm/dsl.hpp"
#include "ftm/error.hpp"
#include "ftm/folk.hpp"
#include "ftm/inference.hpp"
#include "ftm/intervention.hpp"
#include "ftm/json_io.hpp"
#include "ftm/model_io.hpp"
#include "ftm/service.hpp"
#include "ftm/simulator.hpp"
#include "ftm/targets.hpp"

namespace ftm {

enum ExitCode : int { kExitOk = 0, kExitModel = 2, kExitIo = 3, kExitUsage = 4 };

struct CliResult {
    int code = kExitOk;
    std::string out;
    std::string err;
};

namespace cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A bare file name that does not exist relative to the working directory is
// looked up in the data directory, so `validate default-folk.ftm` works
// from anywhere.
inline std::filesystem::path resolve(const std::string& path) {
    std::filesystem::path p(path);
    if (std::filesystem::exists(p) || p.has_parent_path()) return p;
    auto alt = data_dir() / p;
    return std::filesystem::exists(alt) ? alt : p;
}

inline std::pair<std::string, std::string> split_pair(const std::string& s, const char* flag) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw UsageError(std::string(flag) + " expects id=value, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

inline Assignment parse_evidence(const std::vector<std::string>& items) {
    Assignment a;
    for (const auto& item : items)
        for (const auto& part : dsl::split(item, ',')) {
            if (part.empty()) continue;
            auto [id, state] = split_pair(part, "--evidence");
            a[id] = state;
        }
    return a;
}

struct InterventionFlags {
    std::vector<std::string> dos;
    std::vector<std::string> priors;
    std::vector<std::string> cpt_files;
    std::string applies_to = "folk";

    bool any() const { return !dos.empty() || !priors.empty() || !cpt_files.empty(); }

    // `net` supplies node definitions for replacement-table files.
    std::vector<Intervention> build(const Network& net) const {
        const auto to = io::applies_to_from_string(applies_to);
        std::vector<Intervention> out;
        for (const auto& d : dos) {
            auto [id, state] = split_pair(d, "--do");
            out.push_back(Intervention::outcome(id, state, to));
        }
        for (const auto& p : priors) {
            auto [id, values] = split_pair(p, "--prior");
            std::vector<double> ps;
            for (const auto& v : dsl::split(values, ',')) {
                auto x = dsl::parse_probability(v);
                if (!x) throw UsageError("--prior value '" + v + "' is not a number");
                ps.push_back(*x);
            }
            out.push_back(Intervention::prior(id, ps, to));
        }
        for (const auto& f : cpt_files)
            out.push_back(Intervention::contingency(parse_cpt_fragment(read_file(f), net), to));
        return out;
    }

    void attach(CLI::App* cmd, bool with_applies_to) {
        cmd->add_option("--do", dos, "set-outcome intervention id=state (repeatable)");
        cmd->add_option("--prior", priors, "set-prior intervention id=p1,p2,... (repeatable)");
        cmd->add_option("--cpt-file", cpt_files, "set-contingency intervention from a file of cpt lines");
        if (with_applies_to)
            cmd->add_option("--applies-to", applies_to, "which model the intervention changes")
                ->check(CLI::IsMember({"world", "folk", "both"}));
    }
};

inline std::string fmt_p(double v) { return dsl::format_probability(v); }

inline std::string fmt_rate(const std::optional<double>& v) { return v ? fmt_p(*v) : "n/a"; }

inline void print_stats(std::ostream& out, const SuspicionStats& s, const std::string& indent = "") {
    out << indent << "episodes:            " << s.n << "\n"
        << indent << "suspicious:          " << s.suspicious << "\n"
        << indent << "true suspicions:     " << s.true_suspicions << "\n"
        << indent << "false suspicions:    " << s.false_suspicions << "\n"
        << indent << "suspicion rate:      " << fmt_rate(s.suspicion_rate()) << "\n"
        << indent << "false rate:          " << fmt_rate(s.false_suspicion_rate()) << "\n"
        << indent << "false share:         " << fmt_rate(s.false_share_among_suspicious()) << "\n"
        << indent << "shadowbanned share:  " << fmt_rate(s.true_share_among_suspicious()) << "\n";
    for (const auto& [node, c] : s.attributions) out << indent << "basis " << node << ":            " << c << "\n";
    if (s.unattributed) out << indent << "basis none:          " << s.unattributed << "\n";
}

}  // namespace cli

inline CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CLI::App app{"Folk-theory engine: shadowban suspicion models, simulation and interventions", "ftm"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "machine"}));

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "check a model file");
    std::string model_path;
    bool include_excluded = false;
    validate_cmd->add_option("model", model_path, "model file (.ftm)")->required();
    validate_cmd->add_flag("--include-excluded", include_excluded, "build excluded edges too");

    // infer
    auto* infer_cmd = app.add_subcommand("infer", "posterior of one node given evidence");
    std::vector<std::string> evidence_flags;
    std::string query;
    cli::InterventionFlags infer_iv;
    infer_cmd->add_option("model", model_path, "model file (.ftm)")->required();
    infer_cmd->add_option("--evidence", evidence_flags, "id=state[,id=state...]");
    infer_cmd->add_option("--query", query, "node to query")->required();
    infer_iv.attach(infer_cmd, false);

    // intervene
    auto* intervene_cmd = app.add_subcommand("intervene", "apply interventions and print the resulting model");
    cli::InterventionFlags iv_flags;
    std::string out_path;
    intervene_cmd->add_option("model", model_path, "model file (.ftm)")->required();
    iv_flags.attach(intervene_cmd, false);
    intervene_cmd->add_option("--out", out_path, "write the model here instead of stdout");

    // simulate / sweep / calibrate share the model and simulation flags
    std::string world_path = "default-world.ftm", folk_path = "default-folk.ftm";
    SimulationSettings sim;
    auto add_sim_flags = [&](CLI::App* cmd) {
        cmd->add_option("--world", world_path, "ground-truth world model");
        cmd->add_option("--folk", folk_path, "folk theory model");
        cmd->add_option("--n", sim.n, "episodes");
        cmd->add_option("--seed", sim.seed, "master seed");
        cmd->add_option("--threshold", sim.threshold, "suspicion threshold in [0,1]");
        cmd->add_option("--workers", sim.workers, "worker threads (results do not depend on this)");
    };

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate a population, optionally against an intervention");
    cli::InterventionFlags sim_iv;
    add_sim_flags(simulate_cmd);
    sim_iv.attach(simulate_cmd, true);
    simulate_cmd->add_option("--out", out_path, "write a run record (JSON) here");

    auto* sweep_cmd = app.add_subcommand("sweep", "rank a catalog of interventions");
    std::string catalog_path = "interventions.json";
    add_sim_flags(sweep_cmd);
    sweep_cmd->add_option("--catalog", catalog_path, "intervention catalog (JSON)");
    sweep_cmd->add_option("--out", out_path, "write the ranked reports (JSON) here");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "fit model parameters to survey targets");
    std::string targets_path = "survey-targets.csv", settings_path = "calibration.json";
    std::string out_folk, out_world;
    calibrate_cmd->add_option("--world", world_path, "starting world model");
    calibrate_cmd->add_option("--folk", folk_path, "starting folk theory");
    calibrate_cmd->add_option("--targets", targets_path, "survey targets file");
    calibrate_cmd->add_option("--settings", settings_path, "calibration settings (JSON)");
    calibrate_cmd->add_option("--n", sim.n, "episodes per evaluation (overrides settings)");
    calibrate_cmd->add_option("--seed", sim.seed, "seed (overrides settings)");
    std::size_t iterations = 0;
    calibrate_cmd->add_option("--iterations", iterations, "sweep budget (overrides settings)");
    calibrate_cmd->add_option("--workers", sim.workers, "worker threads");
    calibrate_cmd->add_option("--out-folk", out_folk, "write the fitted folk theory here");
    calibrate_cmd->add_option("--out-world", out_world, "write the fitted world model here");
    calibrate_cmd->add_option("--out", out_path, "write the calibration result (JSON) here");

    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
    int port = 8080;
    std::string host = "127.0.0.1", static_dir, models_dir;
    serve_cmd->add_option("--port", port, "port to listen on");
    serve_cmd->add_option("--host", host, "address to bind");
    serve_cmd->add_option("--static", static_dir, "directory of static UI assets to serve at /");
    serve_cmd->add_option("--models", models_dir, "directory of .ftm models (default: data directory)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return {rc == 0 ? kExitOk : kExitUsage, out.str(), err.str()};
    }
    const bool machine = format == "machine";
    auto emit = [&](const nlohmann::json& j) { out << j.dump(2) << "\n"; };

    try {
        if (*validate_cmd) {
            auto spec = parse_or_throw(read_file(cli::resolve(model_path)));
            auto report = validate(spec, {include_excluded});
            std::size_t active = 0;
            for (const auto& e : spec.edges) active += (!e.excluded || include_excluded) ? 1 : 0;
            if (machine) {
                nlohmann::json findings = nlohmann::json::array();
                for (const auto& f : report.findings)
                    findings.push_back({{"kind", std::string(to_string(f.kind))}, {"locus", f.locus}, {"message", f.message}});
                emit({{"ok", report.ok()}, {"nodes", spec.nodes.size()}, {"active_edges", active}, {"findings", findings}});
            } else if (report.ok()) {
                out << "OK, " << spec.nodes.size() << " nodes, " << active << " active edges\n";
            } else {
                for (const auto& f : report.findings) out << to_string(f.kind) << " at " << f.locus << ": " << f.message << "\n";
                out << "INVALID, " << report.findings.size() << " finding(s)\n";
            }
            return {report.ok() ? kExitOk : kExitModel, out.str(), err.str()};
        }

        if (*infer_cmd) {
            Network net = load_network(cli::resolve(model_path));
            for (const auto& iv : infer_iv.build(net)) net = apply_intervention(net, iv);
            auto evidence = cli::parse_evidence(evidence_flags);
            auto d = posterior(net, evidence, query);
            if (machine) {
                emit({{"query", query}, {"evidence", evidence}, {"distribution", io::to_json(d)}});
            } else {
                std::string given;
                for (const auto& [k, v] : evidence) given += (given.empty() ? "" : ",") + k + "=" + v;
                out << "P(" << query << (given.empty() ? "" : " | " + given) << ")\n";
                for (std::size_t i = 0; i < d.states.size(); ++i) out << "  " << d.states[i] << " " << cli::fmt_p(d.p[i]) << "\n";
            }
            return {kExitOk, out.str(), err.str()};
        }

        if (*intervene_cmd) {
            Network net = load_network(cli::resolve(model_path));
            if (!iv_flags.any()) throw cli::UsageError("give at least one of --do, --prior, --cpt-file");
            for (const auto& iv : iv_flags.build(net)) net = apply_intervention(net, iv);
            auto text = serialize_model(net);
            if (!out_path.empty()) write_file(out_path, text);
            if (machine)
                emit(io::model_document(net));
            else if (out_path.empty())
                out << text;
            else
                out << "wrote " << out_path << "\n";
            return {kExitOk, out.str(), err.str()};
        }

        if (*simulate_cmd) {
            auto world = make_world_model(load_network(cli::resolve(world_path)));
            auto folk = make_folk_theory(load_network(cli::resolve(folk_path)));
            if (!sim_iv.any()) {
                auto stats = simulate_population(world, folk, sim.n, sim.threshold, sim.seed, {sim.workers});
                auto record = io::run_record(world, folk, sim, stats);
                if (!out_path.empty()) write_file(out_path, record.dump(2) + "\n");
                if (machine)
                    emit(record);
                else
                    cli::print_stats(out, stats);
                return {kExitOk, out.str(), err.str()};
            }
            auto ivs = sim_iv.build(folk.network);
            if (ivs.size() != 1) throw cli::UsageError("simulate evaluates exactly one intervention; use sweep for several");
            auto report = evaluate_intervention(world, folk, ivs.front(), sim);
            auto j = io::to_json(report);
            if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
            if (machine) {
                emit(j);
            } else {
                out << "intervention: " << report.description << "\nbaseline:\n";
                cli::print_stats(out, report.baseline, "  ");
                out << "post:\n";
                cli::print_stats(out, report.post, "  ");
                out << "delta false rate:     " << cli::fmt_p(report.deltas.false_suspicion_rate) << "\n"
                    << "delta true rate:      " << cli::fmt_p(report.deltas.true_suspicion_rate) << "\n"
                    << "delta suspicion rate: " << cli::fmt_p(report.deltas.suspicion_rate) << "\n";
            }
            return {kExitOk, out.str(), err.str()};
        }

        if (*sweep_cmd) {
            auto world = make_world_model(load_network(cli::resolve(world_path)));
            auto folk = make_folk_theory(load_network(cli::resolve(folk_path)));
            auto ivs = io::catalog_from_json(io::parse_json(read_file(cli::resolve(catalog_path))));
            auto reports = sweep_interventions(world, folk, ivs, sim);
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : reports) j.push_back(io::to_json(r));
            if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
            if (machine) {
                emit({{"reports", j}});
            } else {
                out << "rank  post false rate  delta            intervention\n";
                for (std::size_t i = 0; i < reports.size(); ++i) {
                    const auto& r = reports[i];
                    char line[96];
                    std::snprintf(line, sizeof line, "%-5zu %-16.6f %-+16.6f ", i + 1,
                                  r.post.false_suspicion_rate().value_or(0.0), r.deltas.false_suspicion_rate);
                    out << line << r.description << "\n";
                }
            }
            return {kExitOk, out.str(), err.str()};
        }

        if (*calibrate_cmd) {
            auto world = make_world_model(load_network(cli::resolve(world_path)));
            auto folk = make_folk_theory(load_network(cli::resolve(folk_path)));
            auto targets = parse_targets(read_file(cli::resolve(targets_path)));
            auto settings = io::calibration_settings_from_json(io::parse_json(read_file(cli::resolve(settings_path))));
            if (calibrate_cmd->count("--n")) settings.sim.n = sim.n;
            if (calibrate_cmd->count("--seed")) settings.sim.seed = sim.seed;
            if (calibrate_cmd->count("--iterations")) settings.iterations = iterations;
            settings.sim.workers = sim.workers;
            auto result = calibrate(folk, world, targets, settings);
            if (!out_folk.empty()) write_file(out_folk, serialize_model(result.folk.network));
            if (!out_world.empty()) write_file(out_world, serialize_model(result.world.network));
            auto j = io::to_json(result);
            if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
            if (machine) {
                emit(j);
            } else {
                out << "sweeps: " << result.loss_trace.size() - 1 << ", accepted steps: " << result.accepted_steps
                    << "\nloss: " << cli::fmt_p(result.loss_trace.front()) << " -> " << cli::fmt_p(result.final.loss) << "\n";
                for (const auto& [k, v] : result.final.residuals) out << "residual " << k << ": " << cli::fmt_p(v) << "\n";
                for (const auto& [k, v] : result.parameters) out << k << " = " << cli::fmt_p(v) << "\n";
            }
            return {kExitOk, out.str(), err.str()};
        }

        if (*serve_cmd) {
            auto registry = std::make_shared<ModelRegistry>();
            registry->load_directory(models_dir.empty() ? data_dir() : std::filesystem::path(models_dir));
            Service service(registry);
            httplib::Server server;
            service.bind(server, static_dir);
            std::cerr << "serving on http://" << host << ":" << port << "\n";
            if (!server.listen(host, port)) fail(ErrorKind::Io, "cannot listen on " + host + ":" + std::to_string(port));
            return {kExitOk, out.str(), err.str()};
        }
    } catch (const cli::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return {kExitUsage, out.str(), err.str()};
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return {e.kind() == ErrorKind::Io ? kExitIo : kExitModel, out.str(), err.str()};
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return {kExitIo, out.str(), err.str()};
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return {kExitModel, out.str(), err.str()};
    }
    return {kExitUsage, out.str(), err.str()};
}

}  // namespace ftm
