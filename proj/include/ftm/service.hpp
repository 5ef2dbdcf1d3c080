#pragma once
// HTTP/JSON service over a registry of named models. Base models are
// immutable after startup; intervened variants live in a session store keyed
// by content, so replaying the same requests after a restart yields the same
// variant ids and responses.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "ftm/dsl.hpp"
#include "ftm/error.hpp"
#include "ftm/folk.hpp"
#include "ftm/hash.hpp"
#include "ftm/inference.hpp"
#include "ftm/intervention.hpp"
#include "ftm/json_io.hpp"
#include "ftm/model_io.hpp"
#include "ftm/simulator.hpp"

namespace ftm {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

class ModelRegistry {
public:
    void add(const std::string& name, Network net) { base_.emplace(name, std::move(net)); }

    // Every *.ftm file in `dir`, registered under its file stem.
    void load_directory(const std::filesystem::path& dir) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.path().extension() == ".ftm") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) add(f.stem().string(), load_network(f));
    }

    std::optional<Network> find(const std::string& name) const {
        if (auto it = base_.find(name); it != base_.end()) return it->second;
        std::shared_lock lock(mu_);
        if (auto it = variants_.find(name); it != variants_.end()) return it->second;
        return std::nullopt;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : base_) out.push_back(k);
        return out;
    }

    // Stores a fully built variant and returns its id.
    std::string add_variant(const std::string& base, Network net) {
        auto id = base + "@" + sha256_hex(serialize_model(net)).substr(0, 12);
        std::unique_lock lock(mu_);
        variants_.emplace(id, std::move(net));
        return id;
    }

private:
    std::map<std::string, Network> base_;
    mutable std::shared_mutex mu_;
    std::map<std::string, Network> variants_;
};

class Service {
public:
    static constexpr std::uint64_t kMaxEpisodes = 10'000'000;

    explicit Service(std::shared_ptr<ModelRegistry> registry) : registry_(std::move(registry)) {}

    ApiResponse health() const { return {200, {{"status", "ok"}}}; }

    ApiResponse models() const { return {200, {{"models", registry_->names()}}}; }

    ApiResponse model(const std::string& name) const {
        return guarded([&] { return ApiResponse{200, io::model_document(lookup(name))}; });
    }

    ApiResponse infer(const nlohmann::json& req) const {
        return guarded([&] {
            const auto name = io::detail::get_as<std::string>(req, "model");
            const auto query = io::detail::get_as<std::string>(req, "query");
            auto evidence = io::detail::get_or<Assignment>(req, "evidence", {});
            const Network net = lookup(name);
            auto d = posterior(net, evidence, query);
            return ApiResponse{200, {{"model", name}, {"query", query}, {"evidence", evidence}, {"distribution", io::to_json(d)}}};
        });
    }

    ApiResponse intervene(const nlohmann::json& req) {
        return guarded([&] {
            const auto name = io::detail::get_as<std::string>(req, "model");
            Network net = lookup(name);
            for (const auto& item : io::detail::require(req, "interventions"))
                net = apply_intervention(net, io::intervention_from_json(item));
            auto id = registry_->add_variant(name, net);
            return ApiResponse{200, {{"variant", id}, {"model", io::model_document(net)}}};
        });
    }

    ApiResponse simulate(const nlohmann::json& req) const {
        return guarded([&] {
            auto [world, folk, s] = simulation_inputs(req);
            auto stats = simulate_population(world, folk, s.n, s.threshold, s.seed);
            return ApiResponse{200, io::to_json(stats)};
        });
    }

    ApiResponse sweep(const nlohmann::json& req) const {
        return guarded([&] {
            auto [world, folk, s] = simulation_inputs(req);
            std::vector<Intervention> ivs;
            for (const auto& item : io::detail::require(req, "interventions"))
                ivs.push_back(io::intervention_from_json(item));
            nlohmann::json reports = nlohmann::json::array();
            for (const auto& r : sweep_interventions(world, folk, ivs, s)) reports.push_back(io::to_json(r));
            return ApiResponse{200, {{"reports", reports}}};
        });
    }

    // Binds every endpoint; `static_dir` (when non-empty) is mounted at /.
    void bind(httplib::Server& server, const std::string& static_dir = {}) {
        auto reply = [](httplib::Response& res, const ApiResponse& r) {
            res.status = r.status;
            res.set_content(r.body.dump(), "application/json");
        };
        auto with_body = [reply](auto handler) {
            return [reply, handler](const httplib::Request& req, httplib::Response& res) {
                nlohmann::json body;
                try {
                    body = nlohmann::json::parse(req.body);
                } catch (const nlohmann::json::exception& e) {
                    reply(res, {400, {{"error", "SyntaxError"}, {"message", std::string("invalid JSON: ") + e.what()}}});
                    return;
                }
                reply(res, handler(body));
            };
        };
        server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
        server.Get("/api/models", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, models()); });
        server.Get(R"(/api/model/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, model(req.matches[1]));
        });
        server.Post("/api/infer", with_body([this](const nlohmann::json& b) { return infer(b); }));
        server.Post("/api/intervene", with_body([this](const nlohmann::json& b) { return intervene(b); }));
        server.Post("/api/simulate", with_body([this](const nlohmann::json& b) { return simulate(b); }));
        server.Post("/api/sweep", with_body([this](const nlohmann::json& b) { return sweep(b); }));
        if (!static_dir.empty()) server.set_mount_point("/", static_dir);
    }

private:
    struct SimInputs {
        WorldModel world;
        FolkTheory folk;
        SimulationSettings settings;
    };

    Network lookup(const std::string& name) const {
        auto net = registry_->find(name);
        if (!net) throw NotFound{name};
        return *net;
    }

    SimInputs simulation_inputs(const nlohmann::json& req) const {
        SimInputs in{make_world_model(lookup(io::detail::get_as<std::string>(req, "world"))),
                     make_folk_theory(lookup(io::detail::get_as<std::string>(req, "folk"))),
                     {}};
        in.settings.n = io::detail::get_or<std::uint64_t>(req, "n", 20000);
        in.settings.seed = io::detail::get_or<std::uint64_t>(req, "seed", 1);
        in.settings.threshold = io::detail::get_or<double>(req, "threshold", 0.5);
        if (in.settings.n > kMaxEpisodes)
            fail(ErrorKind::InvalidArgument, "n exceeds the service limit of " + std::to_string(kMaxEpisodes));
        return in;
    }

    struct NotFound {
        std::string name;
    };

    template <class F>
    static ApiResponse guarded(F&& f) {
        try {
            return f();
        } catch (const NotFound& nf) {
            return {404, {{"error", "UnknownModel"}, {"message", "no model named '" + nf.name + "'"}}};
        } catch (const ModelError& e) {
            return {400, {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}};
        } catch (const nlohmann::json::exception& e) {
            return {400, {{"error", "InvalidArgument"}, {"message", e.what()}}};
        }
    }

    std::shared_ptr<ModelRegistry> registry_;
};

}  // namespace ftm
