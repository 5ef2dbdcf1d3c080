#include <gtest/gtest.h>

#include <filesystem>

#include "ftm/cli.hpp"
#include "ftm/model_io.hpp"
#include "json.hpp"

using namespace ftm;
namespace fs = std::filesystem;

namespace {

CliResult run(std::vector<std::string> args) { return run_cli(args); }

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("ftm-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

}  // namespace

TEST(Cli, ValidateShippedModel) {
    auto r = run({"validate", "default-folk.ftm"});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, "OK, 7 nodes, 7 active edges\n");
}

TEST(Cli, ValidateWithExcludedEdgeFindsCycle) {
    auto r = run({"validate", "default-folk.ftm", "--include-excluded"});
    EXPECT_EQ(r.code, kExitModel);
    EXPECT_NE(r.out.find("Cyclic"), std::string::npos);
    EXPECT_NE(r.out.find("E8"), std::string::npos);
    EXPECT_NE(r.out.find("INVALID"), std::string::npos);
    auto m = nlohmann::json::parse(run({"--format", "machine", "validate", "default-folk.ftm", "--include-excluded"}).out);
    EXPECT_FALSE(m["ok"].get<bool>());
    EXPECT_EQ(m["active_edges"], 8);
    EXPECT_EQ(m["findings"][0]["kind"], "Cyclic");
}

TEST(Cli, InferPrintsPosterior) {
    auto r = run({"infer", "default-folk.ftm", "--evidence", "N6=true", "--query", "N4"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("P(N4 | N6=true)\n", 0), 0u);
    const auto line = r.out.substr(r.out.find("  true ") + 7);
    EXPECT_NEAR(std::stod(line), 0.52365273607531593, 1e-12);

    auto m = nlohmann::json::parse(
        run({"--format", "machine", "infer", "default-folk.ftm", "--evidence", "N6=true", "--query", "N4"}).out);
    EXPECT_NEAR(m["distribution"]["probabilities"]["true"].get<double>(), 0.52365273607531593, 1e-15);
}

TEST(Cli, InferUnderIntervention) {
    auto r = run({"--format", "machine", "infer", "default-folk.ftm", "--evidence", "N6=true,N7=true", "--query", "N4",
                  "--prior", "N1=0,1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["distribution"]["p"][0].get<double>(), 0.0);
}

TEST(Cli, InterveneWritesCanonicalModel) {
    TempDir tmp;
    auto r = run({"intervene", "default-folk.ftm", "--prior", "N1=0,1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("cpt N1 : 0 1\n"), std::string::npos);
    auto w = run({"intervene", "default-folk.ftm", "--prior", "N1=0,1", "--out", tmp.file("guarded.ftm")});
    ASSERT_EQ(w.code, kExitOk);
    EXPECT_EQ(read_file(tmp.file("guarded.ftm")), r.out);
    EXPECT_EQ(run({"validate", tmp.file("guarded.ftm")}).code, kExitOk);

    auto d = run({"intervene", "default-folk.ftm", "--do", "N4=false"});
    EXPECT_EQ(d.code, kExitModel);  // N4 is not intervenable
    EXPECT_NE(d.err.find("NotIntervenable"), std::string::npos);
}

TEST(Cli, SimulateReportsCalibratedShares) {
    TempDir tmp;
    auto r = run({"--format", "machine", "simulate", "--n", "100000", "--seed", "1", "--out", tmp.file("run.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["record"], "simulation-run");
    EXPECT_NEAR(j["stats"]["rates"]["false_share_among_suspicious"].get<double>(), 0.966, 0.02);
    EXPECT_EQ(j["stats"]["false_suspicions"], 18268);
    EXPECT_EQ(j["models"]["folk"]["sha256"].get<std::string>().size(), 64u);
    EXPECT_EQ(nlohmann::json::parse(read_file(tmp.file("run.json"))), j);

    auto again = run({"--format", "machine", "simulate", "--n", "100000", "--seed", "1", "--workers", "4"});
    EXPECT_EQ(nlohmann::json::parse(again.out), j);

    auto text = run({"simulate", "--n", "1000"});
    EXPECT_NE(text.out.find("false share:"), std::string::npos);
}

TEST(Cli, SimulateOneIntervention) {
    auto r = run({"--format", "machine", "simulate", "--n", "20000", "--prior", "N1=0,1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["post"]["suspicious"], 0);
    EXPECT_GT(j["baseline"]["suspicious"].get<int>(), 0);
    EXPECT_EQ(j["intervention"]["applies_to"], "folk");

    auto two = run({"simulate", "--n", "100", "--prior", "N1=0,1", "--do", "N5=false"});
    EXPECT_EQ(two.code, kExitUsage);
}

TEST(Cli, SweepRanksCatalog) {
    auto r = run({"sweep", "--n", "100000", "--seed", "1"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("rank  post false rate", 0), 0u);
    auto j = nlohmann::json::parse(run({"--format", "machine", "sweep", "--n", "100000", "--seed", "1"}).out);
    ASSERT_EQ(j["reports"].size(), 5u);
    EXPECT_EQ(j["reports"][0]["intervention"]["name"], "attest-absence");
    EXPECT_EQ(j["reports"][4]["intervention"]["name"], "reveal-presence");
    for (std::size_t i = 1; i < 5; ++i)
        EXPECT_LE(j["reports"][i - 1]["post"]["rates"]["false_suspicion_rate"].get<double>(),
                  j["reports"][i]["post"]["rates"]["false_suspicion_rate"].get<double>());
}

TEST(Cli, CalibrateSmallRun) {
    TempDir tmp;
    auto r = run({"--format", "machine", "calibrate", "--world", "initial-world.ftm", "--folk", "initial-folk.ftm",
                  "--n", "2000", "--iterations", "1", "--out-folk", tmp.file("f.ftm"), "--out-world",
                  tmp.file("w.ftm"), "--out", tmp.file("c.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["loss_trace"].size(), 2u);
    EXPECT_LE(j["loss_trace"][1].get<double>(), j["loss_trace"][0].get<double>());
    EXPECT_EQ(run({"validate", tmp.file("f.ftm")}).code, kExitOk);
    EXPECT_EQ(run({"validate", tmp.file("w.ftm")}).code, kExitOk);
    EXPECT_EQ(nlohmann::json::parse(read_file(tmp.file("c.json"))), j);
}

TEST(Cli, ExitCodes) {
    TempDir tmp;
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"infer", "default-folk.ftm"}).code, kExitUsage);                     // --query missing
    EXPECT_EQ(run({"infer", "default-folk.ftm", "--query", "N4", "--evidence", "N6"}).code, kExitUsage);
    EXPECT_EQ(run({"validate", tmp.file("absent.ftm")}).code, kExitIo);
    EXPECT_EQ(run({"infer", "default-folk.ftm", "--query", "N99"}).code, kExitModel);
    write_file(tmp.file("broken.ftm"), "model m\nnode A t,f latent fixed \"a\"\ncpt A : 0.5 0.4\n");
    auto bad = run({"validate", tmp.file("broken.ftm")});
    EXPECT_EQ(bad.code, kExitModel);
    EXPECT_NE(bad.err.find("3:"), std::string::npos);  // line of the offending row
    EXPECT_EQ(run({"--help"}).code, kExitOk);
}
