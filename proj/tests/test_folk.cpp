#include <gtest/gtest.h>

#include <random>

#include "ftm/folk.hpp"
#include "ftm/intervention.hpp"
#include "ftm/model_io.hpp"
#include "ftm/noisy_or.hpp"
#include "ftm/simulator.hpp"
#include "oracle.hpp"

using namespace ftm;

namespace {

const std::vector<std::string> kTF{"true", "false"};

std::vector<Assignment> observation_patterns() {
    std::vector<Assignment> out;
    for (const auto& a : kTF)
        for (const auto& b : kTF)
            for (const auto& c : kTF) out.push_back({{"N2", a}, {"N6", b}, {"N7", c}});
    return out;
}

// All assignments over a subset of {N2, N6, N7}, including partial ones.
std::vector<Assignment> partial_observations(const std::vector<std::string>& cues) {
    std::vector<Assignment> out{{}};
    for (const auto& c : cues) {
        std::vector<Assignment> next;
        for (const auto& a : out) {
            next.push_back(a);
            for (const auto& s : kTF) {
                auto b = a;
                b[c] = s;
                next.push_back(b);
            }
        }
        out = next;
    }
    return out;
}

}  // namespace

class DefaultFolk : public ::testing::Test {
protected:
    FolkTheory folk = default_folk_theory();
    NetworkSpec spec = folk.network.to_spec();
};

TEST_F(DefaultFolk, Annotations) {
    EXPECT_EQ(folk.network.size(), 7u);
    EXPECT_EQ(folk.network.edges().size(), 7u);
    EXPECT_TRUE(validate(folk.network).ok());
    EXPECT_EQ(folk.observable, (std::set<std::string>{"N2", "N6", "N7"}));
    EXPECT_TRUE(folk.intervenable.count("N1"));
    EXPECT_EQ(folk.suspicion_node, "N4");
    EXPECT_EQ(folk.suspicion_state, "true");
}

TEST_F(DefaultFolk, HardGuardInTable) {
    const auto& t = folk.network.cpt("N4");
    ASSERT_EQ(t.parents, (std::vector<std::string>{"N1", "N2", "N3"}));
    for (std::size_t r = 4; r < 8; ++r) EXPECT_EQ(t.rows[r][0], 0.0) << "row " << r;  // N1=false rows
}

TEST_F(DefaultFolk, PriorSuspicionMatchesOracle) {
    // Closed form for the guarded noisy-OR: 0.8 * (1 - 0.98 * (1 - 0.95*0.2) * (1 - 0.3*0.3)).
    const double pinned = 0.2221136;
    EXPECT_NEAR((*oracle::posterior(spec, {}, "N4"))[0], pinned, 1e-15);
    EXPECT_NEAR(suspicion_probability(folk, {}), pinned, 1e-12);
}

TEST_F(DefaultFolk, EngagementCueRaisesSuspicion) {
    const double with_cue = suspicion_probability(folk, {{"N6", "true"}});
    EXPECT_NEAR(with_cue, 0.52365273607531593, 1e-12);
    EXPECT_GE(with_cue, suspicion_probability(folk, {}));
}

TEST_F(DefaultFolk, BothCuesVerdictPinned) {
    Assignment obs{{"N6", "true"}, {"N7", "true"}};
    const double p = (*oracle::posterior(spec, obs, "N4"))[0];
    EXPECT_NEAR(p, 0.88091734191358906, 1e-12);
    EXPECT_NEAR(suspicion_probability(folk, obs), p, 1e-10);
    EXPECT_TRUE(suspects(folk, obs, 0.5));
}

TEST_F(DefaultFolk, AllPatternsMatchOracle) {
    for (const auto& obs : observation_patterns())
        EXPECT_NEAR(suspicion_probability(folk, obs), (*oracle::posterior(spec, obs, "N4"))[0], 1e-10);
}

TEST_F(DefaultFolk, SuspicionNeedsObservableEvidence) {
    try {
        suspicion_probability(folk, {{"N1", "true"}});
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonObservableEvidence);
        EXPECT_NE(std::string(e.what()).find("N1"), std::string::npos);
    }
}

TEST_F(DefaultFolk, ThresholdRules) {
    for (const auto& obs : observation_patterns()) {
        EXPECT_TRUE(suspects(folk, obs, 0.0));
        EXPECT_FALSE(suspects(folk, obs, 1.0));
        bool was = true;
        for (int k = 0; k <= 100; ++k) {
            bool now = suspects(folk, obs, k / 100.0);
            if (!was) EXPECT_FALSE(now);
            was = now;
        }
    }
    for (double bad : {-0.1, 1.1, std::nan("")}) {
        try {
            suspects(folk, {}, bad);
            FAIL();
        } catch (const ModelError& e) {
            EXPECT_EQ(e.kind(), ErrorKind::InvalidThreshold);
        }
    }
}

TEST_F(DefaultFolk, CueMonotonicity) {
    for (const auto& [cue, others] : std::vector<std::pair<std::string, std::vector<std::string>>>{
             {"N6", {"N2", "N7"}}, {"N7", {"N2", "N6"}}}) {
        for (const auto& obs : partial_observations(others)) {
            auto with = obs;
            with[cue] = "true";
            EXPECT_GE(suspicion_probability(folk, with), suspicion_probability(folk, obs));
        }
    }
}

TEST_F(DefaultFolk, AttributionSimpleCases) {
    EXPECT_EQ(attribute_basis(folk, {}), std::nullopt);
    EXPECT_EQ(attribute_basis(folk, {{"N6", "false"}, {"N7", "false"}}), std::nullopt);
    EXPECT_EQ(attribute_basis(folk, {{"N6", "true"}}), "N6");
    EXPECT_EQ(attribute_basis(folk, {{"N7", "true"}}), "N7");
}

TEST_F(DefaultFolk, AttributionOfBothCuesPinned) {
    Assignment obs{{"N6", "true"}, {"N7", "true"}};
    const double base = (*oracle::posterior(spec, obs, "N4"))[0];
    const double drop6 = base - (*oracle::posterior(spec, {{"N6", "false"}, {"N7", "true"}}, "N4"))[0];
    const double drop7 = base - (*oracle::posterior(spec, {{"N6", "true"}, {"N7", "false"}}, "N4"))[0];
    EXPECT_NEAR(drop6, 0.61776203998975887, 1e-12);
    EXPECT_NEAR(drop7, 0.69374049288028705, 1e-12);
    EXPECT_EQ(attribute_basis(folk, obs), "N7");
}

TEST_F(DefaultFolk, AttributionOfFullPatternsPinned) {
    // Largest single-flip drops, from the oracle on the shipped defaults.
    EXPECT_EQ(attribute_basis(folk, {{"N2", "true"}, {"N6", "true"}, {"N7", "true"}}), "N2");
    EXPECT_EQ(attribute_basis(folk, {{"N2", "true"}, {"N6", "true"}, {"N7", "false"}}), "N6");
    EXPECT_EQ(attribute_basis(folk, {{"N2", "true"}, {"N6", "false"}, {"N7", "true"}}), "N7");
    EXPECT_EQ(attribute_basis(folk, {{"N2", "false"}, {"N6", "true"}, {"N7", "true"}}), "N7");
    EXPECT_EQ(attribute_basis(folk, {{"N2", "false"}, {"N6", "false"}, {"N7", "false"}}), std::nullopt);
}

TEST_F(DefaultFolk, AttributionTiesGoToDeclarationOrder) {
    // Make N6 and N7 interchangeable; the earlier declared N6 must win.
    Cpt n7 = folk.network.cpt("N6");
    n7.child = "N7";
    FolkTheory twin = folk;
    twin.network = set_contingency(folk.network, "N7", n7);
    EXPECT_EQ(attribute_basis(twin, {{"N6", "true"}, {"N7", "true"}}), "N6");
    EXPECT_EQ(attribute_basis(twin, {{"N7", "true"}, {"N6", "true"}}), "N6");
}

TEST_F(DefaultFolk, SuspicionNodeMustBeLatent) {
    auto s = spec;
    for (auto& nd : s.nodes)
        if (nd.id == "N4") nd.visibility = Visibility::Observable;
    try {
        make_folk_theory(build_network(s));
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotLatent);
    }
}

TEST_F(DefaultFolk, WorldShadowbansAreRarerThanBelieved) {
    auto world = default_world_model();
    EXPECT_TRUE(validate(world.network).ok());
    const double believed = (*oracle::posterior(spec, {}, "N4"))[0];
    const double actual = (*oracle::posterior(world.network.to_spec(), {}, "N4"))[0];
    EXPECT_NEAR(actual, 0.0059745037599999978, 1e-12);
    EXPECT_LT(actual, believed);
}

TEST(NoisyOr, TableAndExtractionRoundTrip) {
    NoisyOr p{0.1, {"B", "C"}, {0.7, 0.4}, "A"};
    auto t = noisy_or_table("X", {"A", "B", "C"}, p);
    ASSERT_EQ(t.rows.size(), 8u);
    EXPECT_DOUBLE_EQ(t.rows[0][0], clean_probability(1 - 0.9 * 0.3 * 0.6));  // A, B, C present
    EXPECT_DOUBLE_EQ(t.rows[3][0], 0.1);                                      // only A present
    for (std::size_t r = 4; r < 8; ++r) EXPECT_EQ(t.rows[r][0], 0.0);         // guard absent

    NetworkSpec s;
    for (const char* id : {"A", "B", "C", "X"}) s.nodes.push_back({id, id, {"y", "n"}, Visibility::Latent, false});
    s.edges = {{"E1", "A", "X", false}, {"E2", "B", "X", false}, {"E3", "C", "X", false}};
    s.cpts = {prior_table("A", 0.5), prior_table("B", 0.5), prior_table("C", 0.5), t};
    auto back = extract_noisy_or(build_network(s), "X");
    ASSERT_TRUE(back);
    EXPECT_EQ(back->guard, std::optional<std::string>("A"));
    EXPECT_NEAR(back->leak, 0.1, 1e-12);
    EXPECT_NEAR(back->weight("B"), 0.7, 1e-12);
    EXPECT_NEAR(back->weight("C"), 0.4, 1e-12);
}

TEST(NoisyOr, ShippedTablesAreNoisyOr) {
    auto folk = default_folk_theory();
    for (const char* id : {"N4", "N6", "N7"}) EXPECT_TRUE(extract_noisy_or(folk.network, id)) << id;
    EXPECT_EQ(extract_noisy_or(folk.network, "N4")->guard, std::optional<std::string>("N1"));
    EXPECT_FALSE(extract_noisy_or(folk.network, "N6")->guard);
}
