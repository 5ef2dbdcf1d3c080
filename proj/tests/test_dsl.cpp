#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ftm/dsl.hpp"
#include "ftm/model_io.hpp"
#include "oracle.hpp"

using namespace ftm;

namespace {

const char* kMinimal = R"(model tiny
suspicion B t

node A t,f latent intervenable "Cause"
node B t,f latent fixed "Effect \"quoted\""
edge E1 A B
cpt A : 0.25 0.75
cpt B | A : t= 0.9 0.1
cpt B | A : f= 0.2 0.8
)";

std::vector<ErrorKind> kinds(const ParseResult& r) {
    std::vector<ErrorKind> out;
    for (const auto& d : r.diagnostics) out.push_back(d.kind);
    return out;
}

bool has(const ParseResult& r, ErrorKind k) {
    auto ks = kinds(r);
    return std::find(ks.begin(), ks.end(), k) != ks.end();
}

}  // namespace

TEST(Dsl, ParsesMinimalModel) {
    auto r = parse_model(kMinimal);
    ASSERT_TRUE(r.ok()) << r.diagnostics.front().str();
    EXPECT_EQ(r.spec.name, "tiny");
    ASSERT_EQ(r.spec.nodes.size(), 2u);
    EXPECT_EQ(r.spec.nodes[1].label, "Effect \"quoted\"");
    EXPECT_TRUE(r.spec.nodes[0].intervenable);
    ASSERT_TRUE(r.spec.suspicion);
    EXPECT_EQ(r.spec.suspicion->node, "B");
    ASSERT_EQ(r.spec.cpts.size(), 2u);
    EXPECT_EQ(r.spec.cpts[1].rows, (std::vector<std::vector<double>>{{0.9, 0.1}, {0.2, 0.8}}));
    EXPECT_NO_THROW(build_network(r.spec));
}

TEST(Dsl, RowsMayAppearInAnyOrder) {
    std::string text = kMinimal;
    auto a = text.find("cpt B | A : t="), b = text.find("cpt B | A : f=");
    std::string row_t = text.substr(a, b - a), row_f = text.substr(b);
    auto swapped = text.substr(0, a) + row_f + row_t;
    auto r = parse_model(swapped);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.spec.cpts[1].rows, (std::vector<std::vector<double>>{{0.9, 0.1}, {0.2, 0.8}}));
}

TEST(Dsl, ShippedModelShape) {
    auto r = parse_model(read_file(data_dir() / "default-folk.ftm"));
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.spec.nodes.size(), 7u);
    ASSERT_EQ(r.spec.edges.size(), 8u);
    const auto& e8 = r.spec.edges.back();
    EXPECT_EQ(e8.id, "E8");
    EXPECT_EQ(e8.from, "N7");
    EXPECT_EQ(e8.to, "N2");
    EXPECT_TRUE(e8.excluded);
    for (std::size_t i = 0; i + 1 < r.spec.edges.size(); ++i) EXPECT_FALSE(r.spec.edges[i].excluded);
}

TEST(Dsl, ShippedFilesRoundTripByteForByte) {
    for (const char* f : {"default-folk.ftm", "default-world.ftm", "initial-folk.ftm", "initial-world.ftm"}) {
        const auto text = read_file(data_dir() / f);
        const auto spec = parse_or_throw(text);
        const auto once = serialize_model(spec);
        // The calibrated defaults are written by the serializer; the starting models carry comments.
        if (std::string(f).rfind("default-", 0) == 0) EXPECT_EQ(once, text) << f;
        const auto again = parse_or_throw(once);
        EXPECT_TRUE(same_structure(spec, again)) << f;
        EXPECT_EQ(serialize_model(again), once) << f;
    }
}

TEST(Dsl, RandomSpecsRoundTrip) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        oracle::RandomOptions o;
        o.max_states = 3;
        auto spec = oracle::random_spec(seed, o);
        spec.name = "random-" + std::to_string(seed);
        const auto text = serialize_model(spec);
        auto r = parse_model(text);
        ASSERT_TRUE(r.ok()) << "seed " << seed << ": " << r.diagnostics.front().str();
        EXPECT_TRUE(same_structure(spec, r.spec)) << "seed " << seed;
        EXPECT_EQ(serialize_model(r.spec), text) << "seed " << seed;
        EXPECT_EQ(serialize_model(build_network(r.spec)), text) << "seed " << seed;
    }
}

TEST(Dsl, SerializationIgnoresDeclarationOrderOfEdgesAndTables) {
    auto spec = parse_or_throw(read_file(data_dir() / "default-world.ftm"));
    const auto want = serialize_model(spec);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 10; ++k) {
        auto p = spec;
        std::shuffle(p.edges.begin(), p.edges.end(), rng);
        std::shuffle(p.cpts.begin(), p.cpts.end(), rng);
        EXPECT_EQ(serialize_model(p), want);
    }
}

TEST(Dsl, ReorderedParentsCanonicalize) {
    auto spec = parse_or_throw(kMinimal);
    spec.nodes.push_back({"C", "Other", {"t", "f"}, Visibility::Latent, false});
    spec.edges.push_back({"E2", "C", "B", false});
    spec.cpts.push_back({"C", {}, {{0.5, 0.5}}});
    spec.cpts[1] = {"B", {"A", "C"}, {{0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}, {0.4, 0.6}}};
    auto flipped = spec;
    flipped.cpts[1] = {"B", {"C", "A"}, {{0.1, 0.9}, {0.3, 0.7}, {0.2, 0.8}, {0.4, 0.6}}};
    EXPECT_EQ(serialize_model(spec), serialize_model(flipped));
    EXPECT_TRUE(same_structure(spec, flipped));
}

TEST(Dsl, DiagnosticsCarryLineAndColumn) {
    auto r = parse_model("model m\nnode A t,f latent fixed \"a\"\ncpt A : 0.5 zero\n");
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].kind, ErrorKind::SyntaxError);
    EXPECT_EQ(r.diagnostics[0].line, 3u);
    EXPECT_EQ(r.diagnostics[0].column, 13u);
    EXPECT_EQ(r.diagnostics[0].str().rfind("3:13: ", 0), 0u);
}

TEST(Dsl, ShapeMismatchNamesExpectedRowCount) {
    std::string text = kMinimal;
    text.erase(text.find("cpt B | A : f="));
    auto r = parse_model(text);
    ASSERT_EQ(kinds(r), (std::vector<ErrorKind>{ErrorKind::CptShapeMismatch}));
    EXPECT_NE(r.diagnostics[0].message.find("expected 2"), std::string::npos);

    auto wide = parse_model("model m\nnode A t,f latent fixed \"a\"\ncpt A : 0.2 0.3 0.5\n");
    ASSERT_EQ(kinds(wide), (std::vector<ErrorKind>{ErrorKind::CptShapeMismatch}));
    EXPECT_EQ(wide.diagnostics[0].line, 3u);
}

TEST(Dsl, EveryErrorIsReported) {
    // Five independent mistakes on five lines.
    const char* text = R"(model m
node A t,f latent fixed "a"
node A t,f latent fixed "again"
node B t,f latent sometimes "b"
edge E1 A Z
cpt A : 0.5 1.5
cpt Q : 1 0
)";
    auto r = parse_model(text);
    EXPECT_GE(r.diagnostics.size(), 5u);
    EXPECT_TRUE(has(r, ErrorKind::DuplicateDefinition));
    EXPECT_TRUE(has(r, ErrorKind::SyntaxError));
    EXPECT_TRUE(has(r, ErrorKind::UnknownNodeReference));
    EXPECT_TRUE(has(r, ErrorKind::BadProbability));
    std::set<std::size_t> lines;
    for (const auto& d : r.diagnostics) lines.insert(d.line);
    EXPECT_TRUE(lines.count(3) && lines.count(4) && lines.count(5) && lines.count(6) && lines.count(7));
    EXPECT_TRUE(std::is_sorted(r.diagnostics.begin(), r.diagnostics.end(), [](const auto& a, const auto& b) {
        return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    }));
}

TEST(Dsl, RowSumAndRangeAreBadProbability) {
    auto sum = parse_model("model m\nnode A t,f latent fixed \"a\"\ncpt A : 0.5 0.4\n");
    EXPECT_EQ(kinds(sum), (std::vector<ErrorKind>{ErrorKind::BadProbability}));
    auto range = parse_model("model m\nnode A t,f latent fixed \"a\"\ncpt A : -0.5 1.5\n");
    EXPECT_EQ(kinds(range), (std::vector<ErrorKind>{ErrorKind::BadProbability, ErrorKind::BadProbability}));
}

TEST(Dsl, MissingModelLineAndUnterminatedString) {
    auto r = parse_model("node A t,f latent fixed \"a\ncpt A : 1 0\n");
    EXPECT_TRUE(has(r, ErrorKind::SyntaxError));
    EXPECT_EQ(r.diagnostics.front().line, 1u);
    auto nomodel = parse_model("node A t,f latent fixed \"a\"\ncpt A : 1 0\n");
    EXPECT_EQ(kinds(nomodel), (std::vector<ErrorKind>{ErrorKind::SyntaxError}));
}

TEST(Dsl, UnknownSuspicionTarget) {
    std::string text = kMinimal;
    text.replace(text.find("suspicion B t"), 13, "suspicion Z t");
    EXPECT_EQ(kinds(parse_model(text)), (std::vector<ErrorKind>{ErrorKind::UnknownNodeReference}));
}

TEST(Dsl, MissingTable) {
    auto r = parse_model("model m\nnode A t,f latent fixed \"a\"\n");
    EXPECT_EQ(kinds(r), (std::vector<ErrorKind>{ErrorKind::MissingCpt}));
    EXPECT_EQ(r.diagnostics[0].line, 2u);
}

TEST(Dsl, ParseOrThrowCollectsFindings) {
    try {
        parse_or_throw("model m\ncpt A : 1 0\nfoo\n");
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_GE(e.findings().size(), 2u);
    }
}

TEST(Dsl, CptFragment) {
    auto net = build_network(parse_or_throw(kMinimal));
    auto c = parse_cpt_fragment("cpt B | A : f= 0.5 0.5\ncpt B | A : t= 1 0\n", net);
    EXPECT_EQ(c.child, "B");
    EXPECT_EQ(c.rows, (std::vector<std::vector<double>>{{1.0, 0.0}, {0.5, 0.5}}));
    EXPECT_THROW(parse_cpt_fragment("cpt B | A : t= 1 0\n", net), ModelError);
    EXPECT_THROW(parse_cpt_fragment("cpt A : 0.5 0.5\ncpt B | A : t= 1 0\ncpt B | A : f= 1 0\n", net), ModelError);
    EXPECT_THROW(parse_cpt_fragment("cpt Z : 0.5 0.5\n", net), ModelError);
}

TEST(Dsl, ProbabilityFormattingIsShortestRoundTrip) {
    for (double v : {0.1, 0.2, 1.0 / 3.0, 0.0343, 1e-17, 0.0, 1.0}) {
        auto s = dsl::format_probability(v);
        EXPECT_EQ(*dsl::parse_probability(s), v) << s;
    }
    EXPECT_EQ(dsl::format_probability(0.1), "0.1");
    EXPECT_EQ(dsl::format_probability(1.0), "1");
}
