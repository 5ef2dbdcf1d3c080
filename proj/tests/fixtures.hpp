#pragma once
// Small hand-built models shared by the unit tests.

#include <string>
#include <vector>

#include "ftm/network.hpp"

namespace fixtures {

inline ftm::NodeDef binary(const std::string& id, ftm::Visibility v = ftm::Visibility::Latent, bool intervenable = true) {
    return {id, id, {"t", "f"}, v, intervenable};
}

// A -> B with P(A=t)=pa, P(B=t|A=t)=pbt, P(B=t|A=f)=pbf.
inline ftm::NetworkSpec chain(double pa, double pbt, double pbf) {
    ftm::NetworkSpec s;
    s.name = "chain";
    s.nodes = {binary("A"), binary("B")};
    s.edges = {{"E1", "A", "B", false}};
    s.cpts = {{"A", {}, {{pa, 1 - pa}}}, {"B", {"A"}, {{pbt, 1 - pbt}, {pbf, 1 - pbf}}}};
    return s;
}

// A -> B -> C, plus D as an isolated root.
inline ftm::NetworkSpec chain3() {
    ftm::NetworkSpec s;
    s.name = "chain3";
    s.nodes = {binary("A"), binary("B"), binary("C"), binary("D")};
    s.edges = {{"E1", "A", "B", false}, {"E2", "B", "C", false}};
    s.cpts = {{"A", {}, {{0.3, 0.7}}},
              {"B", {"A"}, {{0.9, 0.1}, {0.2, 0.8}}},
              {"C", {"B"}, {{0.6, 0.4}, {0.05, 0.95}}},
              {"D", {}, {{0.4, 0.6}}}};
    return s;
}

}  // namespace fixtures
