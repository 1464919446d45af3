#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "graphsim/generators.hpp"
#include "graphsim/json_io.hpp"

using namespace graphsim;

TEST(Er, Extremes) {
  EXPECT_EQ(er(40, 0.0, 1).edge_count(), 0u);
  EXPECT_EQ(er(40, 1.0, 1).edge_count(), 40u * 39u / 2u);
  EXPECT_THROW(er(10, 1.5, 1), InputError);
}

TEST(Er, MeanWithinThreeSigma) {
  const double pairs = 1000.0 * 999.0 / 2.0;
  const double mean = pairs * 0.01, sd = std::sqrt(pairs * 0.01 * 0.99);
  const auto m = static_cast<double>(er(1000, 0.01, 7).edge_count());
  EXPECT_LT(std::abs(m - mean), 3 * sd);
}

TEST(Er, PairsAreUniform) {
  // Chi-square over the 10 nodes' degrees of a small dense graph, pooled
  // over seeds: every pair must be equally likely, including the last row.
  std::vector<double> deg(10, 0.0);
  for (std::uint64_t s = 0; s < 400; ++s) {
    const auto g = er(10, 0.3, s);
    for (NodeId v = 0; v < 10; ++v) deg[v] += static_cast<double>(g.degree(v));
  }
  const double expected = 400 * 9 * 0.3;
  double chi = 0.0;
  for (double d : deg) chi += (d - expected) * (d - expected) / expected;
  EXPECT_LT(chi, 27.9);  // 9 dof, p = 0.001
}

TEST(Er, Deterministic) {
  EXPECT_EQ(er(500, 0.02, 3).edges(), er(500, 0.02, 3).edges());
  EXPECT_NE(er(500, 0.02, 3).edges(), er(500, 0.02, 4).edges());
}

TEST(Ba, EdgeCountAndValidity) {
  EXPECT_EQ(ba(1000, 2, 1).edge_count(), 2u * 998u + 1u);
  EXPECT_EQ(ba(5, 4, 1).edge_count(), 3u + 4u);
  EXPECT_THROW(ba(5, 5, 1), InputError);
  EXPECT_THROW(ba(5, 0, 1), InputError);
}

TEST(Ba, HeavyTail) {
  const auto g = ba(10000, 2, 5);
  std::vector<std::size_t> d;
  for (NodeId v = 0; v < g.node_count(); ++v) d.push_back(g.degree(v));
  std::sort(d.begin(), d.end());
  EXPECT_GE(d.back(), 10 * d[d.size() / 2]);
}

TEST(Plant, CliqueWithoutNoise) {
  const auto p = plant(300, 0.0, {{StructureKind::Clique, 30, 0}}, 1);
  EXPECT_EQ(p.graph.edge_count(), 435u);
  EXPECT_EQ(p.truth[0].edges[0], 435u);
}

TEST(Plant, BicliqueWithoutNoise) {
  const auto p = plant(100, 0.0, {{StructureKind::Biclique, 8, 12}}, 1);
  EXPECT_EQ(p.graph.edge_count(), 96u);
  EXPECT_EQ(p.truth[0].edges[2], 96u);
}

TEST(Plant, StarcliqueAndStarWithoutNoise) {
  const auto p = plant(100, 0.0, {{StructureKind::Starclique, 5, 10}, {StructureKind::Star, 20, 0}}, 1);
  EXPECT_EQ(p.graph.edge_count(), 10u + 50u + 20u);
  EXPECT_EQ(p.truth[0].edges[0], 10u);
  EXPECT_EQ(p.truth[0].edges[1], 0u);
  EXPECT_EQ(p.truth[1].second.size(), 20u);
}

TEST(Plant, NoiseNeverRemovesOrAddsInsideStructures) {
  const auto p = plant(400, 0.2,
                       {{StructureKind::Clique, 12, 0},
                        {StructureKind::Star, 15, 0},
                        {StructureKind::Biclique, 4, 7},
                        {StructureKind::Starclique, 4, 9}},
                       9);
  const auto& t = p.truth;
  EXPECT_EQ(t[0].edges[0], 66u);
  EXPECT_EQ(t[1].edges[0], 0u);  // spokes stay independent
  EXPECT_EQ(t[2].edges[0] + t[2].edges[1], 0u);
  EXPECT_EQ(t[2].edges[2], 28u);
  EXPECT_EQ(t[3].edges[0], 6u);
  EXPECT_EQ(t[3].edges[1], 0u);
  EXPECT_EQ(t[3].edges[2], 36u);
  std::set<NodeId> all;
  std::size_t total = 0;
  for (const auto& s : t) {
    const auto nodes = s.nodes();
    all.insert(nodes.begin(), nodes.end());
    total += nodes.size();
  }
  EXPECT_EQ(all.size(), total);
}

TEST(Plant, Errors) {
  EXPECT_THROW(plant(10, 0.0, {{StructureKind::Clique, 11, 0}}, 1), InputError);
  EXPECT_THROW(plant(20, 0.0, {{StructureKind::Clique, 11, 0}, {StructureKind::Clique, 11, 0}}, 1), InputError);
  EXPECT_NO_THROW(plant(20, 0.0, {{StructureKind::Clique, 11, 0}, {StructureKind::Clique, 11, 0}}, 1, true));
  EXPECT_THROW(plant(20, 0.0, {{StructureKind::Biclique, 3, 0}}, 1), InputError);
}

TEST(Grid, FifteenCompositions) {
  const auto c = kind_compositions();
  ASSERT_EQ(c.size(), 15u);
  std::set<std::vector<StructureKind>> unique(c.begin(), c.end());
  EXPECT_EQ(unique.size(), 15u);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i - 1].size(), c[i].size());
  EXPECT_EQ(c.back().size(), 4u);
}

TEST(Grid, SpecsScaleWithSize) {
  const auto specs = composition_specs({StructureKind::Clique, StructureKind::Star, StructureKind::Biclique}, 2000, 100);
  ASSERT_EQ(specs.size(), 99u);  // floor(100 / 3) of each
  EXPECT_EQ(specs.front().a, 24u);
  EXPECT_EQ(specs[33].a, 40u);
  EXPECT_EQ(specs.back().a, 10u);
  EXPECT_EQ(specs.back().b, 20u);
}

TEST(Json, TruthUsesLabels) {
  const auto p = plant(50, 0.0, {{StructureKind::Star, 5, 0}}, 2);
  const auto j = to_json(p.truth, p.graph);
  EXPECT_EQ(j[0]["kind"], "star");
  EXPECT_EQ(j[0]["spokes"].size(), 5u);
  EXPECT_TRUE(j[0]["hub"].is_string());
}
