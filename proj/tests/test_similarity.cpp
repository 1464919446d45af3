#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "graphsim/codec.hpp"
#include "graphsim/generators.hpp"
#include "graphsim/similarity.hpp"

using namespace graphsim;

namespace {

Structure make(StructureKind kind, NodeSet first, NodeSet second = {}) {
  Structure s;
  s.kind = kind;
  s.first = make_node_set(std::move(first));
  s.second = make_node_set(std::move(second));
  return s;
}

NodeSet range(NodeId from, NodeId to) {
  NodeSet out;
  for (NodeId v = from; v < to; ++v) out.push_back(v);
  return out;
}

Model random_model(std::mt19937_64& rng, std::uint64_t n) {
  Model m;
  m.n = n;
  m.m = std::uniform_int_distribution<std::uint64_t>(n, 4 * n)(rng);
  const auto count = std::uniform_int_distribution<int>(1, 6)(rng);
  NodeId next = 0;
  for (int i = 0; i < count; ++i) {
    const auto kind = kAllKinds[std::uniform_int_distribution<std::size_t>(0, 3)(rng)];
    const auto a = std::uniform_int_distribution<NodeId>(3, 10)(rng);
    const auto b = std::uniform_int_distribution<NodeId>(3, 10)(rng);
    Structure s;
    s.kind = kind;
    if (kind == StructureKind::Clique) {
      s.first = range(next, next + a);
    } else if (kind == StructureKind::Star) {
      s.first = {next};
      s.second = range(next + 1, next + 1 + b);
    } else {
      s.first = range(next, next + a);
      s.second = range(next + a, next + a + b);
    }
    next += a + b + 1;
    const Shape sh = s.shape();
    for (std::size_t j = 0; j < edge_slots(kind); ++j) {
      s.edges[j] = std::uniform_int_distribution<std::uint64_t>(sh.edge_max(j) / 2, sh.edge_max(j))(rng);
    }
    m.structures.push_back(s);
  }
  return m;
}

}  // namespace

TEST(Nmd, IdenticalModelsGiveZero) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(rng, 500);
    const auto r = nmd(m, m);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_FALSE(std::isnan(r.raw));
  }
}

TEST(Nmd, DisjointVocabulariesGiveOne) {
  Model m1{100, 300, {make(StructureKind::Clique, range(0, 8)), make(StructureKind::Clique, range(8, 14))}};
  Model m2{100, 300, {make(StructureKind::Star, {0}, range(1, 20))}};
  for (auto* s : {&m1, &m2}) {
    for (auto& x : s->structures) x.edges[0] = x.shape().edge_max(0);
  }
  const auto r = nmd(m1, m2);
  EXPECT_EQ(r.value, 1.0);
  // raw is still reported.
  const double expected_raw =
      (r.common_bits + r.transform_bits - std::min(r.model1_bits, r.model2_bits)) / std::max(r.model1_bits, r.model2_bits);
  EXPECT_DOUBLE_EQ(r.raw, expected_raw);
}

TEST(Nmd, FormulaFromIndependentLengths) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m1 = random_model(rng, 400);
    const auto m2 = random_model(rng, 300);
    const auto al = align_models(m1, m2);
    const auto r = nmd(al, m1, m2);
    const double l1 = model_length(m1, false), l2 = model_length(m2, false);
    const double num = common_model_length(al.common) + transform_length(al.common, al.transform, false);
    const double raw = (num - std::min(l1, l2)) / std::max(l1, l2);
    EXPECT_NEAR(r.raw, raw, 1e-12);
    EXPECT_EQ(r.clamped, raw > 1.0);
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, 1.0);
    if (!al.common.shared.empty() && !is_identity(al)) {
      EXPECT_DOUBLE_EQ(r.value, std::clamp(raw, 0.0, 1.0));
    }
  }
}

TEST(Nmd, ClampFlagWhenRawExceedsOne) {
  // One tiny shared clique next to much larger unmatched structures: the
  // common model plus the change set costs more than the larger model.
  Model m1{1000, 5000, {make(StructureKind::Clique, range(0, 3)), make(StructureKind::Star, {3}, range(4, 40))}};
  Model m2{20, 40, {make(StructureKind::Clique, range(0, 3)), make(StructureKind::Biclique, range(3, 6), range(6, 15))}};
  for (auto* m : {&m1, &m2}) {
    for (auto& s : m->structures) {
      for (std::size_t j = 0; j < edge_slots(s.kind); ++j) s.edges[j] = s.shape().edge_max(j);
    }
  }
  const auto r = nmd(m1, m2);
  EXPECT_GT(r.raw, 1.0);
  EXPECT_TRUE(r.clamped);
  EXPECT_EQ(r.value, 1.0);
}

TEST(Nmd, SymmetricOnRandomPairs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m1 = random_model(rng, std::uniform_int_distribution<std::uint64_t>(100, 900)(rng));
    const auto m2 = random_model(rng, std::uniform_int_distribution<std::uint64_t>(100, 900)(rng));
    const auto x = nmd(m1, m2), y = nmd(m2, m1);
    EXPECT_EQ(x.value, y.value);
    EXPECT_EQ(x.raw, y.raw);
    EXPECT_EQ(x.clamped, y.clamped);
  }
}

TEST(Nmd, EqualEmptyModelsGiveZero) {
  // An empty model still pays for n, m and the structure count.
  Model m1{10, 5, {}};
  Model m2{10, 5, {}};
  const auto r = nmd(m1, m2);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Spearman, HandComputed) {
  // d = (1, -1, 1, -1, 0), sum d^2 = 4, rho = 1 - 6*4 / (5*24) = 0.8.
  EXPECT_NEAR(spearman({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}), 0.8, 1e-12);
  EXPECT_NEAR(spearman({1, 2, 3}, {3, 2, 1}), -1.0, 1e-12);
}

TEST(Spearman, TiesUseAverageRanks) {
  // Ranks x = (1.5, 1.5, 3), y = (1, 2, 3); Pearson of the ranks.
  const double rx[] = {1.5, 1.5, 3}, ry[] = {1, 2, 3};
  double mx = 2, my = 2, sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  EXPECT_NEAR(spearman({7, 7, 9}, {1, 2, 3}), sxy / std::sqrt(sxx * syy), 1e-12);
  EXPECT_THROW(spearman({1, 1, 1}, {1, 2, 3}), DomainError);
}

TEST(Matrix, CopiesAreAtDistanceZero) {
  const auto p = plant(300, 0.01, {{StructureKind::Clique, 15, 0}, {StructureKind::Star, 25, 0}}, 5);
  MatrixOptions opt;
  const auto m = pairwise_matrix({"a", "b"}, std::vector<Graph>{p.graph, p.graph}, opt);
  EXPECT_EQ(m.cells[0][1].value, 0.0);
  EXPECT_EQ(m.cells[1][0].value, 0.0);
}

TEST(Matrix, ThreeGraphsThreePairs) {
  std::vector<Graph> graphs;
  for (std::uint64_t s = 0; s < 3; ++s) {
    graphs.push_back(plant(200 + 50 * s, 0.01, {{StructureKind::Clique, 12, 0}, {StructureKind::Star, 20, 0}}, s).graph);
  }
  MatrixOptions opt;
  opt.jobs = 2;
  const auto m = pairwise_matrix({"x", "y", "z"}, graphs, opt);
  const auto j = to_json(m);
  EXPECT_EQ(j["components"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m.cells[i][i].value, 0.0);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(m.cells[i][k].value, m.cells[k][i].value);
  }
  std::ostringstream csv;
  write_csv(csv, m);
  EXPECT_EQ(csv.str().substr(0, 12), "graph,x,y,z\n");
  EXPECT_THROW(pairwise_matrix({"x"}, std::vector<Graph>{graphs[0]}, opt), InputError);
}

TEST(Matrix, DriftingSequenceMovesAway) {
  // Each step replaces one more planted clique by a star.
  std::vector<Model> models;
  for (int k = 0; k <= 5; ++k) {
    std::vector<PlantSpec> specs;
    for (int i = 0; i < 5; ++i) {
      specs.push_back(i < k ? PlantSpec{StructureKind::Star, 30, 0} : PlantSpec{StructureKind::Clique, 15, 0});
    }
    const auto p = plant(600, 0.003, specs, 40 + static_cast<std::uint64_t>(k));
    models.push_back(summarize(p.graph).model);
  }
  std::vector<double> steps, d;
  for (std::size_t k = 1; k < models.size(); ++k) {
    steps.push_back(static_cast<double>(k));
    d.push_back(nmd(models[0], models[k]).value);
  }
  EXPECT_GT(spearman(steps, d), 0.8);
}

TEST(Cache, ReusesStoredModel) {
  const auto dir = std::filesystem::temp_directory_path() / "graphsim_cache_test";
  std::filesystem::remove_all(dir);
  ModelCache cache(dir.string());
  const auto g = plant(200, 0.01, {{StructureKind::Clique, 12, 0}}, 9).graph;
  const auto first = cache.summarize(g, {});
  EXPECT_TRUE(std::filesystem::exists(dir / (ModelCache::key(g, {}) + ".model.json")));
  const auto second = cache.summarize(g, {});
  EXPECT_EQ(to_json(first.model), to_json(second.model));
  SummarizerConfig other;
  other.max_rejections = 7;
  EXPECT_NE(ModelCache::key(g, {}), ModelCache::key(g, other));
  std::filesystem::remove_all(dir);
}

TEST(Describe, JsonReportsCallerOrder) {
  const auto g1 = plant(200, 0.01, {{StructureKind::Clique, 12, 0}, {StructureKind::Star, 20, 0}}, 1);
  const auto g2 = plant(400, 0.01, {{StructureKind::Clique, 14, 0}, {StructureKind::Biclique, 4, 8}}, 2);
  Model m1{g1.graph.node_count(), g1.graph.edge_count(), g1.truth};
  Model m2{g2.graph.node_count(), g2.graph.edge_count(), g2.truth};
  const auto d = describe(g1.graph, g2.graph, m1, m2);
  const auto j = to_json(d, m1, m2, &g1.graph, &g2.graph);
  EXPECT_TRUE(j["header"]["swapped"].get<bool>());
  ASSERT_EQ(j["shared"].size(), 1u);
  EXPECT_EQ(j["shared"][0]["kind"], "clique");
  EXPECT_EQ(j["unmatched_1"].size(), 1u);
  EXPECT_EQ(j["unmatched_1"][0]["kind"], "star");
  EXPECT_EQ(j["unmatched_2"][0]["kind"], "biclique");
  EXPECT_NEAR(j["lengths"]["objective"].get<double>(), d.objective(), 1e-9);
  EXPECT_DOUBLE_EQ(j["nmd"]["value"].get<double>(), nmd(m1, m2).value);
}
