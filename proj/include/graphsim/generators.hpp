#pragma once

// Seeded synthetic graphs: Erdős–Rényi, Barabási–Albert, and graphs with
// planted structures on top of ER noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "graphsim/error.hpp"
#include "graphsim/graph.hpp"
#include "graphsim/structure.hpp"

namespace graphsim {

namespace detail {

// Calls f(u, v) for every pair u < v kept by independent p-coin flips, using
// geometric skips over the row-major pair order.
template <typename F>
void sample_pairs(std::size_t n, double p, std::mt19937_64& rng, F&& f) {
  if (p <= 0.0 || n < 2) return;
  if (p >= 1.0) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) f(u, v);
    }
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::int64_t v = -1;
  std::int64_t u = 1;  // pairs (v, u) with v < u, u ascending
  const auto nn = static_cast<std::int64_t>(n);
  for (;;) {
    const double r = unit(rng);
    v += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (v >= u && u < nn) {
      v -= u;
      ++u;
    }
    if (u >= nn) break;
    f(static_cast<NodeId>(v), static_cast<NodeId>(u));
  }
}

}  // namespace detail

inline Graph er(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  detail::sample_pairs(n, p, rng, [&](NodeId u, NodeId v) { edges.emplace_back(u, v); });
  return Graph::from_edges(n, std::move(edges));
}

// Preferential attachment. The first k nodes form a path; every later node
// attaches to k distinct earlier nodes drawn with probability proportional
// to degree, so the first arrival connects to the whole path and
// m = (k - 1) + k (n - k).
inline Graph ba(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k >= n) throw InputError("attachment count k must satisfy 1 <= k < n");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<NodeId> ends;  // every node once per incident edge
  for (NodeId v = 1; v < k; ++v) {
    edges.emplace_back(v - 1, v);
    ends.push_back(v - 1);
    ends.push_back(v);
  }
  std::vector<NodeId> targets;
  for (NodeId t = static_cast<NodeId>(k); t < n; ++t) {
    targets.clear();
    std::unordered_set<NodeId> chosen;
    while (targets.size() < k) {
      NodeId c;
      if (ends.empty()) {
        c = static_cast<NodeId>(std::uniform_int_distribution<std::size_t>(0, t - 1)(rng));
      } else {
        c = ends[std::uniform_int_distribution<std::size_t>(0, ends.size() - 1)(rng)];
      }
      if (chosen.insert(c).second) targets.push_back(c);
    }
    for (NodeId c : targets) {
      edges.emplace_back(c, t);
      ends.push_back(c);
      ends.push_back(t);
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

// One planted structure. `a` is the clique size, the number of star spokes,
// or the left/core size; `b` is the right/periphery size of two-sided kinds.
struct PlantSpec {
  StructureKind kind = StructureKind::Clique;
  std::size_t a = 0;
  std::size_t b = 0;

  std::size_t size() const {
    switch (kind) {
      case StructureKind::Clique: return a;
      case StructureKind::Star: return a + 1;
      default: return a + b;
    }
  }
};

struct PlantedGraph {
  Graph graph;
  std::vector<Structure> truth;  // counts measured on `graph`
};

// Planted structures on disjoint random node sets (or independent random
// sets with `allow_overlap`), plus ER(noise_p) edges on every pair that does
// not lie inside a single planted structure's node set.
inline PlantedGraph plant(std::size_t n, double noise_p, const std::vector<PlantSpec>& specs, std::uint64_t seed,
                          bool allow_overlap = false) {
  if (!(noise_p >= 0.0 && noise_p <= 1.0)) throw InputError("noise probability must lie in [0, 1]");
  std::size_t total = 0;
  for (const auto& s : specs) {
    if (s.a < 1 || (node_slots(s.kind) == 2 && s.b < 1)) throw InputError("planted structure with an empty side");
    if (s.size() > n) throw InputError("planted structure larger than the graph");
    total += s.size();
  }
  if (!allow_overlap && total > n) throw InputError("planted structures do not fit disjointly into the graph");

  std::mt19937_64 rng(seed);
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::vector<std::uint32_t>> member_of(n);
  std::vector<std::pair<NodeSet, NodeSet>> sides;
  std::size_t cursor = 0;
  for (std::uint32_t id = 0; id < specs.size(); ++id) {
    const auto& s = specs[id];
    if (allow_overlap) {
      std::shuffle(perm.begin(), perm.end(), rng);
      cursor = 0;
    }
    auto take = [&](std::size_t count) {
      NodeSet out(perm.begin() + static_cast<std::ptrdiff_t>(cursor),
                  perm.begin() + static_cast<std::ptrdiff_t>(cursor + count));
      cursor += count;
      return make_node_set(std::move(out));
    };
    NodeSet first, second;
    switch (s.kind) {
      case StructureKind::Clique: first = take(s.a); break;
      case StructureKind::Star:
        first = take(1);
        second = take(s.a);
        break;
      default:
        first = take(s.a);
        second = take(s.b);
        break;
    }
    if (s.kind == StructureKind::Clique || s.kind == StructureKind::Starclique) {
      for (std::size_t i = 0; i < first.size(); ++i) {
        for (std::size_t j = i + 1; j < first.size(); ++j) edges.emplace_back(first[i], first[j]);
      }
    }
    for (NodeId u : first) {
      for (NodeId v : second) edges.emplace_back(u, v);
    }
    for (NodeId v : first) member_of[v].push_back(id);
    for (NodeId v : second) member_of[v].push_back(id);
    sides.emplace_back(std::move(first), std::move(second));
  }

  auto same_structure = [&](NodeId u, NodeId v) {
    for (auto a : member_of[u]) {
      for (auto b : member_of[v]) {
        if (a == b) return true;
      }
    }
    return false;
  };
  detail::sample_pairs(n, noise_p, rng, [&](NodeId u, NodeId v) {
    if (!same_structure(u, v)) edges.emplace_back(u, v);
  });

  PlantedGraph out;
  out.graph = Graph::from_edges(n, std::move(edges));
  for (std::size_t id = 0; id < specs.size(); ++id) {
    const auto& [first, second] = sides[id];
    switch (specs[id].kind) {
      case StructureKind::Clique: out.truth.push_back(Structure::clique(out.graph, first)); break;
      case StructureKind::Star: out.truth.push_back(Structure::star(out.graph, first.front(), second)); break;
      case StructureKind::Biclique: out.truth.push_back(Structure::biclique(out.graph, first, second)); break;
      case StructureKind::Starclique: out.truth.push_back(Structure::starclique(out.graph, first, second)); break;
    }
  }
  return out;
}

// Structure sizes of the composition grid, in nodes per 1000 graph nodes.
struct GridScale {
  double clique = 12;
  double star_spokes = 20;
  double left = 5;
  double right = 10;
};

// Nonempty kind subsets in a fixed order: by size, then lexicographically by
// kind index.
inline std::vector<std::vector<StructureKind>> kind_compositions() {
  std::vector<std::vector<StructureKind>> out;
  for (unsigned mask = 1; mask < (1u << kKindCount); ++mask) {
    std::vector<StructureKind> kinds;
    for (std::size_t k = 0; k < kKindCount; ++k) {
      if (mask & (1u << k)) kinds.push_back(kAllKinds[k]);
    }
    out.push_back(std::move(kinds));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  return out;
}

// floor(total / |kinds|) structures of every kind in `kinds`, sized in
// proportion to n.
inline std::vector<PlantSpec> composition_specs(const std::vector<StructureKind>& kinds, std::size_t n,
                                                std::size_t total, const GridScale& scale = {}) {
  auto scaled = [n](double per_thousand) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(per_thousand * static_cast<double>(n) / 1000.0)));
  };
  std::vector<PlantSpec> out;
  const std::size_t each = kinds.empty() ? 0 : total / kinds.size();
  for (auto kind : kinds) {
    PlantSpec spec{kind, 0, 0};
    switch (kind) {
      case StructureKind::Clique: spec.a = scaled(scale.clique); break;
      case StructureKind::Star: spec.a = scaled(scale.star_spokes); break;
      default:
        spec.a = scaled(scale.left);
        spec.b = scaled(scale.right);
        break;
    }
    out.insert(out.end(), each, spec);
  }
  return out;
}

}  // namespace graphsim
