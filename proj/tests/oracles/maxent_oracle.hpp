#pragma once

// Brute-force max-ent reference: per-cell region lists and a Newton solve of
// the convex dual.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "graphsim/maxent.hpp"

namespace graphsim::oracle {

inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

inline NodeSet random_subset(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  return make_node_set(all);
}

inline Structure random_structure(const Graph& g, std::mt19937_64& rng) {
  const std::size_t n = g.node_count();
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<std::size_t> size(3, 9);
  switch (kind(rng)) {
    case 0: return Structure::clique(g, random_subset(rng, n, size(rng)));
    case 1: {
      for (NodeId hub = 0; hub < n; ++hub) {
        const NodeId h = (hub + static_cast<NodeId>(rng() % n)) % n;
        if (g.degree(h) >= 2) {
          auto nb = g.neighbors(h);
          return Structure::star(g, h, NodeSet(nb.begin(), nb.end()));
        }
      }
      return Structure::clique(g, random_subset(rng, n, 4));
    }
    default: {
      auto nodes = random_subset(rng, n, size(rng) + 2);
      std::shuffle(nodes.begin(), nodes.end(), rng);
      const std::size_t cut = 1 + rng() % (nodes.size() - 1);
      NodeSet l = make_node_set({nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(cut)});
      NodeSet r = make_node_set({nodes.begin() + static_cast<std::ptrdiff_t>(cut), nodes.end()});
      return kind(rng) % 2 ? Structure::biclique(g, l, r) : Structure::starclique(g, l, r);
    }
  }
}

// Regions covering cell (u, v), straight from the region definitions.
inline std::vector<std::uint32_t> covering_regions(const Model& model, NodeId u, NodeId v) {
  std::vector<std::uint32_t> out{0};
  std::uint32_t next = 1;
  auto in = [](const NodeSet& s, NodeId x) { return std::binary_search(s.begin(), s.end(), x); };
  for (const auto& s : model.structures) {
    switch (s.kind) {
      case StructureKind::Clique:
        if (in(s.first, u) && in(s.first, v)) out.push_back(next);
        next += 1;
        break;
      case StructureKind::Star:
        if ((u == s.hub() && in(s.second, v)) || (v == s.hub() && in(s.second, u))) out.push_back(next);
        if (in(s.second, u) && in(s.second, v)) out.push_back(next + 1);
        next += 2;
        break;
      default:
        if (in(s.first, u) && in(s.first, v)) out.push_back(next);
        if (in(s.second, u) && in(s.second, v)) out.push_back(next + 1);
        if ((in(s.first, u) && in(s.second, v)) || (in(s.second, u) && in(s.first, v))) out.push_back(next + 2);
        next += 3;
        break;
    }
  }
  return out;
}

struct Cell {
  NodeId u, v;
  std::vector<std::uint32_t> regions;
};

inline std::vector<Cell> enumerate_cells(const Graph& g, const Model& model) {
  std::vector<Cell> cells;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v = u + 1; v < g.node_count(); ++v) cells.push_back({u, v, covering_regions(model, u, v)});
  }
  return cells;
}

// Max-ent cell probabilities by damped Newton on the convex dual
//   F(λ) = Σ_cells log(1 + exp(Σ_{r ∋ cell} λ_r)) − Σ_r λ_r·target_r,
// after fixing cells forced to 0 or 1 by saturated regions.
inline std::vector<double> oracle_probabilities(const std::vector<Cell>& cells, std::vector<double> targets) {
  const std::size_t R = targets.size();
  std::vector<double> p(cells.size(), -1.0);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<double> free_cells(R, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (p[c] >= 0.0) continue;
      for (auto r : cells[c].regions) free_cells[r] += 1.0;
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (p[c] >= 0.0) continue;
      for (auto r : cells[c].regions) {
        if (targets[r] <= 1e-12 || targets[r] >= free_cells[r] - 1e-12) {
          p[c] = targets[r] <= 1e-12 ? 0.0 : 1.0;
          for (auto q : cells[c].regions) targets[q] -= p[c];
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
  std::vector<std::size_t> free_idx;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (p[c] < 0.0) free_idx.push_back(c);
  }
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(R));
  auto objective = [&](const Eigen::VectorXd& lam) {
    double f = 0.0;
    for (auto c : free_idx) {
      double s = 0.0;
      for (auto r : cells[c].regions) s += lam[r];
      f += s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
    }
    for (std::size_t r = 0; r < R; ++r) f -= lam[static_cast<Eigen::Index>(r)] * targets[r];
    return f;
  };
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(R));
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(R));
    for (auto c : free_idx) {
      double s = 0.0;
      for (auto r : cells[c].regions) s += lambda[r];
      const double q = 1.0 / (1.0 + std::exp(-s));
      for (auto a : cells[c].regions) {
        grad[a] += q;
        for (auto b : cells[c].regions) hess(a, b) += q * (1 - q);
      }
    }
    for (std::size_t r = 0; r < R; ++r) grad[static_cast<Eigen::Index>(r)] -= targets[r];
    if (grad.cwiseAbs().maxCoeff() < 1e-10) break;
    hess += 1e-12 * Eigen::MatrixXd::Identity(hess.rows(), hess.cols());
    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    const double f0 = objective(lambda);
    double t = 1.0;
    while (t > 1e-12 && objective(lambda + t * step) > f0 + 1e-4 * t * grad.dot(step)) t *= 0.5;
    lambda += t * step;
  }
  for (auto c : free_idx) {
    double s = 0.0;
    for (auto r : cells[c].regions) s += lambda[r];
    p[c] = 1.0 / (1.0 + std::exp(-s));
  }
  return p;
}

inline double max_region_residual(const ConstraintSystem& cs, const MaxEntState& st) {
  std::vector<double> expected(cs.regions.size(), 0.0);
  for (std::size_t c = 0; c < st.classes.size(); ++c) {
    for (auto r : st.classes[c].regions) expected[r] += st.classes[c].cells * st.probability(c);
  }
  double worst = 0.0;
  for (std::size_t r = 0; r < cs.regions.size(); ++r) worst = std::max(worst, std::abs(expected[r] - cs.regions[r].target));
  return worst;
}

}  // namespace graphsim::oracle
