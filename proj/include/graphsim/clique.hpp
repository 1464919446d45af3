#pragma once

// Maximum clique and maximal independent set on induced subgraphs.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_set>
#include <vector>

#include "graphsim/graph.hpp"

namespace graphsim {

// Induced subgraphs up to this size are searched exactly.
inline constexpr std::size_t kExactCliqueLimit = 200;

namespace detail {

class Bitset {
 public:
  explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

 private:
  std::vector<std::uint64_t> words_;
};

// Branch and bound with greedy colouring bounds (Tomita-style MCQ).
class ExactClique {
 public:
  ExactClique(const Graph& g, std::span<const NodeId> nodes) : nodes_(nodes.begin(), nodes.end()) {
    const std::size_t k = nodes_.size();
    adj_.assign(k, Bitset(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        if (g.has_edge(nodes_[i], nodes_[j])) {
          adj_[i].set(j);
          adj_[j].set(i);
        }
      }
    }
  }

  NodeSet solve() {
    const std::size_t k = nodes_.size();
    if (k == 0) return {};
    // Initial order: non-increasing degree, index ascending.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> deg(k);
    for (std::size_t i = 0; i < k; ++i) deg[i] = adj_[i].count();
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return deg[a] > deg[b]; });
    best_ = {order.front()};
    std::vector<std::size_t> current;
    expand(current, order);
    NodeSet out;
    for (auto i : best_) out.push_back(nodes_[i]);
    return make_node_set(std::move(out));
  }

 private:
  void expand(std::vector<std::size_t>& current, const std::vector<std::size_t>& candidates) {
    std::vector<std::size_t> order;
    std::vector<std::size_t> colour;
    colour_sort(candidates, order, colour);
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (current.size() + colour[idx] <= best_.size()) return;
      const std::size_t v = order[idx];
      current.push_back(v);
      std::vector<std::size_t> next;
      for (std::size_t j = 0; j < idx; ++j) {
        if (adj_[v].test(order[j])) next.push_back(order[j]);
      }
      if (next.empty()) {
        if (current.size() > best_.size()) best_ = current;
      } else {
        expand(current, next);
      }
      current.pop_back();
    }
  }

  // Greedy sequential colouring; `colour[i]` bounds the clique size within
  // order[0..i].
  void colour_sort(const std::vector<std::size_t>& candidates, std::vector<std::size_t>& order,
                   std::vector<std::size_t>& colour) const {
    std::vector<std::vector<std::size_t>> classes;
    for (auto v : candidates) {
      std::size_t c = 0;
      for (; c < classes.size(); ++c) {
        bool clash = false;
        for (auto u : classes[c]) {
          if (adj_[v].test(u)) {
            clash = true;
            break;
          }
        }
        if (!clash) break;
      }
      if (c == classes.size()) classes.emplace_back();
      classes[c].push_back(v);
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (auto v : classes[c]) {
        order.push_back(v);
        colour.push_back(c + 1);
      }
    }
  }

  std::vector<NodeId> nodes_;
  std::vector<Bitset> adj_;
  std::vector<std::size_t> best_;
};

// Degeneracy-order heuristic: for every vertex, greedily grow a clique among
// its later neighbours, highest local degree first.
inline NodeSet greedy_clique(const Graph& g, std::span<const NodeId> nodes) {
  const std::size_t k = nodes.size();
  if (k == 0) return {};
  std::vector<std::vector<std::size_t>> adj(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (NodeId w : g.neighbors(nodes[i])) {
      auto it = std::lower_bound(nodes.begin(), nodes.end(), w);
      if (it != nodes.end() && *it == w) adj[i].push_back(static_cast<std::size_t>(it - nodes.begin()));
    }
  }
  // Degeneracy order by repeated removal of a minimum-degree vertex.
  std::vector<std::size_t> deg(k);
  std::size_t max_deg = 0;
  for (std::size_t i = 0; i < k; ++i) max_deg = std::max(max_deg, deg[i] = adj[i].size());
  std::vector<std::vector<std::size_t>> buckets(max_deg + 1);
  for (std::size_t i = k; i-- > 0;) buckets[deg[i]].push_back(i);
  std::vector<std::size_t> position(k, k);
  std::vector<bool> removed(k, false);
  std::size_t next = 0;
  for (std::size_t d = 0; next < k;) {
    if (buckets[d].empty()) {
      ++d;
      continue;
    }
    const std::size_t v = buckets[d].back();
    buckets[d].pop_back();
    if (removed[v] || deg[v] != d) continue;
    removed[v] = true;
    position[v] = next++;
    for (auto u : adj[v]) {
      if (!removed[u]) {
        buckets[--deg[u]].push_back(u);
        d = std::min(d, deg[u]);
      }
    }
  }
  std::vector<std::size_t> local_degree(k);
  for (std::size_t i = 0; i < k; ++i) local_degree[i] = adj[i].size();

  std::vector<std::size_t> best;
  std::vector<char> mark(k, 0);
  for (std::size_t v = 0; v < k; ++v) {
    std::vector<std::size_t> later;
    for (auto u : adj[v]) {
      if (position[u] > position[v]) later.push_back(u);
    }
    if (later.size() + 1 <= best.size()) continue;
    std::sort(later.begin(), later.end(), [&](auto a, auto b) {
      return local_degree[a] != local_degree[b] ? local_degree[a] > local_degree[b] : a < b;
    });
    std::vector<std::size_t> clique{v};
    for (auto u : later) {
      for (auto w : adj[u]) mark[w] = 1;
      bool ok = std::all_of(clique.begin(), clique.end(), [&](auto c) { return mark[c] != 0; });
      for (auto w : adj[u]) mark[w] = 0;
      if (ok) clique.push_back(u);
    }
    if (clique.size() > best.size()) best = std::move(clique);
  }
  NodeSet out;
  for (auto i : best) out.push_back(nodes[i]);
  return make_node_set(std::move(out));
}

}  // namespace detail

// Maximum clique of the subgraph induced by the sorted set `nodes`. Exact up
// to kExactCliqueLimit nodes, a heuristic above.
inline NodeSet max_clique(const Graph& g, std::span<const NodeId> nodes) {
  if (nodes.size() <= kExactCliqueLimit) return detail::ExactClique(g, nodes).solve();
  return detail::greedy_clique(g, nodes);
}

// Greedy maximal independent set of the subgraph induced by `nodes`, visiting
// nodes by ascending degree in g (index ascending on ties).
inline NodeSet maximal_independent_set(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> order(nodes.begin(), nodes.end());
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
  });
  NodeSet chosen;
  std::unordered_set<NodeId> blocked;
  for (NodeId v : order) {
    if (blocked.contains(v)) continue;
    chosen.push_back(v);
    for (NodeId w : g.neighbors(v)) blocked.insert(w);
  }
  return make_node_set(std::move(chosen));
}

}  // namespace graphsim
