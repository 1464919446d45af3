#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphsim/error.hpp"

namespace graphsim {

using NodeId = std::uint32_t;

// Sorted, duplicate-free list of node indices.
using NodeSet = std::vector<NodeId>;

inline NodeSet make_node_set(std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

inline std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

// |a ∩ b| / |a ∪ b| over sorted sets; two empty sets have similarity 0.
inline double jaccard(std::span<const NodeId> a, std::span<const NodeId> b) {
  const std::size_t common = intersection_size(a, b);
  const std::size_t united = a.size() + b.size() - common;
  if (united == 0) return 0.0;
  return static_cast<double>(common) / static_cast<double>(united);
}

inline NodeSet set_union(std::span<const NodeId> a, std::span<const NodeId> b) {
  NodeSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Simple undirected graph with dense 0-based node indices and a label for
// every index. Adjacency is stored in CSR form with sorted neighbor lists.
// Immutable after construction.
class Graph {
 public:
  Graph() = default;

  // Self-loops and duplicate pairs are dropped. Labels default to the
  // decimal index.
  static Graph from_edges(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges,
                          std::vector<std::string> labels = {}) {
    for (auto& [u, v] : edges) {
      if (u >= n || v >= n) throw InvariantError("edge endpoint out of range");
      if (u > v) std::swap(u, v);
    }
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    if (labels.empty()) {
      labels.reserve(n);
      for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    }
    if (labels.size() != n) throw InvariantError("label count does not match node count");

    Graph g;
    g.labels_ = std::move(labels);
    g.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!g.index_.emplace(g.labels_[i], static_cast<NodeId>(i)).second) {
        throw InvariantError("duplicate node label '" + g.labels_[i] + "'");
      }
    }

    std::vector<std::size_t> degree(n, 0);
    for (const auto& [u, v] : edges) {
      ++degree[u];
      ++degree[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.targets_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
      g.targets_[cursor[u]++] = v;
      g.targets_[cursor[v]++] = u;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
    }
    g.edge_count_ = edges.size();
    return g;
  }

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  // Number of node pairs, n(n-1)/2.
  double pair_count() const noexcept {
    const double n = static_cast<double>(node_count());
    return n * (n - 1.0) / 2.0;
  }

  std::span<const NodeId> neighbors(NodeId v) const {
    check(v);
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }

  std::size_t degree(NodeId v) const {
    check(v);
    return offsets_[v + 1] - offsets_[v];
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  const std::string& label(NodeId v) const {
    check(v);
    return labels_[v];
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<NodeId> index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Unordered pairs with first < second, in lexicographic order.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < node_count(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

 private:
  void check(NodeId v) const {
    if (v >= labels_.size()) throw DomainError("node index " + std::to_string(v) + " out of range");
  }

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::size_t edge_count_ = 0;
};

namespace detail {

inline bool is_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#' || line[pos] == '%';
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(std::move(tok));
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

// Edge list: one "u w" pair of labels per line, '#'/'%' comment lines.
// Labels keep first-seen order. Loops still register their label, which is how
// isolated nodes survive a save/load round trip. The result is always the
// simple undirected graph; `directed_collapse` documents that a directed input
// is expected and its reciprocal pairs are merged.
inline Graph read_edge_list(std::istream& in, bool directed_collapse = true) {
  (void)directed_collapse;
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto intern = [&](const std::string& label) {
    auto [it, inserted] = index.emplace(label, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_comment(line)) continue;
    auto tok = detail::tokens(line);
    if (tok.size() != 2) {
      throw ParseError("expected 2 tokens, found " + std::to_string(tok.size()), lineno);
    }
    const NodeId u = intern(tok[0]);
    const NodeId v = intern(tok[1]);
    edges.emplace_back(u, v);
  }
  if (labels.empty()) throw InputError("edge list contains no nodes");
  const std::size_t n = labels.size();
  return Graph::from_edges(n, std::move(edges), std::move(labels));
}

inline Graph load_edge_list(const std::string& path, bool directed_collapse = true) {
  auto in = detail::open_input(path);
  try {
    return read_edge_list(in, directed_collapse);
  } catch (const ParseError& e) {
    throw ParseError(path, e);
  }
}

// Isolated nodes are written as loops so that the node set round-trips.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) == 0) out << g.label(u) << ' ' << g.label(u) << '\n';
    for (NodeId v : g.neighbors(u)) {
      if (u < v) out << g.label(u) << ' ' << g.label(v) << '\n';
    }
  }
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_edge_list(g, out);
}

// Partial injective map from the nodes of one graph to the nodes of another.
class NodeAlignment {
 public:
  NodeAlignment() = default;
  NodeAlignment(std::size_t source_nodes, std::size_t target_nodes)
      : forward_(source_nodes), backward_(target_nodes) {}

  void add(NodeId source, NodeId target) {
    if (source >= forward_.size() || target >= backward_.size()) {
      throw DomainError("alignment pair out of range");
    }
    if (forward_[source]) throw InputError("source node aligned twice");
    if (backward_[target]) throw InputError("target node aligned twice");
    forward_[source] = target;
    backward_[target] = source;
    ++size_;
  }

  std::optional<NodeId> map(NodeId source) const {
    if (source >= forward_.size()) return std::nullopt;
    return forward_[source];
  }

  std::optional<NodeId> inverse(NodeId target) const {
    if (target >= backward_.size()) return std::nullopt;
    return backward_[target];
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  std::vector<std::pair<NodeId, NodeId>> pairs() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId s = 0; s < forward_.size(); ++s) {
      if (forward_[s]) out.emplace_back(s, *forward_[s]);
    }
    return out;
  }

  // Image of a node set; unaligned nodes have no image and are dropped.
  NodeSet image(std::span<const NodeId> nodes) const {
    std::vector<NodeId> out;
    for (NodeId v : nodes) {
      if (auto t = map(v)) out.push_back(*t);
    }
    return make_node_set(std::move(out));
  }

  // Same alignment seen from the other graph.
  NodeAlignment inverted() const {
    NodeAlignment out(backward_.size(), forward_.size());
    for (const auto& [s, t] : pairs()) out.add(t, s);
    return out;
  }

 private:
  std::vector<std::optional<NodeId>> forward_;
  std::vector<std::optional<NodeId>> backward_;
  std::size_t size_ = 0;
};

inline NodeAlignment read_alignment(std::istream& in, const Graph& g1, const Graph& g2) {
  NodeAlignment out(g1.node_count(), g2.node_count());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_comment(line)) continue;
    auto tok = detail::tokens(line);
    if (tok.size() != 2) {
      throw ParseError("expected 2 tokens, found " + std::to_string(tok.size()), lineno);
    }
    auto s = g1.index_of(tok[0]);
    if (!s) throw ParseError("unknown label '" + tok[0] + "' in first graph", lineno);
    auto t = g2.index_of(tok[1]);
    if (!t) throw ParseError("unknown label '" + tok[1] + "' in second graph", lineno);
    if (out.map(*s)) throw ParseError("label '" + tok[0] + "' aligned twice", lineno);
    if (out.inverse(*t)) throw ParseError("label '" + tok[1] + "' is the image of two labels", lineno);
    out.add(*s, *t);
  }
  return out;
}

inline NodeAlignment load_alignment(const std::string& path, const Graph& g1, const Graph& g2) {
  auto in = detail::open_input(path);
  try {
    return read_alignment(in, g1, g2);
  } catch (const ParseError& e) {
    throw ParseError(path, e);
  }
}

}  // namespace graphsim
