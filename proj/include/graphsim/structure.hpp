#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphsim/error.hpp"
#include "graphsim/graph.hpp"

namespace graphsim {

enum class StructureKind : std::uint8_t { Clique = 0, Star = 1, Biclique = 2, Starclique = 3 };

inline constexpr std::size_t kKindCount = 4;
inline constexpr std::array<StructureKind, kKindCount> kAllKinds = {
    StructureKind::Clique, StructureKind::Star, StructureKind::Biclique, StructureKind::Starclique};

inline constexpr std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Clique: return "clique";
    case StructureKind::Star: return "star";
    case StructureKind::Biclique: return "biclique";
    case StructureKind::Starclique: return "starclique";
  }
  return "?";
}

inline std::optional<StructureKind> parse_kind(std::string_view name) {
  for (auto kind : kAllKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

inline constexpr std::size_t index_of(StructureKind kind) { return static_cast<std::size_t>(kind); }

// Number of node-count and edge-count quantities per kind, in the fixed slot
// order used everywhere (fractions, densities, deltas):
//   clique      nodes (n_s)          edges (m_s)
//   star        nodes (n_s - 1)      edges (x_s)
//   bi/star-    nodes (n_L, n_R)     edges (m_L, m_R, m_A)
//   clique
inline constexpr std::size_t node_slots(StructureKind kind) {
  return kind == StructureKind::Biclique || kind == StructureKind::Starclique ? 2 : 1;
}
inline constexpr std::size_t edge_slots(StructureKind kind) {
  return kind == StructureKind::Biclique || kind == StructureKind::Starclique ? 3 : 1;
}

inline constexpr std::uint64_t pairs_within(std::uint64_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

// ID-free description of a structure: node counts per node slot and edge
// counts per edge slot. This is all the codec needs.
struct Shape {
  StructureKind kind = StructureKind::Clique;
  std::array<std::uint64_t, 2> nodes{};
  std::array<std::uint64_t, 3> edges{};

  // Total number of nodes n_s.
  std::uint64_t size() const {
    switch (kind) {
      case StructureKind::Clique: return nodes[0];
      case StructureKind::Star: return nodes[0] + 1;
      default: return nodes[0] + nodes[1];
    }
  }

  // Maximum value of an edge slot given the node counts.
  std::uint64_t edge_max(std::size_t slot) const {
    switch (kind) {
      case StructureKind::Clique: return pairs_within(nodes[0]);
      case StructureKind::Star: return pairs_within(nodes[0]);
      default:
        if (slot == 0) return pairs_within(nodes[0]);
        if (slot == 1) return pairs_within(nodes[1]);
        return nodes[0] * nodes[1];
    }
  }

  std::uint64_t total_edges() const {
    std::uint64_t sum = 0;
    for (std::size_t j = 0; j < edge_slots(kind); ++j) sum += edges[j];
    if (kind == StructureKind::Star) sum += nodes[0];
    return sum;
  }

  void validate() const {
    const std::size_t min_nodes = 1;
    for (std::size_t i = 0; i < node_slots(kind); ++i) {
      if (nodes[i] < min_nodes) {
        throw InvariantError(std::string(to_string(kind)) + " has an empty node slot");
      }
    }
    for (std::size_t j = 0; j < edge_slots(kind); ++j) {
      if (edges[j] > edge_max(j)) {
        throw InvariantError(std::string(to_string(kind)) + " edge count " + std::to_string(edges[j]) +
                             " exceeds maximum " + std::to_string(edge_max(j)));
      }
    }
  }

  friend bool operator==(const Shape&, const Shape&) = default;
};

// Ordering used to sort candidates and to break ties: larger (n_s, m_s) first.
inline bool larger_shape(const Shape& a, const Shape& b) {
  if (a.size() != b.size()) return a.size() > b.size();
  return a.total_edges() > b.total_edges();
}

namespace detail {

inline bool contains(std::span<const NodeId> set, NodeId v) {
  return std::binary_search(set.begin(), set.end(), v);
}

inline std::uint64_t count_within(const Graph& g, std::span<const NodeId> a) {
  std::uint64_t count = 0;
  for (NodeId u : a) {
    for (NodeId v : g.neighbors(u)) {
      if (v > u && contains(a, v)) ++count;
    }
  }
  return count;
}

inline std::uint64_t count_across(const Graph& g, std::span<const NodeId> a, std::span<const NodeId> b) {
  std::uint64_t count = 0;
  if (a.size() > b.size()) std::swap(a, b);
  for (NodeId u : a) {
    auto nb = g.neighbors(u);
    if (nb.size() < 4 * b.size()) {
      for (NodeId v : nb) count += contains(b, v) ? 1 : 0;
    } else {
      for (NodeId v : b) count += g.has_edge(u, v) ? 1 : 0;
    }
  }
  return count;
}

}  // namespace detail

// A structure with concrete node IDs.
//   clique      first = members,  second = {}
//   star        first = {hub},    second = spokes
//   biclique    first = L,        second = R   (canonical: |L| <= |R|)
//   starclique  first = L (core), second = R (periphery)
struct Structure {
  StructureKind kind = StructureKind::Clique;
  NodeSet first;
  NodeSet second;
  std::array<std::uint64_t, 3> edges{};

  NodeId hub() const { return first.front(); }

  std::size_t size() const { return first.size() + second.size(); }

  NodeSet nodes() const { return set_union(first, second); }

  Shape shape() const {
    Shape s;
    s.kind = kind;
    switch (kind) {
      case StructureKind::Clique: s.nodes = {first.size(), 0}; break;
      case StructureKind::Star: s.nodes = {second.size(), 0}; break;
      default: s.nodes = {first.size(), second.size()}; break;
    }
    s.edges = edges;
    return s;
  }

  void validate(std::size_t n) const {
    auto check_range = [n](const NodeSet& set) {
      for (NodeId v : set) {
        if (v >= n) throw InvariantError("structure references node " + std::to_string(v) + " >= n");
      }
    };
    check_range(first);
    check_range(second);
    if (first.empty()) throw InvariantError("structure has an empty node set");
    switch (kind) {
      case StructureKind::Clique:
        if (!second.empty()) throw InvariantError("clique with a second node set");
        break;
      case StructureKind::Star:
        if (first.size() != 1) throw InvariantError("star must have exactly one hub");
        if (second.empty()) throw InvariantError("star without spokes");
        if (detail::contains(second, hub())) throw InvariantError("star hub is also a spoke");
        break;
      default:
        if (second.empty()) throw InvariantError("empty right side");
        if (intersection_size(first, second) != 0) throw InvariantError("left and right sides overlap");
        break;
    }
    shape().validate();
  }

  static Structure clique(const Graph& g, NodeSet members) {
    Structure s;
    s.kind = StructureKind::Clique;
    s.first = std::move(members);
    s.edges[0] = detail::count_within(g, s.first);
    return s;
  }

  // Spokes that are not neighbors of the hub are dropped.
  static Structure star(const Graph& g, NodeId hub, NodeSet spokes) {
    Structure s;
    s.kind = StructureKind::Star;
    s.first = {hub};
    std::erase_if(spokes, [&](NodeId v) { return v == hub || !g.has_edge(hub, v); });
    s.second = std::move(spokes);
    s.edges[0] = detail::count_within(g, s.second);
    return s;
  }

  static Structure biclique(const Graph& g, NodeSet left, NodeSet right) {
    if (left.size() > right.size() || (left.size() == right.size() && !left.empty() && !right.empty() &&
                                       right.front() < left.front())) {
      std::swap(left, right);
    }
    return two_sided(g, StructureKind::Biclique, std::move(left), std::move(right));
  }

  static Structure starclique(const Graph& g, NodeSet core, NodeSet periphery) {
    return two_sided(g, StructureKind::Starclique, std::move(core), std::move(periphery));
  }

  // Rebuilds a structure of the same kind and node sets with counts from g.
  Structure recount(const Graph& g) const {
    switch (kind) {
      case StructureKind::Clique: return clique(g, first);
      case StructureKind::Star: return star(g, hub(), second);
      case StructureKind::Biclique: return biclique(g, first, second);
      case StructureKind::Starclique: return starclique(g, first, second);
    }
    return *this;
  }

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  static Structure two_sided(const Graph& g, StructureKind kind, NodeSet left, NodeSet right) {
    Structure s;
    s.kind = kind;
    s.first = std::move(left);
    s.second = std::move(right);
    s.edges[0] = detail::count_within(g, s.first);
    s.edges[1] = detail::count_within(g, s.second);
    s.edges[2] = detail::count_across(g, s.first, s.second);
    return s;
  }
};

// Ordered structure list plus the totals of the graph it summarizes.
struct Model {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::vector<Structure> structures;

  void validate() const {
    for (const auto& s : structures) s.validate(n);
  }

  std::vector<Shape> shapes() const {
    std::vector<Shape> out;
    out.reserve(structures.size());
    for (const auto& s : structures) out.push_back(s.shape());
    return out;
  }
};

}  // namespace graphsim
