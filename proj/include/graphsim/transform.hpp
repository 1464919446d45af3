#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "graphsim/error.hpp"
#include "graphsim/structure.hpp"

namespace graphsim {

// Totals of the two graphs behind a common model, in canonical order
// (n1 >= n2). `swapped` records that the caller's inputs were exchanged.
struct CommonHeader {
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  std::uint64_t m1 = 0;
  std::uint64_t m2 = 0;
  bool swapped = false;
};

// ID-free shared structure: node fractions (relative to each graph's n) and
// edge densities (relative to each slot's maximum), averaged over both sides.
struct CommonStructure {
  StructureKind kind = StructureKind::Clique;
  std::array<double, 2> fractions{};
  std::array<double, 3> densities{};
};

struct CommonModel {
  CommonHeader header;
  std::vector<CommonStructure> shared;
};

// Signed corrections from the rounded expectation to an actual count, one per
// slot, in the slot order of structure.hpp.
struct SlotDeltas {
  std::array<std::int64_t, 2> nodes{};
  std::array<std::int64_t, 3> edges{};

  bool is_zero() const {
    for (auto d : nodes) {
      if (d != 0) return false;
    }
    for (auto d : edges) {
      if (d != 0) return false;
    }
    return true;
  }

  friend bool operator==(const SlotDeltas&, const SlotDeltas&) = default;
};

// Side-1 deltas for every shared structure (side 2 is inferred) plus the
// structures of each side that have no counterpart.
struct TransformPair {
  std::vector<SlotDeltas> deltas;
  std::vector<Structure> unmatched1;
  std::vector<Structure> unmatched2;
};

// ⌊x⌉, halves rounded away from zero.
inline std::int64_t round_nearest(double x) { return std::llround(x); }

namespace detail {

inline double ratio(std::uint64_t count, std::uint64_t max) {
  return max == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(max);
}

inline std::uint64_t checked_count(std::int64_t value, const char* what) {
  if (value < 0) throw InvariantError(std::string("negative reconstructed ") + what + " count");
  return static_cast<std::uint64_t>(value);
}

}  // namespace detail

inline double node_fraction(const Shape& s, std::size_t slot, std::uint64_t n) {
  return detail::ratio(s.nodes[slot], n);
}

inline double edge_density(const Shape& s, std::size_t slot) { return detail::ratio(s.edges[slot], s.edge_max(slot)); }

// The averaged structure for a matched pair; sides may come in either order.
inline CommonStructure average(const Shape& a, std::uint64_t na, const Shape& b, std::uint64_t nb) {
  if (a.kind != b.kind) throw InvariantError("cannot average structures of different kinds");
  CommonStructure out;
  out.kind = a.kind;
  for (std::size_t i = 0; i < node_slots(a.kind); ++i) {
    out.fractions[i] = (node_fraction(a, i, na) + node_fraction(b, i, nb)) / 2.0;
  }
  for (std::size_t j = 0; j < edge_slots(a.kind); ++j) {
    out.densities[j] = (edge_density(a, j) + edge_density(b, j)) / 2.0;
  }
  return out;
}

// Applies deltas to the expectation at reference size n: node counts
// ⌊x·n⌉ + δ first, then edge counts ⌊y·m*⌉ + δ where m* follows from the
// reconstructed node counts.
inline Shape reconstitute(const CommonStructure& cs, std::uint64_t n, const SlotDeltas& deltas = {}) {
  Shape s;
  s.kind = cs.kind;
  for (std::size_t i = 0; i < node_slots(cs.kind); ++i) {
    const auto expected = round_nearest(cs.fractions[i] * static_cast<double>(n));
    s.nodes[i] = detail::checked_count(expected + deltas.nodes[i], "node");
  }
  for (std::size_t j = 0; j < edge_slots(cs.kind); ++j) {
    const auto expected = round_nearest(cs.densities[j] * static_cast<double>(s.edge_max(j)));
    s.edges[j] = detail::checked_count(expected + deltas.edges[j], "edge");
    if (s.edges[j] > s.edge_max(j)) throw InvariantError("reconstructed edge count exceeds its slot maximum");
  }
  return s;
}

// Deltas that turn the expectation at reference n into `actual`.
inline SlotDeltas deltas_to(const CommonStructure& cs, std::uint64_t n, const Shape& actual) {
  SlotDeltas d;
  for (std::size_t i = 0; i < node_slots(cs.kind); ++i) {
    d.nodes[i] = static_cast<std::int64_t>(actual.nodes[i]) - round_nearest(cs.fractions[i] * static_cast<double>(n));
  }
  for (std::size_t j = 0; j < edge_slots(cs.kind); ++j) {
    d.edges[j] = static_cast<std::int64_t>(actual.edges[j]) -
                 round_nearest(cs.densities[j] * static_cast<double>(actual.edge_max(j)));
  }
  return d;
}

// Recovers the side-2 counterpart from the common structure and the exact
// side-1 counts through the mean identity x = (c1/n1 + c2/n2) / 2.
inline Shape infer_counterpart(const CommonStructure& cs, std::uint64_t n1, std::uint64_t n2, const Shape& side1) {
  Shape s;
  s.kind = cs.kind;
  for (std::size_t i = 0; i < node_slots(cs.kind); ++i) {
    const double own = 2.0 * cs.fractions[i] - node_fraction(side1, i, n1);
    s.nodes[i] = detail::checked_count(round_nearest(own * static_cast<double>(n2)), "node");
  }
  for (std::size_t j = 0; j < edge_slots(cs.kind); ++j) {
    const double own = 2.0 * cs.densities[j] - edge_density(side1, j);
    s.edges[j] = detail::checked_count(round_nearest(own * static_cast<double>(s.edge_max(j))), "edge");
    if (s.edges[j] > s.edge_max(j)) throw InvariantError("inferred edge count exceeds its slot maximum");
  }
  return s;
}

}  // namespace graphsim
