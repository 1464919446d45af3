#pragma once

// Description-length arithmetic. All lengths are in bits and all logarithms
// are base 2 with log 0 := 0; the same guard applies to log log, so any
// logarithm of an argument below 1 contributes nothing.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <span>
#include <vector>

#include "graphsim/error.hpp"
#include "graphsim/structure.hpp"
#include "graphsim/transform.hpp"

namespace graphsim {

// Normalizing constant of Rissanen's universal code for the integers.
inline constexpr double kUniversalCodeConstant = 2.865064;

inline double log2_guarded(double x) { return x >= 1.0 ? std::log2(x) : 0.0; }

inline double loglog2_guarded(double x) { return log2_guarded(log2_guarded(x)); }

// L_N(n): log2(c0) plus every strictly positive term of log n, log log n, ...
inline double universal_int(std::uint64_t n) {
  if (n < 1) throw DomainError("universal integer code needs n >= 1");
  double bits = std::log2(kUniversalCodeConstant);
  for (double term = std::log2(static_cast<double>(n)); term > 0.0; term = std::log2(term)) bits += term;
  return bits;
}

// log2 of the binomial coefficient. Small k is summed term by term, larger
// k goes through log-gamma.
inline double log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("log_binomial needs 0 <= k <= n");
  k = std::min(k, n - k);
  if (k == 0) return 0.0;
  if (k <= 64) {
    double bits = 0.0;
    for (std::int64_t i = 1; i <= k; ++i) {
      bits += std::log2(static_cast<double>(n - k + i) / static_cast<double>(i));
    }
    return bits;
  }
  const double nats = std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                      std::lgamma(static_cast<double>(n - k) + 1.0);
  return nats / std::numbers::ln2;
}

namespace detail {

inline double lg(std::uint64_t x) { return log2_guarded(static_cast<double>(x)); }
inline double lglg(std::uint64_t x) { return loglog2_guarded(static_cast<double>(x)); }
inline std::int64_t i64(std::uint64_t x) { return static_cast<std::int64_t>(x); }

inline void expect_kind(const Shape& s, StructureKind kind) {
  if (s.kind != kind) throw InvariantError("length function called for the wrong structure kind");
}

}  // namespace detail

inline double clique_length(const Shape& s, std::uint64_t n, bool with_ids) {
  detail::expect_kind(s, StructureKind::Clique);
  s.validate();
  const std::uint64_t size = s.nodes[0];
  const std::uint64_t max = s.edge_max(0);
  const std::uint64_t present = s.edges[0];
  double bits = universal_int(size) + 1.0 + detail::lglg(max / 2) + detail::lg(std::min(present, max - present));
  if (with_ids) bits += log_binomial(detail::i64(n), detail::i64(size));
  return bits;
}

inline double star_length(const Shape& s, std::uint64_t n, bool with_ids) {
  detail::expect_kind(s, StructureKind::Star);
  s.validate();
  const std::uint64_t spokes = s.nodes[0];
  double bits = universal_int(spokes) + detail::lglg(s.edge_max(0)) + detail::lg(s.edges[0]);
  if (with_ids) {
    if (n < spokes + 1) throw DomainError("star larger than its graph");
    bits += detail::lg(n) + log_binomial(detail::i64(n) - 1, detail::i64(spokes));
  }
  return bits;
}

// Bicliques and starcliques share one formula; a starclique transmits the
// number of missing left-left edges instead of the present ones.
inline double two_sided_length(const Shape& s, std::uint64_t n, bool with_ids) {
  if (s.kind != StructureKind::Biclique && s.kind != StructureKind::Starclique) {
    throw InvariantError("length function called for the wrong structure kind");
  }
  s.validate();
  const std::uint64_t left = s.nodes[0];
  const std::uint64_t size = s.size();
  const std::uint64_t max_left = s.edge_max(0);
  const std::uint64_t max_right = s.edge_max(1);
  const std::uint64_t max_across = s.edge_max(2);
  const std::uint64_t left_term = s.kind == StructureKind::Starclique ? max_left - s.edges[0] : s.edges[0];
  double bits = universal_int(size) + detail::lg(size);
  bits += detail::lglg(max_left) + detail::lg(left_term);
  bits += detail::lglg(max_right) + detail::lg(s.edges[1]);
  bits += detail::lglg(max_across) + detail::lg(max_across - s.edges[2]);
  if (with_ids) {
    bits += log_binomial(detail::i64(n), detail::i64(left)) +
            log_binomial(detail::i64(n) - detail::i64(left), detail::i64(size) - detail::i64(left));
  }
  return bits;
}

inline double biclique_length(const Shape& s, std::uint64_t n, bool with_ids) {
  detail::expect_kind(s, StructureKind::Biclique);
  return two_sided_length(s, n, with_ids);
}

inline double starclique_length(const Shape& s, std::uint64_t n, bool with_ids) {
  detail::expect_kind(s, StructureKind::Starclique);
  return two_sided_length(s, n, with_ids);
}

inline double structure_length(const Shape& s, std::uint64_t n, bool with_ids) {
  switch (s.kind) {
    case StructureKind::Clique: return clique_length(s, n, with_ids);
    case StructureKind::Star: return star_length(s, n, with_ids);
    case StructureKind::Biclique: return biclique_length(s, n, with_ids);
    case StructureKind::Starclique: return starclique_length(s, n, with_ids);
  }
  throw InvariantError("unknown structure kind");
}

// -log Pr(type | S) under the empirical type frequencies of `shapes`.
inline std::array<double, kKindCount> type_costs(std::span<const Shape> shapes) {
  std::array<std::size_t, kKindCount> counts{};
  for (const auto& s : shapes) ++counts[index_of(s.kind)];
  std::array<double, kKindCount> costs{};
  for (std::size_t k = 0; k < kKindCount; ++k) {
    if (counts[k] > 0) {
      costs[k] = -std::log2(static_cast<double>(counts[k]) / static_cast<double>(shapes.size()));
    }
  }
  return costs;
}

// |S| and the per-type counts, then type and body of every structure. `n` is
// the graph size used by node-ID terms.
inline double structure_list_length(std::span<const Shape> shapes, std::uint64_t n, bool with_ids) {
  const auto count = static_cast<std::int64_t>(shapes.size());
  double bits = universal_int(shapes.size() + 1) + log_binomial(count + kKindCount - 1, kKindCount - 1);
  const auto costs = type_costs(shapes);
  for (const auto& s : shapes) bits += costs[index_of(s.kind)] + structure_length(s, n, with_ids);
  return bits;
}

inline double model_length(const Model& model, bool with_ids) {
  const auto shapes = model.shapes();
  return universal_int(model.n + 1) + universal_int(model.m + 1) + structure_list_length(shapes, model.n, with_ids);
}

// Length of the empty model for a graph with n nodes and m edges.
inline double empty_model_length(std::uint64_t n, std::uint64_t m) {
  return universal_int(n + 1) + universal_int(m + 1) + universal_int(1);
}

inline double common_header_length(const CommonHeader& h) {
  if (h.n1 < h.n2) throw DomainError("common model header needs n1 >= n2");
  const std::uint64_t edge_gap = h.m1 > h.m2 ? h.m1 - h.m2 : h.m2 - h.m1;
  return universal_int(h.n1 + 1) + universal_int(h.n1 - h.n2 + 1) + universal_int(h.m1 + 1) +
         universal_int(edge_gap + 1) + 1.0;
}

// The ID-free structure a common structure describes at reference size n.
// Node counts are kept at least 1 so that every shared structure has a
// well-defined length even when its expectation rounds to zero.
inline Shape expected_shape(const CommonStructure& cs, std::uint64_t n) {
  Shape s;
  s.kind = cs.kind;
  for (std::size_t i = 0; i < node_slots(cs.kind); ++i) {
    s.nodes[i] = static_cast<std::uint64_t>(std::max<std::int64_t>(1, round_nearest(cs.fractions[i] * static_cast<double>(n))));
  }
  for (std::size_t j = 0; j < edge_slots(cs.kind); ++j) {
    const auto max = s.edge_max(j);
    const auto expected = round_nearest(cs.densities[j] * static_cast<double>(max));
    s.edges[j] = std::min<std::uint64_t>(max, static_cast<std::uint64_t>(std::max<std::int64_t>(0, expected)));
  }
  return s;
}

inline double common_model_length(const CommonModel& cm) {
  std::vector<Shape> shapes;
  shapes.reserve(cm.shared.size());
  for (const auto& cs : cm.shared) shapes.push_back(expected_shape(cs, cm.header.n1));
  return common_header_length(cm.header) + structure_list_length(shapes, cm.header.n1, false);
}

inline double delta_length(const SlotDeltas& d, StructureKind kind) {
  double bits = 0.0;
  for (std::size_t i = 0; i < node_slots(kind); ++i) bits += universal_int(static_cast<std::uint64_t>(std::llabs(d.nodes[i])) + 1);
  for (std::size_t j = 0; j < edge_slots(kind); ++j) bits += universal_int(static_cast<std::uint64_t>(std::llabs(d.edges[j])) + 1);
  return bits;
}

// Number of change directions: one per nonzero delta.
inline std::uint64_t change_directions(const TransformPair& tp) {
  std::uint64_t t = 0;
  for (const auto& d : tp.deltas) {
    for (auto x : d.nodes) t += x != 0 ? 1 : 0;
    for (auto x : d.edges) t += x != 0 ? 1 : 0;
  }
  return t;
}

inline void validate_transform(const CommonModel& cm, const TransformPair& tp) {
  if (tp.deltas.size() != cm.shared.size()) {
    throw InvariantError("transformation has " + std::to_string(tp.deltas.size()) + " delta records for " +
                         std::to_string(cm.shared.size()) + " shared structures");
  }
  for (std::size_t s = 0; s < tp.deltas.size(); ++s) {
    const auto kind = cm.shared[s].kind;
    for (std::size_t i = node_slots(kind); i < 2; ++i) {
      if (tp.deltas[s].nodes[i] != 0) throw InvariantError("delta in an unused node slot");
    }
    for (std::size_t j = edge_slots(kind); j < 3; ++j) {
      if (tp.deltas[s].edges[j] != 0) throw InvariantError("delta in an unused edge slot");
    }
  }
}

// Side-1 deltas, the change directions, and the unmatched structures of both
// sides. Node-ID terms of unmatched structures are included iff `with_ids`.
inline double transform_length(const CommonModel& cm, const TransformPair& tp, bool with_ids) {
  validate_transform(cm, tp);
  double bits = 0.0;
  for (std::size_t s = 0; s < tp.deltas.size(); ++s) bits += delta_length(tp.deltas[s], cm.shared[s].kind);
  bits += detail::lg(change_directions(tp));
  auto side = [&](const std::vector<Structure>& unmatched, std::uint64_t n) {
    std::vector<Shape> shapes;
    shapes.reserve(unmatched.size());
    for (const auto& s : unmatched) shapes.push_back(s.shape());
    return structure_list_length(shapes, n, with_ids);
  };
  bits += side(tp.unmatched1, cm.header.n1) + side(tp.unmatched2, cm.header.n2);
  return bits;
}

}  // namespace graphsim
