#pragma once

// Structure matching across two models, the common model built from a
// matching, and node overlap trees.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "graphsim/codec.hpp"
#include "graphsim/error.hpp"
#include "graphsim/graph.hpp"
#include "graphsim/maxent.hpp"
#include "graphsim/structure.hpp"
#include "graphsim/transform.hpp"

namespace graphsim {

// Index pairs into two structure lists.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const { return pairs.size(); }

  // Same kind on both sides, every structure at most once.
  void validate(const std::vector<Structure>& s1, const std::vector<Structure>& s2) const {
    std::vector<char> used1(s1.size(), 0), used2(s2.size(), 0);
    for (const auto& [i, j] : pairs) {
      if (i >= s1.size() || j >= s2.size()) throw InvariantError("matching refers to a missing structure");
      if (s1[i].kind != s2[j].kind) throw InvariantError("matched structures differ in kind");
      if (used1[i]++ || used2[j]++) throw InvariantError("structure matched twice");
    }
  }

  // No unmatched same-kind pair is left on both sides.
  bool is_maximal(const std::vector<Structure>& s1, const std::vector<Structure>& s2) const {
    std::vector<char> used1(s1.size(), 0), used2(s2.size(), 0);
    for (const auto& [i, j] : pairs) used1[i] = used2[j] = 1;
    for (std::size_t i = 0; i < s1.size(); ++i) {
      for (std::size_t j = 0; j < s2.size(); ++j) {
        if (!used1[i] && !used2[j] && s1[i].kind == s2[j].kind) return false;
      }
    }
    return true;
  }
};

struct MatchOptions {
  bool no_overlap = false;  // skip the product-graph phase
};

// Jaccard similarity between parts of s1 mapped into graph 2 and the parts of
// s2, averaged over the parts.
inline double aligned_jaccard(const Structure& s1, const Structure& s2, const NodeAlignment& a) {
  if (s1.kind != s2.kind) return 0.0;
  if (s1.kind == StructureKind::Clique) return jaccard(a.image(s1.first), s2.first);
  return (jaccard(a.image(s1.first), s2.first) + jaccard(a.image(s1.second), s2.second)) / 2.0;
}

// Weighted edge between two vertices of an overlap graph, a < b.
struct OverlapEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0.0;
};

// Edges of the node overlap graph of a structure list: node-set Jaccard,
// zero-weight pairs omitted.
inline std::vector<OverlapEdge> overlap_edges(const std::vector<Structure>& structures) {
  std::vector<NodeSet> nodes;
  nodes.reserve(structures.size());
  for (const auto& s : structures) nodes.push_back(s.nodes());
  std::vector<OverlapEdge> out;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const double w = jaccard(nodes[a], nodes[b]);
      if (w > 0.0) out.push_back({a, b, w});
    }
  }
  return out;
}

namespace detail {

using ProductVertex = std::pair<std::size_t, std::size_t>;

struct ProductEdge {
  ProductVertex u;
  ProductVertex v;  // u < v
  double weight = 0.0;
};

// Product-graph edges in order of decreasing weight, equal weights in
// lexicographic (u, v) order. Edges are produced lazily from the two sorted
// overlap edge lists, one batch of equal weight at a time; `skip1` lets the
// caller drop overlap edges of side 1 that can no longer contribute.
class ProductEdgeStream {
 public:
  ProductEdgeStream(const std::vector<Structure>& s1, const std::vector<Structure>& s2)
      : s1_(s1), s2_(s2), f1_(overlap_edges(s1)), f2_(overlap_edges(s2)) {
    auto heavier = [](const OverlapEdge& x, const OverlapEdge& y) { return x.weight > y.weight; };
    std::stable_sort(f1_.begin(), f1_.end(), heavier);
    std::stable_sort(f2_.begin(), f2_.end(), heavier);
    if (!f2_.empty()) {
      for (std::size_t i = 0; i < f1_.size(); ++i) heap_.push({f1_[i].weight * f2_[0].weight, i, 0});
    }
  }

  template <typename Skip>
  bool next_batch(std::vector<ProductEdge>& batch, Skip&& skip1) {
    batch.clear();
    while (!heap_.empty()) {
      const double w = heap_.top().weight;
      while (!heap_.empty() && heap_.top().weight == w) {
        const Cursor c = heap_.top();
        heap_.pop();
        const auto& e1 = f1_[c.i];
        if (skip1(e1.a, e1.b)) continue;
        const auto& e2 = f2_[c.j];
        add(batch, {e1.a, e2.a}, {e1.b, e2.b}, w);
        add(batch, {e1.a, e2.b}, {e1.b, e2.a}, w);
        if (c.j + 1 < f2_.size()) heap_.push({e1.weight * f2_[c.j + 1].weight, c.i, c.j + 1});
      }
      if (!batch.empty()) {
        std::sort(batch.begin(), batch.end(),
                  [](const ProductEdge& x, const ProductEdge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
        return true;
      }
    }
    return false;
  }

 private:
  struct Cursor {
    double weight;
    std::size_t i, j;
    bool operator<(const Cursor& o) const { return weight < o.weight; }
  };

  void add(std::vector<ProductEdge>& batch, ProductVertex u, ProductVertex v, double w) const {
    if (s1_[u.first].kind != s2_[u.second].kind || s1_[v.first].kind != s2_[v.second].kind) return;
    if (v < u) std::swap(u, v);
    batch.push_back({u, v, w});
  }

  const std::vector<Structure>& s1_;
  const std::vector<Structure>& s2_;
  std::vector<OverlapEdge> f1_, f2_;
  std::priority_queue<Cursor> heap_;
};

// Indices sorted by (n_s, m_s) descending, index ascending on ties.
inline std::vector<std::size_t> by_size(const std::vector<Structure>& s, const std::vector<char>& used) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!used[i]) out.push_back(i);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return larger_shape(s[a].shape(), s[b].shape()); });
  return out;
}

}  // namespace detail

// Greedy maximal type-respecting matching. Without an alignment the heaviest
// edges of the product of the two node overlap graphs are taken first and the
// rest is paired by size; with an alignment pairs are taken by decreasing
// aligned Jaccard similarity.
inline Matching maximal_greedy(const std::vector<Structure>& s1, const std::vector<Structure>& s2,
                               const NodeAlignment* alignment = nullptr, const MatchOptions& options = {}) {
  Matching out;
  std::vector<char> used1(s1.size(), 0), used2(s2.size(), 0);

  if (alignment && !alignment->empty()) {
    struct Scored {
      double score;
      std::size_t i, j;
    };
    std::vector<Scored> all;
    for (std::size_t i = 0; i < s1.size(); ++i) {
      for (std::size_t j = 0; j < s2.size(); ++j) {
        if (s1[i].kind == s2[j].kind) all.push_back({aligned_jaccard(s1[i], s2[j], *alignment), i, j});
      }
    }
    std::sort(all.begin(), all.end(), [&](const Scored& x, const Scored& y) {
      if (x.score != y.score) return x.score > y.score;
      const Shape x1 = s1[x.i].shape(), y1 = s1[y.i].shape();
      if (larger_shape(x1, y1) != larger_shape(y1, x1)) return larger_shape(x1, y1);
      const Shape x2 = s2[x.j].shape(), y2 = s2[y.j].shape();
      if (larger_shape(x2, y2) != larger_shape(y2, x2)) return larger_shape(x2, y2);
      return std::tie(x.i, x.j) < std::tie(y.i, y.j);
    });
    for (const auto& p : all) {
      if (used1[p.i] || used2[p.j]) continue;
      used1[p.i] = used2[p.j] = 1;
      out.pairs.emplace_back(p.i, p.j);
    }
    return out;
  }

  if (!options.no_overlap) {
    // A product vertex is dead once it shares a structure with a selected
    // vertex without being selected itself.
    std::vector<std::optional<std::size_t>> partner1(s1.size());
    auto alive = [&](const detail::ProductVertex& x) {
      return partner1[x.first] ? *partner1[x.first] == x.second : !used2[x.second];
    };
    auto select = [&](const detail::ProductVertex& x) {
      if (partner1[x.first]) return;
      partner1[x.first] = x.second;
      used1[x.first] = used2[x.second] = 1;
      out.pairs.push_back(x);
    };
    // Open kinds still have unused structures on both sides.
    auto open = [&]() {
      for (auto kind : kAllKinds) {
        bool a = false, b = false;
        for (std::size_t i = 0; i < s1.size() && !a; ++i) a = !used1[i] && s1[i].kind == kind;
        for (std::size_t j = 0; j < s2.size() && !b; ++j) b = !used2[j] && s2[j].kind == kind;
        if (a && b) return true;
      }
      return false;
    };
    detail::ProductEdgeStream stream(s1, s2);
    std::vector<detail::ProductEdge> batch;
    auto spent = [&](std::size_t a, std::size_t b) { return used1[a] && used1[b]; };
    while (open() && stream.next_batch(batch, spent)) {
      for (const auto& e : batch) {
        if (!alive(e.u) || !alive(e.v)) continue;
        select(e.u);
        select(e.v);
      }
    }
  }

  const auto rest2 = detail::by_size(s2, used2);
  for (std::size_t i : detail::by_size(s1, used1)) {
    for (std::size_t j : rest2) {
      if (!used2[j] && s1[i].kind == s2[j].kind) {
        used1[i] = used2[j] = 1;
        out.pairs.emplace_back(i, j);
        break;
      }
    }
  }
  return out;
}

// Common model and side-1 transformation for a matching. Requires n1 >= n2;
// callers with the opposite order swap first (see align_models).
inline std::pair<CommonModel, TransformPair> build_common(const Model& m1, const Model& m2, const Matching& matching) {
  if (m1.n < m2.n) throw DomainError("build_common needs n1 >= n2");
  matching.validate(m1.structures, m2.structures);
  CommonModel cm;
  cm.header = {m1.n, m2.n, m1.m, m2.m, false};
  TransformPair tp;
  std::vector<char> used1(m1.structures.size(), 0), used2(m2.structures.size(), 0);
  for (const auto& [i, j] : matching.pairs) {
    const Shape a = m1.structures[i].shape();
    const Shape b = m2.structures[j].shape();
    const CommonStructure cs = average(a, m1.n, b, m2.n);
    const SlotDeltas d = deltas_to(cs, m1.n, a);
    if (reconstitute(cs, m1.n, d) != a || infer_counterpart(cs, m1.n, m2.n, a) != b) {
      throw InvariantError("transformation does not reproduce a matched structure");
    }
    cm.shared.push_back(cs);
    tp.deltas.push_back(d);
    used1[i] = used2[j] = 1;
  }
  for (std::size_t i = 0; i < m1.structures.size(); ++i) {
    if (!used1[i]) tp.unmatched1.push_back(m1.structures[i]);
  }
  for (std::size_t j = 0; j < m2.structures.size(); ++j) {
    if (!used2[j]) tp.unmatched2.push_back(m2.structures[j]);
  }
  return {std::move(cm), std::move(tp)};
}

// Δ_i(M12): shapes of side i in matching order followed by its unmatched
// structures.
inline std::vector<Shape> apply_transform(const CommonModel& cm, const TransformPair& tp, int side) {
  validate_transform(cm, tp);
  std::vector<Shape> out;
  for (std::size_t s = 0; s < cm.shared.size(); ++s) {
    const Shape one = reconstitute(cm.shared[s], cm.header.n1, tp.deltas[s]);
    out.push_back(side == 1 ? one : infer_counterpart(cm.shared[s], cm.header.n1, cm.header.n2, one));
  }
  for (const auto& s : side == 1 ? tp.unmatched1 : tp.unmatched2) out.push_back(s.shape());
  return out;
}

// Strict total order on models used to put a pair in canonical order:
// larger n first, then larger m, then structure content.
inline bool canonically_before(const Model& a, const Model& b) {
  if (a.n != b.n) return a.n > b.n;
  if (a.m != b.m) return a.m > b.m;
  auto key = [](const Structure& s) { return std::tie(s.kind, s.first, s.second, s.edges); };
  return std::lexicographical_compare(
      a.structures.begin(), a.structures.end(), b.structures.begin(), b.structures.end(),
      [&](const Structure& x, const Structure& y) { return key(x) < key(y); });
}

struct PairAnnotation {
  std::size_t index1 = 0;  // into the caller's first model
  std::size_t index2 = 0;  // into the caller's second model
  double jaccard = 0.0;    // node-set Jaccard on raw indices
  std::optional<double> aligned_jaccard;
};

// Matching, common model and transformation for two models, in canonical order
// (header.swapped set when the caller's second model is side 1).
struct ModelAlignment {
  CommonModel common;
  TransformPair transform;
  Matching matching;  // canonical side order
  std::vector<PairAnnotation> pairs;
};

inline ModelAlignment align_models(const Model& m1, const Model& m2, const NodeAlignment* alignment = nullptr,
                                   const MatchOptions& options = {}) {
  const bool swapped = canonically_before(m2, m1);
  const Model& a = swapped ? m2 : m1;
  const Model& b = swapped ? m1 : m2;
  std::optional<NodeAlignment> inverse;
  const NodeAlignment* use = alignment;
  if (alignment && swapped) {
    inverse = alignment->inverted();
    use = &*inverse;
  }
  ModelAlignment out;
  out.matching = maximal_greedy(a.structures, b.structures, use, options);
  std::tie(out.common, out.transform) = build_common(a, b, out.matching);
  out.common.header.swapped = swapped;
  for (const auto& [i, j] : out.matching.pairs) {
    PairAnnotation p;
    p.index1 = swapped ? j : i;
    p.index2 = swapped ? i : j;
    const Structure& x = m1.structures[p.index1];
    const Structure& y = m2.structures[p.index2];
    p.jaccard = jaccard(x.nodes(), y.nodes());
    if (alignment && !alignment->empty()) p.aligned_jaccard = aligned_jaccard(x, y, *alignment);
    out.pairs.push_back(p);
  }
  return out;
}

struct DescribeOptions {
  MatchOptions match;
  bool data_terms = true;  // fit max-ent distributions for L(G_i | M_i)
  FitOptions fit = [] {
    FitOptions f;
    f.require_convergence = false;  // as in the summarizer
    return f;
  }();
};

struct SimilarityDescription {
  ModelAlignment alignment;
  double common_bits = 0.0;           // L(M12)
  double transform_bits = 0.0;        // L(Δ1, Δ2) with node IDs of unmatched structures
  double transform_bits_no_ids = 0.0; // L(Δ1, Δ2) as used by the NMD
  double data_bits = 0.0;             // L(G1 | Δ1(M12)) + L(G2 | Δ2(M12)); 0 unless computed
  bool has_data = false;

  double objective() const { return common_bits + transform_bits + data_bits; }
};

// Full description of two graphs under their models. The reconstructed
// individual models are checked against the inputs before the data terms
// are computed from them.
inline SimilarityDescription describe(const Graph& g1, const Graph& g2, const Model& m1, const Model& m2,
                                      const NodeAlignment* alignment = nullptr, const DescribeOptions& options = {}) {
  if (m1.n != g1.node_count() || m1.m != g1.edge_count() || m2.n != g2.node_count() || m2.m != g2.edge_count()) {
    throw InputError("model does not belong to its graph");
  }
  SimilarityDescription out;
  out.alignment = align_models(m1, m2, alignment, options.match);
  const auto& cm = out.alignment.common;
  const auto& tp = out.alignment.transform;
  out.common_bits = common_model_length(cm);
  out.transform_bits = transform_length(cm, tp, true);
  out.transform_bits_no_ids = transform_length(cm, tp, false);

  const Model& side1 = cm.header.swapped ? m2 : m1;
  const Model& side2 = cm.header.swapped ? m1 : m2;
  auto check = [&](const Model& m, int side) {
    const auto shapes = apply_transform(cm, tp, side);
    auto expected = m.shapes();
    auto got = shapes;
    auto order = [](const Shape& x, const Shape& y) {
      return std::tie(x.kind, x.nodes, x.edges) < std::tie(y.kind, y.nodes, y.edges);
    };
    std::sort(expected.begin(), expected.end(), order);
    std::sort(got.begin(), got.end(), order);
    if (expected != got) throw InvariantError("transformation does not reproduce an individual model");
  };
  check(side1, 1);
  check(side2, 2);
  if (options.data_terms) {
    out.data_bits = model_data_length(g1, m1, options.fit) + model_data_length(g2, m2, options.fit);
    out.has_data = true;
  }
  return out;
}

// Maximum spanning forest of an overlap graph plus a synthetic root joined
// to the vertex of largest overlap degree in every component.
struct OverlapTree {
  std::size_t vertices = 0;
  std::vector<OverlapEdge> edges;
  std::vector<std::size_t> root_children;

  double weight() const {
    double w = 0.0;
    for (const auto& e : edges) w += e.weight;
    return w;
  }
};

inline OverlapTree spanning_tree(std::size_t vertices, std::vector<OverlapEdge> edges) {
  OverlapTree out;
  out.vertices = vertices;
  std::vector<std::size_t> degree(vertices, 0);
  for (const auto& e : edges) {
    if (e.a >= vertices || e.b >= vertices || e.a == e.b) throw InvariantError("bad overlap edge");
    ++degree[e.a];
    ++degree[e.b];
  }
  std::stable_sort(edges.begin(), edges.end(), [](const OverlapEdge& x, const OverlapEdge& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  std::vector<std::size_t> parent(vertices);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) {
    if (e.weight <= 0.0) continue;
    const auto ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    out.edges.push_back(e);
  }
  std::vector<std::optional<std::size_t>> best(vertices);
  for (std::size_t v = 0; v < vertices; ++v) {
    auto& b = best[find(v)];
    if (!b || degree[v] > degree[*b]) b = v;
  }
  for (std::size_t v = 0; v < vertices; ++v) {
    if (best[v]) out.root_children.push_back(*best[v]);
  }
  std::sort(out.root_children.begin(), out.root_children.end());
  return out;
}

inline OverlapTree overlap_tree(const std::vector<Structure>& structures) {
  return spanning_tree(structures.size(), overlap_edges(structures));
}

// Tree over matched pairs; edge weights are products of the two sides'
// Jaccard similarities.
inline OverlapTree common_overlap_tree(const Matching& matching, const std::vector<Structure>& s1,
                                       const std::vector<Structure>& s2) {
  matching.validate(s1, s2);
  std::vector<NodeSet> n1, n2;
  for (const auto& [i, j] : matching.pairs) {
    n1.push_back(s1[i].nodes());
    n2.push_back(s2[j].nodes());
  }
  std::vector<OverlapEdge> edges;
  for (std::size_t a = 0; a < n1.size(); ++a) {
    for (std::size_t b = a + 1; b < n1.size(); ++b) {
      const double w = jaccard(n1[a], n1[b]) * jaccard(n2[a], n2[b]);
      if (w > 0.0) edges.push_back({a, b, w});
    }
  }
  return spanning_tree(matching.size(), std::move(edges));
}

// Graphviz rendering; pen width grows with the edge weight.
inline void write_dot(std::ostream& out, const OverlapTree& tree, const std::vector<std::string>& labels,
                      const std::string& name = "overlap") {
  out << "graph " << name << " {\n  root [shape=point];\n";
  for (std::size_t v = 0; v < tree.vertices; ++v) {
    out << "  s" << v << " [label=\"" << (v < labels.size() ? labels[v] : std::to_string(v)) << "\"];\n";
  }
  for (auto v : tree.root_children) out << "  root -- s" << v << " [style=dashed];\n";
  for (const auto& e : tree.edges) {
    out << "  s" << e.a << " -- s" << e.b << " [weight=" << e.weight << ", penwidth=" << 1.0 + 4.0 * e.weight
        << "];\n";
  }
  out << "}\n";
}

inline std::string structure_label(const Structure& s) {
  std::string label(to_string(s.kind));
  if (node_slots(s.kind) == 2) {
    label += " " + std::to_string(s.first.size()) + "+" + std::to_string(s.second.size());
  } else {
    label += " " + std::to_string(s.size());
  }
  return label;
}

}  // namespace graphsim
