#pragma once

// Greedy MDL summarization of a single graph.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphsim/clique.hpp"
#include "graphsim/codec.hpp"
#include "graphsim/decomposition.hpp"
#include "graphsim/error.hpp"
#include "graphsim/graph.hpp"
#include "graphsim/maxent.hpp"
#include "graphsim/structure.hpp"

namespace graphsim {

struct SummarizerConfig {
  std::size_t min_component_size = 10;
  std::size_t max_structures = 100;
  std::size_t max_rejections = 300;
  bool consecutive_rejections = false;  // count only rejections since the last acceptance
  double merge_overlap = 0.9;
  // Measure merge overlap against the smaller node set instead of the larger.
  // Repeated merges can then grow a candidate far beyond its members.
  bool merge_by_smaller = false;
  double clique_attach_frac = 0.5;
  double star_spoke_degree_frac = 0.05;
  double star_prune_base = 0.1;
  double star_prune_step = 0.01;
  std::size_t biclique_seed_cap = 5;
  std::size_t biclique_min_left = 3;
  std::size_t biclique_min_right = 5;
  std::size_t starclique_min_core = 3;  // smaller cores describe stars
  double dense_frac = 0.5;
  double sparse_frac = 0.05;
  // Graphs with fewer than small_graph_nodes nodes use small_graph_threshold.
  bool small_graph_mode = true;
  std::size_t small_graph_nodes = 500;
  std::size_t small_graph_threshold = 3;
  // Nested candidates can force cells to probability 1 only in combination,
  // where the multipliers diverge; such fits are used after max_iter sweeps.
  FitOptions fit = [] {
    FitOptions f;
    f.require_convergence = false;
    return f;
  }();

  void validate() const {
    for (double f : {merge_overlap, clique_attach_frac, star_spoke_degree_frac, star_prune_base, star_prune_step,
                     dense_frac, sparse_frac}) {
      if (!(f >= 0.0 && f <= 1.0)) throw InputError("summarizer fractions must lie in [0, 1]");
    }
    for (std::size_t v : {min_component_size, max_structures, max_rejections, biclique_seed_cap, biclique_min_left,
                          biclique_min_right, starclique_min_core, small_graph_threshold}) {
      if (v < 1) throw InputError("summarizer integer parameters must be >= 1");
    }
  }

  std::size_t threshold(std::size_t n) const {
    if (small_graph_mode && n < small_graph_nodes) return std::min(min_component_size, small_graph_threshold);
    return min_component_size;
  }
};

namespace detail {

using Counts = std::unordered_map<NodeId, std::uint32_t>;

inline void add_neighbors(const Graph& g, NodeId v, Counts& counts) {
  for (NodeId w : g.neighbors(v)) ++counts[w];
}

inline std::uint32_t count_of(const Counts& counts, NodeId v) {
  auto it = counts.find(v);
  return it == counts.end() ? 0 : it->second;
}

// Up to `cap` nodes of highest degree in g, lowest index on ties.
inline NodeSet top_by_degree(const Graph& g, NodeSet nodes, std::size_t cap) {
  std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
    return g.degree(a) != g.degree(b) ? g.degree(a) > g.degree(b) : a < b;
  });
  if (nodes.size() > cap) nodes.resize(cap);
  return make_node_set(std::move(nodes));
}

// Shared nodes as a fraction of the larger set, or of the smaller one.
inline double overlap(std::span<const NodeId> a, std::span<const NodeId> b, bool by_smaller) {
  const std::size_t base = by_smaller ? std::min(a.size(), b.size()) : std::max(a.size(), b.size());
  if (base == 0) return 0.0;
  return static_cast<double>(intersection_size(a, b)) / static_cast<double>(base);
}

inline NodeSet set_difference(std::span<const NodeId> a, std::span<const NodeId> b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Alternating growth of a two-sided structure. `left_rule` / `right_rule`
// decide whether a node with the given neighbour counts in L and R may join
// that side; the joining node is the one with most neighbours on the other
// side (lowest index on ties).
template <typename LeftRule, typename RightRule>
void grow_sides(const Graph& g, NodeSet& left, NodeSet& right, LeftRule left_rule, RightRule right_rule) {
  std::unordered_set<NodeId> inside(left.begin(), left.end());
  inside.insert(right.begin(), right.end());
  Counts in_left, in_right;
  for (NodeId v : left) add_neighbors(g, v, in_left);
  for (NodeId v : right) add_neighbors(g, v, in_right);
  std::size_t nl = left.size(), nr = right.size();
  auto pick = [&](const Counts& driver, const Counts& other, auto rule, bool driver_is_right) {
    std::optional<NodeId> best;
    std::uint32_t best_count = 0;
    for (const auto& [x, c] : driver) {
      if (inside.contains(x)) continue;
      const std::uint32_t o = count_of(other, x);
      const std::uint32_t cl = driver_is_right ? o : c;
      const std::uint32_t cr = driver_is_right ? c : o;
      if (!rule(cl, cr, nl, nr)) continue;
      if (!best || c > best_count || (c == best_count && x < *best)) {
        best = x;
        best_count = c;
      }
    }
    return best;
  };
  std::vector<NodeId> added_left, added_right;
  for (bool changed = true; changed;) {
    changed = false;
    if (auto x = pick(in_right, in_left, left_rule, true)) {
      inside.insert(*x);
      added_left.push_back(*x);
      add_neighbors(g, *x, in_left);
      ++nl;
      changed = true;
    }
    if (auto y = pick(in_left, in_right, right_rule, false)) {
      inside.insert(*y);
      added_right.push_back(*y);
      add_neighbors(g, *y, in_right);
      ++nr;
      changed = true;
    }
  }
  left = set_union(left, make_node_set(added_left));
  right = set_union(right, make_node_set(added_right));
}

inline std::uint32_t neighbors_in(const Graph& g, NodeId v, std::span<const NodeId> set) {
  std::uint32_t c = 0;
  for (NodeId w : g.neighbors(v)) c += contains(set, w) ? 1 : 0;
  return c;
}

// Re-checks the seed nodes of a grown two-sided structure against the final
// sides: nodes on either side that reach fewer than dense_frac of the other
// side are dropped, except that a starclique core node which qualifies for
// the periphery is moved there. Repeats until stable.
inline void prune_sides(const Graph& g, NodeSet& left, NodeSet& right, bool starclique, double dense, double sparse) {
  for (bool changed = true; changed && !left.empty() && !right.empty();) {
    changed = false;
    NodeSet keep_left, moved;
    for (NodeId v : left) {
      if (neighbors_in(g, v, right) >= dense * static_cast<double>(right.size())) {
        keep_left.push_back(v);
      } else if (starclique && neighbors_in(g, v, right) <= sparse * static_cast<double>(right.size()) &&
                 neighbors_in(g, v, left) >= dense * static_cast<double>(left.size() - 1)) {
        moved.push_back(v);
      }
    }
    NodeSet keep_right;
    for (NodeId v : right) {
      if (neighbors_in(g, v, left) >= dense * static_cast<double>(left.size())) keep_right.push_back(v);
    }
    keep_right = set_union(keep_right, moved);
    if (keep_left != left || keep_right != right) {
      left = std::move(keep_left);
      right = std::move(keep_right);
      changed = true;
    }
  }
}

}  // namespace detail

// Maximum clique of the seed, then repeatedly the highest-degree outside node
// adjacent to at least clique_attach_frac of the members.
inline std::optional<Structure> grow_clique(const Graph& g, const NodeSet& seed, const SummarizerConfig& cfg,
                                            std::size_t threshold) {
  NodeSet members = max_clique(g, seed);
  std::unordered_set<NodeId> inside(members.begin(), members.end());
  detail::Counts counts;
  for (NodeId v : members) detail::add_neighbors(g, v, counts);
  std::vector<NodeId> added;
  for (;;) {
    std::optional<NodeId> best;
    const double need = cfg.clique_attach_frac * static_cast<double>(inside.size());
    for (const auto& [x, c] : counts) {
      if (inside.contains(x) || static_cast<double>(c) < need) continue;
      if (!best || g.degree(x) > g.degree(*best) || (g.degree(x) == g.degree(*best) && x < *best)) best = x;
    }
    if (!best) break;
    inside.insert(*best);
    added.push_back(*best);
    detail::add_neighbors(g, *best, counts);
  }
  members = set_union(members, make_node_set(added));
  if (members.size() < std::max<std::size_t>(threshold, 2)) return std::nullopt;
  return Structure::clique(g, std::move(members));
}

// Hub of highest degree inside the seed; spokes pruned of over-connected
// nodes in growing fractions until none remains.
inline std::optional<Structure> grow_star(const Graph& g, const NodeSet& seed, const SummarizerConfig& cfg,
                                          std::size_t threshold) {
  if (seed.size() < 2) return std::nullopt;
  NodeId hub = seed.front();
  std::size_t hub_degree = 0;
  for (NodeId v : seed) {
    std::size_t d = 0;
    for (NodeId w : g.neighbors(v)) d += detail::contains(seed, w) ? 1 : 0;
    if (d > hub_degree || (d == hub_degree && v < hub)) {
      hub = v;
      hub_degree = d;
    }
  }
  NodeSet spokes;
  for (NodeId v : seed) {
    if (v != hub && g.has_edge(hub, v)) spokes.push_back(v);
  }
  std::unordered_map<NodeId, std::uint32_t> internal;
  for (NodeId v : spokes) {
    std::uint32_t c = 0;
    for (NodeId w : g.neighbors(v)) c += detail::contains(spokes, w) ? 1 : 0;
    internal[v] = c;
  }
  std::unordered_set<NodeId> alive(spokes.begin(), spokes.end());
  for (std::size_t i = 0;; ++i) {
    const double limit = cfg.star_spoke_degree_frac * static_cast<double>(alive.size());
    std::vector<NodeId> over;
    for (NodeId v : alive) {
      if (static_cast<double>(internal[v]) > limit) over.push_back(v);
    }
    if (over.empty()) break;
    std::sort(over.begin(), over.end(), [&](NodeId a, NodeId b) {
      return internal[a] != internal[b] ? internal[a] > internal[b] : a < b;
    });
    const double frac = std::min(cfg.star_prune_base + cfg.star_prune_step * static_cast<double>(i), 1.0);
    const auto drop = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(over.size()))));
    for (std::size_t j = 0; j < drop && j < over.size(); ++j) {
      const NodeId y = over[j];
      alive.erase(y);
      for (NodeId w : g.neighbors(y)) {
        if (alive.contains(w)) --internal[w];
      }
    }
  }
  NodeSet kept = make_node_set({alive.begin(), alive.end()});
  if (kept.empty() || kept.size() + 1 < threshold) return std::nullopt;
  return Structure::star(g, hub, std::move(kept));
}

inline std::optional<Structure> grow_biclique(const Graph& g, const NodeSet& seed, const SummarizerConfig& cfg,
                                              std::size_t threshold) {
  NodeSet right = detail::top_by_degree(g, maximal_independent_set(g, seed), cfg.biclique_seed_cap);
  detail::Counts to_right;
  for (NodeId v : right) detail::add_neighbors(g, v, to_right);
  NodeSet pool;
  for (const auto& [x, c] : to_right) {
    if (!detail::contains(right, x) && static_cast<double>(c) >= cfg.dense_frac * static_cast<double>(right.size())) {
      pool.push_back(x);
    }
  }
  pool = make_node_set(std::move(pool));
  NodeSet left = detail::top_by_degree(g, maximal_independent_set(g, pool), cfg.biclique_seed_cap);
  if (left.size() < cfg.biclique_min_left || right.size() < cfg.biclique_min_right) return std::nullopt;

  const double sparse = cfg.sparse_frac, dense = cfg.dense_frac;
  auto join_left = [&](std::uint32_t cl, std::uint32_t cr, std::size_t nl, std::size_t nr) {
    return cl <= sparse * static_cast<double>(nl) && cr >= dense * static_cast<double>(nr);
  };
  auto join_right = [&](std::uint32_t cl, std::uint32_t cr, std::size_t nl, std::size_t nr) {
    return cr <= sparse * static_cast<double>(nr) && cl >= dense * static_cast<double>(nl);
  };
  detail::grow_sides(g, left, right, join_left, join_right);
  detail::prune_sides(g, left, right, false, dense, sparse);
  if (left.size() < cfg.biclique_min_left || right.size() < cfg.biclique_min_right) return std::nullopt;
  if (left.size() + right.size() < threshold) return std::nullopt;
  return Structure::biclique(g, std::move(left), std::move(right));
}

inline std::optional<Structure> grow_starclique(const Graph& g, const NodeSet& seed, const SummarizerConfig& cfg,
                                                std::size_t threshold) {
  NodeSet left = max_clique(g, seed);
  if (left.size() < cfg.starclique_min_core) return std::nullopt;
  detail::Counts to_left;
  for (NodeId v : left) detail::add_neighbors(g, v, to_left);
  NodeSet pool;
  for (const auto& [x, c] : to_left) {
    if (!detail::contains(left, x) && static_cast<double>(c) >= cfg.dense_frac * static_cast<double>(left.size())) {
      pool.push_back(x);
    }
  }
  NodeSet right = maximal_independent_set(g, make_node_set(std::move(pool)));
  if (right.empty()) return std::nullopt;

  const double sparse = cfg.sparse_frac, dense = cfg.dense_frac;
  auto join_left = [&](std::uint32_t cl, std::uint32_t cr, std::size_t nl, std::size_t nr) {
    return cl >= dense * static_cast<double>(nl) && cr >= dense * static_cast<double>(nr);
  };
  auto join_right = [&](std::uint32_t cl, std::uint32_t cr, std::size_t nl, std::size_t nr) {
    return cr <= sparse * static_cast<double>(nr) && cl >= dense * static_cast<double>(nl);
  };
  detail::grow_sides(g, left, right, join_left, join_right);
  detail::prune_sides(g, left, right, true, dense, sparse);
  if (left.size() < cfg.starclique_min_core || right.empty()) return std::nullopt;
  if (left.size() + right.size() < threshold) return std::nullopt;
  return Structure::starclique(g, std::move(left), std::move(right));
}

inline std::optional<Structure> grow_candidate(StructureKind kind, const Graph& g, const NodeSet& seed,
                                               const SummarizerConfig& cfg, std::size_t threshold) {
  switch (kind) {
    case StructureKind::Clique: return grow_clique(g, seed, cfg, threshold);
    case StructureKind::Star: return grow_star(g, seed, cfg, threshold);
    case StructureKind::Biclique: return grow_biclique(g, seed, cfg, threshold);
    case StructureKind::Starclique: return grow_starclique(g, seed, cfg, threshold);
  }
  return std::nullopt;
}

// Merges same-kind candidates in order. A candidate joins the first earlier
// (possibly already merged) candidate it overlaps with: cliques when the
// shared nodes cover merge_overlap of both sets (see merge_by_smaller), two-sided kinds when
// both sides do (either orientation for bicliques). Stars are never merged.
inline std::vector<Structure> merge_candidates(const Graph& g, std::vector<Structure> candidates, StructureKind kind,
                                               const SummarizerConfig& cfg) {
  if (kind == StructureKind::Star) return candidates;
  std::vector<Structure> kept;
  std::unordered_map<NodeId, std::vector<std::size_t>> index;
  auto register_nodes = [&](std::size_t k, const NodeSet& nodes) {
    for (NodeId v : nodes) {
      auto& ids = index[v];
      if (ids.empty() || ids.back() != k) ids.push_back(k);
    }
  };
  const double t = cfg.merge_overlap;
  auto close = [&](const NodeSet& a, const NodeSet& b) { return detail::overlap(a, b, cfg.merge_by_smaller) >= t; };
  for (auto& c : candidates) {
    if (c.kind != kind) throw InvariantError("merge_candidates called with mixed kinds");
    const NodeSet all = c.nodes();
    std::vector<std::size_t> sharing;
    for (NodeId v : all) {
      auto it = index.find(v);
      if (it != index.end()) sharing.insert(sharing.end(), it->second.begin(), it->second.end());
    }
    std::sort(sharing.begin(), sharing.end());
    sharing.erase(std::unique(sharing.begin(), sharing.end()), sharing.end());

    std::optional<Structure> merged;
    std::size_t target = 0;
    for (std::size_t k : sharing) {
      const Structure& o = kept[k];
      if (kind == StructureKind::Clique) {
        if (close(o.first, c.first)) merged = Structure::clique(g, set_union(o.first, c.first));
      } else {
        auto combine = [&](const NodeSet& l2, const NodeSet& r2) -> std::optional<Structure> {
          if (!close(o.first, l2) || !close(o.second, r2)) return std::nullopt;
          NodeSet l = set_union(o.first, l2);
          NodeSet r = detail::set_difference(set_union(o.second, r2), l);
          if (r.empty()) return std::nullopt;
          return kind == StructureKind::Biclique ? Structure::biclique(g, std::move(l), std::move(r))
                                                 : Structure::starclique(g, std::move(l), std::move(r));
        };
        merged = combine(c.first, c.second);
        if (!merged && kind == StructureKind::Biclique) merged = combine(c.second, c.first);
      }
      if (merged) {
        target = k;
        break;
      }
    }
    if (merged) {
      kept[target] = std::move(*merged);
      register_nodes(target, kept[target].nodes());
    } else {
      kept.push_back(std::move(c));
      register_nodes(kept.size() - 1, all);
    }
  }
  return kept;
}

struct LedgerEntry {
  std::size_t candidate = 0;  // position in the sorted candidate list
  Structure structure;
  bool accepted = false;
  double bits_before = 0.0;
  double bits_after = 0.0;
};

struct SummaryReport {
  std::size_t threshold = 0;
  std::size_t components = 0;
  std::array<std::size_t, kKindCount> generated{};  // per kind, before merging
  std::array<std::size_t, kKindCount> merged{};     // per kind, after merging
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t unconverged_fits = 0;  // trial fits stopped at max_iter
  std::string stop_reason;
  double baseline_bits = 0.0;  // empty model plus its data length
  double model_bits = 0.0;
  double data_bits = 0.0;
  std::vector<LedgerEntry> ledger;

  double total_bits() const { return model_bits + data_bits; }
  double bits_saved() const { return baseline_bits - total_bits(); }
  // Saved bits in percent of the baseline.
  double compression_percent() const { return baseline_bits > 0 ? 100.0 * bits_saved() / baseline_bits : 0.0; }
};

struct Summary {
  Model model;
  SummaryReport report;
};

// Candidates for all kinds, merged per kind and sorted by (n_s, m_s)
// descending; ties keep generation order.
inline std::vector<Structure> generate_candidates(const Graph& g, const std::vector<NodeSet>& components,
                                                  const SummarizerConfig& cfg, std::size_t threshold,
                                                  SummaryReport* report = nullptr) {
  std::vector<Structure> all;
  for (auto kind : kAllKinds) {
    std::vector<Structure> found;
    for (const auto& seed : components) {
      if (auto s = grow_candidate(kind, g, seed, cfg, threshold)) found.push_back(std::move(*s));
    }
    if (report) report->generated[index_of(kind)] = found.size();
    auto merged = merge_candidates(g, std::move(found), kind, cfg);
    if (report) report->merged[index_of(kind)] = merged.size();
    for (auto& s : merged) all.push_back(std::move(s));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Structure& a, const Structure& b) { return larger_shape(a.shape(), b.shape()); });
  return all;
}

// Admits candidates in order while they lower L(M) + L(G | M).
inline Summary summarize(const Graph& g, const SummarizerConfig& cfg = {}) {
  cfg.validate();
  Summary out;
  auto& report = out.report;
  Model& model = out.model;
  model.n = g.node_count();
  model.m = g.edge_count();

  report.threshold = cfg.threshold(g.node_count());
  const auto components = decompose(g, report.threshold);
  report.components = components.size();
  const auto candidates = generate_candidates(g, components, cfg, report.threshold, &report);

  ConstraintBuilder builder(g);
  MaxEntState state = fit(builder.system(), cfg.fit);
  double model_bits = model_length(model, true);
  double data_bits = data_length(g, state);
  report.baseline_bits = model_bits + data_bits;

  std::size_t rejections = 0;
  report.stop_reason = "candidates exhausted";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (model.structures.size() >= cfg.max_structures) {
      report.stop_reason = "max structures";
      break;
    }
    if (rejections >= cfg.max_rejections) {
      report.stop_reason = "max rejections";
      break;
    }
    const Structure& s = candidates[i];
    FitOptions options = cfg.fit;
    options.warm_start = state.lambdas;
    MaxEntState trial = fit(builder.with(s), options);
    if (!trial.converged) ++report.unconverged_fits;
    const double trial_data = data_length(g, trial);
    model.structures.push_back(s);
    const double trial_model = model_length(model, true);
    model.structures.pop_back();

    LedgerEntry entry;
    entry.candidate = i;
    entry.structure = s;
    entry.bits_before = model_bits + data_bits;
    entry.bits_after = trial_model + trial_data;
    entry.accepted = entry.bits_after < entry.bits_before;
    if (entry.accepted) {
      model.structures.push_back(s);
      builder.add(s);
      state = std::move(trial);
      model_bits = trial_model;
      data_bits = trial_data;
      ++report.accepted;
      if (cfg.consecutive_rejections) rejections = 0;
    } else {
      ++report.rejected;
      ++rejections;
    }
    report.ledger.push_back(std::move(entry));
  }
  report.model_bits = model_bits;
  report.data_bits = data_bits;
  return out;
}

}  // namespace graphsim
