#pragma once

// Maximum-entropy distribution over the upper triangle of the adjacency
// matrix, constrained by the edge counts of the regions a model induces.
//
// Every cell (i < j) is covered by the global region and by the regions of
// the structures containing both i and j. Cells covered by the same set of
// regions (their signature) share one probability, so the distribution is
// stored per cell class rather than per cell. Classes are derived from node
// membership patterns: the signature of a pair depends only on the roles its
// two endpoints play in each structure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphsim/error.hpp"
#include "graphsim/graph.hpp"
#include "graphsim/structure.hpp"

namespace graphsim {

// Multiplier sums are clamped to [-kMaxLogit, kMaxLogit].
inline constexpr double kMaxLogit = 30.0;

enum class RegionSlot : std::uint8_t { Global, Clique, HubSpoke, SpokeSpoke, Left, Right, Across };

inline constexpr std::size_t kNoStructure = std::numeric_limits<std::size_t>::max();

struct Region {
  std::size_t structure = kNoStructure;
  RegionSlot slot = RegionSlot::Global;
  double cells = 0.0;
  double target = 0.0;
};

struct CellClass {
  std::vector<std::uint32_t> regions;  // sorted; always starts with the global region 0
  double cells = 0.0;
  double edges = 0.0;
};

struct ConstraintSystem {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::vector<Region> regions;
  std::vector<CellClass> classes;

  std::vector<std::vector<std::uint32_t>> classes_by_region() const {
    std::vector<std::vector<std::uint32_t>> out(regions.size());
    for (std::uint32_t c = 0; c < classes.size(); ++c) {
      for (auto r : classes[c].regions) out[r].push_back(c);
    }
    return out;
  }
};

namespace detail {

struct VectorHash {
  template <typename T>
  std::size_t operator()(const std::vector<T>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

enum class Role : std::uint8_t { Member, Hub, Spoke, Left, Right };

// Role of one node in one structure, packed as (structure << 3) | role so that
// sorting by the packed value sorts by structure.
using Membership = std::uint32_t;

inline Membership pack(std::size_t structure, Role role) {
  return static_cast<Membership>((structure << 3) | static_cast<std::uint32_t>(role));
}
inline std::size_t structure_of(Membership m) { return m >> 3; }
inline Role role_of(Membership m) { return static_cast<Role>(m & 7u); }

struct NodeGroup {
  std::uint32_t pattern;
  std::uint64_t count;
};

inline std::vector<NodeGroup> group_by_pattern(std::span<const NodeId> nodes, const std::vector<std::uint32_t>& pattern_of) {
  std::vector<std::uint32_t> ids;
  ids.reserve(nodes.size());
  for (NodeId v : nodes) ids.push_back(pattern_of[v]);
  std::sort(ids.begin(), ids.end());
  std::vector<NodeGroup> groups;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    groups.push_back({ids[i], j - i});
    i = j;
  }
  return groups;
}

}  // namespace detail

// Incrementally maintained constraint system for one graph. `with` evaluates
// the system after adding one more structure without committing it, which is
// what the greedy summarizer needs for every candidate.
class ConstraintBuilder {
 public:
  explicit ConstraintBuilder(const Graph& g) : graph_(&g), pattern_of_(g.node_count(), 0) {
    system_.n = g.node_count();
    system_.m = g.edge_count();
    system_.regions.push_back({kNoStructure, RegionSlot::Global, g.pair_count(), static_cast<double>(g.edge_count())});
    system_.classes.push_back({{0}, g.pair_count(), static_cast<double>(g.edge_count())});
    patterns_.emplace_back();
    pattern_index_.emplace(std::vector<detail::Membership>{}, 0);
    reindex_classes();
  }

  const ConstraintSystem& system() const noexcept { return system_; }
  std::size_t structure_count() const noexcept { return region_base_.size(); }

  ConstraintSystem with(const Structure& s) const {
    ConstraintSystem out = system_;
    extend(out, s);
    return out;
  }

  void add(const Structure& s) {
    extend(system_, s);
    const std::size_t id = region_base_.size();
    region_base_.push_back(static_cast<std::uint32_t>(system_.regions.size() - region_count(s.kind)));
    kinds_.push_back(s.kind);
    auto assign = [&](const NodeSet& nodes, detail::Role role) {
      for (NodeId v : nodes) {
        auto pattern = patterns_[pattern_of_[v]];
        pattern.push_back(detail::pack(id, role));
        pattern_of_[v] = intern(std::move(pattern));
      }
    };
    switch (s.kind) {
      case StructureKind::Clique: assign(s.first, detail::Role::Member); break;
      case StructureKind::Star:
        assign(s.first, detail::Role::Hub);
        assign(s.second, detail::Role::Spoke);
        break;
      default:
        assign(s.first, detail::Role::Left);
        assign(s.second, detail::Role::Right);
        break;
    }
    reindex_classes();
  }

  // Index into system().classes of the class containing cell (u, v).
  std::size_t class_of(NodeId u, NodeId v) const {
    if (u == v) throw DomainError("loop cells are not part of the distribution");
    return class_index_.at(signature(pattern_of_.at(u), pattern_of_.at(v)));
  }

  static std::size_t region_count(StructureKind kind) {
    switch (kind) {
      case StructureKind::Clique: return 1;
      case StructureKind::Star: return 2;
      default: return 3;
    }
  }

 private:
  std::uint32_t intern(std::vector<detail::Membership> pattern) {
    auto [it, inserted] = pattern_index_.emplace(pattern, static_cast<std::uint32_t>(patterns_.size()));
    if (inserted) patterns_.push_back(std::move(pattern));
    return it->second;
  }

  void reindex_classes() {
    class_index_.clear();
    for (std::uint32_t c = 0; c < system_.classes.size(); ++c) class_index_.emplace(system_.classes[c].regions, c);
  }

  // Regions covering a pair whose endpoints have the given patterns.
  std::vector<std::uint32_t> signature(std::uint32_t pa, std::uint32_t pb) const {
    std::vector<std::uint32_t> sig{0};
    const auto& a = patterns_[pa];
    const auto& b = patterns_[pb];
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      const auto sa = detail::structure_of(*ia);
      const auto sb = detail::structure_of(*ib);
      if (sa < sb) {
        ++ia;
      } else if (sb < sa) {
        ++ib;
      } else {
        if (auto offset = region_offset(kinds_[sa], detail::role_of(*ia), detail::role_of(*ib))) {
          sig.push_back(region_base_[sa] + *offset);
        }
        ++ia;
        ++ib;
      }
    }
    return sig;
  }

  static std::optional<std::uint32_t> region_offset(StructureKind kind, detail::Role a, detail::Role b) {
    using detail::Role;
    switch (kind) {
      case StructureKind::Clique: return 0;
      case StructureKind::Star:
        if (a == Role::Spoke && b == Role::Spoke) return 1;
        if (a != b) return 0;
        return std::nullopt;
      default:
        if (a == Role::Left && b == Role::Left) return 0;
        if (a == Role::Right && b == Role::Right) return 1;
        return 2;
    }
  }

  struct Pending {
    std::uint32_t region;
    std::vector<detail::NodeGroup> a;
    std::vector<detail::NodeGroup> b;  // empty for "within a" regions
    NodeSet const* set_a;
    NodeSet const* set_b;
  };

  void extend(ConstraintSystem& cs, const Structure& s) const {
    const Graph& g = *graph_;
    s.validate(g.node_count());
    const std::size_t sid = region_base_.size();

    std::vector<Pending> pending;
    auto within = [&](RegionSlot slot, const NodeSet& set, double target) {
      const auto r = static_cast<std::uint32_t>(cs.regions.size());
      cs.regions.push_back({sid, slot, static_cast<double>(pairs_within(set.size())), target});
      pending.push_back({r, detail::group_by_pattern(set, pattern_of_), {}, &set, nullptr});
    };
    auto across = [&](RegionSlot slot, const NodeSet& a, const NodeSet& b, double target) {
      const auto r = static_cast<std::uint32_t>(cs.regions.size());
      cs.regions.push_back({sid, slot, static_cast<double>(a.size()) * static_cast<double>(b.size()), target});
      pending.push_back(
          {r, detail::group_by_pattern(a, pattern_of_), detail::group_by_pattern(b, pattern_of_), &a, &b});
    };
    const auto e = [&](std::size_t j) { return static_cast<double>(s.edges[j]); };
    switch (s.kind) {
      case StructureKind::Clique: within(RegionSlot::Clique, s.first, e(0)); break;
      case StructureKind::Star:
        across(RegionSlot::HubSpoke, s.first, s.second, static_cast<double>(s.second.size()));
        within(RegionSlot::SpokeSpoke, s.second, e(0));
        break;
      default:
        within(RegionSlot::Left, s.first, e(0));
        within(RegionSlot::Right, s.second, e(1));
        across(RegionSlot::Across, s.first, s.second, e(2));
        break;
    }

    // Histogram of (old class, new region) -> cells, edges.
    std::unordered_map<std::uint64_t, std::pair<double, double>> moved;
    std::unordered_map<std::uint64_t, std::uint32_t> pair_class;
    auto old_class = [&](std::uint32_t pa, std::uint32_t pb) {
      if (pa > pb) std::swap(pa, pb);
      const std::uint64_t key = (static_cast<std::uint64_t>(pa) << 32) | pb;
      auto it = pair_class.find(key);
      if (it != pair_class.end()) return it->second;
      const auto c = class_index_.at(signature(pa, pb));
      pair_class.emplace(key, c);
      return c;
    };
    auto bump = [&](std::uint32_t cls, std::uint32_t region, double cells, double edges) {
      auto& slot = moved[(static_cast<std::uint64_t>(cls) << 32) | region];
      slot.first += cells;
      slot.second += edges;
    };

    for (const auto& p : pending) {
      if (p.set_b == nullptr) {
        for (std::size_t i = 0; i < p.a.size(); ++i) {
          const double ci = static_cast<double>(p.a[i].count);
          if (p.a[i].count > 1) bump(old_class(p.a[i].pattern, p.a[i].pattern), p.region, ci * (ci - 1.0) / 2.0, 0.0);
          for (std::size_t j = i + 1; j < p.a.size(); ++j) {
            bump(old_class(p.a[i].pattern, p.a[j].pattern), p.region, ci * static_cast<double>(p.a[j].count), 0.0);
          }
        }
        const NodeSet& set = *p.set_a;
        for (NodeId u : set) {
          for (NodeId v : g.neighbors(u)) {
            if (v > u && detail::contains(set, v)) bump(old_class(pattern_of_[u], pattern_of_[v]), p.region, 0.0, 1.0);
          }
        }
      } else {
        for (const auto& ga : p.a) {
          for (const auto& gb : p.b) {
            bump(old_class(ga.pattern, gb.pattern), p.region,
                 static_cast<double>(ga.count) * static_cast<double>(gb.count), 0.0);
          }
        }
        const NodeSet& a = p.set_a->size() <= p.set_b->size() ? *p.set_a : *p.set_b;
        const NodeSet& b = p.set_a->size() <= p.set_b->size() ? *p.set_b : *p.set_a;
        for (NodeId u : a) {
          for (NodeId v : g.neighbors(u)) {
            if (detail::contains(b, v)) bump(old_class(pattern_of_[u], pattern_of_[v]), p.region, 0.0, 1.0);
          }
        }
      }
    }

    // Deterministic order for the new classes.
    std::vector<std::pair<std::uint64_t, std::pair<double, double>>> moves(moved.begin(), moved.end());
    std::sort(moves.begin(), moves.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [key, amount] : moves) {
      const auto cls = static_cast<std::uint32_t>(key >> 32);
      const auto region = static_cast<std::uint32_t>(key & 0xffffffffu);
      cs.classes[cls].cells -= amount.first;
      cs.classes[cls].edges -= amount.second;
      CellClass split;
      split.regions = cs.classes[cls].regions;
      split.regions.push_back(region);
      split.cells = amount.first;
      split.edges = amount.second;
      if (split.cells > 0.0) cs.classes.push_back(std::move(split));
    }
    std::erase_if(cs.classes, [](const CellClass& c) { return c.cells <= 0.0; });
  }

  const Graph* graph_;
  ConstraintSystem system_;
  std::vector<std::uint32_t> pattern_of_;
  std::vector<std::vector<detail::Membership>> patterns_;
  std::unordered_map<std::vector<detail::Membership>, std::uint32_t, detail::VectorHash> pattern_index_;
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::VectorHash> class_index_;
  std::vector<std::uint32_t> region_base_;
  std::vector<StructureKind> kinds_;
};

inline ConstraintSystem build_constraints(const Graph& g, const Model& model) {
  ConstraintBuilder builder(g);
  for (const auto& s : model.structures) builder.add(s);
  return builder.system();
}

struct MaxEntState {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::vector<double> lambdas;
  std::vector<CellClass> classes;
  std::vector<double> logits;  // clamped multiplier sum per class
  double worst_residual = 0.0;
  int sweeps = 0;
  bool converged = true;

  double probability(std::size_t cls) const { return 1.0 / (1.0 + std::exp(-logits.at(cls))); }
};

struct FitOptions {
  double tol = 1e-6;
  int max_iter = 500;
  std::vector<double> warm_start;  // multipliers of a prefix of the regions
  // When false, hitting max_iter returns the current state (converged =
  // false) instead of throwing. Its data length is still a valid code length,
  // just not the shortest.
  bool require_convergence = true;
};

namespace detail {

inline double clamp_logit(double x) { return std::clamp(x, -kMaxLogit, kMaxLogit); }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + e^x) without overflow.
inline double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

class Fitter {
 public:
  explicit Fitter(const ConstraintSystem& cs) : cs_(cs), members_(cs.classes_by_region()), sums_(cs.classes.size(), 0.0) {}

  void initialize(std::span<const double> warm) {
    lambdas_.assign(cs_.regions.size(), 0.0);
    if (warm.empty()) {
      const double density = cs_.regions[0].cells > 0 ? cs_.regions[0].target / cs_.regions[0].cells : 0.0;
      if (density > 0.0 && density < 1.0) lambdas_[0] = std::log(density / (1.0 - density));
    } else {
      for (std::size_t r = 0; r < std::min(warm.size(), lambdas_.size()); ++r) lambdas_[r] = warm[r];
    }
    std::fill(sums_.begin(), sums_.end(), 0.0);
    for (std::size_t c = 0; c < cs_.classes.size(); ++c) {
      for (auto r : cs_.classes[c].regions) sums_[c] += lambdas_[r];
    }
  }

  double residual(std::size_t r) const {
    double expected = 0.0;
    for (auto c : members_[r]) expected += cs_.classes[c].cells * sigmoid(clamp_logit(sums_[c]));
    return expected - cs_.regions[r].target;
  }

  double worst_residual() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < cs_.regions.size(); ++r) worst = std::max(worst, std::abs(residual(r)));
    return worst;
  }

  // Sets lambda_r so that region r meets its target with all other
  // multipliers fixed. The residual is monotone in lambda_r.
  void solve(std::size_t r, double tol) {
    const auto& cls = members_[r];
    if (cls.empty()) return;
    const double current = lambdas_[r];
    double max_other = -std::numeric_limits<double>::infinity();
    double min_other = std::numeric_limits<double>::infinity();
    for (auto c : cls) {
      const double other = sums_[c] - current;
      max_other = std::max(max_other, other);
      min_other = std::min(min_other, other);
    }
    const double target = cs_.regions[r].target;
    auto eval = [&](double x, double* slope) {
      double value = -target;
      double d = 0.0;
      for (auto c : cls) {
        const double raw = sums_[c] - current + x;
        const double p = sigmoid(clamp_logit(raw));
        value += cs_.classes[c].cells * p;
        if (raw > -kMaxLogit && raw < kMaxLogit) d += cs_.classes[c].cells * p * (1.0 - p);
      }
      if (slope) *slope = d;
      return value;
    };

    double lo = -kMaxLogit - max_other;
    double hi = kMaxLogit - min_other;
    double x;
    if (eval(lo, nullptr) >= 0.0) {
      x = lo;
    } else if (eval(hi, nullptr) <= 0.0) {
      x = hi;
    } else {
      x = std::clamp(current, lo, hi);
      for (int it = 0; it < 200; ++it) {
        double slope = 0.0;
        const double f = eval(x, &slope);
        if (std::abs(f) <= tol) break;
        if (f < 0.0) {
          lo = x;
        } else {
          hi = x;
        }
        double next = slope > 0.0 ? x - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
        x = next;
      }
    }
    const double delta = x - current;
    if (delta == 0.0) return;
    lambdas_[r] = x;
    for (auto c : cls) sums_[c] += delta;
  }

  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& sums() const { return sums_; }

 private:
  const ConstraintSystem& cs_;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<double> lambdas_;
  std::vector<double> sums_;
};

}  // namespace detail

// Coordinate ascent on the concave dual: one multiplier at a time, each
// solved exactly by safeguarded Newton/bisection on its monotone residual.
// Converged when every region's expected edge count is within `tol` of its
// target.
inline MaxEntState fit(const ConstraintSystem& cs, const FitOptions& options = {}) {
  for (const auto& r : cs.regions) {
    if (r.target < 0.0 || r.target > r.cells) throw InvariantError("infeasible region target");
  }
  detail::Fitter fitter(cs);
  fitter.initialize(options.warm_start);
  const double inner_tol = options.tol * 1e-2;
  double worst = fitter.worst_residual();
  int sweeps = 0;
  while (worst > options.tol) {
    if (sweeps >= options.max_iter) {
      if (!options.require_convergence) break;
      throw ConvergenceError("max-ent fit did not converge after " + std::to_string(sweeps) +
                                 " sweeps (worst residual " + std::to_string(worst) + ")",
                             worst);
    }
    for (std::size_t r = 0; r < cs.regions.size(); ++r) fitter.solve(r, inner_tol);
    ++sweeps;
    worst = fitter.worst_residual();
  }

  MaxEntState state;
  state.n = cs.n;
  state.m = cs.m;
  state.lambdas = fitter.lambdas();
  state.classes = cs.classes;
  state.logits.reserve(cs.classes.size());
  for (double s : fitter.sums()) state.logits.push_back(detail::clamp_logit(s));
  state.worst_residual = worst;
  state.sweeps = sweeps;
  state.converged = worst <= options.tol;
  return state;
}

inline MaxEntState fit(const ConstraintSystem& cs, double tol, int max_iter) {
  FitOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return fit(cs, options);
}

// Shannon-optimal length of the adjacency upper triangle under the fitted
// distribution: -log Pr over edges plus -log(1 - Pr) over non-edges,
// aggregated per cell class.
inline double data_length(const MaxEntState& state) {
  double nats = 0.0;
  for (std::size_t c = 0; c < state.classes.size(); ++c) {
    const auto& cls = state.classes[c];
    if (cls.edges < 0.0 || cls.edges > cls.cells) throw InvariantError("cell class edge count out of range");
    const double logit = state.logits[c];
    const double p = detail::sigmoid(logit);
    if ((cls.edges > 0.0 && p <= 0.0) || (cls.cells - cls.edges > 0.0 && p >= 1.0)) {
      throw InvariantError("edge probability saturated at an observed cell; data length is infinite");
    }
    nats += cls.edges * detail::softplus(-logit) + (cls.cells - cls.edges) * detail::softplus(logit);
  }
  return nats / std::numbers::ln2;
}

inline double data_length(const Graph& g, const MaxEntState& state) {
  if (g.node_count() != state.n || g.edge_count() != state.m) {
    throw InvariantError("max-ent state was fitted for a different graph");
  }
  return data_length(state);
}

// L(G | M) for a whole model.
inline double model_data_length(const Graph& g, const Model& model, const FitOptions& options = {}) {
  return data_length(g, fit(build_constraints(g, model), options));
}

}  // namespace graphsim
