#pragma once

// Hub-burning decomposition into small-diameter seed components.
//
// Repeatedly take the globally largest connected component of the residual
// graph, pick its highest-degree node v, emit {v} ∪ N(v) and delete every edge
// incident to v. Component sizes are kept up to date incrementally: after a
// burn, breadth-first searches start from v's former neighbours in lockstep
// and stop as soon as at most one of them is still running, so only the
// pieces that actually split off are fully explored.

#include <cstdint>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "graphsim/graph.hpp"

namespace graphsim {

namespace detail {

class Decomposer {
 public:
  Decomposer(const Graph& g, std::size_t threshold)
      : g_(g),
        threshold_(threshold),
        burned_(g.node_count(), 0),
        degree_(g.node_count(), 0),
        comp_(g.node_count(), 0),
        owner_epoch_(g.node_count(), 0),
        owner_(g.node_count(), 0) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
      degree_[v] = static_cast<std::uint32_t>(g.degree(v));
      by_degree_.emplace(-static_cast<std::int64_t>(degree_[v]), v);
    }
    std::vector<char> seen(g.node_count(), 0);
    for (NodeId s = 0; s < g.node_count(); ++s) {
      if (seen[s]) continue;
      std::vector<NodeId> nodes{s};
      seen[s] = 1;
      for (std::size_t head = 0; head < nodes.size(); ++head) {
        for (NodeId w : g.neighbors(nodes[head])) {
          if (!seen[w]) {
            seen[w] = 1;
            nodes.push_back(w);
          }
        }
      }
      new_component(std::move(nodes));
    }
  }

  std::vector<NodeSet> run() {
    std::vector<NodeSet> out;
    while (auto id = pop_largest()) {
      if (by_degree_.empty() || static_cast<std::size_t>(-by_degree_.begin()->first) + 1 < threshold_) break;
      const NodeId v = pick_hub(*id);
      std::vector<NodeId> seed{v};
      for (NodeId w : g_.neighbors(v)) {
        if (!burned_[w]) seed.push_back(w);
      }
      if (seed.size() >= threshold_) out.push_back(make_node_set(seed));
      burn(v);
    }
    return out;
  }

 private:
  std::uint32_t new_component(std::vector<NodeId> nodes) {
    const auto id = static_cast<std::uint32_t>(size_.size());
    for (NodeId v : nodes) comp_[v] = id;
    size_.push_back(nodes.size());
    version_.push_back(0);
    nodes_.push_back(std::move(nodes));
    push(id);
    return id;
  }

  void push(std::uint32_t id) {
    if (size_[id] >= threshold_) heap_.emplace(size_[id], id, ++version_[id]);
  }

  // Drops stale entries of a component's node list and returns it.
  const std::vector<NodeId>& members(std::uint32_t id) {
    std::erase_if(nodes_[id], [&](NodeId v) { return comp_[v] != id; });
    return nodes_[id];
  }

  NodeId min_member(std::uint32_t id) {
    const auto& m = members(id);
    return *std::min_element(m.begin(), m.end());
  }

  // Largest component; equal sizes go to the one holding the lowest index.
  std::optional<std::uint32_t> pop_largest() {
    auto valid = [&](const Entry& e) { return std::get<2>(e) == version_[std::get<1>(e)]; };
    while (!heap_.empty() && !valid(heap_.top())) heap_.pop();
    if (heap_.empty()) return std::nullopt;
    const std::size_t size = std::get<0>(heap_.top());
    std::vector<std::uint32_t> tied;
    while (!heap_.empty() && std::get<0>(heap_.top()) == size) {
      if (valid(heap_.top())) tied.push_back(std::get<1>(heap_.top()));
      heap_.pop();
    }
    std::uint32_t best = tied.front();
    if (tied.size() > 1) {
      NodeId best_min = min_member(best);
      for (std::size_t i = 1; i < tied.size(); ++i) {
        const NodeId m = min_member(tied[i]);
        if (m < best_min) {
          best = tied[i];
          best_min = m;
        }
      }
    }
    for (auto id : tied) {
      if (id != best) heap_.emplace(size_[id], id, version_[id]);
    }
    return best;
  }

  // Highest residual degree inside the component, lowest index on ties.
  NodeId pick_hub(std::uint32_t id) {
    int scanned = 0;
    for (auto it = by_degree_.begin(); it != by_degree_.end() && scanned < 64; ++it, ++scanned) {
      if (comp_[it->second] == id) return it->second;
    }
    NodeId best = 0;
    bool found = false;
    for (NodeId v : members(id)) {
      if (!found || degree_[v] > degree_[best] || (degree_[v] == degree_[best] && v < best)) {
        best = v;
        found = true;
      }
    }
    return best;
  }

  void set_degree(NodeId v, std::uint32_t d) {
    by_degree_.erase({-static_cast<std::int64_t>(degree_[v]), v});
    degree_[v] = d;
    if (!burned_[v]) by_degree_.emplace(-static_cast<std::int64_t>(d), v);
  }

  void burn(NodeId v) {
    std::vector<NodeId> around;
    for (NodeId w : g_.neighbors(v)) {
      if (!burned_[w]) around.push_back(w);
    }
    burned_[v] = 1;
    set_degree(v, 0);
    for (NodeId w : around) set_degree(w, degree_[w] - 1);
    const std::uint32_t old = comp_[v];
    --size_[old];
    comp_[v] = static_cast<std::uint32_t>(size_.size());
    size_.push_back(1);
    version_.push_back(0);
    nodes_.push_back({v});
    split(old, around);
  }

  // Re-labels the pieces of component `old` that became disconnected when the
  // edges to `starts` were deleted.
  void split(std::uint32_t old, const std::vector<NodeId>& starts) {
    if (starts.size() <= 1) {
      push(old);
      return;
    }
    ++epoch_;
    const std::size_t k = starts.size();
    std::vector<std::vector<NodeId>> visited(k);
    std::vector<std::size_t> head(k, 0);
    std::vector<std::size_t> parent(k);
    for (std::size_t s = 0; s < k; ++s) parent[s] = s;
    auto find = [&](std::size_t s) {
      while (parent[s] != s) s = parent[s] = parent[parent[s]];
      return s;
    };
    for (std::size_t s = 0; s < k; ++s) {
      const NodeId u = starts[s];
      if (owner_epoch_[u] == epoch_) {
        parent[find(s)] = find(owner_[u]);
        continue;
      }
      owner_epoch_[u] = epoch_;
      owner_[u] = static_cast<std::uint32_t>(s);
      visited[s].push_back(u);
    }
    auto running = [&](std::size_t s) { return head[s] < visited[s].size(); };
    auto unfinished_groups = [&]() {
      std::vector<char> live(k, 0);
      std::size_t count = 0;
      for (std::size_t s = 0; s < k; ++s) {
        if (running(s)) {
          const auto r = find(s);
          if (!live[r]) {
            live[r] = 1;
            ++count;
          }
        }
      }
      return count;
    };
    while (unfinished_groups() > 1) {
      for (std::size_t s = 0; s < k; ++s) {
        if (!running(s)) continue;
        const NodeId x = visited[s][head[s]++];
        for (NodeId y : g_.neighbors(x)) {
          if (burned_[y]) continue;
          if (owner_epoch_[y] == epoch_) {
            const auto a = find(s);
            const auto b = find(owner_[y]);
            if (a != b) parent[a] = b;
          } else {
            owner_epoch_[y] = epoch_;
            owner_[y] = static_cast<std::uint32_t>(s);
            visited[s].push_back(y);
          }
        }
      }
    }
    // Finished groups are complete pieces; the unfinished one (if any) keeps
    // the old id.
    std::vector<std::vector<NodeId>> pieces(k);
    std::vector<char> finished(k, 1);
    for (std::size_t s = 0; s < k; ++s) {
      const auto r = find(s);
      if (running(s)) finished[r] = 0;
      pieces[r].insert(pieces[r].end(), visited[s].begin(), visited[s].end());
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (find(r) != r || !finished[r]) continue;
      size_[old] -= pieces[r].size();
      new_component(std::move(pieces[r]));
    }
    push(old);
  }

  using Entry = std::tuple<std::size_t, std::uint32_t, std::uint32_t>;  // size, id, version

  const Graph& g_;
  std::size_t threshold_;
  std::vector<char> burned_;
  std::vector<std::uint32_t> degree_;
  std::set<std::pair<std::int64_t, NodeId>> by_degree_;
  std::vector<std::uint32_t> comp_;
  std::vector<std::size_t> size_;
  std::vector<std::uint32_t> version_;
  std::vector<std::vector<NodeId>> nodes_;
  std::priority_queue<Entry> heap_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> owner_epoch_;
  std::vector<std::uint32_t> owner_;
};

}  // namespace detail

// Seed components in extraction order. Components smaller than `threshold`
// are not emitted, and the process stops once no component of that size
// remains or no residual node could head one.
inline std::vector<NodeSet> decompose(const Graph& g, std::size_t threshold) {
  return detail::Decomposer(g, std::max<std::size_t>(threshold, 1)).run();
}

}  // namespace graphsim
