#pragma once

// JSON and CSV export of models, reports, descriptions and NMD matrices, and
// JSON import of models.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "graphsim/aligner.hpp"
#include "graphsim/error.hpp"
#include "graphsim/generators.hpp"
#include "graphsim/graph.hpp"
#include "graphsim/structure.hpp"
#include "graphsim/summarizer.hpp"

namespace graphsim {

using json = nlohmann::ordered_json;

namespace detail {

inline json node_list(const NodeSet& nodes, const Graph* g) {
  json out = json::array();
  for (NodeId v : nodes) {
    if (g) {
      out.push_back(g->label(v));
    } else {
      out.push_back(v);
    }
  }
  return out;
}

inline NodeSet read_nodes(const json& j, const Graph* g) {
  std::vector<NodeId> out;
  for (const auto& x : j) {
    if (x.is_string()) {
      if (!g) throw InputError("node labels in a model need the graph");
      auto id = g->index_of(x.get<std::string>());
      if (!id) throw InputError("model refers to unknown node '" + x.get<std::string>() + "'");
      out.push_back(*id);
    } else {
      out.push_back(x.get<NodeId>());
    }
  }
  return make_node_set(std::move(out));
}

inline json slots(const auto& values, std::size_t count) {
  json out = json::array();
  for (std::size_t i = 0; i < count; ++i) out.push_back(values[i]);
  return out;
}

}  // namespace detail

// Node lists are written as labels when a graph is given, as indices otherwise.
inline json to_json(const Structure& s, const Graph* g = nullptr) {
  json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case StructureKind::Clique: j["nodes"] = detail::node_list(s.first, g); break;
    case StructureKind::Star:
      j["hub"] = detail::node_list(s.first, g)[0];
      j["spokes"] = detail::node_list(s.second, g);
      break;
    default:
      j["left"] = detail::node_list(s.first, g);
      j["right"] = detail::node_list(s.second, g);
      break;
  }
  j["size"] = s.size();
  j["edge_counts"] = detail::slots(s.edges, edge_slots(s.kind));
  return j;
}

inline Structure structure_from_json(const json& j, const Graph* g = nullptr) {
  try {
    const auto kind = parse_kind(j.at("kind").get<std::string>());
    if (!kind) throw InputError("unknown structure kind '" + j.at("kind").get<std::string>() + "'");
    Structure s;
    s.kind = *kind;
    switch (s.kind) {
      case StructureKind::Clique: s.first = detail::read_nodes(j.at("nodes"), g); break;
      case StructureKind::Star:
        s.first = detail::read_nodes(json::array({j.at("hub")}), g);
        s.second = detail::read_nodes(j.at("spokes"), g);
        break;
      default:
        s.first = detail::read_nodes(j.at("left"), g);
        s.second = detail::read_nodes(j.at("right"), g);
        break;
    }
    if (g) return s.recount(*g);
    const auto& edges = j.at("edge_counts");
    if (edges.size() != edge_slots(s.kind)) throw InputError("wrong number of edge counts");
    for (std::size_t k = 0; k < edges.size(); ++k) s.edges[k] = edges[k].get<std::uint64_t>();
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed structure: ") + e.what());
  }
}

inline json to_json(const Model& m, const Graph* g = nullptr) {
  json j;
  j["n"] = m.n;
  j["m"] = m.m;
  j["structures"] = json::array();
  for (const auto& s : m.structures) j["structures"].push_back(to_json(s, g));
  return j;
}

// With a graph, counts are taken from the graph and n, m must agree with it.
inline Model model_from_json(const json& j, const Graph* g = nullptr) {
  Model m;
  try {
    m.n = j.at("n").get<std::uint64_t>();
    m.m = j.at("m").get<std::uint64_t>();
    for (const auto& s : j.at("structures")) m.structures.push_back(structure_from_json(s, g));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model: ") + e.what());
  }
  if (g && (m.n != g->node_count() || m.m != g->edge_count())) throw InputError("model does not belong to the graph");
  try {
    m.validate();
  } catch (const InvariantError& e) {
    throw InputError(std::string("invalid model: ") + e.what());
  }
  return m;
}

inline Model load_model(const std::string& path, const Graph* g = nullptr) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return model_from_json(json::parse(in), g);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline json to_json(const SummaryReport& r) {
  json j;
  j["threshold"] = r.threshold;
  j["components"] = r.components;
  json gen, merged;
  for (auto kind : kAllKinds) {
    gen[std::string(to_string(kind))] = r.generated[index_of(kind)];
    merged[std::string(to_string(kind))] = r.merged[index_of(kind)];
  }
  j["generated"] = gen;
  j["merged"] = merged;
  j["accepted"] = r.accepted;
  j["rejected"] = r.rejected;
  j["unconverged_fits"] = r.unconverged_fits;
  j["stop_reason"] = r.stop_reason;
  j["baseline_bits"] = r.baseline_bits;
  j["model_bits"] = r.model_bits;
  j["data_bits"] = r.data_bits;
  j["total_bits"] = r.total_bits();
  j["compression_percent"] = r.compression_percent();
  return j;
}

// Model plus the admission ledger and report. model_from_json reads it back
// as a plain model.
inline json to_json(const Summary& summary, const Graph* g = nullptr) {
  json j = to_json(summary.model, g);
  j["ledger"] = json::array();
  for (const auto& e : summary.report.ledger) {
    j["ledger"].push_back(json{{"candidate", e.candidate},
                               {"kind", to_string(e.structure.kind)},
                               {"size", e.structure.size()},
                               {"accepted", e.accepted},
                               {"bits_before", e.bits_before},
                               {"bits_after", e.bits_after}});
  }
  j["report"] = to_json(summary.report);
  return j;
}

namespace detail {

// Visits every tunable summarizer field by its config-file key.
template <typename Config, typename F>
void visit_config(Config& c, F&& f) {
  f("min_component_size", c.min_component_size);
  f("max_structures", c.max_structures);
  f("max_rejections", c.max_rejections);
  f("consecutive_rejections", c.consecutive_rejections);
  f("merge_overlap", c.merge_overlap);
  f("merge_by_smaller", c.merge_by_smaller);
  f("clique_attach_frac", c.clique_attach_frac);
  f("star_spoke_degree_frac", c.star_spoke_degree_frac);
  f("star_prune_base", c.star_prune_base);
  f("star_prune_step", c.star_prune_step);
  f("biclique_seed_cap", c.biclique_seed_cap);
  f("biclique_min_left", c.biclique_min_left);
  f("biclique_min_right", c.biclique_min_right);
  f("starclique_min_core", c.starclique_min_core);
  f("dense_frac", c.dense_frac);
  f("sparse_frac", c.sparse_frac);
  f("small_graph_mode", c.small_graph_mode);
  f("small_graph_nodes", c.small_graph_nodes);
  f("small_graph_threshold", c.small_graph_threshold);
  f("fit_tol", c.fit.tol);
  f("fit_max_iter", c.fit.max_iter);
  f("fit_require_convergence", c.fit.require_convergence);
}

}  // namespace detail

inline json to_json(const SummarizerConfig& c) {
  json j;
  detail::visit_config(c, [&](const char* key, const auto& value) { j[key] = value; });
  return j;
}

// Overrides the fields present in `j`; unknown keys are rejected.
inline void apply_config(const json& j, SummarizerConfig& c) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  std::size_t known = 0;
  detail::visit_config(c, [&](const char* key, auto& value) {
    if (!j.contains(key)) return;
    ++known;
    try {
      j.at(key).get_to(value);
    } catch (const json::exception&) {
      throw InputError(std::string("config key '") + key + "' has the wrong type");
    }
  });
  if (known != j.size()) {
    for (const auto& [key, value] : j.items()) {
      if (!to_json(SummarizerConfig{}).contains(key)) throw InputError("unknown config key '" + key + "'");
    }
  }
  c.validate();
}

inline json to_json(const std::vector<Structure>& truth, const Graph& g) {
  json j = json::array();
  for (const auto& s : truth) j.push_back(to_json(s, &g));
  return j;
}

inline json to_json(const CommonHeader& h) {
  return json{{"n1", h.n1}, {"n2", h.n2}, {"m1", h.m1}, {"m2", h.m2}, {"swapped", h.swapped}};
}

inline json to_json(const OverlapTree& t) {
  json j;
  j["vertices"] = t.vertices;
  j["root_children"] = t.root_children;
  j["edges"] = json::array();
  for (const auto& e : t.edges) j["edges"].push_back(json{{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  j["weight"] = t.weight();
  return j;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace graphsim
