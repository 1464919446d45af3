#pragma once

// Normalized Model Distance and pairwise NMD matrices.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "graphsim/aligner.hpp"
#include "graphsim/codec.hpp"
#include "graphsim/error.hpp"
#include "graphsim/json_io.hpp"
#include "graphsim/summarizer.hpp"

namespace graphsim {

struct NmdResult {
  double value = 0.0;  // in [0, 1]
  double raw = 0.0;    // the unclamped formula
  bool clamped = false;
  double common_bits = 0.0;     // L(M12)
  double transform_bits = 0.0;  // L(Δ1, Δ2), no node IDs
  double model1_bits = 0.0;     // L(M1), no node IDs
  double model2_bits = 0.0;
};

// True when the common model reproduces both models without any change:
// equal totals, everything matched, all deltas zero.
inline bool is_identity(const ModelAlignment& a) {
  const auto& h = a.common.header;
  if (h.n1 != h.n2 || h.m1 != h.m2) return false;
  if (!a.transform.unmatched1.empty() || !a.transform.unmatched2.empty()) return false;
  return std::all_of(a.transform.deltas.begin(), a.transform.deltas.end(), [](const SlotDeltas& d) { return d.is_zero(); });
}

// NMD from the lengths of a model alignment. Identical models give 0 and an
// empty common model gives 1; otherwise the formula is clamped to [0, 1] and
// `clamped` records a raw value above 1.
inline NmdResult nmd(const ModelAlignment& a, const Model& m1, const Model& m2) {
  NmdResult r;
  r.common_bits = common_model_length(a.common);
  r.transform_bits = transform_length(a.common, a.transform, false);
  r.model1_bits = model_length(m1, false);
  r.model2_bits = model_length(m2, false);
  const double hi = std::max(r.model1_bits, r.model2_bits);
  const double lo = std::min(r.model1_bits, r.model2_bits);
  if (!(hi > 0.0)) throw DomainError("NMD undefined: both models have length 0");
  r.raw = (r.common_bits + r.transform_bits - lo) / hi;
  r.clamped = r.raw > 1.0;
  if (is_identity(a)) {
    r.value = 0.0;
  } else if (a.common.shared.empty()) {
    r.value = 1.0;
  } else {
    r.value = std::clamp(r.raw, 0.0, 1.0);
  }
  return r;
}

inline NmdResult nmd(const Model& m1, const Model& m2, const NodeAlignment* alignment = nullptr,
                     const MatchOptions& options = {}) {
  return nmd(align_models(m1, m2, alignment, options), m1, m2);
}

inline NmdResult nmd(const SimilarityDescription& d, const Model& m1, const Model& m2) {
  return nmd(d.alignment, m1, m2);
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman needs two equally long samples");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("spearman undefined for a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

// Runs f(i) for i in [0, count) on up to `jobs` threads.
template <typename F>
void parallel_for(std::size_t count, std::size_t jobs, F&& f) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Models keyed by a hash of the graph's edge list and the summarizer
// configuration, stored as JSON files in `dir`. An empty dir disables caching.
class ModelCache {
 public:
  ModelCache() = default;
  explicit ModelCache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  static ModelCache from_environment() {
    const char* dir = std::getenv("GRAPHSIM_CACHE");
    return ModelCache(dir ? dir : "");
  }

  bool enabled() const { return !dir_.empty(); }

  static std::string key(const Graph& g, const SummarizerConfig& cfg) {
    std::ostringstream bytes;
    bytes << g.node_count() << ' ' << g.edge_count() << '\n';
    for (const auto& [u, v] : g.edges()) bytes << u << ' ' << v << '\n';
    bytes << to_json(cfg).dump();
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(bytes.str())));
    return hex;
  }

  Summary summarize(const Graph& g, const SummarizerConfig& cfg) const {
    if (!enabled()) return graphsim::summarize(g, cfg);
    const auto path = std::filesystem::path(dir_) / (key(g, cfg) + ".model.json");
    if (std::filesystem::exists(path)) {
      Summary cached;
      cached.model = load_model(path.string(), nullptr);
      return cached;
    }
    Summary fresh = graphsim::summarize(g, cfg);
    const auto tmp = path.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    save_json(to_json(fresh.model), tmp);
    std::filesystem::rename(tmp, path);
    return fresh;
  }

 private:
  std::string dir_;
};

struct MatrixOptions {
  SummarizerConfig summarizer;
  MatchOptions match;
  std::size_t jobs = 1;
};

// Symmetric NMD matrix; the diagonal is 0 by definition and each unordered
// pair is computed once.
struct NmdMatrix {
  std::vector<std::string> ids;
  std::vector<std::vector<NmdResult>> cells;
};

using AlignmentMap = std::map<std::pair<std::size_t, std::size_t>, NodeAlignment>;

// `alignments` holds graph-i-to-graph-j alignments for i < j.
inline NmdMatrix pairwise_matrix(const std::vector<std::string>& ids, const std::vector<Model>& models,
                                 const MatrixOptions& options, const AlignmentMap& alignments = {}) {
  if (models.size() < 2) throw InputError("a distance matrix needs at least two graphs");
  if (ids.size() != models.size()) throw InputError("one id per model required");
  const std::size_t k = models.size();
  NmdMatrix out;
  out.ids = ids;
  out.cells.assign(k, std::vector<NmdResult>(k));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  }
  std::vector<NmdResult> results(pairs.size());
  parallel_for(pairs.size(), options.jobs, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    auto it = alignments.find({i, j});
    results[p] = nmd(models[i], models[j], it == alignments.end() ? nullptr : &it->second, options.match);
  });
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    out.cells[i][j] = out.cells[j][i] = results[p];
  }
  return out;
}

inline std::vector<Model> summarize_all(const std::vector<Graph>& graphs, const SummarizerConfig& cfg,
                                        std::size_t jobs, const ModelCache& cache = ModelCache()) {
  std::vector<Model> models(graphs.size());
  parallel_for(graphs.size(), jobs, [&](std::size_t i) { models[i] = cache.summarize(graphs[i], cfg).model; });
  return models;
}

inline NmdMatrix pairwise_matrix(const std::vector<std::string>& ids, const std::vector<Graph>& graphs,
                                 const MatrixOptions& options, const AlignmentMap& alignments = {},
                                 const ModelCache& cache = ModelCache()) {
  if (graphs.size() < 2) throw InputError("a distance matrix needs at least two graphs");
  return pairwise_matrix(ids, summarize_all(graphs, options.summarizer, options.jobs, cache), options, alignments);
}

inline json to_json(const NmdResult& r) {
  return json{{"value", r.value},
              {"raw", r.raw},
              {"clamped", r.clamped},
              {"L_M12", r.common_bits},
              {"L_delta", r.transform_bits},
              {"L_M1", r.model1_bits},
              {"L_M2", r.model2_bits}};
}

inline json to_json(const NmdMatrix& m) {
  json j;
  j["ids"] = m.ids;
  j["nmd"] = json::array();
  j["components"] = json::array();
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.ids.size(); ++k) row.push_back(m.cells[i][k].value);
    j["nmd"].push_back(row);
    for (std::size_t k = i + 1; k < m.ids.size(); ++k) {
      json c = to_json(m.cells[i][k]);
      c["row"] = m.ids[i];
      c["col"] = m.ids[k];
      j["components"].push_back(c);
    }
  }
  return j;
}

inline void write_csv(std::ostream& out, const NmdMatrix& m) {
  out << "graph";
  for (const auto& id : m.ids) out << ',' << id;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    out << m.ids[i];
    for (std::size_t k = 0; k < m.ids.size(); ++k) out << ',' << m.cells[i][k].value;
    out << '\n';
  }
}

// Description JSON: structures are written with labels of their own graph;
// pair annotations refer to the caller's argument order.
inline json to_json(const SimilarityDescription& d, const Model& m1, const Model& m2, const Graph* g1 = nullptr,
                    const Graph* g2 = nullptr) {
  const auto& a = d.alignment;
  const bool swapped = a.common.header.swapped;
  json j;
  j["header"] = to_json(a.common.header);
  j["shared"] = json::array();
  for (std::size_t s = 0; s < a.common.shared.size(); ++s) {
    const auto& cs = a.common.shared[s];
    const auto& p = a.pairs[s];
    json e;
    e["kind"] = to_string(cs.kind);
    e["fractions"] = detail::slots(cs.fractions, node_slots(cs.kind));
    e["densities"] = detail::slots(cs.densities, edge_slots(cs.kind));
    e["deltas"] = json{{"nodes", detail::slots(a.transform.deltas[s].nodes, node_slots(cs.kind))},
                       {"edges", detail::slots(a.transform.deltas[s].edges, edge_slots(cs.kind))}};
    e["index_1"] = p.index1;
    e["index_2"] = p.index2;
    e["structure_1"] = to_json(m1.structures[p.index1], g1);
    e["structure_2"] = to_json(m2.structures[p.index2], g2);
    e["jaccard"] = p.jaccard;
    if (p.aligned_jaccard) e["aligned_jaccard"] = *p.aligned_jaccard;
    j["shared"].push_back(e);
  }
  // Unmatched lists in the caller's order.
  const auto& un1 = swapped ? a.transform.unmatched2 : a.transform.unmatched1;
  const auto& un2 = swapped ? a.transform.unmatched1 : a.transform.unmatched2;
  j["unmatched_1"] = json::array();
  for (const auto& s : un1) j["unmatched_1"].push_back(to_json(s, g1));
  j["unmatched_2"] = json::array();
  for (const auto& s : un2) j["unmatched_2"].push_back(to_json(s, g2));
  json lengths{{"L_M12", d.common_bits},
               {"L_delta", d.transform_bits},
               {"L_delta_no_ids", d.transform_bits_no_ids}};
  if (d.has_data) {
    lengths["L_data"] = d.data_bits;
    lengths["objective"] = d.objective();
  } else {
    lengths["L_data"] = nullptr;
    lengths["objective"] = nullptr;
  }
  j["lengths"] = lengths;
  j["nmd"] = to_json(nmd(d, m1, m2));
  return j;
}

}  // namespace graphsim
