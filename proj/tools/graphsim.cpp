// graphsim: summarize graphs with structure vocabularies and compare them.
//
//   graphsim gen er|ba|plant|grid ...
//   graphsim summarize GRAPH
//   graphsim describe GRAPH1 GRAPH2
//   graphsim matrix GRAPHS...|DIR
//   graphsim tree GRAPH
//
// Exit codes: 0 success, 1 internal or convergence error, 2 usage or input
// error. Summarizer settings come from flags, then --config, then defaults.
// GRAPHSIM_CACHE names a directory of cached models for describe, matrix and
// tree.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "graphsim/graphsim.hpp"

namespace fs = std::filesystem;
using namespace graphsim;

namespace {

struct SummarizerFlags {
  std::string config_path;
  std::optional<std::size_t> min_size;
  std::optional<std::size_t> max_structures;
  std::optional<std::size_t> max_rejections;
  std::optional<double> merge_overlap;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON file of summarizer settings")->check(CLI::ExistingFile);
    app.add_option("--min-size", min_size, "smallest structure considered (disables the small-graph rule)");
    app.add_option("--max-structures", max_structures, "stop after this many accepted structures");
    app.add_option("--max-rejections", max_rejections, "stop after this many rejected candidates");
    app.add_option("--merge-overlap", merge_overlap, "node overlap at which candidates are merged");
  }

  SummarizerConfig resolve() const {
    SummarizerConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InputError("cannot open " + config_path);
      try {
        apply_config(json::parse(in), cfg);
      } catch (const json::parse_error& e) {
        throw InputError(config_path + ": " + e.what());
      }
    }
    if (min_size) {
      cfg.min_component_size = *min_size;
      cfg.small_graph_mode = false;
    }
    if (max_structures) cfg.max_structures = *max_structures;
    if (max_rejections) cfg.max_rejections = *max_rejections;
    if (merge_overlap) cfg.merge_overlap = *merge_overlap;
    cfg.validate();
    return cfg;
  }
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::string kind_counts(const std::vector<Structure>& structures) {
  std::array<std::size_t, kKindCount> c{};
  for (const auto& s : structures) ++c[index_of(s.kind)];
  std::string out;
  for (auto kind : kAllKinds) {
    if (!out.empty()) out += ", ";
    out += std::to_string(c[index_of(kind)]) + " " + std::string(to_string(kind));
  }
  return out;
}

// kind:a or kind:axb, e.g. clique:30, star:50, biclique:8x12.
PlantSpec parse_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("structure spec '" + text + "' needs kind:size");
  const auto kind = parse_kind(text.substr(0, colon));
  if (!kind) throw InputError("unknown structure kind in '" + text + "'");
  PlantSpec spec{*kind, 0, 0};
  const auto sizes = text.substr(colon + 1);
  const auto x = sizes.find('x');
  try {
    spec.a = std::stoul(sizes.substr(0, x));
    if (x != std::string::npos) spec.b = std::stoul(sizes.substr(x + 1));
  } catch (const std::exception&) {
    throw InputError("bad sizes in structure spec '" + text + "'");
  }
  const bool two_sided = node_slots(*kind) == 2 && *kind != StructureKind::Star;
  if (two_sided != (x != std::string::npos)) throw InputError("structure spec '" + text + "' has the wrong arity");
  return spec;
}

void write_graph(const Graph& g, const std::string& path, const std::vector<Structure>* truth) {
  save_edge_list(g, path);
  if (truth) save_json(to_json(*truth, g), (fs::path(path).replace_extension(".truth.json")).string());
}

std::vector<std::string> graph_paths(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) {
      out.push_back(in);
      continue;
    }
    std::vector<std::string> found;
    for (const auto& e : fs::directory_iterator(in)) {
      const auto ext = e.path().extension();
      if (e.is_regular_file() && ext != ".json" && ext != ".csv" && ext != ".dot") found.push_back(e.path().string());
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

Model model_for(const Graph& g, const std::string& model_path, const SummarizerConfig& cfg, const ModelCache& cache) {
  if (!model_path.empty()) {
    auto m = load_model(model_path, &g);
    if (m.n != g.node_count() || m.m != g.edge_count()) throw InputError(model_path + " does not belong to its graph");
    return m;
  }
  return cache.summarize(g, cfg).model;
}

std::vector<std::string> labels_of(const std::vector<Structure>& structures) {
  std::vector<std::string> out;
  for (const auto& s : structures) out.push_back(structure_label(s));
  return out;
}

void write_dot_file(const std::string& path, const OverlapTree& tree, const std::vector<std::string>& labels,
                    const std::string& name) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_dot(out, tree, labels, name);
}

int run(int argc, char** argv) {
  CLI::App app{"MDL structure summaries and graph similarity"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  app.add_option("--seed", seed, "seed for every random choice")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads for matrix")->check(CLI::PositiveNumber)->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "write synthetic graphs as edge lists");
  gen->require_subcommand(1);
  std::size_t n = 1000, k = 2, total = 12;
  double p = 0.01;
  std::string out_path;
  std::vector<std::string> specs;
  std::vector<std::size_t> sizes{3000, 6000, 10000};
  auto* gen_er = gen->add_subcommand("er", "Erdos-Renyi G(n, p)");
  auto* gen_ba = gen->add_subcommand("ba", "Barabasi-Albert with k edges per arriving node");
  auto* gen_plant = gen->add_subcommand("plant", "structures planted in ER noise, plus ground truth");
  auto* gen_grid = gen->add_subcommand("grid", "one graph per kind composition and size, plus ground truth");
  for (auto* c : {gen_er, gen_ba, gen_plant}) {
    c->add_option("-n,--nodes", n)->capture_default_str();
    c->add_option("-o,--output", out_path, "edge list path")->required();
  }
  for (auto* c : {gen_er, gen_plant}) c->add_option("-p,--prob", p, "edge probability")->capture_default_str();
  gen_ba->add_option("-k", k)->capture_default_str();
  gen_plant->add_option("-s,--structure", specs, "kind:size or kind:leftxright, repeatable")->required();
  gen_grid->add_option("-o,--output", out_path, "output directory")->required();
  gen_grid->add_option("--sizes", sizes, "comma-separated node counts")->delimiter(',')->capture_default_str();
  gen_grid->add_option("--total", total, "structures per graph, split evenly over its kinds")->capture_default_str();

  // summarize
  auto* summ = app.add_subcommand("summarize", "find a structure model of one graph");
  std::string graph1, graph2, model1, model2, alignment_path, summary_out, describe_out, matrix_out, tree_out;
  SummarizerFlags sflags;
  summ->add_option("graph", graph1)->required();
  summ->add_option("-o,--output", summary_out, "model JSON path (default: GRAPH stem + .model.json)");
  sflags.attach(*summ);

  // describe
  auto* desc = app.add_subcommand("describe", "describe two graphs through a common model");
  bool no_overlap = false, no_data = false;
  desc->add_option("graph1", graph1)->required();
  desc->add_option("graph2", graph2)->required();
  desc->add_option("--model1", model1, "precomputed model of graph1")->check(CLI::ExistingFile);
  desc->add_option("--model2", model2, "precomputed model of graph2")->check(CLI::ExistingFile);
  desc->add_option("--alignment", alignment_path, "node alignment: one 'label1 label2' pair per line")
      ->check(CLI::ExistingFile);
  desc->add_flag("--no-overlap", no_overlap, "match greedily by size only");
  desc->add_flag("--no-data", no_data, "skip the data terms");
  desc->add_option("-o,--output", describe_out, "prefix for PREFIX.json and PREFIX.{g1,g2,common}.dot")
      ->default_val("describe");
  sflags.attach(*desc);

  // matrix
  auto* mat = app.add_subcommand("matrix", "pairwise distances of several graphs");
  std::vector<std::string> inputs;
  mat->add_option("graphs", inputs, "edge lists or directories of them")->required();
  mat->add_flag("--no-overlap", no_overlap, "match greedily by size only");
  mat->add_option("-o,--output", matrix_out, "prefix for PREFIX.csv and PREFIX.json")->default_val("matrix");
  sflags.attach(*mat);

  // tree
  auto* tree = app.add_subcommand("tree", "node-overlap tree of one model");
  tree->add_option("graph", graph1)->required();
  tree->add_option("--model", model1, "precomputed model")->check(CLI::ExistingFile);
  tree->add_option("-o,--output", tree_out, "prefix for PREFIX.dot and PREFIX.json")->default_val("tree");
  sflags.attach(*tree);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const ModelCache cache = ModelCache::from_environment();

  if (gen_er->parsed()) {
    write_graph(er(n, p, seed), out_path, nullptr);
  } else if (gen_ba->parsed()) {
    write_graph(ba(n, k, seed), out_path, nullptr);
  } else if (gen_plant->parsed()) {
    std::vector<PlantSpec> planted;
    for (const auto& s : specs) planted.push_back(parse_spec(s));
    const auto pg = plant(n, p, planted, seed);
    write_graph(pg.graph, out_path, &pg.truth);
  } else if (gen_grid->parsed()) {
    fs::create_directories(out_path);
    std::uint64_t s = seed;
    for (const auto& comp : kind_compositions()) {
      std::string name;
      for (auto kind : comp) name += (name.empty() ? "" : "-") + std::string(to_string(kind));
      for (auto size : sizes) {
        const auto pg = plant(size, 1.0 / static_cast<double>(size), composition_specs(comp, size, total), s++);
        write_graph(pg.graph, (fs::path(out_path) / (name + "_n" + std::to_string(size) + ".txt")).string(),
                    &pg.truth);
      }
    }
  } else if (summ->parsed()) {
    const auto cfg = sflags.resolve();
    const auto g = load_edge_list(graph1);
    const auto s = summarize(g, cfg);
    const auto path = summary_out.empty() ? stem_of(graph1) + ".model.json" : summary_out;
    save_json(to_json(s, &g), path);
    const auto& r = s.report;
    std::printf("structures: %zu (%s)\n", s.model.structures.size(), kind_counts(s.model.structures).c_str());
    std::printf("bits: %.1f (model %.1f + data %.1f), empty model %.1f\n", r.total_bits(), r.model_bits, r.data_bits,
                r.baseline_bits);
    std::printf("L%%: %.2f\n", r.compression_percent());
    std::printf("stopped: %s; model written to %s\n", r.stop_reason.c_str(), path.c_str());
  } else if (desc->parsed()) {
    const auto cfg = sflags.resolve();
    const auto g1 = load_edge_list(graph1);
    const auto g2 = load_edge_list(graph2);
    const auto m1 = model_for(g1, model1, cfg, cache);
    const auto m2 = model_for(g2, model2, cfg, cache);
    std::optional<NodeAlignment> alignment;
    if (!alignment_path.empty()) alignment = load_alignment(alignment_path, g1, g2);
    DescribeOptions opt;
    opt.match.no_overlap = no_overlap;
    opt.data_terms = !no_data;
    const auto d = describe(g1, g2, m1, m2, alignment ? &*alignment : nullptr, opt);
    save_json(to_json(d, m1, m2, &g1, &g2), describe_out + ".json");

    const auto& al = d.alignment;
    const bool swapped = al.common.header.swapped;
    std::vector<Structure> shared;
    for (const auto& pr : al.pairs) shared.push_back(m1.structures[pr.index1]);
    const auto& only1 = swapped ? al.transform.unmatched2 : al.transform.unmatched1;
    const auto& only2 = swapped ? al.transform.unmatched1 : al.transform.unmatched2;
    std::printf("shared: %zu (%s)\n", shared.size(), kind_counts(shared).c_str());
    std::printf("only in %s: %zu (%s)\n", graph1.c_str(), only1.size(), kind_counts(only1).c_str());
    std::printf("only in %s: %zu (%s)\n", graph2.c_str(), only2.size(), kind_counts(only2).c_str());
    for (std::size_t i = 0; i < al.pairs.size(); ++i) {
      const auto& pr = al.pairs[i];
      std::printf("  %s ~ %s  jaccard %.3f\n", structure_label(m1.structures[pr.index1]).c_str(),
                  structure_label(m2.structures[pr.index2]).c_str(), pr.jaccard);
    }
    const auto r = nmd(d, m1, m2);
    std::printf("bits: common %.1f, changes %.1f", d.common_bits, d.transform_bits);
    if (d.has_data) std::printf(", data %.1f, total %.1f", d.data_bits, d.objective());
    std::printf("\nnmd: %.4f%s\n", r.value, r.clamped ? " (clamped)" : "");

    write_dot_file(describe_out + ".g1.dot", overlap_tree(m1.structures), labels_of(m1.structures), "g1");
    write_dot_file(describe_out + ".g2.dot", overlap_tree(m2.structures), labels_of(m2.structures), "g2");
    const Model& c1 = swapped ? m2 : m1;
    const Model& c2 = swapped ? m1 : m2;
    std::vector<std::string> common_labels;
    for (const auto& [i, j] : al.matching.pairs) common_labels.push_back(structure_label(c1.structures[i]));
    write_dot_file(describe_out + ".common.dot", common_overlap_tree(al.matching, c1.structures, c2.structures),
                   common_labels, "common");
  } else if (mat->parsed()) {
    const auto cfg = sflags.resolve();
    const auto paths = graph_paths(inputs);
    if (paths.size() < 2) throw InputError("a distance matrix needs at least two graphs");
    std::vector<Graph> graphs;
    std::vector<std::string> ids;
    for (const auto& path : paths) {
      graphs.push_back(load_edge_list(path));
      ids.push_back(stem_of(path));
    }
    MatrixOptions opt;
    opt.summarizer = cfg;
    opt.match.no_overlap = no_overlap;
    opt.jobs = jobs;
    const auto m = pairwise_matrix(ids, graphs, opt, {}, cache);
    std::ofstream csv(matrix_out + ".csv");
    if (!csv) throw InputError("cannot write " + matrix_out + ".csv");
    write_csv(csv, m);
    save_json(to_json(m), matrix_out + ".json");
    std::printf("%zu graphs, %zu pairs written to %s.csv and %s.json\n", ids.size(),
                ids.size() * (ids.size() - 1) / 2, matrix_out.c_str(), matrix_out.c_str());
  } else if (tree->parsed()) {
    const auto cfg = sflags.resolve();
    const auto g = load_edge_list(graph1);
    const auto m = model_for(g, model1, cfg, cache);
    const auto t = overlap_tree(m.structures);
    write_dot_file(tree_out + ".dot", t, labels_of(m.structures), "overlap");
    auto j = to_json(t);
    j["structures"] = to_json(m, &g)["structures"];
    save_json(j, tree_out + ".json");
    std::printf("%zu structures, %zu overlap edges, weight %.3f\n", t.vertices, t.edges.size(), t.weight());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InputError& e) {
    std::fprintf(stderr, "graphsim: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "graphsim: internal error: %s\n", e.what());
    return 1;
  }
}
