#pragma once

// Sweep harness: vary one generator or walk parameter over a list of
// values, generate a family of benchmark graphs per value, embed each
// graph over an algorithm x dimension grid with several replicates, and
// score every embedding.
//
// Every random draw is derived from the base seed and the run coordinates,
// so a sweep is fully deterministic and runs.csv replays byte-identically.
// runs.csv doubles as the completion ledger: rows are appended in
// enumeration order and flushed one at a time, so an interrupted sweep
// resumes after its last complete row.  Wall-clock timings go to a
// separate timings.csv because they can never replay identically.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gembed/abcd.hpp"
#include "gembed/clustering.hpp"
#include "gembed/embedding.hpp"
#include "gembed/eval.hpp"
#include "gembed/gcl.hpp"
#include "gembed/hope.hpp"
#include "gembed/node2vec.hpp"
#include "gembed/rng.hpp"

namespace gembed {

struct SweepCell {
  std::string algo;  // node2vec | deepwalk | hope | random
  int dim = 0;
};

struct SweepSpec {
  // Varied parameter: xi | n | gamma | beta | delta_max | s_max | p | q |
  // num_walks | walk_length | window | none ("none" requires one value).
  std::string parameter = "xi";
  std::vector<double> values;
  int graphs_per_value = 10;
  int embeddings_per_graph = 10;
  std::vector<SweepCell> cells;
  AbcdParams abcd;
  WalkParams walk;
  SgnsParams sgns;
  EcgParams ecg;
  DivergenceOptions score_opts;
  // Partition the scorer conditions on: the generator's planted communities
  // ("known", default) or a fresh ECG run per graph ("ecg").  Planted keeps
  // the score meaningful across the whole noise range; a modularity
  // clusterer run on pure noise returns selection-biased pockets whose
  // density excess no degree-respecting model reproduces.
  std::string score_partition = "known";
  std::uint64_t base_seed = 1;
};

namespace detail {

inline const std::vector<std::string>& sweep_parameter_names() {
  static const std::vector<std::string> names = {
      "xi", "n",         "gamma",     "beta",   "delta_max", "s_max",
      "p",  "q",         "num_walks", "walk_length", "window", "none"};
  return names;
}

}  // namespace detail

inline void validate_sweep(const SweepSpec& spec) {
  const auto& names = detail::sweep_parameter_names();
  if (std::find(names.begin(), names.end(), spec.parameter) == names.end())
    throw ValidationError("sweep: unknown parameter " + spec.parameter);
  if (spec.values.empty()) throw ValidationError("sweep: empty value list");
  if (spec.parameter == "none" && spec.values.size() != 1)
    throw ValidationError("sweep: parameter none takes exactly one value");
  if (spec.graphs_per_value < 1 || spec.embeddings_per_graph < 1)
    throw ValidationError("sweep: replicate counts must be positive");
  if (spec.cells.empty()) throw ValidationError("sweep: empty algo/dim grid");
  for (const auto& c : spec.cells) {
    if (c.algo != "node2vec" && c.algo != "deepwalk" && c.algo != "hope" &&
        c.algo != "random")
      throw ValidationError("sweep: unknown algorithm " + c.algo);
    if (c.dim < 1) throw ValidationError("sweep: dimension must be positive");
  }
  if (spec.score_partition != "known" && spec.score_partition != "ecg")
    throw ValidationError("sweep: score_partition must be known or ecg");
}

// Applies one swept value onto copies of the base parameter structs.
inline void apply_sweep_value(const SweepSpec& spec, double value,
                              AbcdParams& abcd, WalkParams& walk,
                              SgnsParams& sgns) {
  abcd = spec.abcd;
  walk = spec.walk;
  sgns = spec.sgns;
  const auto as_int = [&](const char* what) {
    const std::int64_t v = std::llround(value);
    if (std::abs(value - static_cast<double>(v)) > 1e-9)
      throw ValidationError(std::string("sweep: ") + what +
                            " requires integer values");
    return v;
  };
  if (spec.parameter == "xi") abcd.xi = value;
  else if (spec.parameter == "n") abcd.n = as_int("n");
  else if (spec.parameter == "gamma") abcd.gamma = value;
  else if (spec.parameter == "beta") abcd.beta = value;
  else if (spec.parameter == "delta_max") abcd.delta_max = as_int("delta_max");
  else if (spec.parameter == "s_max") abcd.s_max = as_int("s_max");
  else if (spec.parameter == "p") walk.p = value;
  else if (spec.parameter == "q") walk.q = value;
  else if (spec.parameter == "num_walks")
    walk.walks_per_node = static_cast<int>(as_int("num_walks"));
  else if (spec.parameter == "walk_length")
    walk.walk_length = static_cast<int>(as_int("walk_length"));
  else if (spec.parameter == "window")
    sgns.window = static_cast<int>(as_int("window"));
  // "none": bases pass through untouched
}

struct SweepRow {
  int value_index = 0;
  double value = 0.0;
  int graph = 0;
  std::uint64_t graph_seed = 0;
  std::string algo;
  int dim = 0;
  int replicate = 0;
  std::uint64_t embed_seed = 0;
  double divergence = 0.0;
  double best_alpha = 0.0;
  bool fit_converged = false;
  NodeId num_communities = 0;
};

inline std::uint64_t sweep_graph_seed(std::uint64_t base, int value_index,
                                      int graph) {
  return derive_seed(base, {1, static_cast<std::uint64_t>(value_index),
                            static_cast<std::uint64_t>(graph)});
}

inline std::uint64_t sweep_cluster_seed(std::uint64_t base, int value_index,
                                        int graph) {
  return derive_seed(base, {2, static_cast<std::uint64_t>(value_index),
                            static_cast<std::uint64_t>(graph)});
}

inline std::uint64_t sweep_embed_seed(std::uint64_t base, int value_index,
                                      int graph, int cell, int replicate) {
  return derive_seed(base, {3, static_cast<std::uint64_t>(value_index),
                            static_cast<std::uint64_t>(graph),
                            static_cast<std::uint64_t>(cell),
                            static_cast<std::uint64_t>(replicate)});
}

// One embedding for a grid cell.  Shared by the sweep and the eval grid so
// both enumerate the same family of embeddings for a given seed.
inline Embedding make_cell_embedding(const Graph& g, const std::string& algo,
                                     int dim, const WalkParams& wp,
                                     const SgnsParams& sp,
                                     std::uint64_t seed) {
  Rng rng(seed);
  if (algo == "random") return random_embedding(g.num_nodes(), dim, rng);
  if (algo == "hope") return hope_embed(g, dim, seed).embedding;
  WalkParams walk = wp;
  if (algo == "deepwalk") {
    walk.p = 1.0;
    walk.q = 1.0;
  }
  SgnsParams sgns = sp;
  sgns.dim = dim;
  return node2vec_embed(g, walk, sgns, rng);
}

inline std::string sweep_manifest_text(const SweepSpec& spec) {
  std::ostringstream out;
  out << "parameter=" << spec.parameter << '\n';
  out << "values=";
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    out << (i ? "," : "") << format_double(spec.values[i]);
  out << '\n';
  out << "graphs_per_value=" << spec.graphs_per_value << '\n';
  out << "embeddings_per_graph=" << spec.embeddings_per_graph << '\n';
  out << "cells=";
  for (std::size_t i = 0; i < spec.cells.size(); ++i)
    out << (i ? "," : "") << spec.cells[i].algo << ':' << spec.cells[i].dim;
  out << '\n';
  out << "abcd.n=" << spec.abcd.n << '\n';
  out << "abcd.gamma=" << format_double(spec.abcd.gamma) << '\n';
  out << "abcd.delta_min=" << spec.abcd.delta_min << '\n';
  out << "abcd.delta_max=" << spec.abcd.delta_max << '\n';
  out << "abcd.beta=" << format_double(spec.abcd.beta) << '\n';
  out << "abcd.s_min=" << spec.abcd.s_min << '\n';
  out << "abcd.s_max=" << spec.abcd.s_max << '\n';
  out << "abcd.xi=" << format_double(spec.abcd.xi) << '\n';
  out << "abcd.variant="
      << (spec.abcd.variant == AbcdParams::Variant::global ? "global"
                                                           : "local")
      << '\n';
  out << "abcd.community_model="
      << (spec.abcd.community_model == AbcdParams::CommunityModel::configuration
              ? "configuration"
              : "chung_lu")
      << '\n';
  out << "abcd.fractions=";
  for (std::size_t i = 0; i < spec.abcd.fixed_community_fractions.size(); ++i)
    out << (i ? "," : "") << format_double(spec.abcd.fixed_community_fractions[i]);
  out << '\n';
  out << "walk.walks_per_node=" << spec.walk.walks_per_node << '\n';
  out << "walk.walk_length=" << spec.walk.walk_length << '\n';
  out << "walk.p=" << format_double(spec.walk.p) << '\n';
  out << "walk.q=" << format_double(spec.walk.q) << '\n';
  out << "sgns.window=" << spec.sgns.window << '\n';
  out << "sgns.negatives=" << spec.sgns.negatives << '\n';
  out << "sgns.epochs=" << spec.sgns.epochs << '\n';
  out << "sgns.lr_start=" << format_double(spec.sgns.lr_start) << '\n';
  out << "sgns.lr_min=" << format_double(spec.sgns.lr_min) << '\n';
  out << "ecg.ensemble_size=" << spec.ecg.ensemble_size << '\n';
  out << "ecg.min_weight=" << format_double(spec.ecg.min_weight) << '\n';
  out << "score.partition=" << spec.score_partition << '\n';
  out << "score.alpha_min=" << format_double(spec.score_opts.alpha_min) << '\n';
  out << "score.alpha_max=" << format_double(spec.score_opts.alpha_max) << '\n';
  out << "score.alpha_step=" << format_double(spec.score_opts.alpha_step)
      << '\n';
  out << "score.w_external=" << format_double(spec.score_opts.w_external)
      << '\n';
  out << "score.w_internal=" << format_double(spec.score_opts.w_internal)
      << '\n';
  out << "base_seed=" << spec.base_seed << '\n';
  return out.str();
}

namespace detail {

inline const char* kRunsHeader =
    "parameter,value,value_index,graph,graph_seed,algo,dim,replicate,"
    "embed_seed,divergence,best_alpha,fit_converged,num_communities";

inline std::string sweep_row_line(const std::string& parameter,
                                  const SweepRow& r) {
  std::ostringstream out;
  out << parameter << ',' << format_double(r.value) << ',' << r.value_index
      << ',' << r.graph << ',' << r.graph_seed << ',' << r.algo << ','
      << r.dim << ',' << r.replicate << ',' << r.embed_seed << ','
      << format_double(r.divergence) << ',' << format_double(r.best_alpha)
      << ',' << (r.fit_converged ? 1 : 0) << ',' << r.num_communities;
  return out.str();
}

inline SweepRow parse_sweep_row(const std::string& line,
                                const std::string& path, std::size_t lineno) {
  std::vector<std::string> f;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      f.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  f.push_back(cur);
  if (f.size() != 13)
    throw ValidationError(path + ":" + std::to_string(lineno) +
                          ": malformed ledger row");
  const std::string loc = path + ":" + std::to_string(lineno);
  SweepRow r;
  r.value = require_double(f[1], loc);
  r.value_index = static_cast<int>(require_int64(f[2], loc));
  r.graph = static_cast<int>(require_int64(f[3], loc));
  r.graph_seed = require_uint64(f[4], loc);
  r.algo = f[5];
  r.dim = static_cast<int>(require_int64(f[6], loc));
  r.replicate = static_cast<int>(require_int64(f[7], loc));
  r.embed_seed = require_uint64(f[8], loc);
  r.divergence = require_double(f[9], loc);
  r.best_alpha = require_double(f[10], loc);
  r.fit_converged = require_int64(f[11], loc) != 0;
  r.num_communities = static_cast<NodeId>(require_int64(f[12], loc));
  return r;
}

struct MeanStd {
  std::int64_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample std; 0 when count < 2
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  out.count = static_cast<std::int64_t>(xs.size());
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std_dev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

}  // namespace detail

// Mean and companion std matrices by algorithm (rows) x dimension (cols),
// pooled over every run row in the cell.  Cells absent from the rows are
// left empty.  Returns {mean_csv, std_csv}.
inline std::pair<std::string, std::string> emit_heatmap_csv(
    const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw ValidationError("heatmap: no rows");
  std::vector<std::string> algos;
  std::vector<int> dims;
  std::map<std::pair<std::string, int>, std::vector<double>> cells;
  for (const auto& r : rows) {
    if (std::find(algos.begin(), algos.end(), r.algo) == algos.end())
      algos.push_back(r.algo);
    if (std::find(dims.begin(), dims.end(), r.dim) == dims.end())
      dims.push_back(r.dim);
    cells[{r.algo, r.dim}].push_back(r.divergence);
  }
  std::sort(algos.begin(), algos.end());
  std::sort(dims.begin(), dims.end());
  std::ostringstream mean_csv, std_csv;
  mean_csv << "algo";
  std_csv << "algo";
  for (int d : dims) {
    mean_csv << ',' << d;
    std_csv << ',' << d;
  }
  mean_csv << '\n';
  std_csv << '\n';
  for (const auto& a : algos) {
    mean_csv << a;
    std_csv << a;
    for (int d : dims) {
      mean_csv << ',';
      std_csv << ',';
      const auto it = cells.find({a, d});
      if (it == cells.end()) continue;
      const auto ms = detail::mean_std(it->second);
      mean_csv << format_double(ms.mean);
      std_csv << format_double(ms.std_dev);
    }
    mean_csv << '\n';
    std_csv << '\n';
  }
  return {mean_csv.str(), std_csv.str()};
}

// Aggregate rows: per (value, algo, dim) over all graphs and replicates,
// and per (value, graph, algo, dim) over replicates.
inline std::string emit_aggregates_csv(const std::vector<SweepRow>& rows,
                                       const std::string& parameter) {
  std::map<std::tuple<int, std::string, int>, std::vector<double>> by_value;
  std::map<std::tuple<int, int, std::string, int>, std::vector<double>>
      by_graph;
  std::map<int, double> value_of;
  for (const auto& r : rows) {
    by_value[{r.value_index, r.algo, r.dim}].push_back(r.divergence);
    by_graph[{r.value_index, r.graph, r.algo, r.dim}].push_back(r.divergence);
    value_of[r.value_index] = r.value;
  }
  std::ostringstream out;
  out << "scope,parameter,value,graph,algo,dim,count,mean,std\n";
  for (const auto& [key, xs] : by_value) {
    const auto ms = detail::mean_std(xs);
    out << "value," << parameter << ','
        << format_double(value_of[std::get<0>(key)]) << ",,"
        << std::get<1>(key) << ',' << std::get<2>(key) << ',' << ms.count
        << ',' << format_double(ms.mean) << ',' << format_double(ms.std_dev)
        << '\n';
  }
  for (const auto& [key, xs] : by_graph) {
    const auto ms = detail::mean_std(xs);
    out << "graph," << parameter << ','
        << format_double(value_of[std::get<0>(key)]) << ','
        << std::get<1>(key) << ',' << std::get<2>(key) << ','
        << std::get<3>(key) << ',' << ms.count << ','
        << format_double(ms.mean) << ',' << format_double(ms.std_dev) << '\n';
  }
  return out.str();
}

// Per (algo, dim): groups are (value, graph) pairs, replicates are the
// embeddings, so r_e is the share of score variance attributable to
// embedding randomness rather than the graph family.
inline std::string emit_variance_csv(const std::vector<SweepRow>& rows) {
  std::map<std::pair<std::string, int>,
           std::map<std::pair<int, int>, std::vector<double>>>
      groups;
  for (const auto& r : rows)
    groups[{r.algo, r.dim}][{r.value_index, r.graph}].push_back(r.divergence);
  std::ostringstream out;
  out << "algo,dim,groups,replicates,ss_t,ss_g,ss_e,r_e\n";
  for (const auto& [cell, by_graph] : groups) {
    std::vector<std::vector<double>> table;
    table.reserve(by_graph.size());
    std::size_t width = 0;
    bool ragged = false;
    for (const auto& [g, xs] : by_graph) {
      if (table.empty()) width = xs.size();
      if (xs.size() != width) ragged = true;
      table.push_back(xs);
    }
    if (ragged || table.empty()) continue;  // partial resume mid-graph
    const auto vd = variance_decomposition(table);
    out << cell.first << ',' << cell.second << ',' << table.size() << ','
        << width << ',' << format_double(vd.ss_t) << ','
        << format_double(vd.ss_g) << ',' << format_double(vd.ss_e) << ','
        << format_double(vd.r_e) << '\n';
  }
  return out.str();
}

struct SweepResult {
  std::vector<SweepRow> rows;
  std::int64_t resumed_rows = 0;
  std::int64_t computed_rows = 0;
};

// Runs (or resumes) a sweep in out_dir.  Jobs execute in enumeration order
// so the ledger stays an ordered prefix; parallelism happens inside the
// numeric kernels, bounded by `workers`.
inline SweepResult run_sweep(const SweepSpec& spec, const std::string& out_dir,
                             int workers = 1) {
  validate_sweep(spec);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const std::string manifest = sweep_manifest_text(spec);
  const fs::path manifest_path = fs::path(out_dir) / "manifest.txt";
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    if (buf.str() != manifest)
      throw ValidationError(
          "sweep: existing manifest in " + out_dir +
          " differs from this spec; refusing to mix results");
  } else {
    auto out = open_output(manifest_path.string());
    out << manifest;
  }

  // enumerate expected coordinates
  struct Coord {
    int vi, graph, cell, rep;
  };
  std::vector<Coord> coords;
  for (int vi = 0; vi < static_cast<int>(spec.values.size()); ++vi)
    for (int g = 0; g < spec.graphs_per_value; ++g)
      for (int c = 0; c < static_cast<int>(spec.cells.size()); ++c)
        for (int r = 0; r < spec.embeddings_per_graph; ++r)
          coords.push_back({vi, g, c, r});

  // load + verify any existing ledger prefix
  const fs::path runs_path = fs::path(out_dir) / "runs.csv";
  SweepResult result;
  if (fs::exists(runs_path)) {
    std::ifstream in(runs_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (lineno == 1) {
        if (line != detail::kRunsHeader)
          throw ValidationError(runs_path.string() + ": unexpected header");
        continue;
      }
      const SweepRow row =
          detail::parse_sweep_row(line, runs_path.string(), lineno);
      const std::size_t idx = result.rows.size();
      if (idx >= coords.size())
        throw ValidationError(runs_path.string() +
                              ": more rows than the spec enumerates");
      const Coord& c = coords[idx];
      const SweepCell& cell = spec.cells[c.cell];
      const std::uint64_t gseed =
          sweep_graph_seed(spec.base_seed, c.vi, c.graph);
      const std::uint64_t eseed =
          sweep_embed_seed(spec.base_seed, c.vi, c.graph, c.cell, c.rep);
      if (row.value_index != c.vi || row.graph != c.graph ||
          row.replicate != c.rep || row.algo != cell.algo ||
          row.dim != cell.dim || row.graph_seed != gseed ||
          row.embed_seed != eseed)
        throw ValidationError(
            runs_path.string() + ":" + std::to_string(lineno) +
            ": ledger row does not match the spec's enumeration; refusing "
            "to resume with different seeds");
      result.rows.push_back(row);
    }
  }
  result.resumed_rows = static_cast<std::int64_t>(result.rows.size());

  std::ofstream runs(runs_path, std::ios::app);
  if (!runs) throw ValidationError("cannot open " + runs_path.string());
  if (result.resumed_rows == 0) {
    runs << detail::kRunsHeader << '\n';
    runs.flush();
  }
  const fs::path timings_path = fs::path(out_dir) / "timings.csv";
  const bool timings_new = !fs::exists(timings_path);
  std::ofstream timings(timings_path, std::ios::app);
  if (timings_new)
    timings << "parameter,value,graph,algo,dim,replicate,seconds\n";

  const int rows_per_graph =
      static_cast<int>(spec.cells.size()) * spec.embeddings_per_graph;
  std::size_t next = static_cast<std::size_t>(result.resumed_rows);
  while (next < coords.size()) {
    const int vi = coords[next].vi;
    const int gi = coords[next].graph;
    const double value = spec.values[static_cast<std::size_t>(vi)];
    AbcdParams abcd;
    WalkParams walk;
    SgnsParams sgns;
    apply_sweep_value(spec, value, abcd, walk, sgns);
    sgns.workers = 1;  // keep replicated runs reproducible
    abcd.seed = sweep_graph_seed(spec.base_seed, vi, gi);
    const AbcdGraph bench = generate_abcd(abcd);
    Partition scored = bench.ground_truth;
    if (spec.score_partition == "ecg") {
      Rng cluster_rng(sweep_cluster_seed(spec.base_seed, vi, gi));
      scored = ecg(bench.graph, cluster_rng, spec.ecg);
    }
    DivergenceOptions opts = spec.score_opts;
    (void)workers;  // inner kernels read the global OpenMP setting
    DivergenceScorer scorer(bench.graph, std::move(scored), opts);

    const std::size_t graph_end =
        std::min(coords.size(),
                 next + static_cast<std::size_t>(rows_per_graph) -
                     static_cast<std::size_t>(next %
                                              static_cast<std::size_t>(
                                                  rows_per_graph)));
    for (; next < graph_end; ++next) {
      const Coord& c = coords[next];
      const SweepCell& cell = spec.cells[c.cell];
      SweepRow row;
      row.value_index = c.vi;
      row.value = value;
      row.graph = c.graph;
      row.graph_seed = abcd.seed;
      row.algo = cell.algo;
      row.dim = cell.dim;
      row.replicate = c.rep;
      row.embed_seed =
          sweep_embed_seed(spec.base_seed, c.vi, c.graph, c.cell, c.rep);
      const auto t0 = std::chrono::steady_clock::now();
      const Embedding emb = make_cell_embedding(
          bench.graph, cell.algo, cell.dim, walk, sgns, row.embed_seed);
      const DivergenceReport report = scorer.score(emb);
      const auto t1 = std::chrono::steady_clock::now();
      row.divergence = report.score;
      row.best_alpha = report.best_alpha;
      row.fit_converged = report.best_fit_converged;
      row.num_communities = report.num_communities;
      runs << detail::sweep_row_line(spec.parameter, row) << '\n';
      runs.flush();
      const double secs =
          std::chrono::duration<double>(t1 - t0).count();
      timings << spec.parameter << ',' << format_double(row.value) << ','
              << row.graph << ',' << row.algo << ',' << row.dim << ','
              << row.replicate << ',' << format_double(secs) << '\n';
      timings.flush();
      result.rows.push_back(row);
      ++result.computed_rows;
    }
  }

  // derived artifacts are recomputed whole, so they are deterministic
  {
    auto out = open_output((fs::path(out_dir) / "aggregates.csv").string());
    out << emit_aggregates_csv(result.rows, spec.parameter);
  }
  {
    auto out = open_output((fs::path(out_dir) / "variance.csv").string());
    out << emit_variance_csv(result.rows);
  }
  {
    const auto [mean_csv, std_csv] = emit_heatmap_csv(result.rows);
    auto m = open_output((fs::path(out_dir) / "heatmap_mean.csv").string());
    m << mean_csv;
    auto s = open_output((fs::path(out_dir) / "heatmap_std.csv").string());
    s << std_csv;
  }
  return result;
}

}  // namespace gembed
