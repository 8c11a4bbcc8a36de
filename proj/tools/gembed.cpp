// gembed: generate community benchmark graphs, embed them, and score the
// embeddings without ground-truth labels.
//
// Exit codes: 0 success, 2 validation error, 3 numerical non-convergence.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "gembed/abcd.hpp"
#include "gembed/clustering.hpp"
#include "gembed/embedding.hpp"
#include "gembed/eval.hpp"
#include "gembed/gcl.hpp"
#include "gembed/graph_io.hpp"
#include "gembed/graph_stats.hpp"
#include "gembed/hope.hpp"
#include "gembed/node2vec.hpp"
#include "gembed/sweep.hpp"

namespace {

using namespace gembed;
namespace fs = std::filesystem;

Graph load_graph(const std::string& path) {
  LoadedGraph lg = load_edge_list(path);
  if (lg.self_loops_dropped > 0)
    std::cerr << "note: dropped " << lg.self_loops_dropped << " self-loop(s)\n";
  if (lg.duplicates_dropped > 0)
    std::cerr << "note: dropped " << lg.duplicates_dropped
              << " duplicate edge(s)\n";
  bool contiguous = true;
  for (std::size_t i = 0; i < lg.original_ids.size(); ++i)
    if (lg.original_ids[i] != static_cast<std::int64_t>(i)) contiguous = false;
  if (!contiguous)
    std::cerr << "note: node ids were compacted to 0.." << lg.graph.num_nodes() - 1
              << " in ascending order; outputs use compact ids\n";
  return std::move(lg.graph);
}

Partition cluster_graph(const Graph& g, const std::string& algo,
                        const EcgParams& params, std::uint64_t seed) {
  Rng rng(seed);
  if (algo == "louvain") return louvain(unit_weights(g), rng);
  if (algo == "ecg") return ecg(g, rng, params);
  throw ValidationError("unknown clustering algorithm: " + algo);
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

std::string report_text(const DivergenceReport& r) {
  std::ostringstream out;
  out << "score=" << format_double(r.score) << '\n'
      << "best_alpha=" << format_double(r.best_alpha) << '\n'
      << "best_fit_converged=" << (r.best_fit_converged ? 1 : 0) << '\n'
      << "fits_not_converged=" << r.fits_not_converged << '\n'
      << "num_communities=" << r.num_communities << '\n'
      << "degenerate_single_community="
      << (r.degenerate_single_community ? 1 : 0) << '\n';
  return out.str();
}

std::string curve_csv(const DivergenceReport& r) {
  std::ostringstream out;
  out << "alpha,divergence,fit_converged,fit_residual,fit_iterations,"
         "clipped_pairs\n";
  for (const auto& e : r.curve)
    out << format_double(e.alpha) << ',' << format_double(e.divergence) << ','
        << (e.fit_converged ? 1 : 0) << ',' << format_double(e.fit_residual)
        << ',' << e.fit_iterations << ',' << e.clipped_pairs << '\n';
  return out.str();
}

// Shared flag bundles so embed/eval/sweep expose identical knobs.
struct WalkFlags {
  WalkParams params;
  void attach(CLI::App* cmd) {
    cmd->add_option("--walks", params.walks_per_node, "walks per node");
    cmd->add_option("--walk-length", params.walk_length, "nodes per walk");
    cmd->add_option("-p,--return-param", params.p, "return parameter p");
    cmd->add_option("-q,--inout-param", params.q, "in-out parameter q");
  }
};

struct SgnsFlags {
  SgnsParams params;
  void attach(CLI::App* cmd) {
    cmd->add_option("--window", params.window, "context window size");
    cmd->add_option("--negatives", params.negatives,
                    "negative samples per positive");
    cmd->add_option("--epochs", params.epochs, "training epochs");
    cmd->add_option("--lr", params.lr_start, "initial learning rate");
    cmd->add_option("--lr-min", params.lr_min, "final learning rate");
  }
};

struct AbcdFlags {
  AbcdParams params;
  std::string variant = "global";
  std::string model = "configuration";
  void attach(CLI::App* cmd) {
    cmd->add_option("-n,--nodes", params.n, "number of nodes");
    cmd->add_option("--gamma", params.gamma, "degree exponent");
    cmd->add_option("--delta-min", params.delta_min, "minimum degree");
    cmd->add_option("--delta-max", params.delta_max,
                    "maximum degree (0 = natural cut-off)");
    cmd->add_option("--beta", params.beta, "community size exponent");
    cmd->add_option("--s-min", params.s_min, "minimum community size");
    cmd->add_option("--s-max", params.s_max, "maximum community size");
    cmd->add_option("--xi", params.xi, "mixing parameter");
    cmd->add_option("--variant", variant, "xi variant: global|local")
        ->check(CLI::IsMember({"global", "local"}));
    cmd->add_option("--community-model", model,
                    "within-community model: configuration|chung_lu")
        ->check(CLI::IsMember({"configuration", "chung_lu"}));
    cmd->add_option("--fractions", params.fixed_community_fractions,
                    "fixed community size fractions (override beta/s-min/s-max)");
  }
  AbcdParams resolve(std::uint64_t seed) const {
    AbcdParams p = params;
    p.variant = variant == "local" ? AbcdParams::Variant::local
                                   : AbcdParams::Variant::global;
    p.community_model = model == "chung_lu"
                            ? AbcdParams::CommunityModel::chung_lu
                            : AbcdParams::CommunityModel::configuration;
    p.seed = seed;
    return p;
  }
};

struct ScoreFlags {
  DivergenceOptions opts;
  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha-min", opts.alpha_min, "alpha grid start");
    cmd->add_option("--alpha-max", opts.alpha_max, "alpha grid end");
    cmd->add_option("--alpha-hard-max", opts.alpha_hard_max,
                    "ceiling for the adaptive extension past the grid end");
    cmd->add_option("--alpha-step", opts.alpha_step, "alpha grid step");
    cmd->add_option("--w-external", opts.w_external,
                    "weight of the between-community part");
    cmd->add_option("--w-internal", opts.w_internal,
                    "weight of the within-community part");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "community benchmark graphs, node embeddings, and an unsupervised "
      "embedding quality score"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int workers = 1;
  app.add_option("--seed", seed, "base random seed");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads for numeric kernels");

  std::function<int()> action;

  // ---- abcd ----------------------------------------------------------
  auto* cmd_abcd = app.add_subcommand(
      "abcd", "generate a benchmark graph with planted communities");
  auto abcd_flags = std::make_shared<AbcdFlags>();
  abcd_flags->attach(cmd_abcd);
  cmd_abcd->callback([&, abcd_flags] {
    action = [&, abcd_flags]() -> int {
      const AbcdParams params = abcd_flags->resolve(seed);
      const AbcdGraph bench = generate_abcd(params);
      fs::create_directories(out_dir);
      save_edge_list(bench.graph, (fs::path(out_dir) / "edges.tsv").string());
      save_partition(bench.ground_truth,
                     (fs::path(out_dir) / "communities.tsv").string());
      std::ostringstream manifest;
      manifest << "n=" << params.n << '\n'
               << "gamma=" << format_double(params.gamma) << '\n'
               << "delta_min=" << params.delta_min << '\n'
               << "delta_max=" << params.effective_max_degree() << '\n'
               << "beta=" << format_double(params.beta) << '\n'
               << "s_min=" << params.s_min << '\n'
               << "s_max=" << params.s_max << '\n'
               << "xi=" << format_double(params.xi) << '\n'
               << "variant=" << abcd_flags->variant << '\n'
               << "community_model=" << abcd_flags->model << '\n'
               << "seed=" << params.seed << '\n'
               << "edges=" << bench.graph.num_edges() << '\n'
               << "communities=" << bench.ground_truth.num_communities()
               << '\n'
               << "realized_xi=" << format_double(bench.realized_xi) << '\n';
      write_text((fs::path(out_dir) / "manifest.txt").string(),
                 manifest.str());
      for (const auto& w : bench.warnings)
        std::cerr << "warning: " << w << '\n';
      std::cout << "nodes=" << bench.graph.num_nodes()
                << " edges=" << bench.graph.num_edges()
                << " communities=" << bench.ground_truth.num_communities()
                << " realized_xi=" << format_double(bench.realized_xi)
                << '\n';
      std::cout << "wrote " << (fs::path(out_dir) / "edges.tsv").string()
                << ", communities.tsv, manifest.txt\n";
      return 0;
    };
  });

  // ---- embed ---------------------------------------------------------
  auto* cmd_embed = app.add_subcommand("embed", "embed a graph's nodes");
  auto embed_state = std::make_shared<std::tuple<std::string, std::string, int,
                                                 std::string, bool, bool>>();
  auto& [embed_graph, embed_algo, embed_dim, embed_out, embed_loss,
         embed_hogwild] = *embed_state;
  embed_algo = "node2vec";
  embed_dim = 128;
  embed_loss = false;
  embed_hogwild = false;
  cmd_embed->add_option("--graph", embed_graph, "edge list file")->required();
  cmd_embed->add_option("--algo", embed_algo,
                        "node2vec|deepwalk|hope|random")
      ->check(CLI::IsMember({"node2vec", "deepwalk", "hope", "random"}));
  cmd_embed->add_option("--dim", embed_dim, "embedding dimension");
  cmd_embed->add_option("--out", embed_out,
                        "output file (default <out-dir>/embedding.tsv)");
  cmd_embed->add_flag("--loss", embed_loss, "print per-epoch training loss");
  cmd_embed->add_flag(
      "--hogwild", embed_hogwild,
      "lock-free parallel SGD across --workers threads (not reproducible)");
  auto embed_walk = std::make_shared<WalkFlags>();
  auto embed_sgns = std::make_shared<SgnsFlags>();
  embed_walk->attach(cmd_embed);
  embed_sgns->attach(cmd_embed);
  cmd_embed->callback([&, embed_state, embed_walk, embed_sgns] {
    action = [&, embed_state, embed_walk, embed_sgns]() -> int {
      auto& [graph_path, algo, dim, out_path, loss, hogwild] = *embed_state;
      const Graph g = load_graph(graph_path);
      WalkParams wp = embed_walk->params;
      SgnsParams sp = embed_sgns->params;
      sp.dim = dim;
      sp.workers = hogwild ? workers : 1;
      sp.track_loss = loss;
      Rng rng(seed);
      Embedding emb(0, 1);
      if (algo == "random") {
        emb = random_embedding(g.num_nodes(), dim, rng);
      } else if (algo == "hope") {
        const HopeResult hr = hope_embed(g, dim);
        std::cout << "frobenius_loss=" << format_double(hr.frobenius_loss)
                  << " relative="
                  << format_double(hr.s_frobenius_norm > 0
                                       ? hr.frobenius_loss /
                                             hr.s_frobenius_norm
                                       : 0.0)
                  << '\n';
        emb = hr.embedding;
      } else {
        if (algo == "deepwalk") {
          wp.p = 1.0;
          wp.q = 1.0;
        }
        SgnsStats stats;
        emb = node2vec_embed(g, wp, sp, rng, loss ? &stats : nullptr);
        if (loss)
          for (std::size_t e = 0; e < stats.epoch_mean_loss.size(); ++e)
            std::cout << "epoch=" << e << " mean_loss="
                      << format_double(stats.epoch_mean_loss[e]) << '\n';
      }
      if (out_path.empty()) {
        fs::create_directories(out_dir);
        out_path = (fs::path(out_dir) / "embedding.tsv").string();
      }
      write_embedding(emb, out_path);
      std::cout << "wrote " << out_path << " (" << emb.num_nodes() << " x "
                << emb.dim() << ")\n";
      return 0;
    };
  });

  // ---- cluster -------------------------------------------------------
  auto* cmd_cluster = app.add_subcommand("cluster", "detect communities");
  auto cluster_state =
      std::make_shared<std::tuple<std::string, std::string, std::string>>();
  auto& [cluster_graph_path, cluster_algo, cluster_out] = *cluster_state;
  cluster_algo = "ecg";
  cmd_cluster->add_option("--graph", cluster_graph_path, "edge list file")
      ->required();
  cmd_cluster->add_option("--algo", cluster_algo, "ecg|louvain")
      ->check(CLI::IsMember({"ecg", "louvain"}));
  cmd_cluster->add_option("--out", cluster_out,
                          "output file (default <out-dir>/communities.tsv)");
  auto cluster_ecg = std::make_shared<EcgParams>();
  cmd_cluster->add_option("--ensemble-size", cluster_ecg->ensemble_size,
                          "level-1 runs in the ensemble");
  cmd_cluster->add_option("--min-weight", cluster_ecg->min_weight,
                          "consensus weight floor");
  cmd_cluster->callback([&, cluster_state, cluster_ecg] {
    action = [&, cluster_state, cluster_ecg]() -> int {
      auto& [graph_path, algo, out_path] = *cluster_state;
      const Graph g = load_graph(graph_path);
      const Partition p = cluster_graph(g, algo, *cluster_ecg, seed);
      if (out_path.empty()) {
        fs::create_directories(out_dir);
        out_path = (fs::path(out_dir) / "communities.tsv").string();
      }
      save_partition(p, out_path);
      std::cout << "communities=" << p.num_communities() << " modularity="
                << format_double(modularity(unit_weights(g), p)) << '\n';
      std::cout << "wrote " << out_path << '\n';
      return 0;
    };
  });

  // ---- score ---------------------------------------------------------
  auto* cmd_score = app.add_subcommand(
      "score", "unsupervised divergence score of an embedding");
  auto score_state = std::make_shared<
      std::tuple<std::string, std::string, std::string, std::string>>();
  auto& [score_graph, score_emb, score_comms, score_clusterer] = *score_state;
  score_clusterer = "ecg";
  cmd_score->add_option("--graph", score_graph, "edge list file")->required();
  cmd_score->add_option("--embedding", score_emb, "embedding file")
      ->required();
  cmd_score->add_option("--communities", score_comms,
                        "partition file (skips clustering)");
  cmd_score->add_option("--clusterer", score_clusterer,
                        "ecg|louvain when no --communities given")
      ->check(CLI::IsMember({"ecg", "louvain"}));
  auto score_flags = std::make_shared<ScoreFlags>();
  score_flags->attach(cmd_score);
  auto score_ecg = std::make_shared<EcgParams>();
  cmd_score->add_option("--ensemble-size", score_ecg->ensemble_size,
                        "level-1 runs in the ensemble");
  cmd_score->callback([&, score_state, score_flags, score_ecg] {
    action = [&, score_state, score_flags, score_ecg]() -> int {
      auto& [graph_path, emb_path, comm_path, clusterer] = *score_state;
      const Graph g = load_graph(graph_path);
      const Embedding emb = read_embedding(emb_path);
      Partition p =
          comm_path.empty()
              ? cluster_graph(g, clusterer, *score_ecg, seed)
              : load_partition(comm_path, g.num_nodes()).partition;
      const DivergenceReport report =
          divergence_score(g, emb, p, score_flags->opts);
      fs::create_directories(out_dir);
      const std::string text = report_text(report);
      write_text((fs::path(out_dir) / "score_report.txt").string(), text);
      write_text((fs::path(out_dir) / "alpha_curve.csv").string(),
                 curve_csv(report));
      std::cout << text;
      if (!report.best_fit_converged && !report.degenerate_single_community) {
        std::cerr << "error: degree fit did not converge at the selected "
                     "alpha\n";
        return 3;
      }
      return 0;
    };
  });

  // ---- eval ----------------------------------------------------------
  auto* cmd_eval = app.add_subcommand(
      "eval", "supervised task metrics for an embedding");
  struct EvalState {
    std::string graph, comms, emb, task, algo_label = "file";
    double train_frac = 0.75, holdout = 0.10;
    int knn_k = 10;
    bool with_divergence = false;
    std::string lp_algo = "node2vec";
    int lp_dim = 128;
  };
  auto eval_state = std::make_shared<EvalState>();
  cmd_eval->add_option("--graph", eval_state->graph, "edge list file")
      ->required();
  cmd_eval->add_option("--task", eval_state->task,
                       "classify|communities|linkpred")
      ->required()
      ->check(CLI::IsMember({"classify", "communities", "linkpred"}));
  cmd_eval->add_option("--communities", eval_state->comms,
                       "ground-truth partition (classify/communities)");
  cmd_eval->add_option("--embedding", eval_state->emb,
                       "embedding file (classify/communities)");
  cmd_eval->add_option("--train-frac", eval_state->train_frac,
                       "training fraction for classify");
  cmd_eval->add_option("--knn-k", eval_state->knn_k, "neighbors for classify");
  cmd_eval->add_option("--holdout", eval_state->holdout,
                       "edge fraction removed for linkpred");
  cmd_eval->add_option("--algo", eval_state->lp_algo,
                       "embedder for linkpred: node2vec|deepwalk|hope|random")
      ->check(CLI::IsMember({"node2vec", "deepwalk", "hope", "random"}));
  cmd_eval->add_option("--dim", eval_state->lp_dim,
                       "embedding dimension for linkpred");
  cmd_eval->add_option("--algo-label", eval_state->algo_label,
                       "algorithm label written to the results CSV");
  cmd_eval->add_flag("--with-divergence", eval_state->with_divergence,
                     "also compute the divergence score (clusters with ecg)");
  auto eval_walk = std::make_shared<WalkFlags>();
  auto eval_sgns = std::make_shared<SgnsFlags>();
  eval_walk->attach(cmd_eval);
  eval_sgns->attach(cmd_eval);
  cmd_eval->callback([&, eval_state, eval_walk, eval_sgns] {
    action = [&, eval_state, eval_walk, eval_sgns]() -> int {
      const EvalState& st = *eval_state;
      const Graph g = load_graph(st.graph);
      std::string metric;
      double value = 0.0;
      std::string algo_label = st.algo_label;
      int dim_label = 0;
      Embedding emb(0, 1);
      bool have_emb = false;
      if (st.task == "classify" || st.task == "communities") {
        if (st.emb.empty() || st.comms.empty())
          throw ValidationError(
              "eval: --embedding and --communities are required for task " +
              st.task);
        emb = read_embedding(st.emb);
        if (emb.num_nodes() != g.num_nodes())
          throw ValidationError("eval: embedding size mismatch");
        have_emb = true;
        dim_label = emb.dim();
        const Partition truth =
            load_partition(st.comms, g.num_nodes()).partition;
        Rng rng(seed);
        if (st.task == "classify") {
          metric = "accuracy";
          value = knn_classify(emb, truth.labels(), st.train_frac, st.knn_k,
                               rng);
        } else {
          metric = "ami";
          const Partition found = kmeans(emb, truth.num_communities(), rng);
          value = ami(found, truth);
        }
      } else {
        metric = "auc";
        algo_label = st.lp_algo;
        dim_label = st.lp_dim;
        WalkParams wp = eval_walk->params;
        SgnsParams sp = eval_sgns->params;
        Rng rng(seed);
        const auto embed_fn = [&](const Graph& train) {
          return make_cell_embedding(train, st.lp_algo, st.lp_dim, wp, sp,
                                     derive_seed(seed, {17}));
        };
        const LinkPredictionResult lp =
            link_prediction_experiment(g, embed_fn, st.holdout, rng);
        value = lp.auc;
        std::cout << "accuracy=" << format_double(lp.accuracy) << '\n';
      }
      std::string divergence;
      if (st.with_divergence) {
        if (!have_emb)
          throw ValidationError(
              "eval: --with-divergence needs a stored embedding (classify or "
              "communities task)");
        Rng crng(derive_seed(seed, {23}));
        const Partition found = ecg(g, crng);
        divergence = format_double(divergence_score(g, emb, found).score);
      }
      std::cout << metric << '=' << format_double(value) << '\n';
      fs::create_directories(out_dir);
      const fs::path csv = fs::path(out_dir) / "eval.csv";
      const bool fresh = !fs::exists(csv);
      std::ofstream out(csv, std::ios::app);
      if (!out) throw ValidationError("cannot open " + csv.string());
      if (fresh) out << "graph_id,algo,dim,seed,divergence,metric,value\n";
      out << fs::path(st.graph).filename().string() << ',' << algo_label
          << ',' << dim_label << ',' << seed << ',' << divergence << ','
          << metric << ',' << format_double(value) << '\n';
      std::cout << "appended " << csv.string() << '\n';
      return 0;
    };
  });

  // ---- sweep ---------------------------------------------------------
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "replicated parameter sweep with scoring and aggregation");
  auto sweep_state = std::make_shared<SweepSpec>();
  auto sweep_algos = std::make_shared<std::vector<std::string>>(
      std::vector<std::string>{"node2vec"});
  auto sweep_dims =
      std::make_shared<std::vector<int>>(std::vector<int>{128});
  auto sweep_abcd = std::make_shared<AbcdFlags>();
  auto sweep_walk = std::make_shared<WalkFlags>();
  auto sweep_sgns = std::make_shared<SgnsFlags>();
  auto sweep_score = std::make_shared<ScoreFlags>();
  cmd_sweep->add_option("--parameter", sweep_state->parameter,
                        "swept parameter: xi|n|gamma|beta|delta_max|s_max|p|q|"
                        "num_walks|walk_length|window|none");
  cmd_sweep->add_option("--values", sweep_state->values, "swept values")
      ->required();
  cmd_sweep->add_option("--graphs", sweep_state->graphs_per_value,
                        "graphs per value");
  cmd_sweep->add_option("--embeddings", sweep_state->embeddings_per_graph,
                        "embeddings per graph per cell");
  cmd_sweep->add_option("--algos", *sweep_algos,
                        "algorithms in the grid (node2vec|deepwalk|hope|random)");
  cmd_sweep->add_option("--dims", *sweep_dims, "dimensions in the grid");
  cmd_sweep->add_option("--ensemble-size", sweep_state->ecg.ensemble_size,
                        "level-1 runs in the clustering ensemble");
  cmd_sweep
      ->add_option("--score-partition", sweep_state->score_partition,
                   "partition the scorer conditions on: known (generator "
                   "communities) or ecg")
      ->check(CLI::IsMember({"known", "ecg"}));
  sweep_abcd->attach(cmd_sweep);
  sweep_walk->attach(cmd_sweep);
  sweep_sgns->attach(cmd_sweep);
  sweep_score->attach(cmd_sweep);
  cmd_sweep->callback([&, sweep_state, sweep_algos, sweep_dims, sweep_abcd,
                       sweep_walk, sweep_sgns, sweep_score] {
    action = [&, sweep_state, sweep_algos, sweep_dims, sweep_abcd, sweep_walk,
              sweep_sgns, sweep_score]() -> int {
      SweepSpec spec = *sweep_state;
      spec.abcd = sweep_abcd->resolve(0);
      spec.walk = sweep_walk->params;
      spec.sgns = sweep_sgns->params;
      spec.score_opts = sweep_score->opts;
      spec.base_seed = seed;
      for (const auto& a : *sweep_algos)
        for (int d : *sweep_dims) spec.cells.push_back({a, d});
      const SweepResult res = run_sweep(spec, out_dir, workers);
      std::cout << "rows=" << res.rows.size()
                << " resumed=" << res.resumed_rows
                << " computed=" << res.computed_rows << '\n';
      std::cout << "wrote runs.csv, aggregates.csv, variance.csv, "
                   "heatmap_mean.csv, heatmap_std.csv, timings.csv in "
                << out_dir << '\n';
      return 0;
    };
  });

  // ---- stats ---------------------------------------------------------
  auto* cmd_stats = app.add_subcommand("stats", "summary graph statistics");
  auto stats_state =
      std::make_shared<std::pair<std::string, std::string>>();
  cmd_stats->add_option("--graph", stats_state->first, "edge list file")
      ->required();
  cmd_stats->add_option("--communities", stats_state->second,
                        "partition file (adds modularity and mixing)");
  cmd_stats->callback([&, stats_state] {
    action = [&, stats_state]() -> int {
      const Graph g = load_graph(stats_state->first);
      const GraphStats s = graph_stats(g);
      std::ostringstream out;
      out << "nodes=" << s.nodes << '\n'
          << "edges=" << s.edges << '\n'
          << "min_degree=" << s.min_degree << '\n'
          << "max_degree=" << s.max_degree << '\n'
          << "mean_degree=" << format_double(s.mean_degree) << '\n'
          << "density=" << format_double(s.density) << '\n'
          << "triangles=" << s.triangles << '\n'
          << "transitivity=" << format_double(s.transitivity) << '\n'
          << "assortativity="
          << (s.assortativity ? format_double(*s.assortativity) : "nan")
          << '\n'
          << "components=" << s.components << '\n'
          << "largest_component=" << s.largest_component << '\n'
          << "diameter=" << s.diameter << '\n'
          << "avg_path_length=" << format_double(s.avg_path_length) << '\n'
          << "max_core=" << s.max_core << '\n';
      if (!stats_state->second.empty()) {
        const Partition p =
            load_partition(stats_state->second, g.num_nodes()).partition;
        out << "communities=" << p.num_communities() << '\n'
            << "modularity=" << format_double(modularity(unit_weights(g), p))
            << '\n';
        std::int64_t inter = 0;
        for (NodeId u = 0; u < g.num_nodes(); ++u)
          for (NodeId v : g.neighbors(u))
            if (u < v && p.label(u) != p.label(v)) ++inter;
        out << "inter_edge_fraction="
            << format_double(static_cast<double>(inter) /
                             static_cast<double>(g.num_edges()))
            << '\n';
      }
      std::cout << out.str();
      return 0;
    };
  });

  CLI11_PARSE(app, argc, argv);

  if (workers < 1) {
    std::cerr << "error: --workers must be positive\n";
    return 2;
  }
#ifdef _OPENMP
  omp_set_num_threads(workers);
#endif

  try {
    return action ? action() : 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
