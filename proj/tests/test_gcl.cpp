#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "gembed/abcd.hpp"
#include "gembed/gcl.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

using namespace gembed;

namespace {

Graph random_graph(NodeId n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.push_back({u, v});
  return Graph::from_edges(n, edges);
}

// Brute-force expected clipped degree, straight from the embedding in
// double precision (independent of PairGeometry's packed float kernel).
std::vector<double> brute_expected_degrees(const Embedding& emb,
                                           const std::vector<double>& x,
                                           double alpha) {
  const NodeId n = emb.num_nodes();
  const int d = emb.dim();
  double dmax = 0.0;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int t = 0; t < d; ++t) {
        const double diff = emb.at(i, t) - emb.at(j, t);
        s += diff * diff;
      }
      dist[i][j] = dist[j][i] = std::sqrt(s);
      dmax = std::max(dmax, dist[i][j]);
    }
  std::vector<double> e(n, 0.0);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j) {
      if (i == j) continue;
      double g = 1.0;
      if (dmax > 0.0) {
        const double base = 1.0 - dist[i][j] / dmax;
        g = (base <= 0.0) ? (alpha > 0.0 ? 0.0 : 1.0) : std::pow(base, alpha);
      }
      e[i] += std::min(1.0, x[i] * x[j] * g);
    }
  return e;
}

}  // namespace

TEST_CASE("jsd matches an externally computed value") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  REQUIRE(js_divergence(p, q) ==
          Catch::Approx(0.03382207556860523).margin(1e-14));
}

TEST_CASE("jsd axioms") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    std::vector<double> p(k), q(k);
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      p[i] = rng.uniform() + 1e-3;
      q[i] = rng.uniform() + 1e-3;
      sp += p[i];
      sq += q[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    const double d = js_divergence(p, q);
    REQUIRE(d >= 0.0);
    REQUIRE(d <= std::numbers::ln2 + 1e-12);
    REQUIRE(d == Catch::Approx(js_divergence(q, p)).margin(1e-12));
    REQUIRE(js_divergence(p, p) == Catch::Approx(0.0).margin(1e-12));
  }
  // disjoint support saturates at ln 2
  REQUIRE(js_divergence(std::vector<double>{1.0, 0.0},
                        std::vector<double>{0.0, 1.0}) ==
          Catch::Approx(std::numbers::ln2).margin(1e-12));
}

TEST_CASE("community pair index enumerates upper-triangle pairs in order") {
  const NodeId ell = 5;
  std::size_t expect = 0;
  for (NodeId a = 0; a < ell; ++a)
    for (NodeId b = a + 1; b < ell; ++b)
      REQUIRE(community_pair_index(a, b, ell) == expect++);
  REQUIRE(expect == static_cast<std::size_t>(ell) * (ell - 1) / 2);
}

TEST_CASE("observed vectors on a hand-checked graph") {
  // c0 = {0,1,2} wired as a triangle, c1 = {3,4} wired by one edge,
  // plus inter edges (0,3) and (1,4): 6 edges total.
  const Graph g = Graph::from_edges(
      5, std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {0, 3}, {1, 4}});
  const Partition p = Partition::from_labels({0, 0, 0, 1, 1});
  const auto v = graph_vectors(g, p);
  REQUIRE(v.num_communities == 2);
  REQUIRE(v.inter.size() == 1);
  REQUIRE(v.intra.size() == 2);
  REQUIRE(v.inter[0] == Catch::Approx(2.0 / 6.0).margin(1e-15));
  REQUIRE(v.intra[0] == Catch::Approx(3.0 / 6.0).margin(1e-15));
  REQUIRE(v.intra[1] == Catch::Approx(1.0 / 6.0).margin(1e-15));
}

TEST_CASE("pair geometry reproduces double-precision distances") {
  Rng rng(9);
  const Embedding emb = random_embedding(80, 6, rng);
  PairGeometry geo(emb);
  double dmax = 0.0;
  for (NodeId i = 0; i < 80; ++i)
    for (NodeId j = i + 1; j < 80; ++j) {
      double s = 0.0;
      for (int t = 0; t < 6; ++t) {
        const double diff = emb.at(i, t) - emb.at(j, t);
        s += diff * diff;
      }
      dmax = std::max(dmax, std::sqrt(s));
    }
  REQUIRE(geo.dmax() == Catch::Approx(dmax).epsilon(1e-12));
  // kernel at alpha=1 equals 1 - d/dmax within float rounding
  std::vector<float> kernel;
  geo.materialize(1.0, kernel);
  for (NodeId i = 0; i < 80; ++i)
    for (NodeId j = i + 1; j < 80; ++j) {
      double s = 0.0;
      for (int t = 0; t < 6; ++t) {
        const double diff = emb.at(i, t) - emb.at(j, t);
        s += diff * diff;
      }
      const double expect = 1.0 - std::sqrt(s) / dmax;
      const float got = kernel[geo.row_offset(i) + j - i - 1];
      REQUIRE(static_cast<double>(got) == Catch::Approx(expect).margin(1e-5));
    }
  // alpha=0 kernel is identically one, including the farthest pair
  geo.materialize(0.0, kernel);
  for (float k : kernel) REQUIRE(k == 1.0f);
}

TEST_CASE("fit residuals meet tolerance and match a brute-force check") {
  Rng rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const NodeId n = 40 + static_cast<NodeId>(rng.below(160));
    const Graph g = random_graph(n, 0.12, rng);
    std::vector<double> degrees;
    for (NodeId v = 0; v < n; ++v)
      degrees.push_back(static_cast<double>(g.degree(v)));
    Embedding emb = random_embedding(n, 4, rng);
    for (double alpha : {0.0, 1.0, 4.0}) {
      const GclModel model = fit_gcl(degrees, emb, alpha);
      REQUIRE(model.converged);
      REQUIRE(model.residual <= 1e-6);
      // verify the reported fit against an independent double-precision
      // evaluation; float kernel rounding bounds the gap
      const auto e = brute_expected_degrees(emb, model.x, alpha);
      for (NodeId v = 0; v < n; ++v) {
        if (degrees[v] <= 0.0) continue;
        REQUIRE(std::abs(e[v] - degrees[v]) / degrees[v] < 2e-4);
      }
    }
  }
}

TEST_CASE("model vectors equal a brute-force pair summation") {
  Rng rng(17);
  const NodeId n = 150;
  const Graph g = random_graph(n, 0.08, rng);
  std::vector<double> degrees;
  for (NodeId v = 0; v < n; ++v)
    degrees.push_back(static_cast<double>(g.degree(v)));
  const Embedding emb = random_embedding(n, 5, rng);
  std::vector<NodeId> labels(n);
  for (NodeId v = 0; v < n; ++v) labels[v] = static_cast<NodeId>(rng.below(4));
  labels[0] = 0;
  labels[1] = 1;
  labels[2] = 2;
  labels[3] = 3;
  const Partition part = Partition::from_labels(labels);

  PairGeometry geo(emb);
  std::vector<float> kernel;
  const double alpha = 2.0;
  geo.materialize(alpha, kernel);
  const GclModel model = fit_gcl_kernel(geo, kernel, degrees, alpha);
  const auto got = model_vectors_kernel(geo, kernel, model.x, part);

  // independent accumulation in the same pair order over the same kernel
  const NodeId ell = part.num_communities();
  std::vector<double> intra(ell, 0.0);
  std::vector<double> inter(static_cast<std::size_t>(ell) * (ell - 1) / 2,
                            0.0);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      const double prob =
          std::min(1.0, model.x[i] * model.x[j] *
                            static_cast<double>(
                                kernel[geo.row_offset(i) + j - i - 1]));
      const NodeId a = std::min(part.label(i), part.label(j));
      const NodeId b = std::max(part.label(i), part.label(j));
      if (a == b)
        intra[a] += prob;
      else
        inter[community_pair_index(a, b, ell)] += prob;
    }
  double total = 0.0;
  for (double x : intra) total += x;
  for (double x : inter) total += x;
  for (NodeId c = 0; c < ell; ++c)
    REQUIRE(got.intra[c] == Catch::Approx(intra[c] / total).margin(1e-14));
  for (std::size_t k = 0; k < inter.size(); ++k)
    REQUIRE(got.inter[k] == Catch::Approx(inter[k] / total).margin(1e-14));
}

TEST_CASE("score is invariant under scaling, rotation, translation") {
  Rng rng(23);
  const NodeId n = 60;
  const Graph g = random_graph(n, 0.15, rng);
  std::vector<NodeId> labels(n);
  for (NodeId v = 0; v < n; ++v) labels[v] = v % 3;
  const Partition part = Partition::from_labels(labels);
  const Embedding emb = random_embedding(n, 3, rng);

  DivergenceOptions opts;
  opts.alpha_max = 4.0;
  opts.alpha_step = 0.5;
  DivergenceScorer scorer(g, part, opts);
  const double base = scorer.score(emb).score;

  // scale by 7
  Embedding scaled(n, 3);
  for (NodeId v = 0; v < n; ++v)
    for (int j = 0; j < 3; ++j) scaled.at(v, j) = 7.0 * emb.at(v, j);
  REQUIRE(scorer.score(scaled).score == Catch::Approx(base).margin(1e-9));

  // rotate by a fixed 3x3 orthogonal matrix (Gram-Schmidt on a seed
  // matrix) and translate
  double q[3][3] = {{0.36, 0.48, -0.8}, {-0.8, 0.6, 0.0}, {0.48, 0.64, 0.6}};
  // rows of q are orthonormal already (classic 3x3 rotation)
  Embedding moved(n, 3);
  for (NodeId v = 0; v < n; ++v)
    for (int r = 0; r < 3; ++r) {
      double s = 5.0 - r;  // translation component
      for (int c = 0; c < 3; ++c) s += q[r][c] * emb.at(v, c);
      moved.at(v, r) = s;
    }
  REQUIRE(scorer.score(moved).score == Catch::Approx(base).margin(1e-9));
}

TEST_CASE("report internals are consistent") {
  AbcdParams params;
  params.n = 400;
  params.s_min = 40;
  params.s_max = 160;
  params.delta_min = 4;
  params.xi = 0.25;
  params.seed = 5;
  const AbcdGraph bench = generate_abcd(params);
  Rng rng(6);
  const Embedding emb = random_embedding(bench.graph.num_nodes(), 4, rng);
  DivergenceOptions opts;
  opts.alpha_max = 3.0;
  opts.alpha_step = 0.5;
  const DivergenceReport rep =
      divergence_score(bench.graph, emb, bench.ground_truth, opts);

  REQUIRE(rep.score >= 0.0);
  REQUIRE(rep.score <= std::numbers::ln2 + 1e-12);
  REQUIRE_FALSE(rep.degenerate_single_community);
  const NodeId ell = rep.num_communities;
  REQUIRE(rep.observed.intra.size() == static_cast<std::size_t>(ell));
  REQUIRE(rep.observed.inter.size() ==
          static_cast<std::size_t>(ell) * (ell - 1) / 2);
  double sum = 0.0;
  for (double x : rep.observed.intra) sum += x;
  for (double x : rep.observed.inter) sum += x;
  REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
  // the curve minimum is the reported score
  double curve_min = std::numeric_limits<double>::infinity();
  for (const auto& e : rep.curve) curve_min = std::min(curve_min, e.divergence);
  REQUIRE(rep.score == Catch::Approx(curve_min).margin(1e-15));
  REQUIRE(rep.best_alpha >= opts.alpha_min);
  // the right edge extends adaptively, but never past the hard ceiling
  REQUIRE(rep.best_alpha <= opts.alpha_hard_max);
}

TEST_CASE("single community is flagged and scored zero") {
  const Graph g =
      Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  const Partition p = Partition::from_labels({0, 0, 0, 0});
  Rng rng(2);
  const Embedding emb = random_embedding(4, 2, rng);
  const DivergenceReport rep = divergence_score(g, emb, p);
  REQUIRE(rep.degenerate_single_community);
  REQUIRE(rep.score == 0.0);
}

TEST_CASE("weighted divergence handles empty parts") {
  EdgeProportionVectors obs, mod;
  obs.num_communities = 2;
  mod.num_communities = 2;
  obs.inter = {0.0};
  obs.intra = {0.6, 0.4};
  mod.inter = {0.0};
  mod.intra = {0.6, 0.4};
  // both inter parts zero: that part contributes nothing
  REQUIRE(weighted_divergence(obs, mod, 0.5, 0.5) ==
          Catch::Approx(0.0).margin(1e-12));
  // mass present on one side only contributes exactly half of it times ln 2
  mod.inter = {0.5};
  mod.intra = {0.3, 0.2};
  REQUIRE(weighted_divergence(obs, mod, 1.0, 0.0) ==
          Catch::Approx(0.5 * 0.5 * std::numbers::ln2).margin(1e-12));
  REQUIRE(weighted_divergence(obs, mod, 0.5, 0.5) > 0.0);
}

TEST_CASE("a mass shift between parts registers even with equal shapes") {
  // intra shares 80% vs 20% of the total; within each part the shapes
  // match, so renormalizing the parts separately would score this zero
  EdgeProportionVectors obs, mod;
  obs.num_communities = 2;
  mod.num_communities = 2;
  obs.inter = {0.2};
  obs.intra = {0.5, 0.3};
  mod.inter = {0.8};
  mod.intra = {0.125, 0.075};
  const double d = weighted_divergence(obs, mod, 0.5, 0.5);
  REQUIRE(d > 0.01);
  REQUIRE(d <= std::numbers::ln2);
}

TEST_CASE("alpha zero reduces to a distance-free model") {
  // with the kernel identically 1 the embedding must not matter
  Rng rng(44);
  const Graph g = random_graph(50, 0.2, rng);
  std::vector<NodeId> labels(50);
  for (NodeId v = 0; v < 50; ++v) labels[v] = v % 2;
  const Partition p = Partition::from_labels(labels);
  const Embedding e1 = random_embedding(50, 3, rng);
  const Embedding e2 = random_embedding(50, 8, rng);
  const AlphaEval a1 = divergence_at_alpha(g, p, e1, 0.0);
  const AlphaEval a2 = divergence_at_alpha(g, p, e2, 0.0);
  REQUIRE(a1.divergence == Catch::Approx(a2.divergence).margin(1e-9));
}
