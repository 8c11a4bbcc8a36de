#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gembed/embedding.hpp"
#include "gembed/eval.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

using namespace gembed;

namespace {

// Rank-free AUC definition: P(pos > neg) + P(pos == neg)/2 over all pairs.
double auc_brute(const std::vector<double>& pos,
                 const std::vector<double>& neg) {
  double acc = 0.0;
  for (double p : pos)
    for (double q : neg) acc += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  return acc / (static_cast<double>(pos.size()) * neg.size());
}

double mutual_information(const Partition& a, const Partition& b) {
  const std::int64_t n = a.num_nodes();
  const NodeId ka = a.num_communities(), kb = b.num_communities();
  std::vector<std::int64_t> table(static_cast<std::size_t>(ka) * kb, 0);
  for (NodeId v = 0; v < n; ++v)
    ++table[static_cast<std::size_t>(a.label(v)) * kb + b.label(v)];
  double mi = 0.0;
  for (NodeId i = 0; i < ka; ++i)
    for (NodeId j = 0; j < kb; ++j) {
      const double nij = static_cast<double>(
          table[static_cast<std::size_t>(i) * kb + j]);
      if (nij == 0.0) continue;
      const double pi = static_cast<double>(a.community_size(i));
      const double pj = static_cast<double>(b.community_size(j));
      mi += nij / n * std::log(nij * n / (pi * pj));
    }
  return mi;
}

double entropy(const Partition& p) {
  const double n = static_cast<double>(p.num_nodes());
  double h = 0.0;
  for (NodeId c = 0; c < p.num_communities(); ++c) {
    const double f = static_cast<double>(p.community_size(c)) / n;
    if (f > 0) h -= f * std::log(f);
  }
  return h;
}

Embedding blob_embedding(const std::vector<NodeId>& labels,
                         const std::vector<std::vector<double>>& centers,
                         double sigma, Rng& rng) {
  const int d = static_cast<int>(centers[0].size());
  Embedding e(static_cast<NodeId>(labels.size()), d);
  for (NodeId v = 0; v < e.num_nodes(); ++v)
    for (int t = 0; t < d; ++t)
      e.at(v, t) = centers[labels[v]][t] + sigma * rng.normal();
  return e;
}

Graph two_cliques_bridge(NodeId k) {
  std::vector<Edge> edges;
  for (NodeId base : {NodeId{0}, k})
    for (NodeId i = 0; i < k; ++i)
      for (NodeId j = i + 1; j < k; ++j)
        edges.push_back({base + i, base + j});
  edges.push_back({k - 1, k});
  return Graph::from_edges(2 * k, edges);
}

}  // namespace

TEST_CASE("ranking AUC agrees with the pairwise definition") {
  REQUIRE(auc({3, 1}, {2, 0}) == Catch::Approx(0.75).margin(1e-12));
  REQUIRE(auc({1}, {1}) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(auc({2, 2}, {1, 1}) == Catch::Approx(1.0).margin(1e-12));

  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pos, neg;
    const int np = 1 + static_cast<int>(rng.below(40));
    const int nn = 1 + static_cast<int>(rng.below(40));
    // small integer scores force plenty of ties
    for (int i = 0; i < np; ++i)
      pos.push_back(static_cast<double>(rng.below(6)));
    for (int i = 0; i < nn; ++i)
      neg.push_back(static_cast<double>(rng.below(6)));
    REQUIRE(auc(pos, neg) == Catch::Approx(auc_brute(pos, neg)).margin(1e-12));
  }

  REQUIRE_THROWS_AS(auc({}, {1.0}), ValidationError);
}

TEST_CASE("adjusted mutual information endpoints") {
  const Partition a = Partition::from_labels({0, 0, 1, 1, 2, 2});
  REQUIRE(ami(a, a) == Catch::Approx(1.0).margin(1e-9));

  // independent structure: singletons against one block score zero
  const Partition singles = Partition::from_labels({0, 1, 2, 3, 4, 5});
  const Partition block = Partition::from_labels({0, 0, 0, 0, 0, 0});
  REQUIRE(ami(singles, block) == Catch::Approx(0.0).margin(1e-9));

  // two trivial partitions are defined to agree
  REQUIRE(ami(block, block) == Catch::Approx(1.0).margin(1e-12));

  const Partition short_p = Partition::from_labels({0, 1});
  REQUIRE_THROWS_AS(ami(a, short_p), ValidationError);
}

TEST_CASE("adjustment term matches a permutation estimate") {
  // contingency [[2,1],[1,2]]
  const Partition a = Partition::from_labels({0, 0, 0, 1, 1, 1});
  const Partition b = Partition::from_labels({0, 0, 1, 0, 1, 1});
  const double mi = mutual_information(a, b);
  const double mean_h = 0.5 * (entropy(a) + entropy(b));

  // estimate E[MI] under random label permutations
  Rng rng(123);
  std::vector<NodeId> lbl(6);
  for (NodeId v = 0; v < 6; ++v) lbl[v] = b.label(v);
  const int trials = 20000;
  double acc = 0.0, acc2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    rng.shuffle(lbl);
    const double m = mutual_information(a, Partition::from_labels(lbl));
    acc += m;
    acc2 += m * m;
  }
  const double emi = acc / trials;
  const double sd = std::sqrt((acc2 / trials - emi * emi) / trials);

  // invert the reported score to recover the expectation it used
  const double reported = ami(a, b);
  const double implied_emi = (mi - reported * mean_h) / (1.0 - reported);
  REQUIRE(std::abs(implied_emi - emi) < 4 * sd);
}

TEST_CASE("knn classifies separated blobs perfectly") {
  Rng gen(5);
  std::vector<NodeId> labels;
  for (int i = 0; i < 120; ++i) labels.push_back(i % 3);
  const Embedding e = blob_embedding(
      labels, {{0, 0}, {10, 0}, {0, 10}}, 0.05, gen);
  Rng rng(6);
  REQUIRE(knn_classify(e, labels, 0.75, 10, rng) == 1.0);
}

TEST_CASE("knn on noise stays near chance") {
  Rng gen(8);
  const NodeId n = 2000;
  std::vector<NodeId> labels;
  for (NodeId v = 0; v < n; ++v)
    labels.push_back(static_cast<NodeId>(gen.below(2)));
  Embedding e(n, 8);
  for (NodeId v = 0; v < n; ++v)
    for (int t = 0; t < 8; ++t) e.at(v, t) = gen.normal();
  Rng rng(9);
  const double acc = knn_classify(e, labels, 0.75, 10, rng);
  REQUIRE(acc > 0.42);
  REQUIRE(acc < 0.58);
}

TEST_CASE("knn input validation") {
  Embedding e(4, 2);
  Rng rng(1);
  REQUIRE_THROWS_AS(knn_classify(e, {0, 0, 0, 0}, 0.75, 3, rng),
                    ValidationError);
  REQUIRE_THROWS_AS(knn_classify(e, {0, 1, 0}, 0.75, 3, rng), ValidationError);
  REQUIRE_THROWS_AS(knn_classify(e, {0, 1, 0, 1}, 1.5, 3, rng),
                    ValidationError);
  REQUIRE_THROWS_AS(knn_classify(e, {0, 1, 0, 1}, 0.75, 0, rng),
                    ValidationError);
}

TEST_CASE("kmeans recovers exact cluster structure") {
  std::vector<NodeId> labels;
  for (int i = 0; i < 5; ++i) labels.push_back(0);
  for (int i = 0; i < 7; ++i) labels.push_back(1);
  for (int i = 0; i < 9; ++i) labels.push_back(2);
  const Partition truth = Partition::from_labels(labels);

  SECTION("coincident points per cluster") {
    Embedding e(21, 2);
    const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
    for (NodeId v = 0; v < 21; ++v) {
      e.at(v, 0) = centers[labels[v]][0];
      e.at(v, 1) = centers[labels[v]][1];
    }
    Rng rng(3);
    const Partition got = kmeans(e, 3, rng);
    REQUIRE(ami(got, truth) == Catch::Approx(1.0).margin(1e-9));
  }

  SECTION("tight noisy blobs across seeds") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng gen(seed);
      const Embedding e = blob_embedding(
          labels, {{0, 0}, {10, 0}, {0, 10}}, 0.01, gen);
      Rng rng(seed + 100);
      const Partition got = kmeans(e, 3, rng);
      REQUIRE(ami(got, truth) == Catch::Approx(1.0).margin(1e-9));
    }
  }
}

TEST_CASE("kmeans edge cases") {
  Embedding e(6, 1);
  for (NodeId v = 0; v < 6; ++v) e.at(v, 0) = static_cast<double>(v);
  Rng rng(2);
  const Partition one = kmeans(e, 1, rng);
  REQUIRE(one.num_communities() == 1);

  // duplicated coordinates can leave clusters empty; labels stay compact
  Embedding dup(4, 1);
  dup.at(0, 0) = 0.0;
  dup.at(1, 0) = 0.0;
  dup.at(2, 0) = 1.0;
  dup.at(3, 0) = 2.0;
  Rng rng2(7);
  const Partition p = kmeans(dup, 4, rng2);
  REQUIRE(p.num_communities() >= 2);
  REQUIRE(p.num_communities() <= 4);

  REQUIRE_THROWS_AS(kmeans(e, 0, rng), ValidationError);
  REQUIRE_THROWS_AS(kmeans(e, 7, rng), ValidationError);
}

TEST_CASE("pearson correlation reference values") {
  REQUIRE(pearson({1, 2, 3}, {1, 3, 2}) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(pearson({1, 2, 3}, {2, 4, 6}) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(pearson({1, 2, 3}, {3, 2, 1}) == Catch::Approx(-1.0).margin(1e-12));
  REQUIRE_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), ValidationError);
  REQUIRE_THROWS_AS(pearson({1}, {1}), ValidationError);
}

TEST_CASE("variance decomposition reference values") {
  const auto vd = variance_decomposition({{1, 2}, {3, 5}});
  REQUIRE(vd.ss_t == Catch::Approx(8.75).margin(1e-12));
  REQUIRE(vd.ss_g == Catch::Approx(6.25).margin(1e-12));
  REQUIRE(vd.ss_e == Catch::Approx(2.5).margin(1e-12));
  REQUIRE(vd.r_e == Catch::Approx(2.0 / 7.0).margin(1e-12));

  const auto flat = variance_decomposition({{2, 2}, {2, 2}});
  REQUIRE(flat.ss_t == 0.0);
  REQUIRE(flat.r_e == 0.0);

  REQUIRE_THROWS_AS(variance_decomposition({{1, 2}, {3}}), ValidationError);
  REQUIRE_THROWS_AS(variance_decomposition({}), ValidationError);
}

TEST_CASE("link prediction ranks community structure highly") {
  const Graph g = two_cliques_bridge(8);
  auto embed_fn = [](const Graph& train) {
    Embedding e(train.num_nodes(), 1);
    for (NodeId v = 0; v < train.num_nodes(); ++v)
      e.at(v, 0) = v < 8 ? 0.0 : 10.0;
    return e;
  };

  Rng rng(4);
  const LinkPredictionResult r = link_prediction_experiment(g, embed_fn, 0.1, rng);
  REQUIRE(r.holdout_edges == 6);  // 10% of 57 edges
  REQUIRE(r.auc >= 0.9);
  REQUIRE(r.accuracy >= 0.9);

  Rng rng2(4);
  const LinkPredictionResult again =
      link_prediction_experiment(g, embed_fn, 0.1, rng2);
  REQUIRE(again.auc == r.auc);
  REQUIRE(again.accuracy == r.accuracy);
}

TEST_CASE("link prediction hands the embedder the reduced graph") {
  const Graph g = two_cliques_bridge(8);
  std::int64_t seen_edges = -1;
  NodeId seen_nodes = -1;
  auto embed_fn = [&](const Graph& train) {
    seen_edges = train.num_edges();
    seen_nodes = train.num_nodes();
    Embedding e(train.num_nodes(), 1);
    for (NodeId v = 0; v < train.num_nodes(); ++v)
      e.at(v, 0) = static_cast<double>(v);
    return e;
  };
  Rng rng(10);
  link_prediction_experiment(g, embed_fn, 0.1, rng);
  REQUIRE(seen_nodes == 16);
  REQUIRE(seen_edges == 57 - 6);
}

TEST_CASE("degenerate embeddings score exactly even") {
  const Graph g = two_cliques_bridge(8);
  auto zeros = [](const Graph& train) {
    return Embedding(train.num_nodes(), 3);
  };
  Rng rng(12);
  const LinkPredictionResult r = link_prediction_experiment(g, zeros, 0.1, rng);
  REQUIRE(r.auc == 0.5);
  REQUIRE(r.accuracy == 0.5);
}

TEST_CASE("link prediction input validation") {
  auto embed_fn = [](const Graph& train) {
    return Embedding(train.num_nodes(), 2);
  };
  Rng rng(1);

  // complete graph has no non-edges to sample
  std::vector<Edge> k6;
  for (NodeId i = 0; i < 6; ++i)
    for (NodeId j = i + 1; j < 6; ++j) k6.push_back({i, j});
  const Graph complete = Graph::from_edges(6, k6);
  REQUIRE_THROWS_AS(link_prediction_experiment(complete, embed_fn, 0.1, rng),
                    ValidationError);

  const Graph tiny =
      Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  REQUIRE_THROWS_AS(link_prediction_experiment(tiny, embed_fn, 0.1, rng),
                    ValidationError);

  const Graph g = two_cliques_bridge(8);
  REQUIRE_THROWS_AS(link_prediction_experiment(g, embed_fn, 0.0, rng),
                    ValidationError);
  REQUIRE_THROWS_AS(link_prediction_experiment(g, embed_fn, 1.0, rng),
                    ValidationError);
}
