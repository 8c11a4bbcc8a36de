#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "gembed/clustering.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

using namespace gembed;

namespace {

// Two K5 cliques joined by one bridge edge (node 4 -- node 5).
Graph two_cliques() {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 5; ++u)
    for (NodeId v = u + 1; v < 5; ++v) edges.push_back({u, v});
  for (NodeId u = 5; u < 10; ++u)
    for (NodeId v = u + 1; v < 10; ++v) edges.push_back({u, v});
  edges.push_back({4, 5});
  return Graph::from_edges(10, edges);
}

// Exhaustive max-modularity search over all partitions of n <= 10 nodes
// via restricted growth strings.
double brute_force_best_modularity(const Graph& g, Partition* best_out) {
  const NodeId n = g.num_nodes();
  std::vector<NodeId> labels(static_cast<std::size_t>(n), 0);
  double best = -2.0;
  const WeightedGraphView view = unit_weights(g);
  while (true) {
    const Partition p = Partition::from_labels(labels);
    const double q = modularity(view, p);
    if (q > best) {
      best = q;
      if (best_out) *best_out = p;
    }
    // next restricted growth string
    int i = static_cast<int>(n) - 1;
    for (; i > 0; --i) {
      NodeId maxprefix = 0;
      for (int j = 0; j < i; ++j) maxprefix = std::max(maxprefix, labels[j]);
      if (labels[i] <= maxprefix) {
        ++labels[i];
        for (int j = i + 1; j < n; ++j) labels[j] = 0;
        break;
      }
      labels[i] = 0;
    }
    if (i == 0) break;
  }
  return best;
}

}  // namespace

TEST_CASE("modularity of the planted two-clique split") {
  // W=21, intra=20, each side has volume 21
  const Graph g = two_cliques();
  std::vector<NodeId> labels(10, 0);
  for (NodeId v = 5; v < 10; ++v) labels[v] = 1;
  const double q = modularity(unit_weights(g), Partition::from_labels(labels));
  // Q = sum_c intra_c/W - (vol_c/2W)^2 = 20/21 - 2*(21/42)^2
  REQUIRE(q == Catch::Approx(20.0 / 21.0 - 0.5).margin(1e-12));
}

TEST_CASE("louvain recovers the brute-force optimum on two cliques") {
  const Graph g = two_cliques();
  Partition best = Partition::from_labels({0});
  const double best_q = brute_force_best_modularity(g, &best);
  Rng rng(123);
  const Partition found = louvain(unit_weights(g), rng);
  const double found_q = modularity(unit_weights(g), found);
  REQUIRE(found_q == Catch::Approx(best_q).margin(1e-9));
  REQUIRE(found.num_communities() == 2);
  REQUIRE(found.label(0) == found.label(4));
  REQUIRE(found.label(5) == found.label(9));
  REQUIRE(found.label(0) != found.label(5));
}

TEST_CASE("louvain is deterministic given the seed") {
  const Graph g = two_cliques();
  Rng a(7), b(7);
  const Partition pa = louvain(unit_weights(g), a);
  const Partition pb = louvain(unit_weights(g), b);
  REQUIRE(pa.labels() == pb.labels());
}

TEST_CASE("respects edge weights") {
  // Triangle 0-1-2 plus pendant edge 2-3. With a huge weight on 2-3 the
  // best split groups {2,3}.
  const Graph g =
      Graph::from_edges(4, std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}, {2, 3}});
  WeightedGraphView heavy{&g, {1.0, 1.0, 1.0, 50.0}};
  Rng rng(5);
  const Partition p = louvain(heavy, rng);
  REQUIRE(p.label(2) == p.label(3));
  REQUIRE(p.label(0) != p.label(2));
}

TEST_CASE("ecg finds the planted split and is seed-deterministic") {
  const Graph g = two_cliques();
  Rng a(99), b(99);
  const Partition pa = ecg(g, a);
  const Partition pb = ecg(g, b);
  REQUIRE(pa.labels() == pb.labels());
  REQUIRE(pa.num_communities() == 2);
  REQUIRE(pa.label(0) == pa.label(4));
  REQUIRE(pa.label(5) == pa.label(9));
  REQUIRE(pa.label(0) != pa.label(5));
}

TEST_CASE("modularity validates its inputs") {
  const Graph empty = Graph::from_edges(3, std::vector<Edge>{});
  REQUIRE_THROWS_AS(
      modularity(unit_weights(empty), Partition::from_labels({0, 0, 0})),
      ValidationError);
  const Graph g = Graph::from_edges(2, std::vector<Edge>{{0, 1}});
  REQUIRE_THROWS_AS(modularity(unit_weights(g), Partition::from_labels({0})),
                    ValidationError);
}
