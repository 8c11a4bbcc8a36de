#pragma once

// Supervised validation tasks: k-NN node classification, k-means community
// recovery scored by AMI, and link prediction from embedding distances.
// Plus the two analysis statistics used to compare the unsupervised score
// against these tasks: Pearson correlation and a one-way variance
// decomposition across graph/embedding replicates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_set>
#include <vector>

#include "gembed/embedding.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

namespace gembed {

struct TaskResult {
  std::string metric;  // accuracy | ami | auc
  double value = 0.0;
  int replicate = 0;
  std::string embedding_id;
  double divergence = 0.0;
};

namespace detail {

inline double sq_distance(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int t = 0; t < d; ++t) {
    const double diff = a[t] - b[t];
    s += diff * diff;
  }
  return s;
}

}  // namespace detail

// Stratified split, Euclidean k nearest neighbors, majority vote with ties
// broken toward the smallest class id.  Returns test accuracy.
inline double knn_classify(const Embedding& emb,
                           const std::vector<NodeId>& labels,
                           double train_frac, int k, Rng& rng) {
  const NodeId n = emb.num_nodes();
  if (static_cast<NodeId>(labels.size()) != n)
    throw ValidationError("knn: label count mismatch");
  if (train_frac <= 0.0 || train_frac >= 1.0)
    throw ValidationError("knn: train fraction must be in (0,1)");
  if (k < 1) throw ValidationError("knn: k must be positive");
  NodeId num_classes = 0;
  for (NodeId c : labels) {
    if (c < 0) throw ValidationError("knn: negative label");
    num_classes = std::max(num_classes, static_cast<NodeId>(c + 1));
  }
  if (num_classes < 2) throw ValidationError("knn: need at least two classes");

  std::vector<std::vector<NodeId>> by_class(
      static_cast<std::size_t>(num_classes));
  for (NodeId v = 0; v < n; ++v) by_class[labels[v]].push_back(v);
  std::vector<NodeId> train, test;
  for (auto& members : by_class) {
    if (members.empty()) continue;
    rng.shuffle(members);
    // at least one training node per class keeps the split stratified
    const std::size_t ntrain = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(train_frac * static_cast<double>(members.size()))));
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < ntrain ? train : test).push_back(members[i]);
  }
  if (test.empty()) throw ValidationError("knn: empty test split");

  const int d = emb.dim();
  const int kk = std::min<int>(k, static_cast<int>(train.size()));
  std::vector<std::pair<double, NodeId>> dist(train.size());
  std::vector<std::int64_t> votes(static_cast<std::size_t>(num_classes));
  std::int64_t correct = 0;
  for (NodeId v : test) {
    for (std::size_t i = 0; i < train.size(); ++i)
      dist[i] = {detail::sq_distance(emb.row(v), emb.row(train[i]), d),
                 static_cast<NodeId>(i)};
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    std::fill(votes.begin(), votes.end(), 0);
    for (int i = 0; i < kk; ++i) ++votes[labels[train[dist[i].second]]];
    NodeId winner = 0;
    for (NodeId c = 1; c < num_classes; ++c)
      if (votes[c] > votes[winner]) winner = c;
    if (winner == labels[v]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

// k-means++ seeding, Lloyd iterations to an assignment fixpoint (at most
// max_iters), empty clusters reseeded at the point farthest from its
// centroid.  Ties in assignment go to the lowest cluster index.
inline Partition kmeans(const Embedding& emb, NodeId k, Rng& rng,
                        int max_iters = 300) {
  const NodeId n = emb.num_nodes();
  if (k < 1 || k > n) throw ValidationError("kmeans: need 1 <= k <= n");
  const int d = emb.dim();
  std::vector<double> centroids(static_cast<std::size_t>(k) * d);
  auto centroid = [&](NodeId c) { return centroids.data() + static_cast<std::size_t>(c) * d; };

  // k-means++ seeding
  {
    const NodeId first = static_cast<NodeId>(rng.below(n));
    std::copy(emb.row(first), emb.row(first) + d, centroid(0));
    std::vector<double> best_d2(static_cast<std::size_t>(n));
    for (NodeId c = 1; c < k; ++c) {
      double total = 0.0;
      for (NodeId v = 0; v < n; ++v) {
        double b = detail::sq_distance(emb.row(v), centroid(0), d);
        for (NodeId p = 1; p < c; ++p)
          b = std::min(b, detail::sq_distance(emb.row(v), centroid(p), d));
        best_d2[v] = b;
        total += b;
      }
      NodeId chosen;
      if (total <= 0.0) {
        chosen = static_cast<NodeId>(rng.below(n));
      } else {
        const double r = rng.uniform() * total;
        double acc = 0.0;
        chosen = n - 1;
        for (NodeId v = 0; v < n; ++v) {
          acc += best_d2[v];
          if (acc > r) {
            chosen = v;
            break;
          }
        }
      }
      std::copy(emb.row(chosen), emb.row(chosen) + d, centroid(c));
    }
  }

  std::vector<NodeId> assign(static_cast<std::size_t>(n), -1);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k));
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (NodeId v = 0; v < n; ++v) {
      NodeId best = 0;
      double bd = detail::sq_distance(emb.row(v), centroid(0), d);
      for (NodeId c = 1; c < k; ++c) {
        const double dc = detail::sq_distance(emb.row(v), centroid(c), d);
        if (dc < bd) {
          bd = dc;
          best = c;
        }
      }
      if (assign[v] != best) {
        assign[v] = best;
        changed = true;
      }
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (NodeId v = 0; v < n; ++v) ++counts[assign[v]];
    // reseed empty clusters at the point farthest from its own centroid
    for (NodeId c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      NodeId far = -1;
      double fd = -1.0;
      for (NodeId v = 0; v < n; ++v) {
        if (counts[assign[v]] <= 1) continue;  // keep donors non-empty
        const double dv =
            detail::sq_distance(emb.row(v), centroid(assign[v]), d);
        if (dv > fd) {
          fd = dv;
          far = v;
        }
      }
      if (far >= 0) {
        std::copy(emb.row(far), emb.row(far) + d, centroid(c));
        --counts[assign[far]];
        assign[far] = c;
        ++counts[c];
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    std::vector<double> sums(static_cast<std::size_t>(k) * d, 0.0);
    for (NodeId v = 0; v < n; ++v) {
      double* s = sums.data() + static_cast<std::size_t>(assign[v]) * d;
      const double* row = emb.row(v);
      for (int t = 0; t < d; ++t) s[t] += row[t];
    }
    for (NodeId c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (int t = 0; t < d; ++t)
          centroid(c)[t] = sums[static_cast<std::size_t>(c) * d + t] /
                           static_cast<double>(counts[c]);
  }
  // coincident points can leave a cluster empty; compact the labels
  std::vector<std::int64_t> raw(assign.begin(), assign.end());
  return Partition::compact_from(raw, nullptr);
}

// Adjusted mutual information with the exact hypergeometric expectation.
// Natural logs throughout.  Two single-community partitions are defined to
// agree perfectly (1.0).
inline double ami(const Partition& a, const Partition& b) {
  if (a.num_nodes() != b.num_nodes())
    throw ValidationError("ami: partition size mismatch");
  const std::int64_t n = a.num_nodes();
  if (n == 0) throw ValidationError("ami: empty partitions");
  const NodeId ra = a.num_communities();
  const NodeId rb = b.num_communities();
  if (ra == 1 && rb == 1) return 1.0;

  std::vector<std::int64_t> table(static_cast<std::size_t>(ra) * rb, 0);
  for (NodeId v = 0; v < n; ++v)
    ++table[static_cast<std::size_t>(a.label(v)) * rb + b.label(v)];
  std::vector<std::int64_t> ca(static_cast<std::size_t>(ra), 0);
  std::vector<std::int64_t> cb(static_cast<std::size_t>(rb), 0);
  for (NodeId i = 0; i < ra; ++i)
    for (NodeId j = 0; j < rb; ++j) {
      ca[i] += table[static_cast<std::size_t>(i) * rb + j];
      cb[j] += table[static_cast<std::size_t>(i) * rb + j];
    }

  const double dn = static_cast<double>(n);
  double mi = 0.0;
  for (NodeId i = 0; i < ra; ++i)
    for (NodeId j = 0; j < rb; ++j) {
      const std::int64_t nij = table[static_cast<std::size_t>(i) * rb + j];
      if (nij == 0) continue;
      mi += (nij / dn) *
            std::log(dn * nij / (static_cast<double>(ca[i]) * cb[j]));
    }
  double ha = 0.0, hb = 0.0;
  for (std::int64_t c : ca) ha -= (c / dn) * std::log(c / dn);
  for (std::int64_t c : cb) hb -= (c / dn) * std::log(c / dn);

  // E[MI] over random tables with these margins (hypergeometric model)
  auto lfact = [](std::int64_t x) {
    return std::lgamma(static_cast<double>(x) + 1.0);
  };
  double emi = 0.0;
  for (NodeId i = 0; i < ra; ++i) {
    for (NodeId j = 0; j < rb; ++j) {
      const std::int64_t ai = ca[i];
      const std::int64_t bj = cb[j];
      const std::int64_t lo = std::max<std::int64_t>(1, ai + bj - n);
      const std::int64_t hi = std::min(ai, bj);
      for (std::int64_t nij = lo; nij <= hi; ++nij) {
        const double term =
            (nij / dn) * std::log(dn * nij / (static_cast<double>(ai) * bj));
        const double logp = lfact(ai) + lfact(bj) + lfact(n - ai) +
                            lfact(n - bj) - lfact(n) - lfact(nij) -
                            lfact(ai - nij) - lfact(bj - nij) -
                            lfact(n - ai - bj + nij);
        emi += term * std::exp(logp);
      }
    }
  }

  const double denom = 0.5 * (ha + hb) - emi;
  const double numer = mi - emi;
  if (std::abs(denom) < 1e-12) return std::abs(numer) < 1e-12 ? 1.0 : 0.0;
  return numer / denom;
}

// Midrank AUC: the probability that a random positive outscores a random
// negative, ties counting one half.
inline double auc(const std::vector<double>& scores_pos,
                  const std::vector<double>& scores_neg) {
  if (scores_pos.empty() || scores_neg.empty())
    throw ValidationError("auc: both classes must be non-empty");
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(scores_pos.size() + scores_neg.size());
  for (double s : scores_pos) all.push_back({s, true});
  for (double s : scores_neg) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + j);
    for (std::size_t t = i; t < j; ++t)
      if (all[t].positive) rank_sum_pos += midrank;
    i = j;
  }
  const double np = static_cast<double>(scores_pos.size());
  const double nn = static_cast<double>(scores_neg.size());
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

inline double pearson(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ValidationError("pearson: need two equal-length samples");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw ValidationError("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

struct VarianceDecomposition {
  double ss_t = 0.0;
  double ss_g = 0.0;  // between groups (rows)
  double ss_e = 0.0;  // within groups
  double r_e = 0.0;   // ss_e / ss_t
};

// Rows are groups (graphs), columns replicates (embeddings); all rows must
// have the same number of columns.
inline VarianceDecomposition variance_decomposition(
    const std::vector<std::vector<double>>& scores) {
  if (scores.empty() || scores[0].empty())
    throw ValidationError("variance decomposition: empty input");
  const std::size_t r = scores[0].size();
  for (const auto& row : scores)
    if (row.size() != r)
      throw ValidationError("variance decomposition: ragged rows");
  double grand = 0.0;
  for (const auto& row : scores)
    for (double s : row) grand += s;
  grand /= static_cast<double>(scores.size() * r);
  VarianceDecomposition out;
  for (const auto& row : scores) {
    double mu = 0.0;
    for (double s : row) mu += s;
    mu /= static_cast<double>(r);
    out.ss_g += static_cast<double>(r) * (mu - grand) * (mu - grand);
    for (double s : row) out.ss_t += (s - grand) * (s - grand);
  }
  out.ss_e = std::max(0.0, out.ss_t - out.ss_g);
  out.r_e = out.ss_t > 0.0 ? out.ss_e / out.ss_t : 0.0;
  return out;
}

struct LinkPredictionResult {
  double auc = 0.0;
  double accuracy = 0.0;
  std::int64_t holdout_edges = 0;
};

// Removes a uniform holdout of edges, embeds the remaining graph, and
// scores held-out edges against an equal number of uniform non-edges with
// p(uv) = 1 - d(u,v)/d_max, d_max taken over the evaluated pairs.
inline LinkPredictionResult link_prediction_experiment(
    const Graph& g, const std::function<Embedding(const Graph&)>& embed_fn,
    double holdout, Rng& rng) {
  if (g.num_edges() < 10)
    throw ValidationError("link prediction: need at least 10 edges");
  if (holdout <= 0.0 || holdout >= 1.0)
    throw ValidationError("link prediction: holdout must be in (0,1)");
  const NodeId n = g.num_nodes();
  const std::int64_t m = g.num_edges();
  const std::int64_t n_remove = std::max<std::int64_t>(
      1, std::llround(holdout * static_cast<double>(m)));
  const double total_pairs =
      0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  const double non_edges = total_pairs - static_cast<double>(m);
  if (non_edges < static_cast<double>(n_remove))
    throw ValidationError("link prediction: not enough non-edges to sample");

  auto edges = g.edges();
  rng.shuffle(edges);
  std::vector<Edge> held(edges.begin(), edges.begin() + n_remove);
  std::vector<Edge> kept(edges.begin() + n_remove, edges.end());
  const Graph g_train = Graph::from_edges(n, kept);

  // negative pairs: uniform over non-adjacent pairs of the FULL graph
  std::vector<Edge> negatives;
  negatives.reserve(static_cast<std::size_t>(n_remove));
  if (non_edges <= 4.0 * static_cast<double>(n_remove)) {
    std::vector<Edge> pool;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (!g.has_edge(u, v)) pool.push_back({u, v});
    rng.shuffle(pool);
    negatives.assign(pool.begin(), pool.begin() + n_remove);
  } else {
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(n_remove) * 2);
    while (static_cast<std::int64_t>(negatives.size()) < n_remove) {
      NodeId u = static_cast<NodeId>(rng.below(n));
      NodeId v = static_cast<NodeId>(rng.below(n));
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (g.has_edge(u, v)) continue;
      const std::uint64_t key =
          static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(n) + v;
      if (!chosen.insert(key).second) continue;
      negatives.push_back({u, v});
    }
  }

  const Embedding emb = embed_fn(g_train);
  if (emb.num_nodes() != n)
    throw ValidationError("link prediction: embedding size mismatch");
  const int d = emb.dim();
  auto distances = [&](const std::vector<Edge>& pairs) {
    std::vector<double> out(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
      out[i] = std::sqrt(
          detail::sq_distance(emb.row(pairs[i].u), emb.row(pairs[i].v), d));
    return out;
  };
  std::vector<double> dist_pos = distances(held);
  std::vector<double> dist_neg = distances(negatives);
  double dmax = 0.0;
  for (double x : dist_pos) dmax = std::max(dmax, x);
  for (double x : dist_neg) dmax = std::max(dmax, x);
  auto to_scores = [&](std::vector<double>& dist) {
    for (double& x : dist) x = dmax > 0.0 ? 1.0 - x / dmax : 1.0;
  };
  to_scores(dist_pos);
  to_scores(dist_neg);

  LinkPredictionResult out;
  out.holdout_edges = n_remove;
  out.auc = auc(dist_pos, dist_neg);
  std::int64_t correct = 0;
  for (double s : dist_pos)
    if (s > 0.5) ++correct;
  for (double s : dist_neg)
    if (s <= 0.5) ++correct;
  out.accuracy = static_cast<double>(correct) /
                 static_cast<double>(dist_pos.size() + dist_neg.size());
  return out;
}

}  // namespace gembed
