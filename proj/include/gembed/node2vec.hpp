#pragma once

// Random-walk embeddings: second-order biased walks plus skip-gram with
// negative sampling.  p = q = 1 gives first-order (DeepWalk-style) walks.
//
// The SGD loop follows the classic word2vec skip-gram layout: input vectors
// are updated for the surrounding nodes against the output vector of the
// center node and of sampled negatives; the input matrix is the embedding.

#include <cmath>
#include <cstdint>
#include <vector>

#include "gembed/embedding.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gembed {

struct WalkParams {
  int walks_per_node = 10;
  int walk_length = 80;  // nodes per walk
  double p = 1.0;        // return parameter
  double q = 1.0;        // in-out parameter
};

// walks_per_node rounds; each round visits every node once in a freshly
// shuffled order.  A walk stops early only at a node with no neighbors,
// so isolated nodes yield single-node walks.
inline std::vector<std::vector<NodeId>> generate_walks(const Graph& g,
                                                       const WalkParams& params,
                                                       Rng& rng) {
  if (params.walks_per_node < 1 || params.walk_length < 1)
    throw ValidationError("walks: counts must be positive");
  if (params.p <= 0 || params.q <= 0)
    throw ValidationError("walks: p and q must be positive");
  const NodeId n = g.num_nodes();
  const bool uniform = params.p == 1.0 && params.q == 1.0;
  std::vector<std::vector<NodeId>> walks;
  walks.reserve(static_cast<std::size_t>(params.walks_per_node) * n);
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) order[v] = v;
  std::vector<double> cum;
  for (int round = 0; round < params.walks_per_node; ++round) {
    rng.shuffle(order);
    for (NodeId start : order) {
      std::vector<NodeId> walk;
      walk.reserve(static_cast<std::size_t>(params.walk_length));
      walk.push_back(start);
      NodeId prev = -1;
      NodeId cur = start;
      while (static_cast<int>(walk.size()) < params.walk_length) {
        const auto nbrs = g.neighbors(cur);
        if (nbrs.empty()) break;
        NodeId next;
        if (uniform || prev < 0) {
          next = nbrs[rng.below(nbrs.size())];
        } else {
          // unnormalized transition weights relative to the previous node
          cum.resize(nbrs.size());
          double total = 0.0;
          const auto prev_nbrs = g.neighbors(prev);
          for (std::size_t t = 0; t < nbrs.size(); ++t) {
            const NodeId cand = nbrs[t];
            double w;
            if (cand == prev)
              w = 1.0 / params.p;
            else if (std::binary_search(prev_nbrs.begin(), prev_nbrs.end(),
                                        cand))
              w = 1.0;
            else
              w = 1.0 / params.q;
            total += w;
            cum[t] = total;
          }
          const double r = rng.uniform() * total;
          std::size_t t = 0;
          while (t + 1 < nbrs.size() && cum[t] <= r) ++t;
          next = nbrs[t];
        }
        walk.push_back(next);
        prev = cur;
        cur = next;
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

struct SgnsParams {
  int dim = 128;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double lr_start = 0.025;
  double lr_min = 1e-4;
  int workers = 1;  // > 1 enables lock-free parallel SGD (non-reproducible)
  bool track_loss = false;
};

struct SgnsStats {
  std::vector<double> epoch_mean_loss;  // per positive pair, natural log
};

namespace detail {

// Walker alias method over the noise distribution (unigram^0.75).
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw ValidationError("alias table: zero total weight");
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * n / total;
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i)
      (scaled[i] < 1.0 ? small : large).push_back(
          static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      small.pop_back();
      const std::uint32_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;
  }

  std::uint32_t sample(Rng& rng) const {
    const std::size_t i =
        static_cast<std::size_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[i] ? static_cast<std::uint32_t>(i)
                                    : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

struct SigmoidTable {
  static constexpr int kSize = 1024;
  static constexpr float kMaxExp = 6.0f;
  float table[kSize];

  SigmoidTable() {
    for (int i = 0; i < kSize; ++i) {
      const float x = (2.0f * i / kSize - 1.0f) * kMaxExp;
      table[i] = 1.0f / (1.0f + std::exp(-x));
    }
  }

  float operator()(float x) const {
    if (x >= kMaxExp) return 1.0f;
    if (x <= -kMaxExp) return 0.0f;
    const int i = static_cast<int>((x + kMaxExp) * (kSize / (2.0f * kMaxExp)));
    return table[i];
  }
};

}  // namespace detail

// Trains input/output vector pairs on the walk corpus; returns the input
// vectors.  num_nodes fixes the vocabulary (walks may miss nodes; their
// vectors stay at initialization).  Deterministic with workers = 1.
inline Embedding train_sgns(const std::vector<std::vector<NodeId>>& walks,
                            NodeId num_nodes, const SgnsParams& params,
                            Rng& rng, SgnsStats* stats = nullptr) {
  if (params.dim < 1) throw ValidationError("sgns: dim must be positive");
  if (params.window < 1) throw ValidationError("sgns: window must be positive");
  if (params.negatives < 1)
    throw ValidationError("sgns: need at least one negative sample");
  if (params.epochs < 0) throw ValidationError("sgns: negative epoch count");
  const NodeId n = num_nodes;
  const int d = params.dim;

  std::vector<float> syn0(static_cast<std::size_t>(n) * d);
  std::vector<float> syn1(static_cast<std::size_t>(n) * d, 0.0f);
  for (auto& w : syn0)
    w = static_cast<float>((rng.uniform() - 0.5) / d);

  std::vector<double> counts(static_cast<std::size_t>(n), 0.0);
  std::int64_t corpus_tokens = 0;
  for (const auto& walk : walks)
    for (NodeId v : walk) {
      if (v < 0 || v >= n) throw ValidationError("sgns: walk node out of range");
      counts[v] += 1.0;
      ++corpus_tokens;
    }
  if (corpus_tokens == 0) throw ValidationError("sgns: empty walk corpus");
  for (double& c : counts) c = std::pow(c, 0.75);
  const detail::AliasTable noise(counts);
  static const detail::SigmoidTable sigmoid;

  const std::int64_t total_tokens =
      corpus_tokens * std::max(params.epochs, 1);
  const double lr_span = params.lr_start - params.lr_min;

  const int workers =
#ifdef _OPENMP
      std::max(1, params.workers);
#else
      1;
#endif

  auto train_range = [&](std::size_t walk_begin, std::size_t walk_end,
                         Rng& stream, std::int64_t tokens_start,
                         double* loss_sum, std::int64_t* pair_count) {
    std::vector<float> neu1e(static_cast<std::size_t>(d));
    std::int64_t processed = tokens_start;
    double lr = params.lr_start;
    for (std::size_t wi = walk_begin; wi < walk_end; ++wi) {
      const auto& walk = walks[wi];
      const int len = static_cast<int>(walk.size());
      for (int pos = 0; pos < len; ++pos) {
        if (processed % 10000 == 0) {
          const double frac =
              static_cast<double>(processed) / (total_tokens + 1);
          lr = std::max(params.lr_min, params.lr_start - lr_span * frac);
        }
        ++processed;
        const NodeId center = walk[pos];
        const int shrink = static_cast<int>(stream.below(params.window));
        const int reach = params.window - shrink;
        for (int off = -reach; off <= reach; ++off) {
          if (off == 0) continue;
          const int cpos = pos + off;
          if (cpos < 0 || cpos >= len) continue;
          const NodeId input = walk[cpos];
          float* v_in = syn0.data() + static_cast<std::size_t>(input) * d;
          for (int t = 0; t < d; ++t) neu1e[t] = 0.0f;
          for (int s = 0; s <= params.negatives; ++s) {
            NodeId target;
            float label;
            if (s == 0) {
              target = center;
              label = 1.0f;
            } else {
              target = static_cast<NodeId>(noise.sample(stream));
              if (target == center) continue;
              label = 0.0f;
            }
            float* v_out = syn1.data() + static_cast<std::size_t>(target) * d;
            float f = 0.0f;
            for (int t = 0; t < d; ++t) f += v_in[t] * v_out[t];
            const float grad = (label - sigmoid(f)) * static_cast<float>(lr);
            for (int t = 0; t < d; ++t) neu1e[t] += grad * v_out[t];
            for (int t = 0; t < d; ++t) v_out[t] += grad * v_in[t];
            if (loss_sum) {
              // -log sigma(f) for the positive, -log sigma(-f) for negatives
              const double fd = f;
              *loss_sum += label > 0.5f ? std::log1p(std::exp(-fd))
                                        : std::log1p(std::exp(fd));
            }
          }
          for (int t = 0; t < d; ++t) v_in[t] += neu1e[t];
          if (pair_count) ++*pair_count;
        }
      }
    }
  };

  std::vector<std::int64_t> tokens_before(walks.size() + 1, 0);
  for (std::size_t i = 0; i < walks.size(); ++i)
    tokens_before[i + 1] =
        tokens_before[i] + static_cast<std::int64_t>(walks[i].size());

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::int64_t pair_count = 0;
    if (workers == 1) {
      train_range(0, walks.size(), rng,
                  static_cast<std::int64_t>(epoch) * corpus_tokens,
                  stats ? &loss_sum : nullptr,
                  stats ? &pair_count : nullptr);
    } else {
#ifdef _OPENMP
      const std::uint64_t base = rng.next();
#pragma omp parallel num_threads(workers)
      {
        const int t = omp_get_thread_num();
        const std::size_t lo = walks.size() * t / workers;
        const std::size_t hi = walks.size() * (t + 1) / workers;
        Rng stream(derive_seed(base, {static_cast<std::uint64_t>(epoch),
                                      static_cast<std::uint64_t>(t)}));
        train_range(lo, hi, stream,
                    static_cast<std::int64_t>(epoch) * corpus_tokens +
                        tokens_before[lo],
                    nullptr, nullptr);
      }
#endif
    }
    if (stats)
      stats->epoch_mean_loss.push_back(
          pair_count > 0 ? loss_sum / static_cast<double>(pair_count) : 0.0);
  }

  Embedding e(n, d);
  for (NodeId v = 0; v < n; ++v)
    for (int t = 0; t < d; ++t)
      e.at(v, t) = syn0[static_cast<std::size_t>(v) * d + t];
  return e;
}

// Walks followed by SGNS in one call.
inline Embedding node2vec_embed(const Graph& g, const WalkParams& wp,
                                const SgnsParams& sp, Rng& rng,
                                SgnsStats* stats = nullptr) {
  const auto walks = generate_walks(g, wp, rng);
  return train_sgns(walks, g.num_nodes(), sp, rng, stats);
}

}  // namespace gembed
