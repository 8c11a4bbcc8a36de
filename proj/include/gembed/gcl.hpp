#pragma once

// Unsupervised embedding quality via a geometric Chung-Lu null model.
//
// Idea: cluster the graph, summarize it by the proportions of edges that
// fall between and within communities, then ask how well a degree-and-
// geometry-aware random graph model, fitted to the embedding, reproduces
// those proportions.  The divergence between the observed and the model
// proportions, minimized over the kernel sharpness alpha, is the score.
// Lower is better.
//
// Model: each pair (i,j) is an edge independently with probability
//   p_ij = min(1, x_i x_j g_alpha(d_ij)),    g_alpha(d) = (1 - d/dmax)^alpha
// where d is the Euclidean embedding distance, dmax the largest pairwise
// distance, and the weights x are fitted so that every node's expected
// degree matches its observed degree.  alpha = 0 recovers plain Chung-Lu
// (geometry ignored); larger alpha concentrates edges on nearby pairs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gembed/clustering.hpp"
#include "gembed/embedding.hpp"
#include "gembed/graph.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gembed {

// ---------------------------------------------------------------------------
// Edge proportion vectors

// For a partition into L communities: `inter` holds, for each unordered
// community pair (a,b) with a < b in lexicographic order, the proportion of
// edges joining a to b; `intra` holds, per community, the proportion of
// edges inside it.  Together the L(L-1)/2 + L entries sum to one.
struct EdgeProportionVectors {
  NodeId num_communities = 0;
  std::vector<double> inter;
  std::vector<double> intra;
};

inline std::size_t community_pair_index(NodeId a, NodeId b, NodeId ell) {
  // a < b
  return static_cast<std::size_t>(a) * ell -
         static_cast<std::size_t>(a) * (a + 1) / 2 + (b - a - 1);
}

inline EdgeProportionVectors graph_vectors(const Graph& g,
                                           const Partition& p) {
  if (g.num_edges() == 0)
    throw ValidationError("graph_vectors: graph has no edges");
  if (p.num_nodes() != g.num_nodes())
    throw ValidationError("graph_vectors: partition size mismatch");
  const NodeId ell = p.num_communities();
  EdgeProportionVectors out;
  out.num_communities = ell;
  out.inter.assign(static_cast<std::size_t>(ell) * (ell - 1) / 2, 0.0);
  out.intra.assign(static_cast<std::size_t>(ell), 0.0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u >= v) continue;
      const NodeId a = std::min(p.label(u), p.label(v));
      const NodeId b = std::max(p.label(u), p.label(v));
      if (a == b)
        out.intra[a] += 1.0;
      else
        out.inter[community_pair_index(a, b, ell)] += 1.0;
    }
  }
  const double m = static_cast<double>(g.num_edges());
  for (double& x : out.inter) x /= m;
  for (double& x : out.intra) x /= m;
  return out;
}

// ---------------------------------------------------------------------------
// Jensen-Shannon divergence

// Natural-log JSD of two distributions of equal length.  Inputs are
// renormalized defensively; they must be nonnegative with positive sum.
// Bounded by ln 2.
inline double js_divergence(std::span<const double> p,
                            std::span<const double> q) {
  if (p.size() != q.size())
    throw ValidationError("js_divergence: length mismatch");
  double sp = 0.0, sq = 0.0;
  for (double x : p) {
    if (x < 0) throw ValidationError("js_divergence: negative entry");
    sp += x;
  }
  for (double x : q) {
    if (x < 0) throw ValidationError("js_divergence: negative entry");
    sq += x;
  }
  if (sp <= 0.0 || sq <= 0.0)
    throw ValidationError("js_divergence: zero distribution");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i] / sp;
    const double qi = q[i] / sq;
    const double mi = 0.5 * (pi + qi);
    if (pi > 0) acc += 0.5 * pi * std::log(pi / mi);
    if (qi > 0) acc += 0.5 * qi * std::log(qi / mi);
  }
  return std::max(acc, 0.0);
}

// ---------------------------------------------------------------------------
// Pairwise geometry

// Packed upper triangle (i < j, row-major) of log(1 - d_ij/dmax), floats,
// clamped to >= -700 so that exp(alpha * entry) is exactly 1 at alpha = 0
// and underflows to 0 for the farthest pair at any alpha > 0.1.  For n
// nodes the table is n(n-1)/2 * 4 bytes (about 200 MB at n = 10^4);
// construction holds a transient double copy of the distances on top of
// that.  Distances and dmax stay in double all the way to the final float
// store: the downstream score has to reproduce to 1e-9 under rigid motions
// of the embedding, and float geometry would cap it near 1e-7.
class PairGeometry {
 public:
  explicit PairGeometry(const Embedding& e)
      : n_(e.num_nodes()), logk_(pair_count(e.num_nodes())) {
    if (n_ < 2)
      throw ValidationError("pair geometry: need at least two nodes");
    const int d = e.dim();
    std::vector<double> sqnorm(static_cast<std::size_t>(n_));
    for (NodeId v = 0; v < n_; ++v) {
      double s = 0.0;
      const double* row = e.row(v);
      for (int t = 0; t < d; ++t) s += row[t] * row[t];
      sqnorm[v] = s;
    }
    // distances first, then an in-place transform once dmax is known
    std::vector<double> dist(logk_.size());
    double dmax = 0.0;
    constexpr NodeId kBlock = 64;
#pragma omp parallel for schedule(dynamic, 1) reduction(max : dmax)
    for (NodeId ib = 0; ib < n_; ib += kBlock) {
      const NodeId iend = std::min<NodeId>(ib + kBlock, n_);
      for (NodeId i = ib; i < iend; ++i) {
        const double* xi = e.row(i);
        double* out = dist.data() + row_offset(i);
        for (NodeId j = i + 1; j < n_; ++j) {
          const double* xj = e.row(j);
          double dot = 0.0;
          for (int t = 0; t < d; ++t) dot += xi[t] * xj[t];
          const double d2 = std::max(0.0, sqnorm[i] + sqnorm[j] - 2.0 * dot);
          const double dij = std::sqrt(d2);
          out[j - i - 1] = dij;
          dmax = std::max(dmax, dij);
        }
      }
    }
    dmax_ = dmax;
    if (dmax_ > 0.0) {
#pragma omp parallel for schedule(static)
      for (std::int64_t idx = 0;
           idx < static_cast<std::int64_t>(logk_.size()); ++idx) {
        const double r = 1.0 - dist[static_cast<std::size_t>(idx)] / dmax_;
        logk_[idx] =
            r > 0.0
                ? std::max(static_cast<float>(std::log(r)), -700.0f)
                : -700.0f;
      }
    } else {
      // all points coincide: kernel is identically 1, model is plain
      // Chung-Lu at every alpha
      std::fill(logk_.begin(), logk_.end(), 0.0f);
    }
  }

  NodeId num_nodes() const { return n_; }
  double dmax() const { return dmax_; }

  static std::size_t pair_count(NodeId n) {
    return static_cast<std::size_t>(n) * (n - 1) / 2;
  }
  std::size_t row_offset(NodeId i) const {
    // first index of row i entries (i, i+1..n-1)
    return static_cast<std::size_t>(i) *
               (2 * static_cast<std::size_t>(n_) - i - 1) / 2;
  }

  // kernel[idx] = exp(alpha * logk[idx]), packed like logk.
  void materialize(double alpha, std::vector<float>& kernel) const {
    kernel.resize(logk_.size());
    const float a = static_cast<float>(alpha);
#pragma omp parallel for schedule(static)
    for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(logk_.size());
         ++idx)
      kernel[idx] = std::exp(a * logk_[idx]);
  }

  float log_kernel(NodeId i, NodeId j) const {
    // i < j
    return logk_[row_offset(i) + (j - i - 1)];
  }

 private:
  NodeId n_;
  double dmax_ = 0.0;
  std::vector<float> logk_;
};

// ---------------------------------------------------------------------------
// Model fit

struct GclFitOptions {
  double damping = 0.5;
  double tolerance = 1e-6;  // residual at or below this counts as converged
  // Iteration keeps going past `tolerance` down to `target` when it can.
  // The extra digits keep the downstream score stable under rigid motions
  // of the embedding, where distances reproduce only to rounding error.
  double target = 1e-9;
  int max_iterations = 1000;
  // Give up once this many consecutive iterations fail to improve the best
  // residual.  Heavy-clipping regimes can cycle without converging.
  int stagnation_limit = 30;
};

struct GclModel {
  std::vector<double> x;  // fitted node weights
  double alpha = 0.0;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::int64_t clipped_pairs = 0;  // pairs with x_i x_j g > 1 at the end
};

namespace detail {

// One streaming pass over the packed kernel: unclipped sums
// S_i = sum_j x_j g_ij, clipped expected degrees
// E_i = sum_j min(1, x_i x_j g_ij), and the clip count.
// Deterministic for a fixed worker count: each thread owns a contiguous
// range of row blocks and partials are combined in thread order.
inline std::int64_t gcl_pass(const PairGeometry& geo,
                             const std::vector<float>& kernel,
                             const std::vector<double>& x,
                             std::vector<double>& s_unclipped,
                             std::vector<double>& e_clipped) {
  const NodeId n = geo.num_nodes();
  s_unclipped.assign(static_cast<std::size_t>(n), 0.0);
  e_clipped.assign(static_cast<std::size_t>(n), 0.0);
  std::int64_t clips = 0;
#ifdef _OPENMP
  const int workers = omp_get_max_threads();
#else
  const int workers = 1;
#endif
  if (workers == 1) {
    std::int64_t local_clips = 0;
    for (NodeId i = 0; i < n; ++i) {
      const float* row = kernel.data() + geo.row_offset(i);
      const double xi = x[i];
      double si = 0.0, ei = 0.0;
      for (NodeId j = i + 1; j < n; ++j) {
        const double g = row[j - i - 1];
        const double gxj = g * x[j];
        si += gxj;
        const double p = xi * gxj;
        const double pc = std::min(1.0, p);
        ei += pc;
        e_clipped[j] += pc;
        s_unclipped[j] += g * xi;
        if (p > 1.0) ++local_clips;
      }
      s_unclipped[i] += si;
      e_clipped[i] += ei;
    }
    return local_clips;
  }
  // parallel: per-thread partial vectors, combined in thread order
  std::vector<std::vector<double>> s_part(workers), e_part(workers);
  std::vector<std::int64_t> c_part(workers, 0);
#pragma omp parallel num_threads(workers)
  {
    const int t = omp_get_thread_num();
    auto& sp = s_part[t];
    auto& ep = e_part[t];
    sp.assign(static_cast<std::size_t>(n), 0.0);
    ep.assign(static_cast<std::size_t>(n), 0.0);
    std::int64_t local_clips = 0;
    // contiguous row ranges balanced by pair count
    const double total = static_cast<double>(PairGeometry::pair_count(n));
    auto row_at = [&](double frac) {
      // first row r with row_offset(r) >= frac*total
      NodeId lo = 0, hi = n;
      const double target = frac * total;
      while (lo < hi) {
        const NodeId mid = lo + (hi - lo) / 2;
        if (static_cast<double>(geo.row_offset(mid)) < target)
          lo = mid + 1;
        else
          hi = mid;
      }
      return lo;
    };
    const NodeId r0 = row_at(static_cast<double>(t) / workers);
    const NodeId r1 = row_at(static_cast<double>(t + 1) / workers);
    for (NodeId i = r0; i < r1; ++i) {
      const float* row = kernel.data() + geo.row_offset(i);
      const double xi = x[i];
      double si = 0.0, ei = 0.0;
      for (NodeId j = i + 1; j < n; ++j) {
        const double g = row[j - i - 1];
        const double gxj = g * x[j];
        si += gxj;
        const double p = xi * gxj;
        const double pc = std::min(1.0, p);
        ei += pc;
        ep[j] += pc;
        sp[j] += g * xi;
        if (p > 1.0) ++local_clips;
      }
      sp[i] += si;
      ep[i] += ei;
    }
    c_part[t] = local_clips;
  }
  for (int t = 0; t < workers; ++t) {
    for (NodeId v = 0; v < n; ++v) {
      s_unclipped[v] += s_part[t][v];
      e_clipped[v] += e_part[t][v];
    }
    clips += c_part[t];
  }
  return clips;
}

}  // namespace detail

// Fits the node weights for a fixed alpha by damped fixed-point iteration
//   x_i <- (1-damping) x_i + damping * x_i w_i / E_i,
//   E_i = sum_{j != i} min(1, x_i x_j g(d_ij)).
// When nothing clips this reduces to the plain Chung-Lu update w_i / S_i;
// under clipping it still targets E_i = w_i, which is what the residual
// measures.  On failure the best iterate seen is returned with
// converged = false.
inline GclModel fit_gcl_kernel(const PairGeometry& geo,
                               const std::vector<float>& kernel,
                               const std::vector<double>& degrees,
                               double alpha, const GclFitOptions& opts = {},
                               const std::vector<double>* warm_start = nullptr) {
  const NodeId n = geo.num_nodes();
  if (static_cast<NodeId>(degrees.size()) != n)
    throw ValidationError("gcl fit: degree vector size mismatch");
  for (double w : degrees)
    if (w < 0) throw ValidationError("gcl fit: negative degree");

  GclModel model;
  model.alpha = alpha;
  double wsum = 0.0;
  for (double w : degrees) wsum += w;
  if (wsum <= 0.0) {
    // empty degree sequence: x = 0 matches exactly
    model.x.assign(static_cast<std::size_t>(n), 0.0);
    model.converged = true;
    model.residual = 0.0;
    return model;
  }

  std::vector<double> x;
  if (warm_start && static_cast<NodeId>(warm_start->size()) == n)
    x = *warm_start;
  else {
    x.resize(static_cast<std::size_t>(n));
    const double inv_sqrt = 1.0 / std::sqrt(wsum);
    for (NodeId v = 0; v < n; ++v) x[v] = degrees[v] * inv_sqrt;
  }

  std::vector<double> s, e;
  std::vector<double> best_x = x;
  double best_residual = std::numeric_limits<double>::infinity();
  std::int64_t best_clips = 0;
  int best_iter = 0;
  int stagnant = 0;
  const double stop_at = std::min(opts.target, opts.tolerance);
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    const std::int64_t clips = detail::gcl_pass(geo, kernel, x, s, e);
    double residual = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (degrees[v] <= 0.0) continue;
      residual = std::max(residual, std::abs(e[v] - degrees[v]) / degrees[v]);
    }
    if (residual < best_residual) {
      best_residual = residual;
      best_x = x;
      best_clips = clips;
      best_iter = iter;
      stagnant = 0;
    } else if (++stagnant >= opts.stagnation_limit) {
      // cycling or stuck (heavy clipping can do both); the best iterate is
      // already saved, and a converging run improves every few iterations
      break;
    }
    if (residual <= stop_at) break;
    for (NodeId v = 0; v < n; ++v) {
      if (degrees[v] <= 0.0) {
        x[v] = 0.0;
        continue;
      }
      if (e[v] > 0.0)
        x[v] = (1.0 - opts.damping) * x[v] +
               opts.damping * x[v] * degrees[v] / e[v];
      else if (x[v] <= 0.0)
        x[v] = degrees[v] / std::sqrt(wsum);  // dead start, reseed
      // e == 0 with x > 0: every partner unreachable at this alpha; leave
      // x alone and let the residual report the miss
    }
  }
  model.x = std::move(best_x);
  model.residual = best_residual;
  model.clipped_pairs = best_clips;
  model.iterations = best_iter;
  model.converged = best_residual <= opts.tolerance;
  return model;
}

// Convenience entry point matching the library interface: builds the
// geometry for one alpha.  Scoring loops use DivergenceScorer instead,
// which shares the geometry across the whole alpha grid.
inline GclModel fit_gcl(const std::vector<double>& degrees,
                        const Embedding& emb, double alpha,
                        const GclFitOptions& opts = {}) {
  PairGeometry geo(emb);
  std::vector<float> kernel;
  geo.materialize(alpha, kernel);
  return fit_gcl_kernel(geo, kernel, degrees, alpha, opts);
}

// Expected edge-proportion vectors under a fitted model: bucket the clipped
// pair probabilities by community pair and normalize by their total.
inline EdgeProportionVectors model_vectors_kernel(
    const PairGeometry& geo, const std::vector<float>& kernel,
    const std::vector<double>& x, const Partition& p) {
  const NodeId n = geo.num_nodes();
  if (p.num_nodes() != n)
    throw ValidationError("model_vectors: partition size mismatch");
  const NodeId ell = p.num_communities();
  const std::size_t nbuckets =
      static_cast<std::size_t>(ell) * (ell + 1) / 2;
  auto bucket_of = [ell](NodeId a, NodeId b) {
    // a <= b; intra buckets first, then inter in pair order
    return a == b ? static_cast<std::size_t>(a)
                  : static_cast<std::size_t>(ell) +
                        community_pair_index(a, b, ell);
  };
#ifdef _OPENMP
  const int workers = omp_get_max_threads();
#else
  const int workers = 1;
#endif
  std::vector<std::vector<double>> partial(
      static_cast<std::size_t>(workers),
      std::vector<double>(nbuckets, 0.0));
#pragma omp parallel num_threads(workers)
  {
#ifdef _OPENMP
    const int t = omp_get_thread_num();
#else
    const int t = 0;
#endif
    auto& buckets = partial[t];
#pragma omp for schedule(static)
    for (NodeId i = 0; i < n; ++i) {
      const float* row = kernel.data() + geo.row_offset(i);
      const double xi = x[i];
      const NodeId ci = p.label(i);
      for (NodeId j = i + 1; j < n; ++j) {
        const double prob = std::min(1.0, xi * x[j] * row[j - i - 1]);
        const NodeId cj = p.label(j);
        buckets[bucket_of(std::min(ci, cj), std::max(ci, cj))] += prob;
      }
    }
  }
  std::vector<double> buckets(nbuckets, 0.0);
  for (int t = 0; t < workers; ++t)
    for (std::size_t b = 0; b < nbuckets; ++b) buckets[b] += partial[t][b];

  EdgeProportionVectors out;
  out.num_communities = ell;
  out.intra.assign(static_cast<std::size_t>(ell), 0.0);
  out.inter.assign(static_cast<std::size_t>(ell) * (ell - 1) / 2, 0.0);
  double total = 0.0;
  for (double b : buckets) total += b;
  if (total > 0.0) {
    for (NodeId c = 0; c < ell; ++c) out.intra[c] = buckets[c] / total;
    for (std::size_t k = 0; k < out.inter.size(); ++k)
      out.inter[k] = buckets[ell + k] / total;
  }
  return out;
}

inline EdgeProportionVectors model_vectors(const GclModel& model,
                                           const Embedding& emb,
                                           const Partition& p) {
  PairGeometry geo(emb);
  std::vector<float> kernel;
  geo.materialize(model.alpha, kernel);
  return model_vectors_kernel(geo, kernel, model.x, p);
}

// ---------------------------------------------------------------------------
// Divergence

// Weighted two-part divergence between observed and model proportions.
// Each side is renormalized jointly across its inter+intra entries (the
// C(L+1,2) proportions form one distribution), and the two parts are then
// compared as sub-measures: a part contributes
//   0.5 * sum p ln(p/m) + 0.5 * sum q ln(q/m),  m = (p+q)/2,
// without renormalizing the part itself.  Keeping the part masses intact is
// what lets an internal/external mass mismatch register; renormalizing each
// part separately would hide exactly that signal and also blow tiny noisy
// external masses up to a full distribution.  Each part stays in
// [0, ln 2 * mean part mass], so the weighted sum stays within [0, ln 2]
// for weights summing to one.
inline double weighted_divergence(const EdgeProportionVectors& observed,
                                  const EdgeProportionVectors& model,
                                  double w_external, double w_internal) {
  if (observed.num_communities != model.num_communities)
    throw ValidationError("divergence: community count mismatch");
  auto mass = [](const EdgeProportionVectors& v) {
    double s = 0.0;
    for (double x : v.inter) {
      if (x < 0) throw ValidationError("divergence: negative proportion");
      s += x;
    }
    for (double x : v.intra) {
      if (x < 0) throw ValidationError("divergence: negative proportion");
      s += x;
    }
    return s;
  };
  const double so = mass(observed);
  const double sm = mass(model);
  if (so <= 0.0 || sm <= 0.0)
    throw ValidationError("divergence: zero total mass");
  auto part = [&](std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
      throw ValidationError("divergence: vector length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double p = a[i] / so;
      const double q = b[i] / sm;
      const double mid = 0.5 * (p + q);
      if (p > 0) acc += 0.5 * p * std::log(p / mid);
      if (q > 0) acc += 0.5 * q * std::log(q / mid);
    }
    return std::max(acc, 0.0);
  };
  return w_external * part(observed.inter, model.inter) +
         w_internal * part(observed.intra, model.intra);
}

struct AlphaEval {
  double alpha = 0.0;
  double divergence = 0.0;
  bool fit_converged = false;
  double fit_residual = 0.0;
  int fit_iterations = 0;
  std::int64_t clipped_pairs = 0;
};

struct DivergenceOptions {
  double alpha_min = 0.0;
  double alpha_max = 10.0;       // end of the uniform coarse grid
  double alpha_hard_max = 160.0; // ceiling for the adaptive right extension
  double alpha_step = 0.25;
  double refine_width = 1e-2;  // golden-section bracket target
  double w_external = 0.5;
  double w_internal = 0.5;
  GclFitOptions fit;
};

struct DivergenceReport {
  double score = 0.0;
  double best_alpha = 0.0;
  bool best_fit_converged = false;
  int fits_not_converged = 0;
  bool degenerate_single_community = false;
  NodeId num_communities = 0;
  EdgeProportionVectors observed;
  EdgeProportionVectors best_model;
  std::vector<AlphaEval> curve;  // every evaluated alpha, ascending
};

// Shares one partition and one set of observed proportions across many
// embeddings of the same graph.
class DivergenceScorer {
 public:
  DivergenceScorer(const Graph& g, Partition partition,
                   DivergenceOptions opts = {})
      : graph_(&g), partition_(std::move(partition)), opts_(opts) {
    if (partition_.num_nodes() != g.num_nodes())
      throw ValidationError("divergence: partition size mismatch");
    if (opts_.alpha_step <= 0 || opts_.alpha_max < opts_.alpha_min ||
        opts_.alpha_hard_max < opts_.alpha_max)
      throw ValidationError("divergence: bad alpha grid");
    if (opts_.w_external < 0 || opts_.w_internal < 0 ||
        opts_.w_external + opts_.w_internal <= 0)
      throw ValidationError("divergence: bad part weights");
    observed_ = graph_vectors(g, partition_);
    degrees_.reserve(static_cast<std::size_t>(g.num_nodes()));
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      degrees_.push_back(static_cast<double>(g.degree(v)));
  }

  const Partition& partition() const { return partition_; }
  const EdgeProportionVectors& observed() const { return observed_; }

  DivergenceReport score(const Embedding& emb) const {
    if (emb.num_nodes() != graph_->num_nodes())
      throw ValidationError("divergence: embedding size mismatch");
    DivergenceReport report;
    report.num_communities = partition_.num_communities();
    report.observed = observed_;
    report.degenerate_single_community = partition_.num_communities() == 1;

    PairGeometry geo(emb);
    std::vector<float> kernel;
    std::vector<double> warm;
    AlphaEval best;
    best.divergence = std::numeric_limits<double>::infinity();

    auto evaluate = [&](double alpha) -> double {
      geo.materialize(alpha, kernel);
      GclModel model =
          fit_gcl_kernel(geo, kernel, degrees_, alpha, opts_.fit,
                         warm.empty() ? nullptr : &warm);
      warm = model.x;
      const EdgeProportionVectors mv =
          model_vectors_kernel(geo, kernel, model.x, partition_);
      AlphaEval ev;
      ev.alpha = alpha;
      ev.divergence =
          weighted_divergence(observed_, mv, opts_.w_external,
                              opts_.w_internal);
      ev.fit_converged = model.converged;
      ev.fit_residual = model.residual;
      ev.fit_iterations = model.iterations;
      ev.clipped_pairs = model.clipped_pairs;
      if (!model.converged) ++report.fits_not_converged;
      report.curve.push_back(ev);
      if (ev.divergence < best.divergence ||
          (ev.divergence == best.divergence && ev.alpha < best.alpha)) {
        best = ev;
        report.best_model = mv;
      }
      return ev.divergence;
    };

    // coarse grid, ascending so the warm start walks along the curve
    std::vector<double> grid;
    for (int i = 0;; ++i) {
      const double a = opts_.alpha_min + i * opts_.alpha_step;
      if (a > opts_.alpha_max + 1e-12) break;
      grid.push_back(std::min(a, opts_.alpha_max));
    }
    for (double a : grid) evaluate(a);

    // The minimum hugging the right edge of the grid means the argmin was
    // truncated; extend rightward with a doubling step until the curve
    // turns up or the hard ceiling is reached.  grid stays ascending and
    // index-aligned with report.curve.
    {
      std::size_t k = 0;
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (report.curve[i].divergence < report.curve[k].divergence) k = i;
      double step = opts_.alpha_step;
      while (k + 1 == grid.size() &&
             grid.back() < opts_.alpha_hard_max - 1e-12) {
        step *= 2.0;
        const double a = std::min(grid.back() + step, opts_.alpha_hard_max);
        grid.push_back(a);
        evaluate(a);
        if (report.curve.back().divergence < report.curve[k].divergence)
          k = grid.size() - 1;
      }
    }

    // bracket around the best grid point and refine by golden section
    {
      std::size_t k = 0;
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (report.curve[i].divergence < report.curve[k].divergence) k = i;
      double lo = grid[k == 0 ? 0 : k - 1];
      double hi = grid[k + 1 < grid.size() ? k + 1 : k];
      if (hi - lo > opts_.refine_width) {
        constexpr double invphi = 0.6180339887498949;
        double c = hi - invphi * (hi - lo);
        double d = lo + invphi * (hi - lo);
        double fc = evaluate(c);
        double fd = evaluate(d);
        while (hi - lo > opts_.refine_width) {
          if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = evaluate(c);
          } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = evaluate(d);
          }
        }
      }
    }

    report.score = best.divergence;
    report.best_alpha = best.alpha;
    report.best_fit_converged = best.fit_converged;
    std::sort(report.curve.begin(), report.curve.end(),
              [](const AlphaEval& a, const AlphaEval& b) {
                return a.alpha < b.alpha;
              });
    return report;
  }

 private:
  const Graph* graph_;
  Partition partition_;
  DivergenceOptions opts_;
  EdgeProportionVectors observed_;
  std::vector<double> degrees_;
};

// Divergence at a single alpha; the curve-free building block.
inline AlphaEval divergence_at_alpha(const Graph& g, const Partition& p,
                                     const Embedding& emb, double alpha,
                                     double w_external = 0.5,
                                     double w_internal = 0.5,
                                     const GclFitOptions& fit_opts = {}) {
  const EdgeProportionVectors observed = graph_vectors(g, p);
  std::vector<double> degrees;
  degrees.reserve(static_cast<std::size_t>(g.num_nodes()));
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    degrees.push_back(static_cast<double>(g.degree(v)));
  PairGeometry geo(emb);
  std::vector<float> kernel;
  geo.materialize(alpha, kernel);
  GclModel model = fit_gcl_kernel(geo, kernel, degrees, alpha, fit_opts);
  const EdgeProportionVectors mv =
      model_vectors_kernel(geo, kernel, model.x, p);
  AlphaEval ev;
  ev.alpha = alpha;
  ev.divergence = weighted_divergence(observed, mv, w_external, w_internal);
  ev.fit_converged = model.converged;
  ev.fit_residual = model.residual;
  ev.fit_iterations = model.iterations;
  ev.clipped_pairs = model.clipped_pairs;
  return ev;
}

inline DivergenceReport divergence_score(const Graph& g, const Embedding& emb,
                                         const Partition& p,
                                         const DivergenceOptions& opts = {}) {
  DivergenceScorer scorer(g, p, opts);
  return scorer.score(emb);
}

}  // namespace gembed
