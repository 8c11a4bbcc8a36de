#pragma once

// Spectral proximity embedding: truncated symmetric factorization of the
// common-neighbors matrix S = A^2, so E = U_d Lambda_d^{1/2} minimizes
// ||S - E E^T||_F over rank-d factorizations.  S is PSD and is never
// formed; every product S*X is computed as A*(A*X).
//
// The eigenpairs come from randomized subspace iteration (Gaussian test
// block of d+10 columns, 7 power steps with re-orthonormalization, then
// Rayleigh-Ritz).  The Gaussian block is drawn from a fixed internal
// stream, so the result is a deterministic function of (graph, dim).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gembed/embedding.hpp"
#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

namespace gembed {

namespace detail {

// Column-major dense matrix, minimal surface for what the solver needs.
struct ColMat {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> a;

  ColMat() = default;
  ColMat(std::int64_t r, std::int64_t c)
      : rows(r), cols(c),
        a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}
  double* col(std::int64_t j) {
    return a.data() + static_cast<std::size_t>(j) * rows;
  }
  const double* col(std::int64_t j) const {
    return a.data() + static_cast<std::size_t>(j) * rows;
  }
};

// Y = A * X for the graph adjacency, column by column.
inline void adj_multiply(const Graph& g, const ColMat& x, ColMat& y) {
  const NodeId n = g.num_nodes();
  y.rows = n;
  y.cols = x.cols;
  y.a.assign(static_cast<std::size_t>(n) * x.cols, 0.0);
  for (std::int64_t j = 0; j < x.cols; ++j) {
    const double* xc = x.col(j);
    double* yc = y.col(j);
    for (NodeId v = 0; v < n; ++v) {
      double s = 0.0;
      for (NodeId u : g.neighbors(v)) s += xc[u];
      yc[v] = s;
    }
  }
}

// Modified Gram-Schmidt with one re-orthogonalization pass.  Columns that
// vanish are replaced by fresh pseudo-random directions (or zeroed as a
// last resort, which Rayleigh-Ritz then reports as zero eigenvalues).
inline void orthonormalize(ColMat& q, std::uint64_t refill_seed) {
  Rng refill(refill_seed);
  for (std::int64_t j = 0; j < q.cols; ++j) {
    double* cj = q.col(j);
    for (int attempt = 0; attempt < 3; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        for (std::int64_t i = 0; i < j; ++i) {
          const double* ci = q.col(i);
          double dot = 0.0;
          for (std::int64_t r = 0; r < q.rows; ++r) dot += ci[r] * cj[r];
          for (std::int64_t r = 0; r < q.rows; ++r) cj[r] -= dot * ci[r];
        }
      }
      double norm = 0.0;
      for (std::int64_t r = 0; r < q.rows; ++r) norm += cj[r] * cj[r];
      norm = std::sqrt(norm);
      if (norm > 1e-12) {
        for (std::int64_t r = 0; r < q.rows; ++r) cj[r] /= norm;
        break;
      }
      if (attempt == 2) {
        for (std::int64_t r = 0; r < q.rows; ++r) cj[r] = 0.0;
        break;
      }
      for (std::int64_t r = 0; r < q.rows; ++r) cj[r] = refill.normal();
    }
  }
}

// Cyclic Jacobi on a symmetric matrix (in place); returns eigenvalues in
// `diag` and accumulates rotations into `vecs` (initialized to identity).
inline void jacobi_eigen(std::vector<double>& m, std::int64_t n,
                         std::vector<double>& diag,
                         std::vector<double>& vecs) {
  auto at = [&](std::int64_t r, std::int64_t c) -> double& {
    return m[static_cast<std::size_t>(c) * n + r];
  };
  vecs.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    vecs[static_cast<std::size_t>(i) * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::int64_t p = 0; p < n; ++p)
      for (std::int64_t q2 = p + 1; q2 < n; ++q2) off += at(p, q2) * at(p, q2);
    if (off < 1e-24 * n * n) break;
    for (std::int64_t p = 0; p < n; ++p) {
      for (std::int64_t q2 = p + 1; q2 < n; ++q2) {
        const double apq = at(p, q2);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q2, q2);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::int64_t r = 0; r < n; ++r) {
          const double arp = at(r, p);
          const double arq = at(r, q2);
          at(r, p) = c * arp - s * arq;
          at(r, q2) = s * arp + c * arq;
        }
        for (std::int64_t r = 0; r < n; ++r) {
          const double apr = at(p, r);
          const double aqr = at(q2, r);
          at(p, r) = c * apr - s * aqr;
          at(q2, r) = s * apr + c * aqr;
        }
        for (std::int64_t r = 0; r < n; ++r) {
          const double vp = vecs[static_cast<std::size_t>(p) * n + r];
          const double vq = vecs[static_cast<std::size_t>(q2) * n + r];
          vecs[static_cast<std::size_t>(p) * n + r] = c * vp - s * vq;
          vecs[static_cast<std::size_t>(q2) * n + r] = s * vp + c * vq;
        }
      }
    }
  }
  diag.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) diag[i] = at(i, i);
}

}  // namespace detail

struct HopeResult {
  Embedding embedding;
  std::vector<double> eigenvalues;  // top dim, descending
  double frobenius_loss = 0.0;      // ||S - E E^T||_F
  double s_frobenius_norm = 0.0;    // ||S||_F, for relative error
};

// Deterministic by default: the sketch seed is derived from (n, dim).
// Passing an explicit seed varies the randomized projection instead,
// which is how replicated runs get distinct (but reproducible) outputs.
inline HopeResult hope_embed(const Graph& g, int dim,
                             std::uint64_t sketch_seed = 0) {
  const NodeId n = g.num_nodes();
  if (dim < 1) throw ValidationError("hope: dim must be positive");
  if (dim > n)
    throw ValidationError("hope: dim exceeds node count " +
                          std::to_string(n));

  const std::int64_t block = std::min<std::int64_t>(n, dim + 10);
  const std::uint64_t seed =
      sketch_seed != 0
          ? sketch_seed
          : derive_seed(0x484f5045ULL, {static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(dim)});
  Rng rng(seed);

  detail::ColMat q(n, block);
  for (auto& v : q.a) v = rng.normal();
  detail::orthonormalize(q, derive_seed(seed, {1}));

  detail::ColMat tmp, z;
  for (int it = 0; it < 7; ++it) {
    detail::adj_multiply(g, q, tmp);
    detail::adj_multiply(g, tmp, z);  // z = A(Aq) = Sq
    q = z;
    detail::orthonormalize(q, derive_seed(seed, {2 + static_cast<std::uint64_t>(it)}));
  }

  // Rayleigh-Ritz: T = Q^T S Q
  detail::adj_multiply(g, q, tmp);
  detail::adj_multiply(g, tmp, z);
  std::vector<double> t_mat(static_cast<std::size_t>(block) * block, 0.0);
  for (std::int64_t j = 0; j < block; ++j) {
    const double* zj = z.col(j);
    for (std::int64_t i = 0; i < block; ++i) {
      const double* qi = q.col(i);
      double dot = 0.0;
      for (NodeId r = 0; r < n; ++r) dot += qi[r] * zj[r];
      t_mat[static_cast<std::size_t>(j) * block + i] = dot;
    }
  }
  // symmetrize against round-off
  for (std::int64_t i = 0; i < block; ++i)
    for (std::int64_t j = i + 1; j < block; ++j) {
      const double avg = 0.5 * (t_mat[static_cast<std::size_t>(j) * block + i] +
                                t_mat[static_cast<std::size_t>(i) * block + j]);
      t_mat[static_cast<std::size_t>(j) * block + i] = avg;
      t_mat[static_cast<std::size_t>(i) * block + j] = avg;
    }
  std::vector<double> eigvals, eigvecs;
  detail::jacobi_eigen(t_mat, block, eigvals, eigvecs);

  std::vector<std::int64_t> order(static_cast<std::size_t>(block));
  for (std::int64_t i = 0; i < block; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return eigvals[a] != eigvals[b] ? eigvals[a] > eigvals[b] : a < b;
  });

  HopeResult out;
  out.eigenvalues.resize(static_cast<std::size_t>(dim));
  detail::ColMat u(n, dim);
  for (int k = 0; k < dim; ++k) {
    const std::int64_t src = order[k];
    out.eigenvalues[k] = std::max(0.0, eigvals[src]);
    double* uk = u.col(k);
    const double* w = eigvecs.data() + static_cast<std::size_t>(src) * block;
    for (NodeId r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::int64_t j = 0; j < block; ++j) s += q.col(j)[r] * w[j];
      uk[r] = s;
    }
    // deterministic sign: largest-magnitude entry positive
    NodeId arg = 0;
    for (NodeId r = 1; r < n; ++r)
      if (std::abs(uk[r]) > std::abs(uk[arg])) arg = r;
    if (uk[arg] < 0)
      for (NodeId r = 0; r < n; ++r) uk[r] = -uk[r];
  }

  // ||S||_F^2 by sparse row accumulation of S = A^2
  double s_frob_sq = 0.0;
  {
    std::vector<double> row(static_cast<std::size_t>(n), 0.0);
    std::vector<NodeId> touched;
    for (NodeId i = 0; i < n; ++i) {
      touched.clear();
      for (NodeId k : g.neighbors(i)) {
        for (NodeId j : g.neighbors(k)) {
          if (row[j] == 0.0) touched.push_back(j);
          row[j] += 1.0;
        }
      }
      for (NodeId j : touched) {
        s_frob_sq += row[j] * row[j];
        row[j] = 0.0;
      }
    }
  }
  out.s_frobenius_norm = std::sqrt(s_frob_sq);

  // ||S - U L U^T||^2 = ||S||^2 - 2 tr(L * U^T S U) + tr(L^2); with
  // orthonormal U and M = U^T (S U) this is exact.
  detail::adj_multiply(g, u, tmp);
  detail::adj_multiply(g, tmp, z);  // z = S U
  double cross = 0.0, lam_sq = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double* uk = u.col(k);
    const double* zk = z.col(k);
    double m_kk = 0.0;
    for (NodeId r = 0; r < n; ++r) m_kk += uk[r] * zk[r];
    cross += out.eigenvalues[k] * m_kk;
    lam_sq += out.eigenvalues[k] * out.eigenvalues[k];
  }
  out.frobenius_loss =
      std::sqrt(std::max(0.0, s_frob_sq - 2.0 * cross + lam_sq));

  out.embedding = Embedding(n, dim);
  for (int k = 0; k < dim; ++k) {
    const double scale = std::sqrt(out.eigenvalues[k]);
    const double* uk = u.col(k);
    for (NodeId r = 0; r < n; ++r) out.embedding.at(r, k) = scale * uk[r];
  }
  return out;
}

}  // namespace gembed
