#pragma once

// ABCD benchmark graphs: power-law degrees and community sizes, a mixing
// parameter xi controlling the fraction of edges that leave communities,
// per-community graphs plus one background graph, and degree-preserving
// rewiring to a simple graph.
//
// Layered construction: every community induces its own (multi)graph on
// the internal degree split y, the background graph covers everyone on the
// external split z, and the union is made simple by local edge swaps that
// never move an edge out of its layer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gembed/graph.hpp"
#include "gembed/rng.hpp"

namespace gembed {

struct AbcdParams {
  std::int64_t n = 10000;
  double gamma = 2.5;            // degree exponent
  std::int64_t delta_min = 5;    // minimum degree
  std::int64_t delta_max = 0;    // 0 = natural cut-off round(n^(1/(gamma-1)))
  double beta = 1.5;             // community size exponent
  std::int64_t s_min = 50;
  std::int64_t s_max = 1000;
  double xi = 0.2;               // mixing parameter
  enum class Variant { global, local };
  Variant variant = Variant::global;
  enum class CommunityModel { configuration, chung_lu };
  CommunityModel community_model = CommunityModel::configuration;
  // When non-empty these fractions fix the community sizes outright
  // (largest-remainder rounding to sum n) and beta/s_min/s_max are ignored.
  std::vector<double> fixed_community_fractions;
  std::uint64_t seed = 1;

  std::int64_t effective_max_degree() const {
    if (delta_max > 0) return delta_max;
    const double cutoff = std::pow(static_cast<double>(n), 1.0 / (gamma - 1.0));
    return std::min<std::int64_t>(
        n - 1, std::max<std::int64_t>(delta_min,
                                      std::llround(cutoff)));
  }

  void validate() const {
    if (n < 2) throw ValidationError("abcd: n must be at least 2");
    if (gamma <= 1.0) throw ValidationError("abcd: gamma must exceed 1");
    if (beta <= 1.0) throw ValidationError("abcd: beta must exceed 1");
    const std::int64_t dmax = effective_max_degree();
    if (delta_min < 1 || delta_min > dmax || dmax > n - 1)
      throw ValidationError("abcd: need 1 <= delta_min <= delta_max <= n-1");
    if (xi < 0.0 || xi > 1.0)
      throw ValidationError("abcd: xi must lie in [0,1]");
    if (fixed_community_fractions.empty()) {
      if (s_min < 2 || s_min > s_max || s_max > n)
        throw ValidationError("abcd: need 2 <= s_min <= s_max <= n");
    } else {
      double sum = 0.0;
      for (double f : fixed_community_fractions) {
        if (f <= 0.0)
          throw ValidationError("abcd: community fractions must be positive");
        sum += f;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("abcd: community fractions must sum to 1");
    }
  }
};

struct AbcdGraph {
  Graph graph;
  Partition ground_truth;
  // Degree each node was dealt before edges were placed.  Under the
  // configuration model the realized degrees match this exactly.
  std::vector<std::int64_t> target_degrees;
  double realized_xi = 0.0;
  std::vector<std::string> warnings;
};

// i.i.d. draws from P(k) proportional to k^(-exponent) on [lo, hi],
// inverse-CDF over the exact normalized mass, sorted descending.
inline std::vector<std::int64_t> sample_power_law(std::int64_t count,
                                                  double exponent,
                                                  std::int64_t lo,
                                                  std::int64_t hi, Rng& rng) {
  if (lo > hi) throw ValidationError("power law: lo > hi");
  if (lo < 1) throw ValidationError("power law: support must be positive");
  if (count < 1) throw ValidationError("power law: count must be positive");
  const std::size_t support = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> cdf(support);
  double total = 0.0;
  for (std::size_t i = 0; i < support; ++i) {
    total += std::pow(static_cast<double>(lo + static_cast<std::int64_t>(i)),
                      -exponent);
    cdf[i] = total;
  }
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;
  std::vector<std::int64_t> out(static_cast<std::size_t>(count));
  for (auto& v : out) {
    const double u = rng.uniform();
    const std::size_t idx =
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    v = lo + static_cast<std::int64_t>(std::min(idx, support - 1));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// Degree sequence with even sum: when the raw sum is odd one
// minimum-degree entry is incremented.  The first copy of the minimum is
// the one bumped, so the sequence stays sorted descending, which the
// assignment step relies on.
inline std::vector<std::int64_t> build_degree_sequence(const AbcdParams& params,
                                                       Rng& rng) {
  auto degrees = sample_power_law(params.n, params.gamma, params.delta_min,
                                  params.effective_max_degree(), rng);
  std::int64_t sum = 0;
  for (std::int64_t d : degrees) sum += d;
  if (sum % 2 != 0)
    ++*std::lower_bound(degrees.begin(), degrees.end(), degrees.back(),
                        std::greater<>());
  return degrees;
}

// Community sizes from P(s) ~ s^(-beta) on [s_min, s_max]: draw until the
// total reaches n, then shave the last draw or, when that would drop it
// below s_min, delete it and grow the largest communities round-robin.
inline std::vector<std::int64_t> sample_community_sizes(
    const AbcdParams& params, Rng& rng) {
  if (params.s_min > params.n)
    throw ValidationError("abcd: s_min exceeds n");
  std::vector<std::int64_t> sizes;
  std::int64_t sum = 0;
  while (sum < params.n) {
    const std::int64_t s =
        sample_power_law(1, params.beta, params.s_min, params.s_max, rng)[0];
    sizes.push_back(s);
    sum += s;
  }
  std::int64_t excess = sum - params.n;
  if (excess > 0) {
    if (sizes.back() - excess >= params.s_min) {
      sizes.back() -= excess;
    } else {
      std::int64_t deficit = sizes.back() - excess;  // what remains owed
      sizes.pop_back();
      // grow the largest communities one unit at a time
      while (deficit > 0) {
        std::vector<std::size_t> order(sizes.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                           return sizes[a] > sizes[b];
                         });
        bool progressed = false;
        for (std::size_t i : order) {
          if (deficit == 0) break;
          if (sizes[i] < params.s_max) {
            ++sizes[i];
            --deficit;
            progressed = true;
          }
        }
        if (!progressed) {
          if (deficit >= params.s_min && deficit <= params.s_max) {
            sizes.push_back(deficit);
            deficit = 0;
          } else {
            throw ValidationError(
                "abcd: cannot adjust community sizes to sum n within bounds");
          }
        }
      }
    }
  }
  return sizes;
}

namespace detail {

inline std::vector<std::int64_t> sizes_from_fractions(
    const std::vector<double>& fractions, std::int64_t n) {
  std::vector<std::int64_t> sizes(fractions.size());
  std::vector<std::pair<double, std::size_t>> remainders(fractions.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += sizes[i];
    remainders[i] = {exact - std::floor(exact), i};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) {
                     return a.first > b.first;
                   });
  for (std::int64_t k = 0; k < n - assigned; ++k)
    ++sizes[remainders[static_cast<std::size_t>(k) % remainders.size()]
                .second];
  for (std::int64_t s : sizes)
    if (s < 1)
      throw ValidationError("abcd: a community fraction rounds to zero nodes");
  return sizes;
}

}  // namespace detail

// Assigns nodes (sorted by descending degree) to communities.  A node of
// degree d is admissible in a community of size s when
// ceil((1-xi)*d) <= s-1, i.e. its internal edges can fit; among admissible
// communities with free capacity the choice is uniform.  When none
// qualifies the node falls back to the largest community with capacity and
// a saturation warning is counted.
inline Partition assign_nodes(const std::vector<std::int64_t>& degrees,
                              const std::vector<std::int64_t>& sizes,
                              double xi, Rng& rng,
                              std::int64_t* saturation_warnings = nullptr) {
  std::int64_t total = 0;
  for (std::int64_t s : sizes) total += s;
  if (total != static_cast<std::int64_t>(degrees.size()))
    throw ValidationError("assign_nodes: sizes must sum to node count");
  const NodeId n = static_cast<NodeId>(degrees.size());
  const NodeId ell = static_cast<NodeId>(sizes.size());
  std::vector<std::int64_t> remaining(sizes.begin(), sizes.end());
  std::vector<NodeId> labels(static_cast<std::size_t>(n));
  std::vector<NodeId> admissible;
  std::int64_t warnings = 0;
  for (NodeId v = 0; v < n; ++v) {
    const std::int64_t d = degrees[v];
    const std::int64_t internal_need =
        static_cast<std::int64_t>(std::ceil((1.0 - xi) * static_cast<double>(d)));
    admissible.clear();
    for (NodeId c = 0; c < ell; ++c)
      if (remaining[c] > 0 && internal_need <= sizes[c] - 1)
        admissible.push_back(c);
    NodeId chosen;
    if (!admissible.empty()) {
      chosen = admissible[rng.below(admissible.size())];
    } else {
      chosen = -1;
      for (NodeId c = 0; c < ell; ++c) {
        if (remaining[c] <= 0) continue;
        if (chosen == -1 || sizes[c] > sizes[chosen]) chosen = c;
      }
      ++warnings;
    }
    labels[v] = chosen;
    --remaining[chosen];
  }
  if (saturation_warnings) *saturation_warnings = warnings;
  return Partition::from_labels(std::move(labels));
}

struct DegreeSplit {
  std::vector<std::int64_t> internal;    // y
  std::vector<std::int64_t> background;  // z
  std::int64_t clamp_warnings = 0;       // local variant xi_j clamped to 1
};

// y_i = randomized rounding of (1-xi_eff) d_i, z_i = d_i - y_i.  Global
// variant: xi_eff = xi.  Local variant: xi_j = min(1, xi/(1-rho_j)) with
// rho_j the community's share of total degree, which equalizes the expected
// internal fraction across communities.  Per-community sums of y are made
// even by +-1 on one random member.
inline DegreeSplit split_degrees(const std::vector<std::int64_t>& degrees,
                                 const Partition& partition, double xi,
                                 AbcdParams::Variant variant, Rng& rng) {
  const NodeId n = static_cast<NodeId>(degrees.size());
  if (partition.num_nodes() != n)
    throw ValidationError("split_degrees: partition size mismatch");
  {
    std::int64_t dsum = 0;
    for (std::int64_t d : degrees) dsum += d;
    if (dsum % 2 != 0)
      throw ValidationError("split_degrees: degree sum must be even");
  }
  const NodeId ell = partition.num_communities();

  std::vector<double> xi_eff(static_cast<std::size_t>(ell), xi);
  DegreeSplit out;
  if (variant == AbcdParams::Variant::local) {
    std::vector<double> comm_degree(static_cast<std::size_t>(ell), 0.0);
    double total_degree = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      comm_degree[partition.label(v)] += static_cast<double>(degrees[v]);
      total_degree += static_cast<double>(degrees[v]);
    }
    for (NodeId c = 0; c < ell; ++c) {
      const double rho = total_degree > 0 ? comm_degree[c] / total_degree : 0.0;
      if (rho >= 1.0 - xi) {
        xi_eff[c] = 1.0;
        if (xi > 0.0) ++out.clamp_warnings;
      } else {
        xi_eff[c] = xi / (1.0 - rho);
      }
    }
  }

  out.internal.resize(static_cast<std::size_t>(n));
  out.background.resize(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    const NodeId c = partition.label(v);
    const double target =
        (1.0 - xi_eff[c]) * static_cast<double>(degrees[v]);
    std::int64_t y = static_cast<std::int64_t>(std::floor(target));
    const double frac = target - std::floor(target);
    if (frac > 0 && rng.uniform() < frac) ++y;
    // rounding can land one past the community's simple-graph capacity of
    // s-1 partners even when the assignment was admissible; cap it there
    // (not at xi_eff = 0, where y = d is the contract)
    std::int64_t cap = degrees[v];
    if (xi_eff[c] > 0.0)
      cap = std::min<std::int64_t>(cap, partition.community_size(c) - 1);
    y = std::clamp<std::int64_t>(y, 0, cap);
    out.internal[v] = y;
    out.background[v] = degrees[v] - y;
  }

  // single-member communities cannot host internal edges at all
  for (NodeId v = 0; v < n; ++v) {
    if (partition.community_size(partition.label(v)) == 1 &&
        out.internal[v] > 0) {
      out.background[v] += out.internal[v];
      out.internal[v] = 0;
    }
  }
  // per-community parity of the internal sum: +-1 on one random member
  // with nonzero degree (prefer raising y; otherwise lower it).  Even
  // per-community sums plus an even degree total keep the background sum
  // even automatically.  A community at xi_eff = 0 is left alone even when
  // its sum is odd: the split there is y = d, z = 0 by contract, and the
  // spare half-edge is dropped when the community graph is built.
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(ell));
  for (NodeId v = 0; v < n; ++v) members[partition.label(v)].push_back(v);
  std::vector<NodeId> adjustable;
  for (NodeId c = 0; c < ell; ++c) {
    if (xi_eff[c] == 0.0) continue;
    std::int64_t ysum = 0;
    for (NodeId v : members[c]) ysum += out.internal[v];
    if (ysum % 2 == 0) continue;
    adjustable.clear();
    for (NodeId v : members[c])
      if (degrees[v] > 0) adjustable.push_back(v);
    // ysum odd implies someone has positive degree
    const NodeId v = adjustable[rng.below(adjustable.size())];
    const std::int64_t cap = std::min<std::int64_t>(
        degrees[v], partition.community_size(c) - 1);
    if (out.internal[v] < cap) {
      ++out.internal[v];
      --out.background[v];
    } else {
      --out.internal[v];
      ++out.background[v];
    }
  }
  return out;
}

// Undirected multigraph: endpoints may repeat and u == v is allowed.
struct Multigraph {
  NodeId num_nodes = 0;
  std::vector<Edge> edges;
};

namespace detail {

struct PairKey {
  static std::uint64_t make(NodeId u, NodeId v, NodeId n) {
    const NodeId a = std::min(u, v), b = std::max(u, v);
    return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) + b;
  }
};

// Edge swaps inside one layer until the layer is simple and avoids the
// forbidden pairs.  An edge copy "offends" when it is a self-loop, a
// duplicate beyond the first copy of its pair, or lies on a forbidden
// pair.  A proposed swap of two edges is accepted only when it strictly
// lowers the offense count; both replacement edges stay inside the layer,
// which keeps community edges inside their community.  When swaps
// plateau, the offending copies are dissolved into half-edges together
// with an equal number of good edges and re-matched, which reaches
// configurations no single swap can.  Offenders that survive 100
// plateaued passes are removed and returned; the caller decides whether
// their stubs move to the background layer or are dropped.  A nonempty
// return means no simple layer exists for these degrees (or the search
// gave up), and degrees are short by exactly the returned copies.
inline std::vector<Edge> rewire_layer(
    std::vector<Edge>& edges, NodeId n, Rng& rng,
    const std::unordered_map<std::uint64_t, char>* forbidden,
    const char* layer_name) {
  (void)layer_name;
  if (edges.empty()) return {};
  std::unordered_map<std::uint64_t, std::int64_t> count;
  count.reserve(edges.size() * 2);
  auto is_forbidden = [&](NodeId u, NodeId v) {
    return forbidden != nullptr &&
           forbidden->count(PairKey::make(u, v, n)) > 0;
  };
  auto pair_offenses = [&](NodeId u, NodeId v, std::int64_t c) -> std::int64_t {
    if (c <= 0) return 0;
    if (u == v) return c;
    if (is_forbidden(u, v)) return c;
    return c - 1;
  };
  std::int64_t offenses = 0;
  for (const Edge& e : edges) ++count[PairKey::make(e.u, e.v, n)];
  for (const auto& [key, c] : count) {
    const NodeId u = static_cast<NodeId>(key / n);
    const NodeId v = static_cast<NodeId>(key % n);
    offenses += pair_offenses(u, v, c);
  }

  int stagnant_passes = 0;
  std::int64_t best_offenses = offenses;
  while (offenses > 0) {
    // collect current offenders: self-loops and forbidden pairs entirely,
    // duplicates beyond the first copy
    std::vector<std::size_t> offenders;
    {
      std::unordered_map<std::uint64_t, std::int64_t> seen;
      seen.reserve(edges.size() * 2);
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        const std::uint64_t key = PairKey::make(e.u, e.v, n);
        const std::int64_t prior = seen[key]++;
        if (e.u == e.v || is_forbidden(e.u, e.v) || prior > 0)
          offenders.push_back(i);
      }
    }
    for (std::size_t i : offenders) {
      if (edges.size() < 2) break;
      std::size_t j = static_cast<std::size_t>(rng.below(edges.size()));
      if (j == i) continue;
      Edge e1 = edges[i];
      Edge e2 = edges[j];
      if (rng.below(2) == 0) std::swap(e2.u, e2.v);
      const Edge n1{e1.u, e2.v};
      const Edge n2{e2.u, e1.v};
      const std::uint64_t k1 = PairKey::make(e1.u, e1.v, n);
      const std::uint64_t k2 = PairKey::make(e2.u, e2.v, n);
      const std::uint64_t k3 = PairKey::make(n1.u, n1.v, n);
      const std::uint64_t k4 = PairKey::make(n2.u, n2.v, n);
      auto off_of = [&](std::uint64_t key) {
        auto it = count.find(key);
        const std::int64_t c = it == count.end() ? 0 : it->second;
        const NodeId u = static_cast<NodeId>(key / n);
        const NodeId v = static_cast<NodeId>(key % n);
        return pair_offenses(u, v, c);
      };
      const std::int64_t before = off_of(k1) + (k2 != k1 ? off_of(k2) : 0) +
                                  (k3 != k1 && k3 != k2 ? off_of(k3) : 0) +
                                  (k4 != k1 && k4 != k2 && k4 != k3
                                       ? off_of(k4)
                                       : 0);
      --count[k1];
      --count[k2];
      ++count[k3];
      ++count[k4];
      const std::int64_t after = off_of(k1) + (k2 != k1 ? off_of(k2) : 0) +
                                 (k3 != k1 && k3 != k2 ? off_of(k3) : 0) +
                                 (k4 != k1 && k4 != k2 && k4 != k3
                                      ? off_of(k4)
                                      : 0);
      if (after < before) {
        edges[i] = n1;
        edges[j] = n2;
        offenses += after - before;
      } else {
        ++count[k1];
        ++count[k2];
        --count[k3];
        --count[k4];
      }
    }
    if (offenses == 0) break;
    if (offenses >= best_offenses) {
      if (++stagnant_passes >= 100) break;
      if (stagnant_passes >= 3) {
        // plateau: recycle the offender stubs together with as many good
        // edges, re-match uniformly, and start over from the new state
        std::vector<std::size_t> pool;
        {
          std::unordered_map<std::uint64_t, std::int64_t> seen;
          std::vector<std::size_t> good;
          for (std::size_t i = 0; i < edges.size(); ++i) {
            const Edge& e = edges[i];
            const std::uint64_t key = PairKey::make(e.u, e.v, n);
            const std::int64_t prior = seen[key]++;
            if (e.u == e.v || is_forbidden(e.u, e.v) || prior > 0)
              pool.push_back(i);
            else
              good.push_back(i);
          }
          const std::size_t extra = std::min(pool.size(), good.size());
          for (std::size_t k = 0; k < extra; ++k) {
            const std::size_t pick = k + static_cast<std::size_t>(
                                             rng.below(good.size() - k));
            std::swap(good[k], good[pick]);
            pool.push_back(good[k]);
          }
        }
        std::vector<NodeId> half;
        half.reserve(pool.size() * 2);
        for (std::size_t i : pool) {
          half.push_back(edges[i].u);
          half.push_back(edges[i].v);
        }
        rng.shuffle(half);
        for (std::size_t k = 0; k < pool.size(); ++k) {
          const std::size_t i = pool[k];
          --count[PairKey::make(edges[i].u, edges[i].v, n)];
          edges[i] = {half[2 * k], half[2 * k + 1]};
          ++count[PairKey::make(edges[i].u, edges[i].v, n)];
        }
        offenses = 0;
        for (const auto& [key, c] : count)
          offenses += pair_offenses(static_cast<NodeId>(key / n),
                                    static_cast<NodeId>(key % n), c);
      }
    } else {
      best_offenses = offenses;
      stagnant_passes = 0;
    }
  }

  if (offenses <= 0) return {};
  // irreducible: strip the offending copies and hand them back
  std::vector<Edge> leftover;
  std::vector<Edge> kept;
  kept.reserve(edges.size());
  std::unordered_map<std::uint64_t, std::int64_t> seen;
  for (const Edge& e : edges) {
    const std::uint64_t key = PairKey::make(e.u, e.v, n);
    const std::int64_t prior = seen[key]++;
    if (e.u == e.v || is_forbidden(e.u, e.v) || prior > 0)
      leftover.push_back(e);
    else
      kept.push_back(e);
  }
  edges.swap(kept);
  return leftover;
}

// Uniform perfect matching of half-edges (configuration model).
inline std::vector<Edge> configuration_edges(
    const std::vector<NodeId>& nodes, const std::vector<std::int64_t>& stubs,
    Rng& rng) {
  std::vector<NodeId> half;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::int64_t k = 0; k < stubs[i]; ++k) half.push_back(nodes[i]);
  if (half.size() % 2 != 0)
    throw ValidationError("configuration model: odd number of half-edges");
  rng.shuffle(half);
  std::vector<Edge> edges;
  edges.reserve(half.size() / 2);
  for (std::size_t i = 0; i + 1 < half.size(); i += 2)
    edges.push_back({half[i], half[i + 1]});
  return edges;
}

// Independent pairs with probability min(1, w_u w_v / W).
inline std::vector<Edge> chung_lu_edges(const std::vector<NodeId>& nodes,
                                        const std::vector<std::int64_t>& weight,
                                        Rng& rng) {
  double total = 0.0;
  for (std::int64_t w : weight) total += static_cast<double>(w);
  std::vector<Edge> edges;
  if (total <= 0.0) return edges;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    if (weight[a] == 0) continue;
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (weight[b] == 0) continue;
      const double p = std::min(
          1.0, static_cast<double>(weight[a]) * static_cast<double>(weight[b]) /
                   total);
      if (rng.uniform() < p) edges.push_back({nodes[a], nodes[b]});
    }
  }
  return edges;
}

}  // namespace detail

// Public single-layer rewiring: multigraph in, simple graph out, degrees
// preserved exactly.
inline Graph rewire_to_simple(const Multigraph& mg, Rng& rng) {
  std::vector<Edge> edges = mg.edges;
  const auto leftover =
      detail::rewire_layer(edges, mg.num_nodes, rng, nullptr, "single");
  if (!leftover.empty())
    throw ConvergenceError("rewiring stalled: " +
                           std::to_string(leftover.size()) +
                           " offending edges remain");
  for (Edge& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  return Graph::from_edges(mg.num_nodes, edges);
}

inline AbcdGraph generate_abcd(const AbcdParams& params) {
  params.validate();
  Rng rng(params.seed);
  AbcdGraph out;

  const auto degrees = build_degree_sequence(params, rng);
  out.target_degrees = degrees;
  std::vector<std::int64_t> sizes =
      params.fixed_community_fractions.empty()
          ? sample_community_sizes(params, rng)
          : detail::sizes_from_fractions(params.fixed_community_fractions,
                                         params.n);

  std::int64_t saturation = 0;
  Partition partition = assign_nodes(degrees, sizes, params.xi, rng,
                                     &saturation);
  if (saturation > 0)
    out.warnings.push_back("assignment saturated for " +
                           std::to_string(saturation) + " nodes");

  DegreeSplit split =
      split_degrees(degrees, partition, params.xi, params.variant, rng);
  if (split.clamp_warnings > 0)
    out.warnings.push_back(std::to_string(split.clamp_warnings) +
                           " communities clamped to xi=1 (local variant)");

  const NodeId n = static_cast<NodeId>(params.n);
  const NodeId ell = partition.num_communities();
  std::vector<std::vector<NodeId>> members(static_cast<std::size_t>(ell));
  for (NodeId v = 0; v < n; ++v) members[partition.label(v)].push_back(v);

  std::vector<Edge> all_edges;
  std::unordered_map<std::uint64_t, char> community_pairs;
  std::int64_t dropped_stubs = 0;
  std::int64_t exported_stubs = 0;
  for (NodeId c = 0; c < ell; ++c) {
    const auto& nodes = members[c];
    std::vector<std::int64_t> stubs(nodes.size());
    std::int64_t stub_sum = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      stubs[i] = split.internal[nodes[i]];
      stub_sum += stubs[i];
    }
    if (params.community_model == AbcdParams::CommunityModel::configuration &&
        stub_sum % 2 != 0) {
      // only reachable at xi = 0, where the split leaves odd community
      // volumes alone; an odd stub count has no perfect matching, so one
      // stub is sacrificed rather than leaking it into the background
      std::vector<std::size_t> holders;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (stubs[i] > 0) holders.push_back(i);
      --stubs[holders[rng.below(holders.size())]];
      ++dropped_stubs;
    }
    std::vector<Edge> layer =
        params.community_model == AbcdParams::CommunityModel::configuration
            ? detail::configuration_edges(nodes, stubs, rng)
            : detail::chung_lu_edges(nodes, stubs, rng);
    const auto leftover =
        detail::rewire_layer(layer, n, rng, nullptr, "community");
    if (!leftover.empty()) {
      // this internal degree sequence admits no simple community graph
      // (or the search gave up); the stubs join the background layer,
      // except at xi = 0 where the background must stay empty
      if (params.xi == 0.0) {
        dropped_stubs += static_cast<std::int64_t>(2 * leftover.size());
      } else {
        for (const Edge& e : leftover) {
          ++split.background[e.u];
          ++split.background[e.v];
        }
        exported_stubs += static_cast<std::int64_t>(2 * leftover.size());
      }
    }
    for (const Edge& e : layer) {
      community_pairs[detail::PairKey::make(e.u, e.v, n)] = 1;
      all_edges.push_back(e);
    }
  }
  if (dropped_stubs > 0)
    out.warnings.push_back(std::to_string(dropped_stubs) +
                           " internal half-edges dropped at xi=0 "
                           "(odd or unrealizable community volume)");
  if (exported_stubs > 0)
    out.warnings.push_back(std::to_string(exported_stubs) +
                           " internal half-edges moved to the background "
                           "layer (unrealizable inside their community)");

  {
    std::vector<NodeId> nodes(static_cast<std::size_t>(n));
    for (NodeId v = 0; v < n; ++v) nodes[v] = v;
    std::vector<Edge> layer =
        params.community_model == AbcdParams::CommunityModel::configuration
            ? detail::configuration_edges(nodes, split.background, rng)
            : detail::chung_lu_edges(nodes, split.background, rng);
    const auto leftover =
        detail::rewire_layer(layer, n, rng, &community_pairs, "background");
    if (!leftover.empty())
      out.warnings.push_back(std::to_string(2 * leftover.size()) +
                             " background half-edges dropped (no simple "
                             "placement available)");
    for (const Edge& e : layer) all_edges.push_back(e);
  }

  for (Edge& e : all_edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  out.graph = Graph::from_edges(n, all_edges);
  out.ground_truth = std::move(partition);

  std::int64_t inter = 0;
  for (const Edge& e : all_edges)
    if (out.ground_truth.label(e.u) != out.ground_truth.label(e.v)) ++inter;
  out.realized_xi =
      all_edges.empty()
          ? 0.0
          : static_cast<double>(inter) / static_cast<double>(all_edges.size());
  return out;
}

}  // namespace gembed
