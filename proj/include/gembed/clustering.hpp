#pragma once

// Graph clustering: weighted modularity, Louvain, and ECG (ensemble
// clustering: co-clustering counts from k level-1 Louvain runs become edge
// weights for a final weighted Louvain pass).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gembed/graph.hpp"
#include "gembed/graph_stats.hpp"
#include "gembed/rng.hpp"

namespace gembed {

// A graph plus one weight per canonical edge (Graph::edges() order).
struct WeightedGraphView {
  const Graph* graph = nullptr;
  std::vector<double> edge_weights;  // empty means unit weights

  double weight(std::size_t edge_index) const {
    return edge_weights.empty() ? 1.0 : edge_weights[edge_index];
  }
};

inline WeightedGraphView unit_weights(const Graph& g) { return {&g, {}}; }

// Q = sum_c [ W_c / W - (vol_c / 2W)^2 ] with W the total edge weight.
inline double modularity(const WeightedGraphView& view, const Partition& p) {
  const Graph& g = *view.graph;
  if (g.num_edges() == 0)
    throw ValidationError("modularity: graph has no edges");
  if (p.num_nodes() != g.num_nodes())
    throw ValidationError("modularity: partition size mismatch");
  const NodeId ell = p.num_communities();
  std::vector<double> intra(static_cast<std::size_t>(ell), 0.0);
  std::vector<double> vol(static_cast<std::size_t>(ell), 0.0);
  double total = 0.0;
  std::size_t idx = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u >= v) continue;
      const double w = view.weight(idx++);
      total += w;
      vol[p.label(u)] += w;
      vol[p.label(v)] += w;
      if (p.label(u) == p.label(v)) intra[p.label(u)] += w;
    }
  }
  if (total <= 0.0) throw ValidationError("modularity: total weight not positive");
  double q = 0.0;
  for (NodeId c = 0; c < ell; ++c) {
    const double frac = vol[c] / (2.0 * total);
    q += intra[c] / total - frac * frac;
  }
  return q;
}

namespace detail {

// Mutable weighted multigraph used between Louvain levels.  Self-weight
// holds intra-supernode mass (each collapsed edge once).
struct LevelGraph {
  std::vector<std::int64_t> offsets;
  std::vector<NodeId> nbr;
  std::vector<double> w;
  std::vector<double> self_weight;
  std::vector<double> vol;  // 2*self_weight + sum of incident weights
  double total_weight = 0.0;

  NodeId size() const { return static_cast<NodeId>(self_weight.size()); }
};

inline LevelGraph level_from_view(const WeightedGraphView& view) {
  const Graph& g = *view.graph;
  const NodeId n = g.num_nodes();
  LevelGraph lg;
  lg.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (NodeId v = 0; v < n; ++v)
    lg.offsets[v + 1] = lg.offsets[v] + g.degree(v);
  lg.nbr.resize(static_cast<std::size_t>(lg.offsets[n]));
  lg.w.resize(lg.nbr.size());
  lg.self_weight.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<std::int64_t> cursor(lg.offsets.begin(), lg.offsets.end() - 1);
  std::size_t idx = 0;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u >= v) continue;
      const double wt = view.weight(idx++);
      lg.nbr[cursor[u]] = v;
      lg.w[cursor[u]++] = wt;
      lg.nbr[cursor[v]] = u;
      lg.w[cursor[v]++] = wt;
    }
  }
  lg.vol.assign(static_cast<std::size_t>(n), 0.0);
  for (NodeId v = 0; v < n; ++v) {
    double s = 0.0;
    for (std::int64_t i = lg.offsets[v]; i < lg.offsets[v + 1]; ++i)
      s += lg.w[i];
    lg.vol[v] = s;
    lg.total_weight += s;
  }
  lg.total_weight /= 2.0;
  return lg;
}

// One Louvain phase: repeated shuffled sweeps of single-node moves, each
// accepted only for a strict modularity gain, ties between target
// communities broken toward the lowest community id.  Returns community id
// per node (ids are node indices, not compacted).
inline std::vector<NodeId> local_move_phase(const LevelGraph& lg, Rng& rng,
                                            bool* any_move = nullptr) {
  const NodeId n = lg.size();
  std::vector<NodeId> comm(static_cast<std::size_t>(n));
  std::iota(comm.begin(), comm.end(), 0);
  std::vector<double> comm_vol(lg.vol);
  const double big_w = lg.total_weight;
  if (big_w <= 0.0) {
    if (any_move) *any_move = false;
    return comm;
  }

  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> nbr_comm_w(static_cast<std::size_t>(n), 0.0);
  std::vector<NodeId> touched;
  bool moved_any_ever = false;
  for (int pass = 0; pass < 1000; ++pass) {
    rng.shuffle(order);
    bool moved = false;
    for (NodeId v : order) {
      const NodeId a = comm[v];
      touched.clear();
      for (std::int64_t i = lg.offsets[v]; i < lg.offsets[v + 1]; ++i) {
        const NodeId u = lg.nbr[i];
        if (u == v) continue;
        const NodeId c = comm[u];
        if (nbr_comm_w[c] == 0.0) touched.push_back(c);
        nbr_comm_w[c] += lg.w[i];
      }
      const double kv = lg.vol[v];
      comm_vol[a] -= kv;
      const double scale = 1.0 / (2.0 * big_w * big_w);
      auto gain = [&](NodeId c) {
        return nbr_comm_w[c] / big_w - kv * comm_vol[c] * scale;
      };
      NodeId best_c = a;
      double best_gain = gain(a);
      for (NodeId c : touched) {
        if (c == a) continue;
        const double gc = gain(c);
        if (gc > best_gain ||
            (gc == best_gain && best_c != a && c < best_c)) {
          best_gain = gc;
          best_c = c;
        }
      }
      comm_vol[best_c] += kv;
      if (best_c != a) {
        comm[v] = best_c;
        moved = true;
      }
      for (NodeId c : touched) nbr_comm_w[c] = 0.0;
    }
    moved_any_ever |= moved;
    if (!moved) break;
  }
  if (any_move) *any_move = moved_any_ever;
  return comm;
}

// Collapses communities into supernodes.  New ids follow ascending old id.
inline LevelGraph aggregate(const LevelGraph& lg,
                            const std::vector<NodeId>& comm,
                            std::vector<NodeId>& relabel) {
  const NodeId n = lg.size();
  relabel.assign(static_cast<std::size_t>(n), -1);
  NodeId next = 0;
  for (NodeId v = 0; v < n; ++v) {
    // comm ids are node indices; visit in ascending node order
    NodeId c = comm[v];
    if (relabel[c] == -1) relabel[c] = next++;
  }
  std::vector<NodeId> node_new(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) node_new[v] = relabel[comm[v]];

  LevelGraph out;
  out.self_weight.assign(static_cast<std::size_t>(next), 0.0);
  std::vector<std::vector<std::pair<NodeId, double>>> adj(
      static_cast<std::size_t>(next));
  for (NodeId v = 0; v < n; ++v) {
    const NodeId cv = node_new[v];
    out.self_weight[cv] += lg.self_weight[v];
    for (std::int64_t i = lg.offsets[v]; i < lg.offsets[v + 1]; ++i) {
      const NodeId u = lg.nbr[i];
      if (u < v) continue;  // each undirected entry once
      const NodeId cu = node_new[u];
      const double wt = lg.w[i];
      if (cu == cv)
        out.self_weight[cv] += wt;
      else
        adj[std::min(cu, cv)].push_back({std::max(cu, cv), wt});
    }
  }
  out.offsets.assign(static_cast<std::size_t>(next) + 1, 0);
  std::vector<std::vector<std::pair<NodeId, double>>> merged(
      static_cast<std::size_t>(next));
  for (NodeId c = 0; c < next; ++c) {
    auto& row = adj[c];
    std::sort(row.begin(), row.end());
    std::vector<std::pair<NodeId, double>> m;
    for (const auto& [u, wt] : row) {
      if (!m.empty() && m.back().first == u)
        m.back().second += wt;
      else
        m.push_back({u, wt});
    }
    merged[c] = std::move(m);
  }
  std::vector<std::int64_t> deg(static_cast<std::size_t>(next), 0);
  for (NodeId c = 0; c < next; ++c)
    for (const auto& [u, wt] : merged[c]) {
      ++deg[c];
      ++deg[u];
    }
  for (NodeId c = 0; c < next; ++c) out.offsets[c + 1] = out.offsets[c] + deg[c];
  out.nbr.resize(static_cast<std::size_t>(out.offsets[next]));
  out.w.resize(out.nbr.size());
  std::vector<std::int64_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
  for (NodeId c = 0; c < next; ++c)
    for (const auto& [u, wt] : merged[c]) {
      out.nbr[cursor[c]] = u;
      out.w[cursor[c]++] = wt;
      out.nbr[cursor[u]] = c;
      out.w[cursor[u]++] = wt;
    }
  out.vol.assign(static_cast<std::size_t>(next), 0.0);
  out.total_weight = 0.0;
  for (NodeId c = 0; c < next; ++c) {
    double s = 2.0 * out.self_weight[c];
    for (std::int64_t i = out.offsets[c]; i < out.offsets[c + 1]; ++i)
      s += out.w[i];
    out.vol[c] = s;
    out.total_weight += s;
  }
  out.total_weight /= 2.0;
  return out;
}

}  // namespace detail

// Full multi-level Louvain.  Community labels are compacted by ascending
// first member id.  The result never scores below the all-singletons
// partition because every accepted move strictly increases modularity.
inline Partition louvain(const WeightedGraphView& view, Rng& rng) {
  const Graph& g = *view.graph;
  if (g.num_edges() == 0) throw ValidationError("louvain: graph has no edges");
  detail::LevelGraph lg = detail::level_from_view(view);
  const NodeId n = g.num_nodes();
  std::vector<NodeId> membership(static_cast<std::size_t>(n));
  std::iota(membership.begin(), membership.end(), 0);
  while (true) {
    bool any_move = false;
    const auto comm = detail::local_move_phase(lg, rng, &any_move);
    std::vector<NodeId> relabel;
    detail::LevelGraph next = detail::aggregate(lg, comm, relabel);
    for (NodeId v = 0; v < n; ++v)
      membership[v] = relabel[comm[membership[v]]];
    if (!any_move || next.size() == lg.size()) break;
    lg = std::move(next);
  }
  // compact by ascending first-member node id
  std::vector<NodeId> remap(membership.size(), -1);
  NodeId next_id = 0;
  for (NodeId v = 0; v < n; ++v)
    if (remap[membership[v]] == -1) remap[membership[v]] = next_id++;
  std::vector<NodeId> labels(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) labels[v] = remap[membership[v]];
  return Partition::from_labels(std::move(labels));
}

// First phase only (no aggregation): the building block for ECG votes.
inline Partition louvain_level1(const WeightedGraphView& view, Rng& rng) {
  const Graph& g = *view.graph;
  if (g.num_edges() == 0) throw ValidationError("louvain: graph has no edges");
  detail::LevelGraph lg = detail::level_from_view(view);
  const auto comm = detail::local_move_phase(lg, rng);
  std::vector<NodeId> remap(comm.size(), -1);
  NodeId next_id = 0;
  std::vector<NodeId> labels(comm.size());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (remap[comm[v]] == -1) remap[comm[v]] = next_id++;
    labels[v] = remap[comm[v]];
  }
  return Partition::from_labels(std::move(labels));
}

struct EcgParams {
  int ensemble_size = 16;
  double min_weight = 0.05;
};

// Consumes one draw from rng for the ensemble base seed; every internal run
// gets an independent stream derived from it, so results do not depend on
// evaluation order.
inline Partition ecg(const Graph& g, Rng& rng, const EcgParams& params = {}) {
  if (g.num_edges() == 0) throw ValidationError("ecg: graph has no edges");
  if (params.ensemble_size < 1)
    throw ValidationError("ecg: ensemble size must be positive");
  const std::uint64_t base = rng.next();
  const auto edges = g.edges();
  std::vector<std::int32_t> votes(edges.size(), 0);
  const WeightedGraphView unit = unit_weights(g);
  for (int run = 0; run < params.ensemble_size; ++run) {
    Rng run_rng(derive_seed(base, {static_cast<std::uint64_t>(run)}));
    const Partition p = louvain_level1(unit, run_rng);
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (p.label(edges[i].u) == p.label(edges[i].v)) ++votes[i];
  }
  const auto core = core_numbers(g);
  WeightedGraphView weighted{&g, std::vector<double>(edges.size())};
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const bool in_2core = core[edges[i].u] >= 2 && core[edges[i].v] >= 2;
    weighted.edge_weights[i] =
        in_2core ? params.min_weight +
                       (1.0 - params.min_weight) *
                           (static_cast<double>(votes[i]) / params.ensemble_size)
                 : params.min_weight;
  }
  Rng final_rng(
      derive_seed(base, {static_cast<std::uint64_t>(params.ensemble_size)}));
  return louvain(weighted, final_rng);
}

}  // namespace gembed
