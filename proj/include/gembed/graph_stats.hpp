#pragma once

// Descriptive statistics for a graph: degree summary, triangle census,
// transitivity, assortativity, components, distance metrics on the largest
// component, degeneracy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gembed/graph.hpp"

namespace gembed {

struct GraphStats {
  std::int64_t nodes = 0;
  std::int64_t edges = 0;
  NodeId min_degree = 0;
  NodeId max_degree = 0;
  double mean_degree = 0.0;
  double density = 0.0;
  std::int64_t triangles = 0;
  double transitivity = 0.0;   // 3*triangles / wedges, 0 when no wedges
  std::optional<double> assortativity;  // null for degree-regular graphs
  std::int64_t components = 0;
  std::int64_t largest_component = 0;
  std::int64_t diameter = 0;          // of the largest component
  double avg_path_length = 0.0;       // unordered pairs, largest component
  NodeId max_core = 0;
};

// Component id per node, 0-based in order of discovery from node 0.
inline std::vector<NodeId> connected_components(const Graph& g,
                                                std::int64_t* count = nullptr) {
  const NodeId n = g.num_nodes();
  std::vector<NodeId> comp(static_cast<std::size_t>(n), -1);
  std::vector<NodeId> stack;
  NodeId next = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId w : g.neighbors(v)) {
        if (comp[w] == -1) {
          comp[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

// Coreness per node (peeling order, bucket queue).
inline std::vector<NodeId> core_numbers(const Graph& g) {
  const NodeId n = g.num_nodes();
  std::vector<NodeId> deg(static_cast<std::size_t>(n));
  NodeId max_deg = 0;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    max_deg = std::max(max_deg, deg[v]);
  }
  std::vector<NodeId> bin(static_cast<std::size_t>(max_deg) + 2, 0);
  for (NodeId v = 0; v < n; ++v) ++bin[deg[v] + 1];
  for (std::size_t i = 1; i < bin.size(); ++i) bin[i] += bin[i - 1];
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::vector<NodeId> pos(static_cast<std::size_t>(n));
  {
    std::vector<NodeId> cursor(bin.begin(), bin.end() - 1);
    for (NodeId v = 0; v < n; ++v) {
      pos[v] = cursor[deg[v]]++;
      order[pos[v]] = v;
    }
  }
  std::vector<NodeId> core(deg);
  for (NodeId i = 0; i < n; ++i) {
    const NodeId v = order[i];
    for (NodeId w : g.neighbors(v)) {
      if (core[w] > core[v]) {
        // swap w to the front of its bucket, shrink its degree by one
        const NodeId dw = core[w];
        const NodeId pw = pos[w];
        const NodeId pfront = bin[dw];
        const NodeId front = order[pfront];
        if (w != front) {
          std::swap(order[pw], order[pfront]);
          pos[w] = pfront;
          pos[front] = pw;
        }
        ++bin[dw];
        --core[w];
      }
    }
  }
  return core;
}

inline std::int64_t count_triangles(const Graph& g) {
  std::int64_t total = 0;
  const NodeId n = g.num_nodes();
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : total)
  for (NodeId u = 0; u < n; ++u) {
    const auto nu = g.neighbors(u);
    for (NodeId v : nu) {
      if (v <= u) continue;
      const auto nv = g.neighbors(v);
      // count common neighbors w with w > v to take each triangle once
      auto it = std::lower_bound(nu.begin(), nu.end(), v + 1);
      auto jt = std::lower_bound(nv.begin(), nv.end(), v + 1);
      while (it != nu.end() && jt != nv.end()) {
        if (*it < *jt)
          ++it;
        else if (*jt < *it)
          ++jt;
        else {
          ++total;
          ++it;
          ++jt;
        }
      }
    }
  }
  return total;
}

inline GraphStats graph_stats(const Graph& g) {
  GraphStats s;
  const NodeId n = g.num_nodes();
  s.nodes = n;
  s.edges = g.num_edges();
  if (n == 0) return s;

  s.min_degree = n > 0 ? g.degree(0) : 0;
  for (NodeId v = 0; v < n; ++v) {
    const NodeId d = g.degree(v);
    s.min_degree = std::min(s.min_degree, d);
    s.max_degree = std::max(s.max_degree, d);
  }
  s.mean_degree = n > 0 ? 2.0 * static_cast<double>(s.edges) / n : 0.0;
  s.density = n > 1 ? 2.0 * static_cast<double>(s.edges) /
                          (static_cast<double>(n) * (n - 1))
                    : 0.0;

  s.triangles = count_triangles(g);
  double wedges = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const double d = g.degree(v);
    wedges += d * (d - 1) / 2.0;
  }
  s.transitivity = wedges > 0 ? 3.0 * static_cast<double>(s.triangles) / wedges
                              : 0.0;

  // Degree assortativity: Pearson correlation over edge endpoint degrees,
  // symmetrized.  Undefined when endpoint degrees have zero variance.
  if (s.edges > 0) {
    double sum_jk = 0, sum_j = 0, sum_j2 = 0;
    for (NodeId u = 0; u < n; ++u) {
      const double du = g.degree(u);
      for (NodeId v : g.neighbors(u)) {
        if (v <= u) continue;
        const double dv = g.degree(v);
        sum_jk += du * dv;
        sum_j += 0.5 * (du + dv);
        sum_j2 += 0.5 * (du * du + dv * dv);
      }
    }
    const double m = static_cast<double>(s.edges);
    const double num = sum_jk / m - (sum_j / m) * (sum_j / m);
    const double den = sum_j2 / m - (sum_j / m) * (sum_j / m);
    if (den > 1e-12) s.assortativity = num / den;
  }

  const auto comp = connected_components(g, &s.components);
  std::vector<std::int64_t> comp_size(static_cast<std::size_t>(s.components),
                                      0);
  for (NodeId v = 0; v < n; ++v) ++comp_size[comp[v]];
  NodeId biggest = 0;
  for (std::size_t c = 0; c < comp_size.size(); ++c)
    if (comp_size[c] > comp_size[biggest]) biggest = static_cast<NodeId>(c);
  s.largest_component = comp_size[biggest];

  // BFS from every node of the largest component.  Distance sums are
  // integers, so the parallel reduction is exact and order-independent.
  std::vector<NodeId> members;
  members.reserve(static_cast<std::size_t>(s.largest_component));
  for (NodeId v = 0; v < n; ++v)
    if (comp[v] == biggest) members.push_back(v);
  std::int64_t dist_sum = 0;
  std::int64_t diameter = 0;
  const std::int64_t k = static_cast<std::int64_t>(members.size());
#pragma omp parallel reduction(+ : dist_sum) reduction(max : diameter)
  {
    std::vector<std::int32_t> dist(static_cast<std::size_t>(n), -1);
    std::vector<NodeId> frontier, next_frontier;
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < k; ++i) {
      const NodeId src = members[i];
      std::fill(dist.begin(), dist.end(), -1);
      dist[src] = 0;
      frontier.assign(1, src);
      std::int32_t level = 0;
      while (!frontier.empty()) {
        ++level;
        next_frontier.clear();
        for (NodeId v : frontier) {
          for (NodeId w : g.neighbors(v)) {
            if (dist[w] == -1) {
              dist[w] = level;
              dist_sum += level;
              next_frontier.push_back(w);
            }
          }
        }
        std::swap(frontier, next_frontier);
      }
      diameter = std::max<std::int64_t>(diameter, level - 1);
    }
  }
  s.diameter = k > 1 ? diameter : 0;
  // every unordered pair counted twice by the double BFS sweep
  s.avg_path_length =
      k > 1 ? static_cast<double>(dist_sum) / (static_cast<double>(k) * (k - 1))
            : 0.0;

  const auto core = core_numbers(g);
  for (NodeId v = 0; v < n; ++v) s.max_core = std::max(s.max_core, core[v]);
  return s;
}

}  // namespace gembed
