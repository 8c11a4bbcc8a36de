#pragma once

// Core graph types.
//
// Graph is an undirected simple graph in CSR form, immutable once built.
// All algorithms in this library share graphs across threads read-only;
// anything mutable (RNG state, scratch buffers) lives with the caller.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gembed/error.hpp"

namespace gembed {

using NodeId = std::int32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class Graph {
 public:
  Graph() = default;

  // Builds from an undirected edge list.  Self-loops or duplicate pairs are
  // precondition violations here; use simplify_edges() first when reading
  // untrusted input.
  static Graph from_edges(NodeId num_nodes, std::span<const Edge> edges) {
    if (num_nodes < 0) throw ValidationError("graph: negative node count");
    Graph g;
    g.n_ = num_nodes;
    g.m_ = static_cast<std::int64_t>(edges.size());
    std::vector<std::int64_t> deg(static_cast<std::size_t>(num_nodes) + 1, 0);
    for (const Edge& e : edges) {
      if (e.u < 0 || e.u >= num_nodes || e.v < 0 || e.v >= num_nodes)
        throw ValidationError("graph: endpoint out of range");
      if (e.u == e.v)
        throw ValidationError("graph: self-loop at node " +
                              std::to_string(e.u));
      ++deg[static_cast<std::size_t>(e.u) + 1];
      ++deg[static_cast<std::size_t>(e.v) + 1];
    }
    for (NodeId v = 0; v < num_nodes; ++v) deg[v + 1] += deg[v];
    g.offsets_ = std::move(deg);
    g.nbrs_.resize(static_cast<std::size_t>(2) * g.m_);
    std::vector<std::int64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const Edge& e : edges) {
      g.nbrs_[static_cast<std::size_t>(cursor[e.u]++)] = e.v;
      g.nbrs_[static_cast<std::size_t>(cursor[e.v]++)] = e.u;
    }
    for (NodeId v = 0; v < num_nodes; ++v) {
      auto first = g.nbrs_.begin() + g.offsets_[v];
      auto last = g.nbrs_.begin() + g.offsets_[v + 1];
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last)
        throw ValidationError("graph: duplicate edge at node " +
                              std::to_string(v));
    }
    return g;
  }

  NodeId num_nodes() const { return n_; }
  std::int64_t num_edges() const { return m_; }

  NodeId degree(NodeId v) const {
    return static_cast<NodeId>(offsets_[v + 1] - offsets_[v]);
  }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {nbrs_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  // deg(0), deg(1), ..., deg(n-1).
  std::vector<NodeId> degree_sequence() const {
    std::vector<NodeId> d(static_cast<std::size_t>(n_));
    for (NodeId v = 0; v < n_; ++v) d[v] = degree(v);
    return d;
  }

  // Canonical enumeration: edges (u,v) with u < v, ordered lexicographically.
  // Everything keyed "per edge" (ensemble weights, holdout splits) indexes
  // into this order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (NodeId u = 0; u < n_; ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.push_back({u, v});
    return out;
  }

 private:
  NodeId n_ = 0;
  std::int64_t m_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<NodeId> nbrs_;
};

// Drops self-loops and duplicate pairs in place; returns how many of each
// were removed.  Orientation and order are normalized as a side effect.
struct SimplifyCounts {
  std::int64_t self_loops = 0;
  std::int64_t duplicates = 0;
};

inline SimplifyCounts simplify_edges(std::vector<Edge>& edges) {
  SimplifyCounts counts;
  std::size_t keep = 0;
  for (Edge& e : edges) {
    if (e.u == e.v) {
      ++counts.self_loops;
      continue;
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    edges[keep++] = e;
  }
  edges.resize(keep);
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  auto last = std::unique(edges.begin(), edges.end());
  counts.duplicates =
      static_cast<std::int64_t>(std::distance(last, edges.end()));
  edges.erase(last, edges.end());
  return counts;
}

// A partition of {0..n-1} into labeled communities 0..num_communities()-1,
// every community non-empty.
class Partition {
 public:
  Partition() = default;

  // Labels must already be compact (0..L-1, all present).
  static Partition from_labels(std::vector<NodeId> labels) {
    Partition p;
    p.labels_ = std::move(labels);
    NodeId max_label = -1;
    for (NodeId c : p.labels_) {
      if (c < 0) throw ValidationError("partition: negative label");
      max_label = std::max(max_label, c);
    }
    p.sizes_.assign(static_cast<std::size_t>(max_label) + 1, 0);
    for (NodeId c : p.labels_) ++p.sizes_[c];
    for (std::size_t c = 0; c < p.sizes_.size(); ++c)
      if (p.sizes_[c] == 0)
        throw ValidationError("partition: empty community " +
                              std::to_string(c));
    if (p.labels_.empty()) p.sizes_.clear();
    return p;
  }

  // Arbitrary labels, remapped to 0..L-1 in ascending order of the original
  // label.  Returns the partition and whether any relabeling happened.
  static Partition compact_from(const std::vector<std::int64_t>& raw,
                                bool* relabeled = nullptr) {
    std::vector<std::int64_t> distinct(raw);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    std::vector<NodeId> labels(raw.size());
    bool changed = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto it = std::lower_bound(distinct.begin(), distinct.end(), raw[i]);
      labels[i] = static_cast<NodeId>(it - distinct.begin());
      if (labels[i] != raw[i]) changed = true;
    }
    if (relabeled) *relabeled = changed;
    return from_labels(std::move(labels));
  }

  NodeId label(NodeId v) const { return labels_[v]; }
  NodeId num_nodes() const { return static_cast<NodeId>(labels_.size()); }
  NodeId num_communities() const { return static_cast<NodeId>(sizes_.size()); }
  std::int64_t community_size(NodeId c) const { return sizes_[c]; }
  const std::vector<NodeId>& labels() const { return labels_; }

 private:
  std::vector<NodeId> labels_;
  std::vector<std::int64_t> sizes_;
};

}  // namespace gembed
