#pragma once

// Edge list and partition files.
//
// Edge list: one edge per line, two integer ids separated by whitespace.
// '#' starts a comment, blank lines are skipped, a third numeric column
// (a weight) is tolerated and ignored.  Node ids may be arbitrary
// non-negative integers; they are compacted to 0..n-1 preserving ascending
// order of the original ids.
//
// Partition: one line per node, "node_id community_id", same id rules.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gembed/graph.hpp"
#include "gembed/io_util.hpp"

namespace gembed {

struct LoadedGraph {
  Graph graph;
  // original_ids[compact] = id as it appeared in the file (sorted ascending).
  std::vector<std::int64_t> original_ids;
  std::int64_t self_loops_dropped = 0;
  std::int64_t duplicates_dropped = 0;
};

inline LoadedGraph load_edge_list(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    if (toks.size() != 2 && toks.size() != 3)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected 'u v' or 'u v w'");
    std::int64_t u, v;
    if (!parse_int64(toks[0], u) || !parse_int64(toks[1], v) || u < 0 || v < 0)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": bad node id");
    if (toks.size() == 3) {
      double w;
      if (!parse_double(toks[2], w))
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": bad weight");
    }
    raw.emplace_back(u, v);
  }

  LoadedGraph out;
  out.original_ids.reserve(raw.size() * 2);
  for (auto& [u, v] : raw) {
    out.original_ids.push_back(u);
    out.original_ids.push_back(v);
  }
  std::sort(out.original_ids.begin(), out.original_ids.end());
  out.original_ids.erase(
      std::unique(out.original_ids.begin(), out.original_ids.end()),
      out.original_ids.end());
  if (out.original_ids.size() >
      static_cast<std::size_t>(std::numeric_limits<NodeId>::max()))
    throw ValidationError(path + ": too many nodes");

  auto compact = [&](std::int64_t id) {
    return static_cast<NodeId>(
        std::lower_bound(out.original_ids.begin(), out.original_ids.end(),
                         id) -
        out.original_ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (auto& [u, v] : raw) edges.push_back({compact(u), compact(v)});
  const SimplifyCounts counts = simplify_edges(edges);
  out.self_loops_dropped = counts.self_loops;
  out.duplicates_dropped = counts.duplicates;
  out.graph =
      Graph::from_edges(static_cast<NodeId>(out.original_ids.size()), edges);
  return out;
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  auto out = open_output(path);
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    for (NodeId v : g.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
  if (!out) throw ValidationError("write failed: " + path);
}

struct LoadedPartition {
  Partition partition;
  bool labels_relabeled = false;
};

/// num_nodes: expected node count; every node must appear exactly once with
// its compact id (files written by this library and by the generator use
// compact ids already).
inline LoadedPartition load_partition(const std::string& path,
                                      NodeId num_nodes) {
  auto in = open_input(path);
  std::vector<std::int64_t> raw(static_cast<std::size_t>(num_nodes), -1);
  std::string line;
  std::int64_t lineno = 0;
  std::int64_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected 'node community'");
    std::int64_t v, c;
    if (!parse_int64(toks[0], v) || !parse_int64(toks[1], c) || c < 0)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": bad entry");
    if (v < 0 || v >= num_nodes)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": node id out of range");
    if (raw[v] != -1)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": duplicate node " + std::to_string(v));
    raw[v] = c;
    ++seen;
  }
  if (seen != num_nodes)
    throw ValidationError(path + ": " + std::to_string(num_nodes - seen) +
                          " nodes missing a community");
  LoadedPartition out;
  out.partition = Partition::compact_from(raw, &out.labels_relabeled);
  return out;
}

inline void save_partition(const Partition& p, const std::string& path) {
  auto out = open_output(path);
  for (NodeId v = 0; v < p.num_nodes(); ++v)
    out << v << ' ' << p.label(v) << '\n';
  if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace gembed
