#pragma once

// Dense node embeddings and their on-disk format.
//
// File format: optional header line "n d", then one row per node,
// "node_id x_1 ... x_d".  Rows may come in any order; '#' comments and
// blank lines are allowed.  Files without the header are accepted, with n
// and d inferred.  Values are written with enough digits to round-trip.

#include <cstdint>
#include <string>
#include <vector>

#include "gembed/graph.hpp"
#include "gembed/io_util.hpp"
#include "gembed/rng.hpp"

namespace gembed {

class Embedding {
 public:
  Embedding() = default;
  Embedding(NodeId n, int dim)
      : n_(n), dim_(dim),
        data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(dim),
              0.0) {
    if (n < 0 || dim <= 0)
      throw ValidationError("embedding: bad shape");
  }

  NodeId num_nodes() const { return n_; }
  int dim() const { return dim_; }

  double* row(NodeId v) {
    return data_.data() + static_cast<std::size_t>(v) * dim_;
  }
  const double* row(NodeId v) const {
    return data_.data() + static_cast<std::size_t>(v) * dim_;
  }
  double& at(NodeId v, int j) {
    return data_[static_cast<std::size_t>(v) * dim_ + j];
  }
  double at(NodeId v, int j) const {
    return data_[static_cast<std::size_t>(v) * dim_ + j];
  }
  const std::vector<double>& data() const { return data_; }

 private:
  NodeId n_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

// The "knows nothing" baseline: coordinates i.i.d. uniform on [0,1).
inline Embedding random_embedding(NodeId n, int dim, Rng& rng) {
  Embedding e(n, dim);
  for (NodeId v = 0; v < n; ++v)
    for (int j = 0; j < dim; ++j) e.at(v, j) = rng.uniform();
  return e;
}

inline void write_embedding(const Embedding& e, const std::string& path) {
  auto out = open_output(path);
  out << e.num_nodes() << ' ' << e.dim() << '\n';
  for (NodeId v = 0; v < e.num_nodes(); ++v) {
    out << v;
    for (int j = 0; j < e.dim(); ++j) out << ' ' << format_double(e.at(v, j));
    out << '\n';
  }
  if (!out) throw ValidationError("write failed: " + path);
}

// Accepts both headered and headerless files.  A first line with exactly
// two integer tokens is treated as a header when the rest of the file is
// consistent with it; otherwise it is data.
inline Embedding read_embedding(const std::string& path) {
  auto in = open_input(path);
  struct Row {
    std::int64_t id;
    std::vector<double> values;
    std::int64_t lineno;
  };
  std::vector<Row> rows;
  std::string line;
  std::int64_t lineno = 0;
  bool first_content = true;
  bool have_header = false;
  std::int64_t header_n = 0, header_d = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    if (first_content && toks.size() == 2) {
      std::int64_t a, b;
      if (parse_int64(toks[0], a) && parse_int64(toks[1], b) && a >= 0 &&
          b > 0) {
        have_header = true;
        header_n = a;
        header_d = b;
        first_content = false;
        continue;
      }
    }
    first_content = false;
    Row r;
    r.lineno = lineno;
    if (!parse_int64(toks[0], r.id) || r.id < 0)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": bad node id");
    r.values.reserve(toks.size() - 1);
    for (std::size_t i = 1; i < toks.size(); ++i) {
      double x;
      if (!parse_double(toks[i], x))
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": bad value '" + std::string(toks[i]) + "'");
      r.values.push_back(x);
    }
    rows.push_back(std::move(r));
  }
  // A first line of two integers is ambiguous for 1-dimensional data.  It
  // stays a header unless that reading is inconsistent AND re-reading it as
  // a data row yields a complete headerless file; otherwise the header
  // reading is kept so its errors (missing rows etc.) stay informative.
  if (have_header) {
    bool header_ok = static_cast<std::int64_t>(rows.size()) == header_n;
    if (header_ok)
      for (const Row& r : rows)
        if (static_cast<std::int64_t>(r.values.size()) != header_d) {
          header_ok = false;
          break;
        }
    if (!header_ok) {
      const std::int64_t count = static_cast<std::int64_t>(rows.size()) + 1;
      std::int64_t max_id = header_n;  // the would-be data row's id
      bool data_ok = true;
      for (const Row& r : rows) {
        if (r.values.size() != 1) data_ok = false;
        max_id = std::max(max_id, r.id);
      }
      if (data_ok && max_id + 1 == count) {
        std::vector<char> used(static_cast<std::size_t>(count), 0);
        used[header_n] = 1;
        for (const Row& r : rows) {
          if (used[r.id]) data_ok = false;
          used[r.id] = 1;
        }
      } else {
        data_ok = false;
      }
      if (data_ok) {
        Row r;
        r.lineno = 1;
        r.id = header_n;
        r.values.push_back(static_cast<double>(header_d));
        rows.insert(rows.begin(), std::move(r));
        have_header = false;
      }
    }
  }
  if (rows.empty()) throw ValidationError(path + ": no embedding rows");

  std::size_t dim = rows[0].values.size();
  if (have_header) dim = static_cast<std::size_t>(header_d);
  if (dim == 0) throw ValidationError(path + ": rows need at least one value");
  std::int64_t n = have_header ? header_n : 0;
  if (!have_header) {
    for (const Row& r : rows) n = std::max(n, r.id + 1);
    if (static_cast<std::size_t>(n) != rows.size())
      throw ValidationError(path + ": node ids are not 0..n-1");
  }

  Embedding e(static_cast<NodeId>(n), static_cast<int>(dim));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const Row& r : rows) {
    if (r.values.size() != dim)
      throw ValidationError(path + ":" + std::to_string(r.lineno) +
                            ": expected " + std::to_string(dim) +
                            " values, got " + std::to_string(r.values.size()));
    if (r.id >= n)
      throw ValidationError(path + ":" + std::to_string(r.lineno) +
                            ": node id " + std::to_string(r.id) +
                            " out of range");
    if (seen[r.id])
      throw ValidationError(path + ":" + std::to_string(r.lineno) +
                            ": duplicate node " + std::to_string(r.id));
    seen[r.id] = 1;
    for (std::size_t j = 0; j < dim; ++j)
      e.at(static_cast<NodeId>(r.id), static_cast<int>(j)) = r.values[j];
  }
  for (std::int64_t v = 0; v < n; ++v)
    if (!seen[v])
      throw ValidationError(path + ": node " + std::to_string(v) +
                            " missing");
  return e;
}

}  // namespace gembed
