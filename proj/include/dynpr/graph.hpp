#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynpr/error.hpp"

namespace dynpr {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src;
  NodeId dst;
};

/// Immutable directed multigraph in compressed adjacency form.
///
/// Out-edges are kept for degree bookkeeping and export; a transposed copy
/// (in-edges grouped by destination, sources ascending) drives the
/// column-stochastic transition operator so each output entry is a
/// fixed-order sum.
class Graph {
 public:
  Graph(std::size_t n, std::span<const Edge> edges) : n_(n) {
    if (n == 0) throw InputError("graph must have at least one node");
    if (n > std::numeric_limits<NodeId>::max()) throw InputError("node count exceeds id range");

    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const Edge& e : edges) {
      if (e.src >= n || e.dst >= n) {
        throw InputError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                         " outside [0, " + std::to_string(n) + ")");
      }
      ++out_offsets_[e.src + 1];
      ++in_offsets_[e.dst + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      out_offsets_[i + 1] += out_offsets_[i];
      in_offsets_[i + 1] += in_offsets_[i];
    }

    out_targets_.resize(edges.size());
    in_sources_.resize(edges.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    for (const Edge& e : edges) out_targets_[out_fill[e.src]++] = e.dst;

    // Counting sort by source keeps every in-list ascending in source id.
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    for (NodeId src = 0; src < n; ++src) {
      for (std::size_t k = out_offsets_[src]; k < out_offsets_[src + 1]; ++k) {
        in_sources_[in_fill[out_targets_[k]]++] = src;
      }
    }

    for (NodeId i = 0; i < n; ++i) {
      if (out_degree(i) == 0) dangling_.push_back(i);
    }
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return out_targets_.size(); }

  std::size_t out_degree(NodeId i) const { return out_offsets_[i + 1] - out_offsets_[i]; }

  std::span<const NodeId> out_edges(NodeId i) const {
    return {out_targets_.data() + out_offsets_[i], out_degree(i)};
  }

  std::span<const NodeId> in_edges(NodeId j) const {
    return {in_sources_.data() + in_offsets_[j], in_offsets_[j + 1] - in_offsets_[j]};
  }

  /// Ids with out-degree zero, ascending.
  std::span<const NodeId> dangling() const noexcept { return dangling_; }

 private:
  std::size_t n_;
  std::vector<std::size_t> out_offsets_;
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
  std::vector<NodeId> dangling_;
};

/// y = P̄ x where P̄ is the uniform random-walk operator with dangling columns
/// replaced by the uniform distribution.
///
/// Summation order: each y_j accumulates x_i / deg_i over in-edges in
/// ascending source id, then adds (sum of dangling x_i, ascending id) / n.
/// The result is bitwise deterministic.
inline void transition_apply(const Graph& g, std::span<const double> x, std::span<double> y) {
  const std::size_t n = g.num_nodes();
  if (x.size() != n) throw DimensionError("transition_apply input", n, x.size());
  if (y.size() != n) throw DimensionError("transition_apply output", n, y.size());

  double dangling_mass = 0.0;
  for (NodeId i : g.dangling()) dangling_mass += x[i];
  const double spread = dangling_mass / static_cast<double>(n);

  for (NodeId j = 0; j < n; ++j) {
    double acc = 0.0;
    for (NodeId i : g.in_edges(j)) acc += x[i] / static_cast<double>(g.out_degree(i));
    y[j] = acc + spread;
  }
}

inline std::vector<double> transition_apply(const Graph& g, std::span<const double> x) {
  std::vector<double> y(g.num_nodes());
  transition_apply(g, x, y);
  return y;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline long long parse_integer(std::string_view tok, std::size_t line, std::string_view what) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "malformed " + std::string(what) + " '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace detail

/// Reads whitespace-separated `src dst` pairs (0-based). Lines starting with
/// `#` are comments; an optional `%n <count>` line fixes the node count,
/// otherwise n is one past the largest id seen.
inline Graph load_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  long long header_n = -1;
  long long max_id = -1;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto tokens = detail::split_ws(line);
    if (tokens.front() == "%n") {
      if (tokens.size() != 2) throw ParseError(line_no, "expected '%n <count>'");
      header_n = detail::parse_integer(tokens[1], line_no, "node count");
      if (header_n <= 0) throw ParseError(line_no, "node count must be positive");
      continue;
    }
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected 'src dst', got " + std::to_string(tokens.size()) +
                                    " fields");
    }
    const long long src = detail::parse_integer(tokens[0], line_no, "source id");
    const long long dst = detail::parse_integer(tokens[1], line_no, "destination id");
    if (src < 0 || dst < 0) throw ParseError(line_no, "negative node id");
    if (src > std::numeric_limits<NodeId>::max() || dst > std::numeric_limits<NodeId>::max()) {
      throw ParseError(line_no, "node id out of range");
    }
    if (header_n >= 0 && (src >= header_n || dst >= header_n)) {
      throw ParseError(line_no, "node id exceeds declared count " + std::to_string(header_n));
    }
    max_id = std::max({max_id, src, dst});
    edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst)});
  }

  const long long n = header_n >= 0 ? header_n : max_id + 1;
  if (header_n >= 0 && max_id >= header_n) {
    throw ParseError(line_no, "node id exceeds declared count " + std::to_string(header_n));
  }
  if (n <= 0) throw ParseError(line_no, "edge list defines no nodes");
  return Graph(static_cast<std::size_t>(n), edges);
}

/// Writes the graph in the format load_edge_list reads, with a `%n` header.
inline void write_edge_list(const Graph& g, std::ostream& out) {
  out << "%n " << g.num_nodes() << '\n';
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    for (NodeId j : g.out_edges(i)) out << i << ' ' << j << '\n';
  }
}

}  // namespace dynpr
