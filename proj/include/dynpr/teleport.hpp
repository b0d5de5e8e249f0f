#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dynpr/error.hpp"
#include "dynpr/graph.hpp"

namespace dynpr {

/// One period of external interest: raw counts plus the normalized
/// teleportation distribution, both sparse over the same ids.
struct InterestPeriod {
  std::vector<NodeId> ids;       // ascending, unique
  std::vector<double> counts;    // raw nonnegative interest
  std::vector<double> weights;   // counts / total; empty when uniform
  bool uniform = false;          // all-zero period replaced by 1/n

  double total() const {
    double s = 0.0;
    for (double c : counts) s += c;
    return s;
  }
};

/// Ordered per-period teleportation distributions v(0), v(1), ...
class TeleportSeries {
 public:
  TeleportSeries() = default;

  explicit TeleportSeries(std::size_t n) : n_(n) {
    if (n == 0) throw InputError("teleport series needs n > 0");
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_periods() const noexcept { return periods_.size(); }
  bool empty() const noexcept { return periods_.empty(); }

  const InterestPeriod& period(std::size_t p) const { return periods_.at(p); }

  /// Appends a period from sparse (id, count) pairs. Repeated ids accumulate.
  /// An all-zero period falls back to the uniform distribution with a warning.
  void add_period(std::span<const std::pair<NodeId, double>> entries) {
    std::map<NodeId, double> acc;
    for (const auto& [id, count] : entries) {
      if (id >= n_) {
        throw InputError("node id " + std::to_string(id) + " >= n = " + std::to_string(n_));
      }
      if (!(count >= 0.0) || !std::isfinite(count)) {
        throw InputError("count for node " + std::to_string(id) + " must be finite and >= 0");
      }
      acc[id] += count;
    }

    InterestPeriod period;
    double total = 0.0;
    for (const auto& [id, count] : acc) {
      if (count == 0.0) continue;
      period.ids.push_back(id);
      period.counts.push_back(count);
      total += count;
    }
    if (total == 0.0) {
      warn("period " + std::to_string(periods_.size()) +
           " has no interest; using uniform teleportation");
      period.uniform = true;
    } else {
      period.weights.reserve(period.counts.size());
      for (double c : period.counts) period.weights.push_back(c / total);
    }
    periods_.push_back(std::move(period));
  }

  /// Appends a period given as a dense count vector of length n.
  void add_dense_period(std::span<const double> counts) {
    if (counts.size() != n_) throw DimensionError("dense period", n_, counts.size());
    std::vector<std::pair<NodeId, double>> entries;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] != 0.0) entries.emplace_back(static_cast<NodeId>(i), counts[i]);
    }
    // negative entries are caught in add_period
    add_period(entries);
  }

  /// Writes v(p) densely into out (length n).
  void fill_distribution(std::size_t p, std::span<double> out) const {
    if (out.size() != n_) throw DimensionError("fill_distribution", n_, out.size());
    const InterestPeriod& period = periods_.at(p);
    if (period.uniform) {
      std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n_));
      return;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < period.ids.size(); ++k) out[period.ids[k]] = period.weights[k];
  }

  std::vector<double> distribution(std::size_t p) const {
    std::vector<double> v(n_);
    fill_distribution(p, v);
    return v;
  }

  /// Raw counts of period p, dense.
  std::vector<double> counts(std::size_t p) const {
    std::vector<double> c(n_, 0.0);
    const InterestPeriod& period = periods_.at(p);
    for (std::size_t k = 0; k < period.ids.size(); ++k) c[period.ids[k]] = period.counts[k];
    return c;
  }

 private:
  std::size_t n_ = 0;
  std::vector<InterestPeriod> periods_;
};

/// Series with the same distribution repeated for every period.
inline TeleportSeries constant_series(std::span<const double> v, std::size_t periods) {
  TeleportSeries s(v.size());
  for (std::size_t p = 0; p < periods; ++p) s.add_dense_period(v);
  return s;
}

/// Reads `period node count` lines. Period ids index time slots 0..max; lines
/// may appear in any order and slots with no lines are empty periods. An
/// optional header line `period node count` and `#` comments are skipped.
inline TeleportSeries load_teleport_series(std::istream& in, std::size_t n) {
  std::map<long long, std::vector<std::pair<NodeId, double>>> by_period;
  std::string raw;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = detail::split_ws(line);
    if (!seen_data && tokens.size() == 3 && tokens[0] == "period" && tokens[1] == "node" &&
        tokens[2] == "count") {
      seen_data = true;
      continue;
    }
    seen_data = true;
    if (tokens.size() != 3) throw ParseError(line_no, "expected 'period node count'");
    const long long period = detail::parse_integer(tokens[0], line_no, "period");
    const long long node = detail::parse_integer(tokens[1], line_no, "node id");
    double count = 0.0;
    const auto [ptr, ec] =
        std::from_chars(tokens[2].data(), tokens[2].data() + tokens[2].size(), count);
    if (ec != std::errc() || ptr != tokens[2].data() + tokens[2].size()) {
      throw ParseError(line_no, "malformed count '" + std::string(tokens[2]) + "'");
    }
    if (period < 0) throw ParseError(line_no, "negative period");
    if (node < 0) throw ParseError(line_no, "negative node id");
    if (static_cast<unsigned long long>(node) >= n) {
      throw InputError("line " + std::to_string(line_no) + ": node id " + std::to_string(node) +
                       " >= n = " + std::to_string(n));
    }
    if (count < 0.0) {
      throw InputError("line " + std::to_string(line_no) + ": negative count");
    }
    by_period[period].emplace_back(static_cast<NodeId>(node), count);
  }
  if (by_period.empty()) throw InputError("teleport series has no periods");

  TeleportSeries series(n);
  const long long last = by_period.rbegin()->first;
  for (long long p = 0; p <= last; ++p) {
    auto it = by_period.find(p);
    if (it == by_period.end()) {
      series.add_period({});
    } else {
      series.add_period(it->second);
    }
  }
  return series;
}

/// Divides by the sum; an all-zero vector becomes uniform. Applying twice is
/// the identity up to rounding.
inline std::vector<double> normalize(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw InputError("normalize: negative entry");
    total += c;
  }
  std::vector<double> out(counts.begin(), counts.end());
  if (total == 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
  } else {
    for (double& c : out) c /= total;
  }
  return out;
}

}  // namespace dynpr
