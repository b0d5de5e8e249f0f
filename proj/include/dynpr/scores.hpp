#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dynpr/dynrank.hpp"
#include "dynpr/error.hpp"
#include "dynpr/graph.hpp"
#include "dynpr/score_vector.hpp"

namespace dynpr {

/// isim_j for j = 1..k_max, stored at values[j - 1].
struct SimilarityProfile {
  std::size_t k_max = 0;
  std::vector<double> values;
};

struct LastSample {};
inline constexpr LastSample last_sample{};

using SampleTime = std::variant<double, LastSample>;

/// Copy of the column sampled at `at`. No interpolation: a time that is not
/// a sample (up to 1e-9 relative) is a LookupError.
inline ScoreVector transient_rank(const RankSequence& seq, SampleTime at) {
  if (seq.empty()) throw LookupError("rank sequence is empty");
  std::size_t k = seq.num_samples() - 1;
  if (const double* t = std::get_if<double>(&at)) {
    const auto times = seq.times();
    const auto it = std::lower_bound(times.begin(), times.end(), *t);
    const double slack = 1e-9 * std::max(1.0, std::abs(*t));
    std::size_t hit = times.size();
    if (it != times.end() && std::abs(*it - *t) <= slack) {
      hit = static_cast<std::size_t>(it - times.begin());
    } else if (it != times.begin() && std::abs(*(it - 1) - *t) <= slack) {
      hit = static_cast<std::size_t>(it - times.begin()) - 1;
    }
    if (hit == times.size()) {
      std::string msg = "time " + std::to_string(*t) + " was not sampled; nearest:";
      if (it != times.begin()) msg += " " + std::to_string(*(it - 1));
      if (it != times.end()) msg += " " + std::to_string(*it);
      throw LookupError(msg);
    }
    k = hit;
  }
  const auto col = seq.column(k);
  return ScoreVector(std::vector<double>(col.begin(), col.end()), ScoreKind::transient);
}

/// c = h X e (left-endpoint quadrature of the integral of x(t)).
inline ScoreVector cumulative_rank(const RankSequence& seq) {
  if (seq.empty()) throw InputError("cumulative_rank of empty sequence");
  std::vector<double> c(seq.num_nodes(), 0.0);
  for (std::size_t k = 0; k < seq.num_samples(); ++k) {
    const auto col = seq.column(k);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += col[i];
  }
  for (double& ci : c) ci *= seq.h();
  return ScoreVector(std::move(c), ScoreKind::cumulative);
}

/// d = max_t x(t) - min_t x(t) over the sampled columns.
inline ScoreVector difference_rank(const RankSequence& seq) {
  if (seq.empty()) throw InputError("difference_rank of empty sequence");
  const std::size_t n = seq.num_nodes();
  const auto first = seq.column(0);
  std::vector<double> hi(first.begin(), first.end());
  std::vector<double> lo(first.begin(), first.end());
  for (std::size_t k = 1; k < seq.num_samples(); ++k) {
    const auto col = seq.column(k);
    for (std::size_t i = 0; i < n; ++i) {
      hi[i] = std::max(hi[i], col[i]);
      lo[i] = std::min(lo[i], col[i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) hi[i] -= lo[i];
  return ScoreVector(std::move(hi), ScoreKind::difference);
}

/// Reduces each node's series with `reducer`, which receives the node's
/// sampled values in time order and the sample spacing.
inline ScoreVector reduce_columns(
    const RankSequence& seq,
    const std::function<double(std::span<const double>, double)>& reducer) {
  if (seq.empty()) throw InputError("reduce_columns of empty sequence");
  std::vector<double> out(seq.num_nodes());
  std::vector<double> series(seq.num_samples());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = 0; k < series.size(); ++k) series[k] = seq.at(i, k);
    out[i] = reducer(series, seq.h());
  }
  return ScoreVector(std::move(out), ScoreKind::summary);
}

namespace reducers {

inline double integral(std::span<const double> s, double h) {
  return h * std::accumulate(s.begin(), s.end(), 0.0);
}
inline double mean(std::span<const double> s, double) {
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}
inline double minimum(std::span<const double> s, double) {
  return *std::min_element(s.begin(), s.end());
}
inline double maximum(std::span<const double> s, double) {
  return *std::max_element(s.begin(), s.end());
}
/// Population variance.
inline double variance(std::span<const double> s, double h) {
  const double m = mean(s, h);
  double acc = 0.0;
  for (double x : s) acc += (x - m) * (x - m);
  return acc / static_cast<double>(s.size());
}

}  // namespace reducers

/// Ids of the k largest scores, descending; ties go to the lower id.
inline std::vector<NodeId> top_k(const ScoreVector& score, std::size_t k) {
  const std::size_t n = score.size();
  if (k < 1 || k > n) {
    throw InputError("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  const auto& v = score.values;
  auto before = [&v](NodeId a, NodeId b) { return v[a] > v[b] || (v[a] == v[b] && a < b); };
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(), before);
  ids.resize(k);
  return ids;
}

/// isim_j(a, b) = (1/j) sum_{i<=j} |A_i Δ B_i| / (2i) for j = 1..k, where A_i
/// and B_i are the top-i sets under top_k's ordering.
inline SimilarityProfile intersection_similarity(const ScoreVector& a, const ScoreVector& b,
                                                 std::size_t k) {
  if (a.size() != b.size()) throw DimensionError("intersection_similarity", a.size(), b.size());
  const auto ta = top_k(a, k);
  const auto tb = top_k(b, k);

  // Membership bits: 1 = in A prefix, 2 = in B prefix.
  std::vector<unsigned char> member(a.size(), 0);
  std::size_t sym_diff = 0;
  double running = 0.0;
  SimilarityProfile profile{k, std::vector<double>(k)};
  for (std::size_t j = 0; j < k; ++j) {
    const NodeId x = ta[j];
    member[x] |= 1;
    sym_diff = (member[x] & 2) ? sym_diff - 1 : sym_diff + 1;
    const NodeId y = tb[j];
    member[y] |= 2;
    if (y == x) {
      // x was just counted as A-only; now in both.
      sym_diff -= 1;
    } else {
      sym_diff = (member[y] & 1) ? sym_diff - 1 : sym_diff + 1;
    }
    const double level = static_cast<double>(j + 1);
    running += static_cast<double>(sym_diff) / (2.0 * level);
    profile.values[j] = running / level;
  }
  return profile;
}

}  // namespace dynpr
