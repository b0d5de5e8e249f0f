#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynpr/error.hpp"
#include "dynpr/graph.hpp"
#include "dynpr/score_vector.hpp"
#include "dynpr/scores.hpp"

namespace dynpr {

enum class FeatureSource { pageviews, dynamic_rank };

inline std::string_view to_string(FeatureSource s) {
  return s == FeatureSource::pageviews ? "pageviews" : "dynamic_rank";
}

/// One node's time series of a single feature.
struct FeatureSeries {
  NodeId node = 0;
  std::vector<double> times;
  std::vector<double> values;
  FeatureSource source = FeatureSource::pageviews;
};

/// f̄(0) = f(0); f̄(t) = theta f(t) + (1 - theta) f̄(t-1).
inline std::vector<double> ewma(std::span<const double> f, double theta) {
  if (f.empty()) throw InputError("ewma of empty series");
  if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  std::vector<double> out(f.size());
  out[0] = f[0];
  for (std::size_t t = 1; t < f.size(); ++t) out[t] = theta * f[t] + (1.0 - theta) * out[t - 1];
  return out;
}

inline FeatureSeries ewma(const FeatureSeries& series, double theta) {
  if (series.times.size() != series.values.size()) {
    throw DimensionError("feature series times", series.values.size(), series.times.size());
  }
  for (std::size_t t = 1; t < series.times.size(); ++t) {
    if (!(series.times[t] > series.times[t - 1])) {
      throw InputError("feature series times must be strictly increasing");
    }
  }
  FeatureSeries out = series;
  out.values = ewma(series.values, theta);
  return out;
}

/// Mean over points of |f - a| / ((|f| + |a|) / 2); a point where both are
/// zero contributes 0. Result lies in [0, 2].
inline double smape(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw DimensionError("smape", actual.size(), predicted.size());
  }
  if (predicted.empty()) throw InputError("smape of empty series");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double denom = std::abs(predicted[i]) + std::abs(actual[i]);
    if (denom > 0.0) acc += 2.0 * std::abs(predicted[i] - actual[i]) / denom;
  }
  return acc / static_cast<double>(predicted.size());
}

// ---------------------------------------------------------------------------
// Lagged linear regression
// ---------------------------------------------------------------------------

struct LeastSquaresResult {
  std::vector<double> coefficients;
  double residual_norm = 0.0;  // ||A b - y||_2
  std::size_t rank = 0;
};

/// Minimum-norm least squares via complete orthogonal decomposition. A
/// rank-deficient design is solved anyway and reported through warn().
inline LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& design,
                                              const Eigen::VectorXd& target) {
  if (design.rows() != target.size()) {
    throw DimensionError("least squares target", static_cast<std::size_t>(design.rows()),
                         static_cast<std::size_t>(target.size()));
  }
  if (design.rows() < design.cols()) {
    throw InputError("least squares needs at least " + std::to_string(design.cols()) +
                     " rows, got " + std::to_string(design.rows()));
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  const Eigen::VectorXd b = cod.solve(target);
  LeastSquaresResult out;
  out.rank = static_cast<std::size_t>(cod.rank());
  if (out.rank < static_cast<std::size_t>(design.cols())) {
    warn("rank-deficient design (rank " + std::to_string(out.rank) + " of " +
         std::to_string(design.cols()) + "); using minimum-norm solution");
  }
  out.coefficients.assign(b.data(), b.data() + b.size());
  out.residual_norm = (design * b - target).norm();
  return out;
}

struct ForecastSpec {
  std::size_t w = 3;
  double theta = 0.7;
  std::vector<FeatureSource> sources{FeatureSource::pageviews};
};

/// Coefficients are laid out per source as [lag 1 .. lag w], sources in
/// spec order, followed by the intercept.
struct ForecastModel {
  std::size_t w = 3;
  double theta = 0.7;
  std::vector<FeatureSource> sources;
  std::vector<double> b;
  double training_residual = 0.0;
  std::size_t rank = 0;

  std::size_t num_columns() const { return w * sources.size() + 1; }
};

/// Raw per-period data for one node. features[s] lines up with spec.sources[s].
struct NodeSeries {
  NodeId node = 0;
  std::vector<std::vector<double>> features;
  std::vector<double> target;
};

namespace detail {

inline void check_spec(const ForecastSpec& spec) {
  if (spec.w == 0) throw ConfigError("window w must be >= 1");
  if (!(spec.theta > 0.0 && spec.theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
  if (spec.sources.empty()) throw ConfigError("forecast model needs at least one feature source");
}

inline std::vector<std::vector<double>> smoothed_features(const ForecastSpec& spec,
                                                          const NodeSeries& node) {
  if (node.features.size() != spec.sources.size()) {
    throw DimensionError("node feature sources", spec.sources.size(), node.features.size());
  }
  std::vector<std::vector<double>> out;
  out.reserve(node.features.size());
  for (const auto& f : node.features) {
    if (f.size() != node.target.size()) {
      throw DimensionError("feature length", node.target.size(), f.size());
    }
    out.push_back(ewma(f, spec.theta));
  }
  return out;
}

// Row for target time t: smoothed[s][t - 1 .. t - w], then 1.
inline void fill_row(const std::vector<std::vector<double>>& smoothed, std::size_t w, std::size_t t,
                     Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  std::size_t c = 0;
  for (const auto& f : smoothed) {
    for (std::size_t lag = 1; lag <= w; ++lag) row(static_cast<Eigen::Index>(c++)) = f[t - lag];
  }
  row(static_cast<Eigen::Index>(c)) = 1.0;
}

}  // namespace detail

/// Stacked design over nodes and target times t in [t_begin, t_end) with
/// t >= w (rows ordered node-major). Exposed for oracles and diagnostics.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_design(const ForecastSpec& spec,
                                                                 std::span<const NodeSeries> nodes,
                                                                 std::size_t t_begin,
                                                                 std::size_t t_end) {
  detail::check_spec(spec);
  const std::size_t cols = spec.w * spec.sources.size() + 1;
  const std::size_t first = std::max(t_begin, spec.w);
  std::size_t rows = 0;
  for (const auto& node : nodes) {
    const std::size_t end = std::min(t_end, node.target.size());
    if (end > first) rows += end - first;
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  Eigen::Index r = 0;
  for (const auto& node : nodes) {
    const auto smoothed = detail::smoothed_features(spec, node);
    const std::size_t end = std::min(t_end, node.target.size());
    for (std::size_t t = first; t < end; ++t, ++r) {
      detail::fill_row(smoothed, spec.w, t, a.row(r));
      y(r) = node.target[t];
    }
  }
  return {std::move(a), std::move(y)};
}

/// One pooled coefficient vector across all nodes, trained on target times
/// [t_begin, t_end).
inline ForecastModel fit(const ForecastSpec& spec, std::span<const NodeSeries> nodes,
                         std::size_t t_begin = 0, std::size_t t_end = static_cast<std::size_t>(-1)) {
  auto [a, y] = build_design(spec, nodes, t_begin, t_end);
  if (a.rows() == 0) throw InputError("no training rows with a complete lag window");
  const LeastSquaresResult ls = solve_least_squares(a, y);
  ForecastModel model;
  model.w = spec.w;
  model.theta = spec.theta;
  model.sources = spec.sources;
  model.b = ls.coefficients;
  model.training_residual = ls.residual_norm;
  model.rank = ls.rank;
  return model;
}

/// `lags[s]` holds source s's smoothed values most recent first:
/// [f̄(t), f̄(t-1), ..., f̄(t-w+1)]. Returns the prediction for t + 1.
inline double predict_next(const ForecastModel& model,
                           std::span<const std::vector<double>> lags) {
  if (lags.size() != model.sources.size()) {
    throw InputError("expected lags for " + std::to_string(model.sources.size()) +
                     " sources, got " + std::to_string(lags.size()));
  }
  if (model.b.size() != model.num_columns()) {
    throw DimensionError("model coefficients", model.num_columns(), model.b.size());
  }
  double pred = model.b.back();
  std::size_t c = 0;
  for (const auto& source_lags : lags) {
    if (source_lags.size() < model.w) {
      throw InputError("incomplete lags: need " + std::to_string(model.w) + ", got " +
                       std::to_string(source_lags.size()));
    }
    for (std::size_t lag = 0; lag < model.w; ++lag) pred += model.b[c++] * source_lags[lag];
  }
  return pred;
}

/// Predictions for target times [t_begin, t_end) of one node, each using
/// only data strictly before the target time.
inline std::vector<double> predict_range(const ForecastModel& model, const NodeSeries& node,
                                         std::size_t t_begin, std::size_t t_end) {
  const ForecastSpec spec{model.w, model.theta, model.sources};
  const auto smoothed = detail::smoothed_features(spec, node);
  std::vector<double> out;
  std::vector<std::vector<double>> lags(smoothed.size(), std::vector<double>(model.w));
  for (std::size_t t = std::max(t_begin, model.w); t < std::min(t_end, node.target.size()); ++t) {
    for (std::size_t s = 0; s < smoothed.size(); ++s) {
      for (std::size_t lag = 0; lag < model.w; ++lag) lags[s][lag] = smoothed[s][t - 1 - lag];
    }
    out.push_back(predict_next(model, lags));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Base vs. dynamic-rank comparison
// ---------------------------------------------------------------------------

/// Per-node, per-period data feeding the comparison. `rank[i][t]` is node i's
/// dynamic rank at the end of period t; `volatility` orders nodes from
/// volatile to stable (normally the difference rank).
struct ForecastDataset {
  std::string name = "synthetic";
  std::vector<std::vector<double>> pageviews;
  std::vector<std::vector<double>> rank;
  ScoreVector volatility;
};

struct CompareOptions {
  std::size_t w = 3;
  double theta = 0.7;
  std::size_t partition_cap = 1000;
  /// Target times below floor(train_fraction * T) train; the rest are scored.
  double train_fraction = 0.5;
  bool per_node = false;
  std::vector<FeatureSource> base_sources{FeatureSource::pageviews};
  std::vector<FeatureSource> dynamic_sources{FeatureSource::pageviews,
                                             FeatureSource::dynamic_rank};
};

struct ForecastRow {
  std::string dataset;
  std::string partition;  // non-stationary | stationary
  std::string model;      // dynamic | base
  double smape = 0.0;
};

struct ForecastReport {
  std::vector<ForecastRow> rows;
  std::vector<NodeId> volatile_nodes;
  std::vector<NodeId> stable_nodes;

  double lookup(std::string_view partition, std::string_view model) const {
    for (const auto& r : rows) {
      if (r.partition == partition && r.model == model) return r.smape;
    }
    throw LookupError("no report row for " + std::string(partition) + "/" + std::string(model));
  }
};

/// Volatile = top `cap` by volatility, stable = bottom `cap`. The cap is
/// truncated to n / 2 so the two sets never overlap.
inline std::pair<std::vector<NodeId>, std::vector<NodeId>> volatility_partition(
    const ScoreVector& volatility, std::size_t cap) {
  const std::size_t n = volatility.size();
  std::size_t size = cap;
  if (2 * size > n) {
    size = n / 2;
    warn("partition size " + std::to_string(cap) + " overlaps on " + std::to_string(n) +
         " nodes; truncated to " + std::to_string(size));
  }
  if (size == 0) throw InputError("too few nodes to form volatile/stable partitions");
  std::vector<double> negated(volatility.values);
  for (double& x : negated) x = -x;
  return {top_k(volatility, size), top_k(ScoreVector(std::move(negated), ScoreKind::external), size)};
}

namespace detail {

inline double evaluate_partition(const ForecastSpec& spec, std::span<const NodeSeries> nodes,
                                 std::size_t t_train, std::size_t t_total, bool per_node) {
  double total = 0.0;
  if (per_node) {
    for (const auto& node : nodes) {
      const ForecastModel model = fit(spec, std::span(&node, 1), 0, t_train);
      const auto pred = predict_range(model, node, t_train, t_total);
      total += smape(pred, std::span(node.target).subspan(t_train));
    }
  } else {
    const ForecastModel model = fit(spec, nodes, 0, t_train);
    for (const auto& node : nodes) {
      const auto pred = predict_range(model, node, t_train, t_total);
      total += smape(pred, std::span(node.target).subspan(t_train));
    }
  }
  return total / static_cast<double>(nodes.size());
}

}  // namespace detail

/// Average one-step-ahead sMAPE of the base model (pageview lags) and the
/// dynamic model (pageview + dynamic-rank lags) on the volatile and stable
/// partitions. Rows come out as Table-3 style {non-stationary, stationary} x
/// {dynamic, base}.
inline ForecastReport compare_models(const ForecastDataset& data, const CompareOptions& opts) {
  const std::size_t n = data.pageviews.size();
  if (n == 0) throw InputError("forecast dataset has no nodes");
  if (data.rank.size() != n) throw DimensionError("rank series nodes", n, data.rank.size());
  if (data.volatility.size() != n) {
    throw DimensionError("volatility scores", n, data.volatility.size());
  }
  const std::size_t periods = data.pageviews.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    if (data.pageviews[i].size() != periods || data.rank[i].size() != periods) {
      throw InputError("node " + std::to_string(i) + " has mismatched series lengths");
    }
  }
  if (!(opts.train_fraction > 0.0 && opts.train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1)");
  }
  const auto t_train = static_cast<std::size_t>(opts.train_fraction * static_cast<double>(periods));
  if (t_train <= opts.w || t_train >= periods) {
    throw ConfigError("need more than w training periods and at least one test period (" +
                      std::to_string(periods) + " periods, w = " + std::to_string(opts.w) + ")");
  }

  ForecastReport report;
  std::tie(report.volatile_nodes, report.stable_nodes) =
      volatility_partition(data.volatility, opts.partition_cap);

  const ForecastSpec base{opts.w, opts.theta, opts.base_sources};
  const ForecastSpec dynamic{opts.w, opts.theta, opts.dynamic_sources};

  auto gather = [&](const std::vector<NodeId>& ids, const ForecastSpec& spec) {
    std::vector<NodeSeries> out;
    out.reserve(ids.size());
    for (NodeId id : ids) {
      NodeSeries s{id, {}, data.pageviews[id]};
      for (FeatureSource src : spec.sources) {
        s.features.push_back(src == FeatureSource::pageviews ? data.pageviews[id] : data.rank[id]);
      }
      out.push_back(std::move(s));
    }
    return out;
  };

  const std::pair<std::string, const std::vector<NodeId>*> partitions[] = {
      {"non-stationary", &report.volatile_nodes}, {"stationary", &report.stable_nodes}};
  for (const auto& [label, ids] : partitions) {
    const auto dyn_nodes = gather(*ids, dynamic);
    const auto base_nodes = gather(*ids, base);
    report.rows.push_back({data.name, label, "dynamic",
                           detail::evaluate_partition(dynamic, dyn_nodes, t_train, periods,
                                                      opts.per_node)});
    report.rows.push_back({data.name, label, "base",
                           detail::evaluate_partition(base, base_nodes, t_train, periods,
                                                      opts.per_node)});
  }
  return report;
}

}  // namespace dynpr
