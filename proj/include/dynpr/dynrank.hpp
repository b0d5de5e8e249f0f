#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynpr/error.hpp"
#include "dynpr/graph.hpp"
#include "dynpr/score_vector.hpp"
#include "dynpr/teleport.hpp"

namespace dynpr {

inline constexpr double kProbabilityTolerance = 1e-10;
inline constexpr double kDriftTolerance = 1e-8;

namespace detail {

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

inline void require_probability(std::span<const double> v, std::string_view what) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InputError(std::string(what) + " must be finite and nonnegative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw InputError(std::string(what) + " sums to " + std::to_string(sum) + ", expected 1");
  }
}

inline void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Static PageRank
// ---------------------------------------------------------------------------

struct StaticOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  /// Called with (k, x_k) after every iteration, k starting at 1.
  std::function<void(std::size_t, std::span<const double>)> observer;
};

struct StaticResult {
  ScoreVector scores;
  std::size_t iterations = 0;
  double residual = 0.0;  // ||(1-a)v - (I - aP)x||_1 at the returned x
};

/// ||(1-alpha) v - (I - alpha P̄) x||_1, the magnitude of x'(t) at x.
inline double residual(const Graph& g, std::span<const double> x, std::span<const double> v,
                       double alpha) {
  const std::size_t n = g.num_nodes();
  if (x.size() != n) throw DimensionError("residual x", n, x.size());
  if (v.size() != n) throw DimensionError("residual v", n, v.size());
  const std::vector<double> px = transition_apply(g, x);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs((1.0 - alpha) * v[i] - x[i] + alpha * px[i]);
  return s;
}

/// Richardson iteration x <- alpha P̄ x + (1-alpha) v, started from v, until
/// successive iterates differ by at most tol in 1-norm.
inline StaticResult static_pagerank(const Graph& g, double alpha, std::span<const double> v,
                                    const StaticOptions& opts = {}) {
  const std::size_t n = g.num_nodes();
  if (v.size() != n) throw DimensionError("static_pagerank v", n, v.size());
  detail::require_alpha(alpha);
  detail::require_probability(v, "teleportation vector");
  if (!(opts.tol > 0.0)) throw ConfigError("tol must be positive");

  std::vector<double> x(v.begin(), v.end());
  std::vector<double> next(n);
  std::vector<double> px(n);
  for (std::size_t k = 1; k <= opts.max_iter; ++k) {
    transition_apply(g, x, px);
    for (std::size_t i = 0; i < n; ++i) next[i] = alpha * px[i] + (1.0 - alpha) * v[i];
    if (opts.observer) opts.observer(k, next);
    const double delta = detail::l1_distance(next, x);
    x.swap(next);
    if (delta <= opts.tol) {
      const double r = residual(g, x, v, alpha);
      return {ScoreVector(std::move(x), ScoreKind::static_rank), k, r};
    }
  }
  const double r = residual(g, x, v, alpha);
  throw ConvergenceError(std::move(x), r, opts.max_iter);
}

// ---------------------------------------------------------------------------
// Forward Euler
// ---------------------------------------------------------------------------

/// out = (1-h) x + h alpha P̄ x + h (1-alpha) v. `scratch` receives P̄ x.
/// With h = 1 this is exactly one Richardson step; with h <= 1 every term is
/// nonnegative.
inline void euler_step_into(const Graph& g, std::span<const double> x, std::span<const double> v,
                            double alpha, double h, std::span<double> out,
                            std::span<double> scratch) {
  transition_apply(g, x, scratch);
  const double keep = 1.0 - h;
  const double walk = h * alpha;
  const double jump = h * (1.0 - alpha);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = keep * x[i] + walk * scratch[i] + jump * v[i];
}

inline std::vector<double> euler_step(const Graph& g, std::span<const double> x,
                                      std::span<const double> v, double alpha, double h) {
  const std::size_t n = g.num_nodes();
  if (x.size() != n) throw DimensionError("euler_step x", n, x.size());
  if (v.size() != n) throw DimensionError("euler_step v", n, v.size());
  detail::require_alpha(alpha);
  std::vector<double> out(n);
  std::vector<double> scratch(n);
  euler_step_into(g, x, v, alpha, h, out, scratch);
  return out;
}

enum class TeleportMode { piecewise_constant, ewma };

struct EvolveParams {
  double alpha = 0.85;
  double h = 1.0;
  std::size_t steps_per_period = 5;
  /// When set, must equal h * steps_per_period * periods.
  std::optional<double> t_max;
  TeleportMode mode = TeleportMode::piecewise_constant;
  /// Weight of the newest period when mode == ewma.
  double teleport_theta = 0.5;
  /// Keep x(k h) only for k a multiple of this (1 keeps every step).
  std::size_t sample_every = 1;
};

inline void validate(const EvolveParams& p) {
  detail::require_alpha(p.alpha);
  if (!(p.h > 0.0 && p.h <= 1.0)) throw ConfigError("h must lie in (0, 1]");
  if (p.steps_per_period == 0) throw ConfigError("steps_per_period must be positive");
  if (p.sample_every == 0) throw ConfigError("sample_every must be positive");
  if (p.mode == TeleportMode::ewma && !(p.teleport_theta > 0.0 && p.teleport_theta <= 1.0)) {
    throw ConfigError("teleport_theta must lie in (0, 1]");
  }
}

/// Sampled trajectory: column k holds x(times[k]).
class RankSequence {
 public:
  RankSequence() = default;
  /// `spacing` is the time between consecutive stored columns; it is the
  /// integrator step unless the run was subsampled.
  RankSequence(std::size_t n, double spacing) : n_(n), h_(spacing) {}

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_samples() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double h() const noexcept { return h_; }
  void set_h(double h) noexcept { h_ = h; }

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> column(std::size_t k) const {
    return {data_.data() + k * n_, n_};
  }
  double at(std::size_t node, std::size_t k) const { return data_[k * n_ + node]; }

  void append(double t, std::span<const double> x) {
    if (x.size() != n_) throw DimensionError("RankSequence column", n_, x.size());
    if (!times_.empty() && !(t > times_.back())) {
      throw InputError("RankSequence times must be strictly increasing");
    }
    times_.push_back(t);
    data_.insert(data_.end(), x.begin(), x.end());
  }

  /// Values of one node across all samples.
  std::vector<double> node_series(std::size_t node) const {
    std::vector<double> s(num_samples());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = at(node, k);
    return s;
  }

 private:
  std::size_t n_ = 0;
  double h_ = 1.0;
  std::vector<double> times_;
  std::vector<double> data_;  // column-major, n_ * num_samples
};

/// Integrates x'(t) = (1-alpha) v(t) - (I - alpha P̄) x(t) with forward Euler.
///
/// Period p of the series is active for steps k in
/// [p * steps_per_period, (p+1) * steps_per_period); the run takes
/// periods * steps_per_period steps and records x((k+1) h). The start
/// defaults to v(0).
inline RankSequence evolve(const Graph& g, const TeleportSeries& series, const EvolveParams& params,
                           std::optional<std::span<const double>> initial = std::nullopt) {
  validate(params);
  const std::size_t n = g.num_nodes();
  if (series.empty()) throw ConfigError("teleport series is empty");
  if (series.num_nodes() != n) {
    throw ConfigError("teleport series has n = " + std::to_string(series.num_nodes()) +
                      " but graph has n = " + std::to_string(n));
  }
  const std::size_t periods = series.num_periods();
  const std::size_t total_steps = periods * params.steps_per_period;
  if (params.t_max) {
    const double expected = params.h * static_cast<double>(total_steps);
    if (std::abs(*params.t_max - expected) > 1e-9 * std::max(1.0, expected)) {
      throw ConfigError("t_max = " + std::to_string(*params.t_max) + " but h * steps_per_period * " +
                        std::to_string(periods) + " periods = " + std::to_string(expected));
    }
  }

  std::vector<double> v = series.distribution(0);
  std::vector<double> x;
  if (initial) {
    if (initial->size() != n) throw DimensionError("initial condition", n, initial->size());
    detail::require_probability(*initial, "initial condition");
    x.assign(initial->begin(), initial->end());
  } else {
    x = v;
  }

  RankSequence seq(n, params.h * static_cast<double>(params.sample_every));
  std::vector<double> next(n);
  std::vector<double> scratch(n);
  std::vector<double> fresh(n);
  std::size_t active = 0;

  for (std::size_t k = 0; k < total_steps; ++k) {
    const std::size_t p = k / params.steps_per_period;
    if (p != active) {
      active = p;
      if (params.mode == TeleportMode::piecewise_constant) {
        series.fill_distribution(p, v);
      } else {
        series.fill_distribution(p, fresh);
        const double theta = params.teleport_theta;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          v[i] = theta * fresh[i] + (1.0 - theta) * v[i];
          sum += v[i];
        }
        for (double& vi : v) vi /= sum;
      }
    }

    euler_step_into(g, x, v, params.alpha, params.h, next, scratch);
    x.swap(next);

    double mass = 0.0;
    for (double xi : x) mass += xi;
    if (std::abs(mass - 1.0) > kDriftTolerance) {
      warn("rank mass drifted to " + std::to_string(mass) + " at step " + std::to_string(k + 1) +
           "; renormalizing");
      for (double& xi : x) xi /= mass;
    }

    if ((k + 1) % params.sample_every == 0) {
      seq.append(params.h * static_cast<double>(k + 1), x);
    }
  }
  return seq;
}

}  // namespace dynpr
