#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "dynpr/dynrank.hpp"
#include "dynpr/forecast.hpp"
#include "dynpr/graph.hpp"
#include "dynpr/scores.hpp"
#include "dynpr/teleport.hpp"

// Seeded synthetic graphs and interest series. Output is a pure function of
// the options and seed for a given standard library.

namespace dynpr::synth {

struct GraphOptions {
  std::size_t n = 1000;
  double mean_out_degree = 8.0;
  double dangling_fraction = 0.05;
};

/// Erdős–Rényi-style digraph: each non-dangling node draws a Poisson
/// out-degree (at least 1) and picks targets uniformly, never itself.
inline Graph random_graph(const GraphOptions& opts, std::uint64_t seed) {
  if (opts.n < 2) throw ConfigError("synthetic graph needs n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::poisson_distribution<int> degree(opts.mean_out_degree);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(opts.n - 2));
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(static_cast<double>(opts.n) * opts.mean_out_degree));
  for (NodeId i = 0; i < opts.n; ++i) {
    if (unit(rng) < opts.dangling_fraction) continue;
    const int d = std::max(1, degree(rng));
    for (int e = 0; e < d; ++e) {
      NodeId j = pick(rng);
      if (j >= i) ++j;
      edges.push_back({i, j});
    }
  }
  return Graph(opts.n, edges);
}

struct InterestOptions {
  std::size_t n = 1000;
  std::size_t periods = 24;
  double periodic_fraction = 0.3;
  double bursty_fraction = 0.1;
  double cycle_length = 12.0;
};

/// Interest counts per node and period: a log-normal base rate, a sinusoidal
/// cycle for some nodes and a decaying burst for others.
inline TeleportSeries interest_series(const InterestOptions& opts, std::uint64_t seed) {
  if (opts.n == 0 || opts.periods == 0) throw ConfigError("interest series needs n, periods > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> base(opts.n), amplitude(opts.n, 0.0), phase(opts.n, 0.0);
  std::vector<double> burst_at(opts.n, -1.0), burst_size(opts.n, 0.0);
  for (std::size_t i = 0; i < opts.n; ++i) {
    base[i] = std::exp(1.0 + gauss(rng));
    const double kind = unit(rng);
    if (kind < opts.periodic_fraction) {
      amplitude[i] = 0.3 + 0.6 * unit(rng);
      phase[i] = 2.0 * std::numbers::pi * unit(rng);
    } else if (kind < opts.periodic_fraction + opts.bursty_fraction) {
      burst_at[i] = std::floor(unit(rng) * static_cast<double>(opts.periods));
      burst_size[i] = 5.0 + 15.0 * unit(rng);
    }
  }

  TeleportSeries series(opts.n);
  std::vector<double> counts(opts.n);
  for (std::size_t p = 0; p < opts.periods; ++p) {
    const double t = static_cast<double>(p);
    for (std::size_t i = 0; i < opts.n; ++i) {
      double c = base[i] * (1.0 + amplitude[i] * std::sin(2.0 * std::numbers::pi * t /
                                                           opts.cycle_length + phase[i]));
      if (burst_at[i] >= 0.0 && t >= burst_at[i]) {
        c *= 1.0 + burst_size[i] * std::exp(-(t - burst_at[i]) / 2.0);
      }
      counts[i] = c * (0.9 + 0.2 * unit(rng));
    }
    series.add_dense_period(counts);
  }
  return series;
}

/// Column k * steps_per_period - 1 for each period k: the rank at the end of
/// every period, as per-node series.
inline std::vector<std::vector<double>> period_end_ranks(const RankSequence& seq,
                                                         std::size_t steps_per_period) {
  if (steps_per_period == 0) throw ConfigError("steps_per_period must be positive");
  std::vector<std::vector<double>> out(seq.num_nodes());
  for (std::size_t k = steps_per_period - 1; k < seq.num_samples(); k += steps_per_period) {
    const auto col = seq.column(k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].push_back(col[i]);
  }
  return out;
}

struct ForecastOptions {
  std::size_t n = 300;
  std::size_t periods = 40;
  std::size_t steps_per_period = 5;
  double alpha = 0.85;
  std::size_t w = 3;
  double theta = 0.7;
  /// Relative Gaussian noise on the targets (0 gives exactly linear data).
  double noise = 0.05;
};

struct ForecastFixture {
  Graph graph;
  TeleportSeries interest;
  RankSequence ranks;
  ForecastDataset data;
};

/// Targets p_i(t) = 100 (0.5 + n sum_l beta_l r̄_i(t - l)) (1 + noise eps),
/// where r̄ is the EWMA (theta) of node i's period-end dynamic rank and
/// beta = (0.6, 0.3, 0.1, 0, ...) over the first w lags.
inline ForecastFixture forecast_fixture(const ForecastOptions& opts, std::uint64_t seed) {
  Graph g = random_graph({opts.n, 6.0, 0.05}, seed);
  TeleportSeries interest = interest_series(
      {opts.n, opts.periods, 0.3, 0.15, 10.0}, seed ^ 0x9e3779b97f4a7c15ULL);

  EvolveParams params;
  params.alpha = opts.alpha;
  params.h = 1.0;
  params.steps_per_period = opts.steps_per_period;
  RankSequence ranks = evolve(g, interest, params);

  ForecastDataset data;
  data.rank = period_end_ranks(ranks, opts.steps_per_period);
  data.volatility = difference_rank(ranks);
  data.pageviews.assign(opts.n, std::vector<double>(opts.periods));

  const double beta[] = {0.6, 0.3, 0.1};
  std::mt19937_64 rng(seed + 17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = static_cast<double>(opts.n);
  for (std::size_t i = 0; i < opts.n; ++i) {
    const auto smooth = ewma(data.rank[i], opts.theta);
    for (std::size_t t = 0; t < opts.periods; ++t) {
      double signal = 0.5;
      for (std::size_t l = 1; l <= std::min<std::size_t>(opts.w, 3); ++l) {
        const std::size_t src = t >= l ? t - l : 0;
        signal += scale * beta[l - 1] * smooth[src];
      }
      data.pageviews[i][t] = 100.0 * signal * (1.0 + opts.noise * gauss(rng));
    }
  }
  return {std::move(g), std::move(interest), std::move(ranks), std::move(data)};
}

}  // namespace dynpr::synth
