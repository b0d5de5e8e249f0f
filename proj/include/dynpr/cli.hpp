#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dynpr/dynrank.hpp"
#include "dynpr/error.hpp"
#include "dynpr/forecast.hpp"
#include "dynpr/graph.hpp"
#include "dynpr/io.hpp"
#include "dynpr/scores.hpp"
#include "dynpr/synth.hpp"
#include "dynpr/teleport.hpp"

namespace dynpr::cli {

/// Everything a single batch command needs. Field names match the flags.
struct RunConfig {
  std::string command;
  std::string graph;
  std::string series;
  double alpha = 0.85;
  double h = 1.0;
  std::size_t steps_per_period = 5;
  double tol = 1e-8;
  std::size_t max_iter = 1000;
  std::size_t w = 3;
  double theta = 0.7;
  std::size_t k = 100;
  std::string output;  // empty: stdout
  std::uint64_t seed = 1;

  // static
  std::size_t period = 0;
  // evolve
  std::string layout = "triples";
  std::size_t every = 1;
  std::string mode = "piecewise";
  double teleport_theta = 0.5;
  // scores
  std::string input;
  std::string kind = "difference";
  std::string at = "last";
  // isim
  std::string a;
  std::string b;
  // forecast
  std::string dataset = "dataset";
  std::size_t partition_cap = 1000;
  double train_fraction = 0.5;
  bool per_node = false;
  // synth
  std::size_t nodes = 1000;
  std::size_t periods = 24;
  double degree = 8.0;
};

namespace detail {

inline std::ifstream open_input(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string("missing required flag --") + flag);
  std::ifstream in(path);
  if (!in) throw InputError(std::string("--") + flag + ": cannot open '" + path + "'");
  return in;
}

inline Graph read_graph(const RunConfig& cfg) {
  auto in = open_input(cfg.graph, "graph");
  return load_edge_list(in);
}

inline TeleportSeries read_series(const RunConfig& cfg, std::size_t n) {
  auto in = open_input(cfg.series, "series");
  return load_teleport_series(in, n);
}

// Writes to --output (or `fallback` when empty) via `emit`.
inline void with_output(const std::string& path, std::ostream& fallback,
                        const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("--output: cannot open '" + path + "' for writing");
  emit(out);
  out.flush();
  if (!out) throw Error("--output: write to '" + path + "' failed");
}

inline EvolveParams evolve_params(const RunConfig& cfg) {
  EvolveParams p;
  p.alpha = cfg.alpha;
  p.h = cfg.h;
  p.steps_per_period = cfg.steps_per_period;
  p.sample_every = cfg.every;
  if (cfg.mode == "piecewise") {
    p.mode = TeleportMode::piecewise_constant;
  } else if (cfg.mode == "ewma") {
    p.mode = TeleportMode::ewma;
  } else {
    throw ConfigError("--mode must be 'piecewise' or 'ewma'");
  }
  p.teleport_theta = cfg.teleport_theta;
  validate(p);
  return p;
}

inline SequenceLayout parse_layout(const std::string& s) {
  if (s == "triples") return SequenceLayout::triples;
  if (s == "dense") return SequenceLayout::dense;
  throw ConfigError("--layout must be 'triples' or 'dense'");
}

inline void run_static(const RunConfig& cfg, std::ostream& out) {
  const Graph g = read_graph(cfg);
  std::vector<double> v;
  if (cfg.series.empty()) {
    v.assign(g.num_nodes(), 1.0 / static_cast<double>(g.num_nodes()));
  } else {
    const TeleportSeries s = read_series(cfg, g.num_nodes());
    if (cfg.period >= s.num_periods()) throw ConfigError("--period beyond series length");
    v = s.distribution(cfg.period);
  }
  StaticOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  const StaticResult r = static_pagerank(g, cfg.alpha, v, opts);
  with_output(cfg.output, out, [&](std::ostream& os) { write_scores(r.scores, os); });
}

inline void run_evolve(const RunConfig& cfg, std::ostream& out) {
  const Graph g = read_graph(cfg);
  const TeleportSeries s = read_series(cfg, g.num_nodes());
  EvolveParams p = evolve_params(cfg);
  const std::size_t every = p.sample_every;
  p.sample_every = 1;
  const SequenceLayout layout = parse_layout(cfg.layout);
  const RankSequence seq = evolve(g, s, p);
  with_output(cfg.output, out,
              [&](std::ostream& os) { write_rank_sequence(seq, os, layout, every); });
}

inline void run_scores(const RunConfig& cfg, std::ostream& out) {
  auto in = open_input(cfg.input, "input");
  const RankSequence seq = read_rank_sequence(in);
  ScoreVector score;
  if (cfg.kind == "transient") {
    if (cfg.at == "last") {
      score = transient_rank(seq, last_sample);
    } else {
      double t = 0.0;
      try {
        t = std::stod(cfg.at);
      } catch (const std::exception&) {
        throw ConfigError("--at must be a sample time or 'last'");
      }
      score = transient_rank(seq, t);
    }
  } else if (cfg.kind == "cumulative") {
    score = cumulative_rank(seq);
  } else if (cfg.kind == "difference") {
    score = difference_rank(seq);
  } else if (cfg.kind == "mean") {
    score = reduce_columns(seq, reducers::mean);
  } else if (cfg.kind == "min") {
    score = reduce_columns(seq, reducers::minimum);
  } else if (cfg.kind == "max") {
    score = reduce_columns(seq, reducers::maximum);
  } else if (cfg.kind == "variance") {
    score = reduce_columns(seq, reducers::variance);
  } else {
    throw ConfigError("--kind must be one of transient, cumulative, difference, mean, min, max, "
                      "variance");
  }
  with_output(cfg.output, out, [&](std::ostream& os) { write_scores(score, os); });
}

inline void run_isim(const RunConfig& cfg, std::ostream& out) {
  auto in_a = open_input(cfg.a, "a");
  auto in_b = open_input(cfg.b, "b");
  const ScoreVector a = read_scores(in_a);
  const ScoreVector b = read_scores(in_b);
  const std::size_t k = std::min(cfg.k, a.size());
  if (k < cfg.k) warn("--k " + std::to_string(cfg.k) + " exceeds node count; using " + std::to_string(k));
  const SimilarityProfile p = intersection_similarity(a, b, k);
  with_output(cfg.output, out, [&](std::ostream& os) { write_profile(p, os); });
}

inline void run_forecast(const RunConfig& cfg, std::ostream& out) {
  const Graph g = read_graph(cfg);
  const TeleportSeries s = read_series(cfg, g.num_nodes());
  EvolveParams p = evolve_params(cfg);
  p.sample_every = 1;
  const RankSequence seq = evolve(g, s, p);

  ForecastDataset data;
  data.name = cfg.dataset;
  data.rank = synth::period_end_ranks(seq, cfg.steps_per_period);
  data.volatility = difference_rank(seq);
  data.pageviews.assign(g.num_nodes(), std::vector<double>(s.num_periods()));
  for (std::size_t t = 0; t < s.num_periods(); ++t) {
    const auto counts = s.counts(t);
    for (std::size_t i = 0; i < counts.size(); ++i) data.pageviews[i][t] = counts[i];
  }

  CompareOptions opts;
  opts.w = cfg.w;
  opts.theta = cfg.theta;
  opts.partition_cap = cfg.partition_cap;
  opts.train_fraction = cfg.train_fraction;
  opts.per_node = cfg.per_node;
  const ForecastReport report = compare_models(data, opts);
  with_output(cfg.output, out, [&](std::ostream& os) { write_report(report, os); });
}

inline void run_synth(const RunConfig& cfg, std::ostream& out) {
  const Graph g = synth::random_graph({cfg.nodes, cfg.degree, 0.05}, cfg.seed);
  const TeleportSeries s =
      synth::interest_series({cfg.nodes, cfg.periods, 0.3, 0.1, 12.0}, cfg.seed + 1);
  if (cfg.output.empty()) {
    write_edge_list(g, out);
    out << "# --- series ---\n";
    write_teleport_series(s, out);
    return;
  }
  with_output(cfg.output + ".edges", out, [&](std::ostream& os) { write_edge_list(g, os); });
  with_output(cfg.output + ".series", out, [&](std::ostream& os) { write_teleport_series(s, os); });
}

}  // namespace detail

/// Runs one command. Returns 0 on success; on failure writes a diagnostic to
/// `err` and returns 2 for configuration/usage problems, 1 otherwise.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (cfg.command == "static") {
      detail::run_static(cfg, out);
    } else if (cfg.command == "evolve") {
      detail::run_evolve(cfg, out);
    } else if (cfg.command == "scores") {
      detail::run_scores(cfg, out);
    } else if (cfg.command == "isim") {
      detail::run_isim(cfg, out);
    } else if (cfg.command == "forecast") {
      detail::run_forecast(cfg, out);
    } else if (cfg.command == "synth") {
      detail::run_synth(cfg, out);
    } else {
      throw ConfigError("unknown command '" + cfg.command +
                        "' (expected static, evolve, scores, isim, forecast, synth)");
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dynpr::cli
