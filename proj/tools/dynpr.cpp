// Batch front-end: static rank, dynamic evolution, scores, ranking comparison,
// forecast evaluation and synthetic data.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dynpr/cli.hpp"

namespace {

using dynpr::cli::RunConfig;

void add_rank_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--alpha", cfg.alpha, "Damping: probability of following an out-edge")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
}

void add_evolve_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--graph", cfg.graph, "Edge list (`src dst` per line, optional `%n <count>`)")
      ->required();
  cmd->add_option("--series", cfg.series, "Interest counts (`period node count` per line)")
      ->required();
  add_rank_flags(cmd, cfg);
  cmd->add_option("--step", cfg.h, "Euler time step in (0, 1]; 1 makes each step a power iteration")
      ->capture_default_str();
  cmd->add_option("--steps-per-period", cfg.steps_per_period,
                  "Euler steps per period of interest data (five steps before new data arrives)")
      ->capture_default_str();
  cmd->add_option("--mode", cfg.mode, "Teleportation between periods: piecewise | ewma")
      ->capture_default_str();
  cmd->add_option("--teleport-theta", cfg.teleport_theta,
                  "Weight of the newest period in ewma mode")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic-teleportation PageRank toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* st = app.add_subcommand("static", "Static PageRank by Richardson iteration");
  st->add_option("--graph", cfg.graph, "Edge list")->required();
  st->add_option("--series", cfg.series, "Interest counts; omitted means uniform teleportation");
  st->add_option("--period", cfg.period, "Which period of --series to teleport to")
      ->capture_default_str();
  add_rank_flags(st, cfg);
  st->add_option("--tol", cfg.tol, "1-norm change between iterates that stops the solver")
      ->capture_default_str();
  st->add_option("--max-iter", cfg.max_iter, "Iteration limit")->capture_default_str();

  auto* ev = app.add_subcommand("evolve", "Integrate dynamic PageRank with forward Euler");
  add_evolve_flags(ev, cfg);
  ev->add_option("--layout", cfg.layout, "Output layout: triples | dense")->capture_default_str();
  ev->add_option("--every", cfg.every, "Write every k-th column")->capture_default_str();

  auto* sc = app.add_subcommand("scores", "Derive per-node scores from a stored rank sequence");
  sc->add_option("--input", cfg.input, "Rank sequence written by `evolve`")->required();
  sc->add_option("--kind", cfg.kind,
                 "transient | cumulative | difference | mean | min | max | variance")
      ->capture_default_str();
  sc->add_option("--at", cfg.at, "Sample time for transient scores, or 'last'")
      ->capture_default_str();

  auto* is = app.add_subcommand("isim", "Intersection similarity profile of two score files");
  is->add_option("--a", cfg.a, "First score file")->required();
  is->add_option("--b", cfg.b, "Second score file")->required();
  is->add_option("--k", cfg.k, "Profile depth")->capture_default_str();

  auto* fc = app.add_subcommand("forecast", "Compare base and dynamic-rank forecasting models");
  add_evolve_flags(fc, cfg);
  fc->add_option("--w", cfg.w, "Number of lagged smoothed values per feature")
      ->capture_default_str();
  fc->add_option("--theta", cfg.theta,
                 "Feature smoothing weight (0.7 suits dense hourly data, 0.3 sparse data)")
      ->capture_default_str();
  fc->add_option("--partition-cap", cfg.partition_cap,
                 "Nodes per volatile/stable partition (truncated to n/2)")
      ->capture_default_str();
  fc->add_option("--train-fraction", cfg.train_fraction, "Share of periods used for fitting")
      ->capture_default_str();
  fc->add_flag("--per-node", cfg.per_node, "Fit one model per node instead of a pooled model");
  fc->add_option("--dataset", cfg.dataset, "Dataset label for the report")->capture_default_str();

  auto* sy = app.add_subcommand("synth", "Seeded synthetic graph and interest series");
  sy->add_option("--nodes", cfg.nodes, "Node count")->capture_default_str();
  sy->add_option("--periods", cfg.periods, "Number of periods")->capture_default_str();
  sy->add_option("--degree", cfg.degree, "Mean out-degree")->capture_default_str();
  sy->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();

  for (auto* cmd : {st, ev, sc, is, fc, sy}) {
    cmd->add_option("--output", cfg.output,
                    cmd == sy ? "Path prefix: writes <prefix>.edges and <prefix>.series"
                              : "Output file (default stdout)");
  }

  CLI11_PARSE(app, argc, argv);
  cfg.command = app.get_subcommands().front()->get_name();
  return dynpr::cli::run(cfg);
}
