#include <gtest/gtest.h>

#include <random>

#include "dynpr/forecast.hpp"
#include "dynpr/synth.hpp"
#include "oracle.hpp"

using namespace dynpr;

namespace {

struct CaptureWarnings {
  std::vector<std::string> seen;
  WarningSink saved;
  CaptureWarnings() : saved(warning_sink()) {
    warning_sink() = [this](std::string_view m) { seen.emplace_back(m); };
  }
  ~CaptureWarnings() { warning_sink() = saved; }
};

}  // namespace

TEST(Ewma, Examples) {
  const std::vector<double> f{3, 1, 4, 1, 5};
  EXPECT_EQ(ewma(f, 1.0), f);
  const std::vector<double> flat(6, 2.5);
  EXPECT_EQ(ewma(flat, 0.3), flat);
  EXPECT_EQ(ewma(std::vector<double>{0, 1}, 0.5), (std::vector<double>{0, 0.5}));
  EXPECT_THROW(ewma(std::vector<double>{}, 0.5), InputError);
  EXPECT_THROW(ewma(f, 0.0), ConfigError);
  EXPECT_THROW(ewma(f, 1.5), ConfigError);
}

TEST(Ewma, FeatureSeriesChecksTimes) {
  FeatureSeries s{4, {0, 1, 2}, {1, 2, 3}, FeatureSource::dynamic_rank};
  const auto out = ewma(s, 0.5);
  EXPECT_EQ(out.node, 4u);
  EXPECT_EQ(out.source, FeatureSource::dynamic_rank);
  EXPECT_EQ(out.values, (std::vector<double>{1, 1.5, 2.25}));
  s.times = {0, 2, 1};
  EXPECT_THROW(ewma(s, 0.5), InputError);
}

TEST(Ewma, StaysWithinRange) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> f(1 + trial % 30);
    for (double& x : f) x = unit(rng);
    const double theta = 0.01 + 0.99 * std::abs(unit(rng)) / 5.0;
    const auto out = ewma(f, theta);
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    for (double x : out) {
      EXPECT_GE(x, *lo - 1e-12);
      EXPECT_LE(x, *hi + 1e-12);
    }
  }
}

TEST(Smape, Examples) {
  EXPECT_EQ(smape(std::vector<double>{2, 3}, std::vector<double>{2, 3}), 0.0);
  EXPECT_EQ(smape(std::vector<double>{0}, std::vector<double>{1}), 2.0);
  EXPECT_DOUBLE_EQ(smape(std::vector<double>{1, 3}, std::vector<double>{1, 1}), 0.5);
  EXPECT_EQ(smape(std::vector<double>{0, 0}, std::vector<double>{0, 0}), 0.0);
  EXPECT_THROW(smape(std::vector<double>{1}, std::vector<double>{1, 2}), DimensionError);
  EXPECT_THROW(smape(std::vector<double>{}, std::vector<double>{}), InputError);
}

TEST(Smape, SymmetricScaleInvariantBounded) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(1 + trial % 17), b(a.size());
    for (double& x : a) x = unit(rng);
    for (double& x : b) x = trial % 5 == 0 ? 0.0 : unit(rng);
    const double s = smape(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 2.0);
    EXPECT_NEAR(s, smape(b, a), 1e-15);
    const double c = 0.001 + std::abs(unit(rng));
    std::vector<double> ca(a), cb(b);
    for (double& x : ca) x *= c;
    for (double& x : cb) x *= c;
    EXPECT_NEAR(smape(ca, cb), s, 1e-12);
  }
}

TEST(LeastSquares, TwoPointClosedForm) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 2, 1;
  const Eigen::VectorXd y = Eigen::Vector2d(2, 4);
  const auto r = solve_least_squares(a, y);
  EXPECT_NEAR(r.coefficients[0], 2.0, 1e-12);
  EXPECT_NEAR(r.coefficients[1], 0.0, 1e-12);

  ForecastModel model;
  model.w = 1;
  model.sources = {FeatureSource::pageviews};
  model.b = r.coefficients;
  const std::vector<std::vector<double>> lags{{3.0}};
  EXPECT_NEAR(predict_next(model, lags), 6.0, 1e-12);
}

TEST(LeastSquares, RankDeficientUsesMinimumNorm) {
  CaptureWarnings warnings;
  Eigen::MatrixXd a(3, 2);
  a << 1, 1, 2, 2, 3, 3;  // duplicate columns
  const Eigen::VectorXd y = Eigen::Vector3d(2, 4, 6);
  const auto r = solve_least_squares(a, y);
  EXPECT_EQ(r.rank, 1u);
  EXPECT_NEAR(r.coefficients[0], 1.0, 1e-12);
  EXPECT_NEAR(r.coefficients[1], 1.0, 1e-12);
  ASSERT_EQ(warnings.seen.size(), 1u);
  EXPECT_NE(warnings.seen[0].find("rank-deficient"), std::string::npos);
  EXPECT_THROW(solve_least_squares(Eigen::MatrixXd(1, 2), Eigen::VectorXd(1)), InputError);
}

TEST(Fit, ExactRecoveryOfLinearTargets) {
  // target(t) = 3 + 2 f̄(t-1) - 0.5 f̄(t-2) with f̄ = ewma(f, 0.6)
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  std::vector<NodeSeries> nodes;
  for (NodeId id = 0; id < 4; ++id) {
    std::vector<double> f(15);
    for (double& x : f) x = unit(rng);
    const auto s = ewma(f, 0.6);
    std::vector<double> target(15, 0.0);
    for (std::size_t t = 2; t < 15; ++t) target[t] = 3 + 2 * s[t - 1] - 0.5 * s[t - 2];
    nodes.push_back({id, {f}, target});
  }
  const ForecastSpec spec{2, 0.6, {FeatureSource::pageviews}};
  const auto model = fit(spec, nodes);
  ASSERT_EQ(model.b.size(), 3u);
  EXPECT_NEAR(model.b[0], 2.0, 1e-9);
  EXPECT_NEAR(model.b[1], -0.5, 1e-9);
  EXPECT_NEAR(model.b[2], 3.0, 1e-9);
  EXPECT_LE(model.training_residual, 1e-9);
  for (const auto& node : nodes) {
    const auto pred = predict_range(model, node, 2, 15);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      EXPECT_LE(std::abs(pred[i] - node.target[i + 2]), 1e-8 * std::abs(node.target[i + 2]));
    }
  }
}

TEST(Fit, ConstantTargetsGiveInterceptOnly) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<NodeSeries> nodes;
  for (NodeId id = 0; id < 3; ++id) {
    std::vector<double> f(12), g(12);
    for (double& x : f) x = unit(rng);
    for (double& x : g) x = unit(rng);
    nodes.push_back({id, {f, g}, std::vector<double>(12, 7.5)});
  }
  const ForecastSpec spec{3, 0.7, {FeatureSource::pageviews, FeatureSource::dynamic_rank}};
  const auto model = fit(spec, nodes);
  for (std::size_t c = 0; c + 1 < model.b.size(); ++c) EXPECT_NEAR(model.b[c], 0.0, 1e-8);
  EXPECT_NEAR(model.b.back(), 7.5, 1e-8);

  // Same answer from the normal equations.
  auto [a, y] = build_design(spec, nodes, 0, 12);
  std::vector<std::vector<double>> rows(a.rows(), std::vector<double>(a.cols()));
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) rows[r][c] = a(r, c);
  }
  const auto ref = oracle::normal_equations(rows, oracle::to_std(y));
  for (std::size_t c = 0; c < ref.size(); ++c) EXPECT_NEAR(model.b[c], ref[c], 1e-8);
}

TEST(Fit, ResidualNeverWorseThanNormalEquations) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<NodeSeries> nodes;
    const std::size_t len = 10 + trial % 7;
    for (NodeId id = 0; id < 5; ++id) {
      std::vector<double> f(len), r(len), target(len);
      for (std::size_t t = 0; t < len; ++t) {
        f[t] = 10 * unit(rng);
        r[t] = unit(rng);
        target[t] = 5 * unit(rng);
      }
      nodes.push_back({id, {f, r}, target});
    }
    const ForecastSpec spec{1 + static_cast<std::size_t>(trial % 3), 0.3 + 0.02 * trial,
                            {FeatureSource::pageviews, FeatureSource::dynamic_rank}};
    const auto model = fit(spec, nodes);
    auto [a, y] = build_design(spec, nodes, 0, len);
    std::vector<std::vector<double>> rows(a.rows(), std::vector<double>(a.cols()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) rows[i][c] = a(i, c);
    }
    const auto ref = oracle::normal_equations(rows, oracle::to_std(y));
    const double ref_res = (a * oracle::to_eigen(ref) - y).norm();
    EXPECT_LE(model.training_residual, ref_res * (1 + 1e-8));
  }
}

TEST(Fit, Preconditions) {
  const NodeSeries short_node{0, {{1, 2, 3}}, {1, 2, 3}};
  EXPECT_THROW(fit({3, 0.7, {FeatureSource::pageviews}}, std::span(&short_node, 1)), InputError);
  EXPECT_THROW(fit({0, 0.7, {FeatureSource::pageviews}}, std::span(&short_node, 1)), ConfigError);
  const NodeSeries ragged{0, {{1, 2, 3, 4, 5}}, {1, 2, 3}};
  EXPECT_THROW(fit({1, 0.7, {FeatureSource::pageviews}}, std::span(&ragged, 1)), DimensionError);
}

TEST(PredictNext, Errors) {
  ForecastModel model;
  model.w = 2;
  model.sources = {FeatureSource::pageviews};
  model.b = {0, 0, 4.0};
  const std::vector<std::vector<double>> lags{{1.0, 2.0}};
  EXPECT_EQ(predict_next(model, lags), 4.0);
  const std::vector<std::vector<double>> short_lags{{1.0}};
  EXPECT_THROW(predict_next(model, short_lags), InputError);
  const std::vector<std::vector<double>> two_sources{{1.0, 2.0}, {1.0, 2.0}};
  EXPECT_THROW(predict_next(model, two_sources), InputError);
}

TEST(Partition, TruncatesToHalf) {
  CaptureWarnings warnings;
  const ScoreVector d({0.5, 0.1, 0.9, 0.3, 0.7}, ScoreKind::difference);
  const auto [hot, cold] = volatility_partition(d, 1000);
  EXPECT_EQ(hot, (std::vector<NodeId>{2, 4}));
  EXPECT_EQ(cold, (std::vector<NodeId>{1, 3}));
  EXPECT_EQ(warnings.seen.size(), 1u);
}

TEST(CompareModels, ReportShape) {
  const auto fx = synth::forecast_fixture({60, 20, 5, 0.85, 3, 0.7, 0.05}, 5);
  CompareOptions opts;
  opts.partition_cap = 10;
  const auto report = compare_models(fx.data, opts);
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].partition, "non-stationary");
  EXPECT_EQ(report.rows[0].model, "dynamic");
  EXPECT_EQ(report.rows[1].partition, "non-stationary");
  EXPECT_EQ(report.rows[1].model, "base");
  EXPECT_EQ(report.rows[2].partition, "stationary");
  EXPECT_EQ(report.rows[3].partition, "stationary");
  for (const auto& row : report.rows) {
    EXPECT_GE(row.smape, 0.0);
    EXPECT_LE(row.smape, 2.0);
  }
  EXPECT_EQ(report.volatile_nodes.size(), 10u);
}

TEST(CompareModels, IdenticalFeatureSetsGiveIdenticalColumns) {
  const auto fx = synth::forecast_fixture({60, 20, 5, 0.85, 3, 0.7, 0.05}, 6);
  CompareOptions opts;
  opts.partition_cap = 10;
  opts.base_sources = opts.dynamic_sources;
  const auto report = compare_models(fx.data, opts);
  EXPECT_EQ(report.lookup("non-stationary", "dynamic"), report.lookup("non-stationary", "base"));
  EXPECT_EQ(report.lookup("stationary", "dynamic"), report.lookup("stationary", "base"));
}

TEST(CompareModels, RankSignalHelps) {
  const auto fx = synth::forecast_fixture({120, 30, 5, 0.85, 3, 0.7, 0.05}, 9);
  CompareOptions opts;
  opts.partition_cap = 30;
  const auto report = compare_models(fx.data, opts);
  EXPECT_LT(report.lookup("non-stationary", "dynamic"), report.lookup("non-stationary", "base"));
}

TEST(CompareModels, PerNodeMode) {
  const auto fx = synth::forecast_fixture({40, 40, 5, 0.85, 2, 0.7, 0.0}, 3);
  CompareOptions opts;
  opts.w = 2;
  opts.partition_cap = 5;
  opts.per_node = true;
  const auto report = compare_models(fx.data, opts);
  EXPECT_LE(report.lookup("non-stationary", "dynamic"), 1e-6);
}

TEST(CompareModels, ConfigurationErrors) {
  auto fx = synth::forecast_fixture({20, 8, 5, 0.85, 3, 0.7, 0.05}, 1);
  CompareOptions opts;
  opts.w = 6;  // 8 periods * 0.5 = 4 training periods, not enough
  EXPECT_THROW(compare_models(fx.data, opts), ConfigError);
  opts.w = 3;
  opts.train_fraction = 1.0;
  EXPECT_THROW(compare_models(fx.data, opts), ConfigError);
  fx.data.rank.pop_back();
  EXPECT_THROW(compare_models(fx.data, CompareOptions{}), DimensionError);
}
