#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bullwhip/experiments.hpp"
#include "bullwhip/forecasting.hpp"

using namespace bullwhip;

TEST(MaDemandForecast, WindowOfOneIsLastDemand) {
  const std::vector<double> d{3, 1, 4, 1, 5};
  const ForecastConfig cfg{1, 1, 0};
  for (std::size_t t = 1; t <= d.size(); ++t) EXPECT_DOUBLE_EQ(ma_demand_forecast(d, t, cfg), d[t - 1]);
}

TEST(MaDemandForecast, ConstantHistory) {
  const std::vector<double> d(30, 7.25);
  for (std::size_t n : {1u, 4u, 17u, 30u}) EXPECT_DOUBLE_EQ(ma_demand_forecast(d, 30, {n, 1, 0}), 7.25);
}

TEST(MaDemandForecast, ArithmeticMean) {
  const std::vector<double> d{99, 10, 20, 30};
  EXPECT_DOUBLE_EQ(ma_demand_forecast(d, 4, {3, 1, 0}), 20.0);
}

TEST(MaDemandForecast, InsufficientHistoryThrows) {
  const std::vector<double> d{1, 2, 3};
  EXPECT_THROW((void)ma_demand_forecast(d, 2, {3, 1, 0}), HistoryError);
  EXPECT_THROW((void)ma_demand_forecast(d, 4, {3, 1, 0}), HistoryError);
  EXPECT_NO_THROW((void)ma_demand_forecast(d, 3, {3, 1, 0}));
}

TEST(MaDemandForecast, AffineEquivariance) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0, 5);
  std::vector<double> d(50);
  for (auto& v : d) v = z(rng);
  for (double a : {-2.0, 0.5, 3.0})
    for (double b : {-10.0, 0.0, 4.5}) {
      std::vector<double> e(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) e[i] = a * d[i] + b;
      for (std::size_t n : {1u, 5u, 13u})
        EXPECT_NEAR(ma_demand_forecast(e, 40, {n, 1, 0}), a * ma_demand_forecast(d, 40, {n, 1, 0}) + b, 1e-12);
    }
}

TEST(MaLeadtimeForecast, NoLagWindowOne) {
  const std::vector<int> l{3, 8, 2};
  EXPECT_DOUBLE_EQ(ma_leadtime_forecast(l, 3, {1, 1, 0}), 2.0);
}

TEST(MaLeadtimeForecast, Constant) {
  const std::vector<int> l(40, 4);
  for (std::size_t m : {1u, 3u, 9u})
    for (std::size_t lp : {0u, 4u, 15u}) EXPECT_DOUBLE_EQ(ma_leadtime_forecast(l, 40, {1, m, lp}), 4.0);
}

TEST(MaLeadtimeForecast, UsesOnlyLaggedObservations) {
  // t = 20, m = 2, L+ = 15: uses L_4 and L_3.
  std::vector<int> l(20, 0);
  l[20 - 16] = 5;
  l[20 - 17] = 15;
  EXPECT_DOUBLE_EQ(ma_leadtime_forecast(l, 20, {1, 2, 15}), 10.0);
}

TEST(MaLeadtimeForecast, UnrealizedWindowNeverMatters) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(0, 15);
  const ForecastConfig cfg{1, 3, 15};
  std::vector<int> l(60);
  for (auto& v : l) v = u(rng);
  const std::size_t t = 50;
  const double before = ma_leadtime_forecast(l, t, cfg);
  for (int trial = 0; trial < 100; ++trial) {
    for (std::size_t i = 1; i <= cfg.l_plus; ++i) l[t - i] = u(rng);
    EXPECT_DOUBLE_EQ(ma_leadtime_forecast(l, t, cfg), before);
  }
  // history shorter than t is fine as long as the lagged window exists
  const std::vector<int> shortened(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(t - cfg.l_plus));
  EXPECT_DOUBLE_EQ(ma_leadtime_forecast(shortened, t, cfg), before);
}

TEST(MaLeadtimeForecast, InsufficientHistoryThrows) {
  const std::vector<int> l(10, 1);
  EXPECT_THROW((void)ma_leadtime_forecast(l, 5, {1, 2, 4}), HistoryError);
  EXPECT_NO_THROW((void)ma_leadtime_forecast(l, 6, {1, 2, 4}));
  EXPECT_THROW((void)ma_leadtime_forecast(l, 16, {1, 2, 4}), HistoryError);
}

TEST(LtdForecast, Product) {
  EXPECT_DOUBLE_EQ(ltd_forecast(20, 10), 200);
  EXPECT_DOUBLE_EQ(ltd_forecast(-3.5, 0), 0);
  EXPECT_DOUBLE_EQ(ltd_forecast(123.4, 0), 0);
  EXPECT_THROW((void)ltd_forecast(20, -1), ParameterError);
}

TEST(LtdForecast, ComposedFromMovingAverages) {
  const std::vector<double> d{10, 20, 30};
  std::vector<int> l(20, 0);
  l[20 - 16] = 5;
  l[20 - 17] = 15;
  const double df = ma_demand_forecast(d, 3, {3, 2, 15});
  const double lf = ma_leadtime_forecast(l, 20, {3, 2, 15});
  EXPECT_DOUBLE_EQ(ltd_forecast(df, lf), 200.0);
}

TEST(LtdForecast, UnbiasedUnderStationarity) {
  const BmInputs in = paper_inputs(5, 2, 0.7);
  const auto dist = make_two_point_dist(10, 5);
  const SimTrace tr = simulate_replication(in, dist, 1'000'000, std::nullopt, 1000, {77, 0});
  const auto f = tr.measured_ltd_forecast();
  EXPECT_NEAR(sample_mean(f), 10.0 * 20.0, 4 * batch_means_se(f));
}
