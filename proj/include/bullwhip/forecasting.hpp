#pragma once

// Moving-average forecasts. Series are indexed by absolute period number:
// history[t] is the observation of period t.

#include <cstddef>
#include <span>
#include <sstream>

#include "bullwhip/errors.hpp"

namespace bullwhip {

struct ForecastConfig {
  std::size_t n = 1;       // demand window
  std::size_t m = 1;       // lead-time window
  std::size_t l_plus = 0;  // lead times younger than this are never used

  void validate() const {
    if (n < 1) throw ConfigError("demand window n must be >= 1");
    if (m < 1) throw ConfigError("lead-time window m must be >= 1");
  }

  // First period whose demand and lead-time forecasts are both defined.
  [[nodiscard]] std::size_t first_forecast_period() const { return n > m + l_plus ? n : m + l_plus; }
};

// (1/n) sum_{i=1..n} D_{t-i}. Used unchanged as the forecast for every
// future period t+j.
inline double ma_demand_forecast(std::span<const double> history, std::size_t t, const ForecastConfig& cfg) {
  cfg.validate();
  if (t < cfg.n || t > history.size()) {
    std::ostringstream msg;
    msg << "demand forecast at t=" << t << " needs periods [" << (t < cfg.n ? 0 : t - cfg.n) << ", " << t
        << ") but only " << history.size() << " periods recorded (n=" << cfg.n << ")";
    throw HistoryError(msg.str());
  }
  double sum = 0.0;
  for (std::size_t i = 1; i <= cfg.n; ++i) sum += history[t - i];
  return sum / static_cast<double>(cfg.n);
}

// (1/m) sum_{i=1..m} L_{t-i-L+}. Only lead times at least L+ periods old
// enter, so every referenced order has been received.
inline double ma_leadtime_forecast(std::span<const int> lt_history, std::size_t t, const ForecastConfig& cfg) {
  cfg.validate();
  const std::size_t lag = cfg.l_plus;
  if (t < cfg.m + lag || t - lag > lt_history.size()) {
    std::ostringstream msg;
    msg << "lead-time forecast at t=" << t << " needs lead times of periods t-" << lag + cfg.m << "..t-" << lag + 1
        << " (m=" << cfg.m << ", L+=" << lag << "), recorded: " << lt_history.size();
    throw HistoryError(msg.str());
  }
  long long sum = 0;
  for (std::size_t i = 1; i <= cfg.m; ++i) sum += lt_history[t - i - lag];
  return static_cast<double>(sum) / static_cast<double>(cfg.m);
}

// Lead-time-demand forecast: forecast lead time times the per-period demand
// forecast. Not rounded.
inline double ltd_forecast(double demand_f, double leadtime_f) {
  if (leadtime_f < 0.0) throw ParameterError("lead-time forecast must be non-negative");
  return leadtime_f * demand_f;
}

}  // namespace bullwhip
