#pragma once

// Order-up-to (OUT) replenishment with stochastic lead times.
//
// Sequence of events in period t: the order q_t is placed at the start of the
// period using information up to the end of t-1, receipts arrive, demand D_t
// is served, net stock is observed. Order q_t carries lead time L_t and is
// received in period t + L_t, so later orders can overtake earlier ones.
//
// The target is S_t = Dhat^L_t + TNS and the policy orders
//   q_t = S_t - S_{t-1} + D_{t-1} = Dhat^L_t - Dhat^L_{t-1} + D_{t-1}.
// Orders are not clamped at zero: negative orders are returns. Clamping would
// make the policy nonlinear and the closed-form variance would no longer apply.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bullwhip/errors.hpp"
#include "bullwhip/forecasting.hpp"

namespace bullwhip {

struct OrderRecord {
  std::size_t placed_at = 0;
  double quantity = 0.0;
  int lead_time = 0;
  std::size_t arrives_at = 0;
};

struct CostParams {
  double h = 1.0;  // holding cost per unit per period
  double b = 1.0;  // backlog cost per unit per period

  void validate() const {
    if (!(h >= 0.0) || !(b >= 0.0)) throw ParameterError("costs h and b must be non-negative");
    if (!(b + h > 0.0)) throw ParameterError("at least one of h, b must be positive");
  }
  [[nodiscard]] double critical_fractile() const {
    validate();
    return b / (b + h);
  }
};

struct SimTrace {
  std::vector<double> demand;
  std::vector<int> lead_time;
  std::vector<double> demand_forecast;    // NaN where undefined
  std::vector<double> leadtime_forecast;  // NaN where undefined
  std::vector<double> ltd_forecast;       // NaN where undefined
  std::vector<double> order;
  std::vector<double> receipts;
  std::vector<double> net_stock;
  double tns = 0.0;
  std::size_t first_policy_period = 0;  // orders before this are pipeline pre-seeds
  std::size_t burn_in = 0;              // periods [0, burn_in) are excluded from statistics

  [[nodiscard]] std::size_t size() const { return demand.size(); }
  [[nodiscard]] bool measured(std::size_t t) const { return t >= burn_in; }

  template <class T>
  static std::span<const T> tail(const std::vector<T>& v, std::size_t from) {
    return std::span<const T>(v).subspan(from);
  }
  [[nodiscard]] std::span<const double> measured_demand() const { return tail(demand, burn_in); }
  [[nodiscard]] std::span<const double> measured_orders() const { return tail(order, burn_in); }
  [[nodiscard]] std::span<const double> measured_net_stock() const { return tail(net_stock, burn_in); }
  [[nodiscard]] std::span<const double> measured_ltd_forecast() const { return tail(ltd_forecast, burn_in); }

  [[nodiscard]] std::vector<OrderRecord> order_records() const {
    std::vector<OrderRecord> out;
    out.reserve(size());
    for (std::size_t t = 0; t < size(); ++t)
      out.push_back({t, order[t], lead_time[t], t + static_cast<std::size_t>(lead_time[t])});
    return out;
  }
};

inline std::size_t default_burn_in(const ForecastConfig& cfg) { return 10 * (cfg.n + cfg.m + cfg.l_plus) + 1000; }

namespace detail {

inline void check_series(std::span<const double> demands, std::span<const int> leadtimes, const ForecastConfig& cfg,
                         std::size_t burn_in) {
  cfg.validate();
  if (demands.size() != leadtimes.size()) throw ConfigError("demand and lead-time series differ in length");
  for (int l : leadtimes) {
    if (l < 0 || static_cast<std::size_t>(l) > cfg.l_plus) {
      std::ostringstream msg;
      msg << "lead time " << l << " outside [0, L+=" << cfg.l_plus << "]";
      throw ConfigError(msg.str());
    }
  }
  const std::size_t t0 = cfg.first_forecast_period() + 1;
  if (burn_in < t0) {
    std::ostringstream msg;
    msg << "burn-in " << burn_in << " shorter than the forecast history " << t0 << " (n=" << cfg.n
        << ", m=" << cfg.m << ", L+=" << cfg.l_plus << ")";
    throw ConfigError(msg.str());
  }
  if (demands.size() <= burn_in) {
    std::ostringstream msg;
    msg << "series of " << demands.size() << " periods leaves no measurement window after burn-in " << burn_in;
    throw ConfigError(msg.str());
  }
}

inline double default_initial_order(std::span<const double> demands, std::size_t t0) {
  return std::accumulate(demands.begin(), demands.begin() + static_cast<std::ptrdiff_t>(t0), 0.0) /
         static_cast<double>(t0);
}

}  // namespace detail

// Runs the OUT policy over pre-generated demand and lead-time series.
// Orders before the first forecastable period are pipeline pre-seeds of size
// `initial_order` (default: mean demand over those periods). Net stock is
// anchored so that the inventory position after ordering equals S_t from the
// first policy period on.
inline SimTrace run_out_policy(std::span<const double> demands, std::span<const int> leadtimes,
                               const ForecastConfig& cfg, double tns, std::size_t burn_in,
                               std::optional<double> initial_order = std::nullopt) {
  detail::check_series(demands, leadtimes, cfg, burn_in);
  const std::size_t T = demands.size();
  const std::size_t t0 = cfg.first_forecast_period() + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double seed_order = initial_order.value_or(detail::default_initial_order(demands, t0));

  SimTrace tr;
  tr.demand.assign(demands.begin(), demands.end());
  tr.lead_time.assign(leadtimes.begin(), leadtimes.end());
  tr.demand_forecast.assign(T, nan);
  tr.leadtime_forecast.assign(T, nan);
  tr.ltd_forecast.assign(T, nan);
  tr.order.assign(T, 0.0);
  tr.receipts.assign(T, 0.0);
  tr.net_stock.assign(T, 0.0);
  tr.tns = tns;
  tr.first_policy_period = t0;
  tr.burn_in = burn_in;

  for (std::size_t t = 0; t < T; ++t) {
    if (t >= cfg.n) tr.demand_forecast[t] = ma_demand_forecast(demands, t, cfg);
    if (t >= cfg.m + cfg.l_plus) tr.leadtime_forecast[t] = ma_leadtime_forecast(leadtimes, t, cfg);
    if (t + 1 >= t0) tr.ltd_forecast[t] = ltd_forecast(tr.demand_forecast[t], tr.leadtime_forecast[t]);

    tr.order[t] = t < t0 ? seed_order : tr.ltd_forecast[t] - tr.ltd_forecast[t - 1] + demands[t - 1];

    // Same-period arrivals (L_t = 0) are credited before demand is served.
    const std::size_t arrival = t + static_cast<std::size_t>(leadtimes[t]);
    if (arrival < T) tr.receipts[arrival] += tr.order[t];
  }

  // Net stock up to an additive constant, then the constant that makes the
  // inventory position entering t0 equal S_{t0-1} - D_{t0-1}.
  double ns = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    ns += tr.receipts[t] - demands[t];
    tr.net_stock[t] = ns;
  }
  double in_transit = 0.0;
  for (std::size_t s = 0; s < t0; ++s)
    if (s + static_cast<std::size_t>(leadtimes[s]) >= t0) in_transit += tr.order[s];
  const double position = tr.net_stock[t0 - 1] + in_transit;
  const double offset = (tr.ltd_forecast[t0 - 1] + tns) - demands[t0 - 1] - position;
  for (double& v : tr.net_stock) v += offset;
  return tr;
}

// Order series through explicit S_t = Dhat^L_t + TNS bookkeeping. Agrees with
// run_out_policy().order because a constant TNS cancels in S_t - S_{t-1}.
inline std::vector<double> orders_via_eq8_with_S(std::span<const double> demands, std::span<const int> leadtimes,
                                                 const ForecastConfig& cfg, double tns,
                                                 std::optional<double> initial_order = std::nullopt) {
  const std::size_t t0 = cfg.first_forecast_period() + 1;
  detail::check_series(demands, leadtimes, cfg, t0);
  const double seed_order = initial_order.value_or(detail::default_initial_order(demands, t0));

  auto target = [&](std::size_t t) {
    return ma_leadtime_forecast(leadtimes, t, cfg) * ma_demand_forecast(demands, t, cfg) + tns;
  };

  std::vector<double> q(demands.size(), seed_order);
  double s_prev = target(t0 - 1);
  for (std::size_t t = t0; t < demands.size(); ++t) {
    const double s = target(t);
    q[t] = s - s_prev + demands[t - 1];
    s_prev = s;
  }
  return q;
}

// Nearest-rank quantile: the ceil(p * N)-th smallest value (at least the
// first).
inline double nearest_rank_quantile(std::vector<double> sample, double p) {
  if (sample.empty()) throw ConfigError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("quantile level must be in [0, 1]");
  const auto n = sample.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(rank - 1), sample.end());
  return sample[rank - 1];
}

inline constexpr std::size_t kMinTnsSample = 10'000;

// Target net stock from a TNS = 0 run: the b/(b+h) empirical quantile of the
// shortfall -NS, so NS + TNS >= 0 in that fraction of periods. The net-stock
// distribution under random lead times is generally multi-modal, so no normal
// approximation is made.
inline double tns_empirical(std::span<const double> net_stock, const CostParams& costs) {
  const double fractile = costs.critical_fractile();
  if (net_stock.size() < kMinTnsSample) {
    std::ostringstream msg;
    msg << "TNS estimation needs at least " << kMinTnsSample << " post-burn-in periods, got " << net_stock.size();
    throw ConfigError(msg.str());
  }
  std::vector<double> shortfall(net_stock.size());
  std::transform(net_stock.begin(), net_stock.end(), shortfall.begin(), [](double v) { return -v; });
  return nearest_rank_quantile(std::move(shortfall), fractile);
}

// CSV with columns t,demand,lead_time,ltd_forecast,order,receipts,net_stock.
// Undefined forecasts are written as empty fields.
inline void write_trace_csv(std::ostream& os, const SimTrace& tr, const std::string& header_comment = {}) {
  if (!header_comment.empty()) {
    std::istringstream lines(header_comment);
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
  }
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "t,demand,lead_time,ltd_forecast,order,receipts,net_stock\n";
  for (std::size_t t = 0; t < tr.size(); ++t) {
    os << t << ',' << tr.demand[t] << ',' << tr.lead_time[t] << ',';
    if (!std::isnan(tr.ltd_forecast[t])) os << tr.ltd_forecast[t];
    os << ',' << tr.order[t] << ',' << tr.receipts[t] << ',' << tr.net_stock[t] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace bullwhip
