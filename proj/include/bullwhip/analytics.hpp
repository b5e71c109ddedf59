#pragma once

// Closed-form bullwhip measure BM = Var q / Var D for the OUT policy with
// AR(1) demand forecast by an n-period moving average and iid lead times
// forecast by an m-period moving average of L+-lagged observations:
//
//   BM = 2 sL2 / (n^2 m^2) * ( m (1 - rho^n) + n (1 + rho) / (1 - rho)
//                              - (1 + rho^2)(1 - rho^n) / (1 - rho)^2 )
//      + 2 sL2 muD^2 / (sD^2 m^2)
//      + (2 muL^2 / n^2 + 2 muL / n)(1 - rho^n)
//      + 1
//
// together with its special cases, limits and the stationary-point
// conditions in rho.

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "bullwhip/errors.hpp"
#include "bullwhip/stochastic_processes.hpp"

namespace bullwhip {

struct BmInputs {
  DemandParams demand;
  double mu_l = 0.0;
  double sigma_l2 = 0.0;
  std::size_t n = 1;
  std::size_t m = 1;

  void validate() const {
    if (!(mu_l >= 0.0) || !std::isfinite(mu_l)) throw ParameterError("mu_L must be non-negative");
    if (!(sigma_l2 >= 0.0) || !std::isfinite(sigma_l2)) throw ParameterError("sigma_L^2 must be non-negative");
    if (n < 1 || m < 1) throw ParameterError("moving-average windows n and m must be >= 1");
  }

  [[nodiscard]] double rho() const { return demand.rho(); }
  [[nodiscard]] BmInputs with_rho(double rho) const {
    BmInputs out = *this;
    out.demand = demand.with_rho(rho);
    return out;
  }
  [[nodiscard]] BmInputs with_windows(std::size_t n_new, std::size_t m_new) const {
    BmInputs out = *this;
    out.n = n_new;
    out.m = m_new;
    return out;
  }
};

struct BmResult {
  double value = 0.0;
  // Lead-time variability interacting with demand forecasting and correlation.
  double lead_time_variability = 0.0;
  // Lead-time forecasting: 2 sL2 muD^2 / (sD^2 m^2).
  double lead_time_forecast = 0.0;
  // Demand forecasting: (2 muL^2/n^2 + 2 muL/n)(1 - rho^n).
  double demand_forecast = 0.0;

  [[nodiscard]] double component_sum() const { return lead_time_variability + lead_time_forecast + demand_forecast; }
};

// Within this distance of rho = +-1, bm_analytic evaluates the limit forms.
inline constexpr double kRhoSeam = 1e-9;

namespace detail {

inline double sq(double x) { return x * x; }
inline double dbl(std::size_t k) { return static_cast<double>(k); }

inline double lead_time_forecast_term(const BmInputs& in) {
  const double mu_d = in.demand.mu_d();
  const double s_d = in.demand.sigma_d();
  return 2.0 * in.sigma_l2 * mu_d * mu_d / (s_d * s_d * sq(dbl(in.m)));
}

inline double demand_forecast_term(double mu_l, std::size_t n, double rho) {
  const double nd = dbl(n);
  return (2.0 * mu_l * mu_l / (nd * nd) + 2.0 * mu_l / nd) * (1.0 - std::pow(rho, nd));
}

inline void check_open_rho(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    std::ostringstream msg;
    msg << "rho=" << rho << " is outside (-1, 1); use the rho -> +-1 limit forms";
    throw DomainError(msg.str());
  }
}

// n (1 + rho)/(1 - rho) - (1 + rho^2)(1 - rho^n)/(1 - rho)^2. Near rho = 1 the
// equivalent form (1 + rho) h + rho g is summed directly, with
// g = sum_{k<n} rho^k and h = sum_{k<n} sum_{j<k} rho^j.
inline double variability_tail(std::size_t n, double rho, double one_minus, double rn) {
  if (one_minus >= 1e-2) {
    const double nd = dbl(n);
    return nd * (1.0 + rho) / one_minus - (1.0 + rho * rho) * (1.0 - rn) / (one_minus * one_minus);
  }
  double g = 0.0;
  double h = 0.0;
  double power = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    h += g;
    g += power;
    power *= rho;
  }
  return (1.0 + rho) * h + rho * g;
}

}  // namespace detail

// rho -> 1: 1 + 2 sL2 (muD^2 + sD^2) / (m^2 sD^2). Independent of n.
inline double bm_rho_to_1(const BmInputs& in) {
  in.validate();
  const double md = in.demand.mu_d();
  const double sd2 = in.demand.variance();
  const double m = detail::dbl(in.m);
  return 1.0 + 2.0 * in.sigma_l2 * (md * md + sd2) / (m * m * sd2);
}

// rho -> -1, any n.
inline double bm_rho_to_minus1_general(const BmInputs& in) {
  in.validate();
  const double md = in.demand.mu_d();
  const double sd2 = in.demand.variance();
  const double m = detail::dbl(in.m);
  const double n = detail::dbl(in.n);
  const double sign = (in.n % 2 == 0) ? 1.0 : -1.0;  // (-1)^n
  return 1.0 + 2.0 * md * md * in.sigma_l2 / (m * m * sd2) - (2.0 * m - 1.0) * (sign - 1.0) * in.sigma_l2 / (m * m * n * n) -
         2.0 * (sign - 1.0) * in.mu_l * (in.mu_l + n) / (n * n);
}

inline double bm_rho_to_minus1_even(const BmInputs& in) {
  in.validate();
  const double md = in.demand.mu_d();
  const double m = detail::dbl(in.m);
  return 1.0 + 2.0 * md * md * in.sigma_l2 / (m * m * in.demand.variance());
}

inline double bm_rho_to_minus1_odd(const BmInputs& in) {
  in.validate();
  const double md = in.demand.mu_d();
  const double m = detail::dbl(in.m);
  const double n = detail::dbl(in.n);
  return 1.0 + 2.0 * md * md * in.sigma_l2 / (m * m * in.demand.variance()) +
         2.0 * (2.0 * m - 1.0) * in.sigma_l2 / (m * m * n * n) + 4.0 * in.mu_l * (in.mu_l + n) / (n * n);
}

// rho -> -1 using the parity-specific form for n.
inline double bm_rho_to_minus1(const BmInputs& in) {
  return in.n % 2 == 0 ? bm_rho_to_minus1_even(in) : bm_rho_to_minus1_odd(in);
}

namespace detail {

inline BmResult bm_at_plus_one(const BmInputs& in) {
  BmResult r;
  r.lead_time_variability = 2.0 * in.sigma_l2 / sq(dbl(in.m));
  r.lead_time_forecast = lead_time_forecast_term(in);
  r.demand_forecast = 0.0;
  r.value = bm_rho_to_1(in);
  return r;
}

inline BmResult bm_at_minus_one(const BmInputs& in) {
  BmResult r;
  const double odd = (in.n % 2 == 0) ? 0.0 : 2.0;  // 1 - (-1)^n
  const double n = dbl(in.n);
  const double m = dbl(in.m);
  r.lead_time_variability = in.sigma_l2 * (2.0 * m - 1.0) * odd / (n * n * m * m);
  r.lead_time_forecast = lead_time_forecast_term(in);
  r.demand_forecast = (2.0 * in.mu_l * in.mu_l / (n * n) + 2.0 * in.mu_l / n) * odd;
  r.value = bm_rho_to_minus1_general(in);
  return r;
}

}  // namespace detail

inline BmResult bm_analytic(const BmInputs& in) {
  in.validate();
  const double rho = in.rho();
  detail::check_open_rho(rho);
  if (1.0 - rho < kRhoSeam) return detail::bm_at_plus_one(in);
  if (1.0 + rho < kRhoSeam) return detail::bm_at_minus_one(in);

  const double n = detail::dbl(in.n);
  const double m = detail::dbl(in.m);
  const double rn = std::pow(rho, n);
  const double one_minus = 1.0 - rho;

  BmResult r;
  r.lead_time_variability =
      2.0 * in.sigma_l2 / (n * n * m * m) * (m * (1.0 - rn) + detail::variability_tail(in.n, rho, one_minus, rn));
  r.lead_time_forecast = detail::lead_time_forecast_term(in);
  r.demand_forecast = detail::demand_forecast_term(in.mu_l, in.n, rho);
  r.value = r.lead_time_variability + r.lead_time_forecast + r.demand_forecast + 1.0;
  return r;
}

// Deterministic lead time L: (2 L^2/n^2 + 2 L/n)(1 - rho^n) + 1.
inline double bm_constant_leadtime(double lead_time, std::size_t n, double rho) {
  detail::check_open_rho(rho);
  if (!(lead_time >= 0.0)) throw ParameterError("lead time must be non-negative");
  if (n < 1) throw ParameterError("n must be >= 1");
  return detail::demand_forecast_term(lead_time, n, rho) + 1.0;
}

// n -> infinity.
inline double bm_limit_n_inf(const BmInputs& in) {
  in.validate();
  return 1.0 + detail::lead_time_forecast_term(in);
}

// m -> infinity.
inline double bm_limit_m_inf(const BmInputs& in) {
  in.validate();
  detail::check_open_rho(in.rho());
  return 1.0 + detail::demand_forecast_term(in.mu_l, in.n, in.rho());
}

// n, m -> infinity.
inline constexpr double bm_limit_nm_inf() { return 1.0; }

// n = 1: BM is linear in rho. Evaluated as sD^4 * BM, then divided by sD^4.
inline double bm_n1(const BmInputs& in) {
  in.validate();
  if (in.n != 1) throw ParameterError("bm_n1 applies only to n = 1");
  const double rho = in.rho();
  detail::check_open_rho(rho);
  const double sd2 = in.demand.variance();
  const double sd4 = sd2 * sd2;
  const double md = in.demand.mu_d();
  const double m = detail::dbl(in.m);
  const double ml = in.mu_l;
  const double sl2 = in.sigma_l2;
  const double scaled = rho * 2.0 * sd4 * (sl2 - m * (m * ml * (ml + 1.0) + sl2)) / (m * m) +
                        (2.0 * md * md * sd2 * sl2 + m * sd4 * (2.0 * m * ml * (ml + 1.0) + 2.0 * sl2 + m)) / (m * m);
  return scaled / sd4;
}

// d BM_{n=1} / d rho; zero only when mu_L = 0 and m = 1.
inline double bm_n1_slope(const BmInputs& in) {
  in.validate();
  const double m = detail::dbl(in.m);
  return 2.0 * (in.sigma_l2 - m * (m * in.mu_l * (in.mu_l + 1.0) + in.sigma_l2)) / (m * m);
}

// iid demand (rho = 0). The rho stored in `in` is ignored.
inline double bm_iid(const BmInputs& in) {
  in.validate();
  const double n = detail::dbl(in.n);
  const double m = detail::dbl(in.m);
  return 1.0 + detail::lead_time_forecast_term(in) + 2.0 * in.sigma_l2 * (m + n - 1.0) / (m * m * n * n) +
         2.0 * in.mu_l * (in.mu_l + n) / (n * n);
}

// dBM/drho at rho = 0: 4 (n - 1) sL2 / (m^2 n^2).
inline double dbm_drho_at_zero(const BmInputs& in) {
  in.validate();
  const double n = detail::dbl(in.n);
  const double m = detail::dbl(in.m);
  return 4.0 * (n - 1.0) * in.sigma_l2 / (m * m * n * n);
}

struct StationaryPointReport {
  // BM_iid >= BM_{rho->1} iff n <= positive_rhs; with n >= 2 this guarantees a
  // stationary point in (0, 1). Infinite for a constant lead time.
  double positive_rhs = 0.0;
  bool positive_region_sufficient = false;
  // BM_iid <= BM_{rho->-1, odd n} iff m >= negative_rhs; with odd n > 1 this
  // guarantees a stationary point in (-1, 0).
  double negative_rhs = 0.0;
  bool negative_region_sufficient = false;
};

inline StationaryPointReport stationary_point_conditions(const BmInputs& in) {
  in.validate();
  const double n = detail::dbl(in.n);
  const double m = detail::dbl(in.m);
  const double sl2 = in.sigma_l2;
  const double ml = in.mu_l;

  StationaryPointReport r;
  if (sl2 > 0.0) {
    const double a = sl2 + m * m * ml;
    r.positive_rhs = (a + std::sqrt(a * a + 4.0 * sl2 * (sl2 * (m - 1.0) + m * m * ml * ml))) / (2.0 * sl2);
  } else {
    // Constant lead time: BM_iid > BM_{rho->1} always.
    r.positive_rhs = std::numeric_limits<double>::infinity();
  }
  r.positive_region_sufficient = in.n >= 2 && n <= r.positive_rhs;

  const double denom = 2.0 * ml * (ml + n);
  if (denom > 0.0) {
    const double sl = std::sqrt(sl2);
    r.negative_rhs = (sl * std::sqrt(sl2 + 4.0 * n * ml * (ml + n)) - sl2) / denom;
  } else {
    r.negative_rhs = std::numeric_limits<double>::infinity();
  }
  r.negative_region_sufficient = in.n > 1 && in.n % 2 == 1 && m >= r.negative_rhs;
  return r;
}

}  // namespace bullwhip
