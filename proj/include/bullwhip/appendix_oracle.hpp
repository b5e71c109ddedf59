#pragma once

// Second analytic route to Var q via the law of total variance, conditioning
// on the lead times that enter the two lead-time forecasts,
//   Lvec = (L_{t-1-L+}, ..., L_{t-1-m-L+}):
//
//   Var q = Var(E(q | Lvec)) + E(Var(q | Lvec))
//   Var(q | Lvec) = sD^2 C1^2 + s^2 sum_{k=1..n} C2k^2,    s^2 = sD^2 (1 - rho^2)
//
// C1 is the coefficient of D_{t-1-n} and C2k the coefficient of eps_{t-k}
// when q_t is expanded in those mutually independent terms. Dividing the
// result by sD^2 must reproduce bm_analytic().

#include <cmath>

#include "bullwhip/analytics.hpp"

namespace bullwhip {

struct AppendixTerms {
  double var_E_q_given_L = 0.0;
  double E_C1_sq = 0.0;
  double sum_E_C2k_sq = 0.0;
  double var_q = 0.0;
};

// Var(E(q | Lvec)) = 2 sL2 muD^2 / m^2.
inline double var_E_q_given_L(const BmInputs& in) {
  in.validate();
  const double m = static_cast<double>(in.m);
  const double md = in.demand.mu_d();
  return 2.0 * in.sigma_l2 * md * md / (m * m);
}

inline double expected_C1(const BmInputs& in) {
  const double n = static_cast<double>(in.n);
  const double rn = std::pow(in.rho(), n);
  return (in.mu_l / n + 1.0) * rn - in.mu_l / n;
}

inline double variance_C1(const BmInputs& in) {
  const double n = static_cast<double>(in.n);
  const double m = static_cast<double>(in.m);
  const double rho = in.rho();
  const double one_minus_rn = 1.0 - std::pow(rho, n);
  return one_minus_rn * one_minus_rn * in.sigma_l2 / (n * n * m * m) *
         (m + 2.0 * rho / ((1.0 - rho) * (1.0 - rho)));
}

// E C1^2 = Var C1 + (E C1)^2.
inline double expected_C1_sq(const BmInputs& in) {
  in.validate();
  detail::check_open_rho(in.rho());
  const double mean = expected_C1(in);
  return variance_C1(in) + mean * mean;
}

// sum_{k=1..n} E C2k^2 in closed form: a geometric rho^2 sum, a geometric
// rho sum and a constant.
inline double sum_expected_C2k_sq(const BmInputs& in) {
  in.validate();
  const double rho = in.rho();
  detail::check_open_rho(rho);
  const double n = static_cast<double>(in.n);
  const double m = static_cast<double>(in.m);
  const double sl2 = in.sigma_l2;
  const double om = 1.0 - rho;
  const double nm2 = n * n * m * m;
  const double lead = in.mu_l / n + 1.0;

  const double geometric_sq = (1.0 - std::pow(rho, 2.0 * n)) / (1.0 - rho * rho);
  const double geometric = (1.0 - std::pow(rho, n)) / om;

  return (sl2 * (m - 1.0) / nm2 + lead * lead + sl2 * (rho * rho + 1.0) / (nm2 * om * om)) * geometric_sq -
         2.0 * sl2 * (rho + 1.0) / (nm2 * om * om) * geometric + 2.0 * sl2 / (n * m * m * om * om);
}

inline AppendixTerms appendix_terms(const BmInputs& in) {
  AppendixTerms t;
  t.var_E_q_given_L = var_E_q_given_L(in);
  t.E_C1_sq = expected_C1_sq(in);
  t.sum_E_C2k_sq = sum_expected_C2k_sq(in);
  const double sd2 = in.demand.variance();
  const double s2 = sd2 * (1.0 - in.rho() * in.rho());
  t.var_q = t.var_E_q_given_L + sd2 * t.E_C1_sq + s2 * t.sum_E_C2k_sq;
  return t;
}

inline double var_q_appendix(const BmInputs& in) { return appendix_terms(in).var_q; }

// Var q / sD^2 through this route.
inline double bm_appendix(const BmInputs& in) { return var_q_appendix(in) / in.demand.variance(); }

}  // namespace bullwhip
