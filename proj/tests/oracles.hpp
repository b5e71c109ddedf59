#pragma once

// Test-only reference computations. Nothing here calls the closed forms in
// analytics.hpp or appendix_oracle.hpp.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "bullwhip/stochastic_processes.hpp"

namespace bullwhip::oracle {

struct Moments {
  double mu_l = 0.0;
  double sigma_l2 = 0.0;
};

inline Moments pmf_moments(const std::vector<std::pair<int, double>>& support) {
  Moments mo;
  for (auto [l, p] : support) mo.mu_l += l * p;
  for (auto [l, p] : support) mo.sigma_l2 += p * (l - mo.mu_l) * (l - mo.mu_l);
  return mo;
}

// Calls visit(tuple, probability) for every lead-time tuple of length `len`.
inline void for_each_tuple(const std::vector<std::pair<int, double>>& support, std::size_t len,
                           const std::function<void(const std::vector<int>&, double)>& visit) {
  std::vector<std::size_t> idx(len, 0);
  std::vector<int> tuple(len);
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < len; ++i) {
      tuple[i] = support[idx[i]].first;
      prob *= support[idx[i]].second;
    }
    visit(tuple, prob);
    std::size_t k = 0;
    while (k < len && ++idx[k] == support.size()) idx[k++] = 0;
    if (k == len) return;
  }
}

// Exact Var q_t for q_t = Lhat_t Dhat_t - Lhat_{t-1} Dhat_{t-1} + D_{t-1}.
//
// Given the lead-time tuple (L_1, ..., L_{m+1}) with L_i = L_{t-i-L+}, q_t is
// linear in (D_{t-1}, ..., D_{t-1-n}) with coefficient vector c, so
//   Var q = E_L[c' Sigma c] + Var_L(mu_D * sum c),
// Sigma_ij = sD^2 rho^|i-j| being the stationary AR(1) covariance.
inline double exact_var_q(double mu_d, double sigma_d, double rho, std::size_t n, std::size_t m,
                          const std::vector<std::pair<int, double>>& support) {
  const std::size_t dim = n + 1;  // D_{t-1} .. D_{t-1-n}
  double e_quad = 0.0;
  double e_mean = 0.0;
  double e_mean_sq = 0.0;
  for_each_tuple(support, m + 1, [&](const std::vector<int>& L, double p) {
    double lhat_t = 0.0;
    double lhat_prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) lhat_t += L[i];
    for (std::size_t i = 1; i <= m; ++i) lhat_prev += L[i];
    lhat_t /= static_cast<double>(m);
    lhat_prev /= static_cast<double>(m);

    std::vector<double> c(dim, 0.0);
    for (std::size_t j = 0; j < n; ++j) c[j] += lhat_t / static_cast<double>(n);
    for (std::size_t j = 1; j <= n; ++j) c[j] -= lhat_prev / static_cast<double>(n);
    c[0] += 1.0;

    double quad = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        quad += c[i] * c[j] * sigma_d * sigma_d * std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
    double sum_c = 0.0;
    for (double v : c) sum_c += v;
    const double mean = mu_d * sum_c;
    e_quad += p * quad;
    e_mean += p * mean;
    e_mean_sq += p * mean * mean;
  });
  return e_quad + (e_mean_sq - e_mean * e_mean);
}

// E C1^2 and sum_k E C2k^2 by enumeration of their defining expressions.
struct CoefficientMoments {
  double e_c1_sq = 0.0;
  double sum_e_c2k_sq = 0.0;
};

inline CoefficientMoments enumerate_coefficients(double rho, std::size_t n, std::size_t m,
                                                 const std::vector<std::pair<int, double>>& support) {
  CoefficientMoments out;
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  for_each_tuple(support, m + 1, [&](const std::vector<int>& L, double p) {
    double lhat_t = 0.0;
    double lhat_prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) lhat_t += L[i];
    for (std::size_t i = 1; i <= m; ++i) lhat_prev += L[i];
    lhat_t /= md;
    lhat_prev /= md;
    const double diff = static_cast<double>(L[0] - L[m]);

    const double c1 = (lhat_t / nd + 1.0) * std::pow(rho, nd) +
                      diff * rho * (1.0 - std::pow(rho, nd - 1.0)) / (nd * md * (1.0 - rho)) - lhat_prev / nd;
    out.e_c1_sq += p * c1 * c1;
    for (std::size_t k = 1; k <= n; ++k) {
      const double kd = static_cast<double>(k);
      const double c2 = (lhat_t / nd + 1.0) * std::pow(rho, kd - 1.0) +
                        diff * (1.0 - std::pow(rho, kd - 1.0)) / (nd * md * (1.0 - rho));
      out.sum_e_c2k_sq += p * c2 * c2;
    }
  });
  return out;
}

// Sample lag-k autocorrelation.
inline double autocorrelation(const std::vector<double>& x, std::size_t lag) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    if (i >= lag) num += (x[i] - mean) * (x[i - lag] - mean);
  }
  return num / den;
}

}  // namespace bullwhip::oracle
