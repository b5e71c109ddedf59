#pragma once

// Demand and lead-time generators.
//
// Demand is a stationary AR(1) process
//   D_t = mu_D + rho (D_{t-1} - mu_D) + eps_t,   Var D_t = sigma_D^2 = sigma_eps^2 / (1 - rho^2)
// parameterized by the stationary standard deviation sigma_D so that sweeps
// over rho keep Var D fixed. Lead times are iid draws from a bounded discrete
// pmf on {0, ..., L+}.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "bullwhip/errors.hpp"

namespace bullwhip {

class DemandParams {
 public:
  // Preferred constructor: sigma_eps is derived as sigma_D * sqrt(1 - rho^2).
  static DemandParams from_sigma_d(double mu_d, double rho, double sigma_d) {
    check_rho(rho);
    if (!(sigma_d > 0.0) || !std::isfinite(sigma_d))
      throw ParameterError("sigma_D must be positive and finite");
    if (!std::isfinite(mu_d)) throw ParameterError("mu_D must be finite");
    return DemandParams(mu_d, rho, sigma_d, sigma_d * std::sqrt(1.0 - rho * rho));
  }

  static DemandParams from_sigma_eps(double mu_d, double rho, double sigma_eps) {
    check_rho(rho);
    if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps))
      throw ParameterError("sigma_eps must be positive and finite");
    return from_sigma_d(mu_d, rho, sigma_eps / std::sqrt(1.0 - rho * rho));
  }

  [[nodiscard]] double mu_d() const { return mu_d_; }
  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] double sigma_d() const { return sigma_d_; }
  [[nodiscard]] double sigma_eps() const { return sigma_eps_; }
  [[nodiscard]] double variance() const { return sigma_d_ * sigma_d_; }

  // Same mean and stationary sd, different autocorrelation.
  [[nodiscard]] DemandParams with_rho(double rho) const { return from_sigma_d(mu_d_, rho, sigma_d_); }

 private:
  DemandParams(double mu_d, double rho, double sigma_d, double sigma_eps)
      : mu_d_(mu_d), rho_(rho), sigma_d_(sigma_d), sigma_eps_(sigma_eps) {}

  static void check_rho(double rho) {
    if (!(std::abs(rho) < 1.0)) {
      std::ostringstream msg;
      msg << "rho must satisfy |rho| < 1 (got " << rho << ")";
      throw ParameterError(msg.str());
    }
  }

  double mu_d_;
  double rho_;
  double sigma_d_;
  double sigma_eps_;
};

// Bounded discrete lead-time distribution. pmf()[i] is P(L = i).
class LeadTimeDist {
 public:
  static constexpr double kNormTolerance = 1e-12;

  // Without an explicit l_plus the support ends at the last entry, which must
  // carry positive mass. With one, the pmf is padded with zeros up to l_plus.
  explicit LeadTimeDist(std::vector<double> pmf, std::optional<std::size_t> l_plus = std::nullopt)
      : pmf_(std::move(pmf)) {
    if (pmf_.empty()) throw ParameterError("lead-time pmf is empty");
    if (l_plus) {
      if (pmf_.size() > *l_plus + 1) {
        if (std::any_of(pmf_.begin() + static_cast<std::ptrdiff_t>(*l_plus + 1), pmf_.end(),
                        [](double p) { return p != 0.0; }))
          throw ParameterError("lead-time pmf has mass beyond the declared L+");
        pmf_.resize(*l_plus + 1);
      }
      pmf_.resize(*l_plus + 1, 0.0);
    } else if (!(pmf_.back() > 0.0)) {
      throw ParameterError("last pmf entry is zero; declare L+ explicitly to allow this");
    }
    double total = 0.0;
    for (double p : pmf_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("lead-time probabilities must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "lead-time pmf is not normalized (sum = " << total << ")";
      throw ParameterError(msg.str());
    }
  }

  // Sparse form: {(lead time, probability), ...}.
  static LeadTimeDist from_points(const std::vector<std::pair<std::size_t, double>>& points,
                                  std::optional<std::size_t> l_plus = std::nullopt) {
    std::size_t top = 0;
    for (const auto& [i, p] : points) top = std::max(top, i);
    std::vector<double> pmf(top + 1, 0.0);
    for (const auto& [i, p] : points) pmf[i] += p;
    return LeadTimeDist(std::move(pmf), l_plus);
  }

  [[nodiscard]] const std::vector<double>& pmf() const { return pmf_; }
  [[nodiscard]] std::size_t l_plus() const { return pmf_.size() - 1; }

  [[nodiscard]] double mu_l() const {
    double mu = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) mu += static_cast<double>(i) * pmf_[i];
    return mu;
  }

  [[nodiscard]] double sigma_l2() const {
    const double mu = mu_l();
    double var = 0.0;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
      const double d = static_cast<double>(i) - mu;
      var += pmf_[i] * d * d;
    }
    return var;
  }

  [[nodiscard]] std::size_t max_support() const {
    std::size_t top = 0;
    for (std::size_t i = 0; i < pmf_.size(); ++i)
      if (pmf_[i] > 0.0) top = i;
    return top;
  }

 private:
  std::vector<double> pmf_;
};

// Moment-matched two-point pmf {mu - sigma: 1/2, mu + sigma: 1/2}.
inline LeadTimeDist make_two_point_dist(double mu_l, double sigma_l) {
  if (!(sigma_l >= 0.0)) throw ParameterError("sigma_L must be non-negative");
  const double lo = mu_l - sigma_l;
  const double hi = mu_l + sigma_l;
  if (lo < 0.0) {
    std::ostringstream msg;
    msg << "two-point lead time support has negative point " << lo << "; lead times are non-negative";
    throw ParameterError(msg.str());
  }
  constexpr double kIntTol = 1e-9;
  if (std::abs(lo - std::round(lo)) > kIntTol || std::abs(hi - std::round(hi)) > kIntTol) {
    std::ostringstream msg;
    msg << "mu_L +/- sigma_L = {" << lo << ", " << hi
        << "} are not integers; supply an explicit lead-time pmf instead";
    throw ParameterError(msg.str());
  }
  const auto ilo = static_cast<std::size_t>(std::llround(lo));
  const auto ihi = static_cast<std::size_t>(std::llround(hi));
  if (ilo == ihi) return LeadTimeDist::from_points({{ilo, 1.0}});
  return LeadTimeDist::from_points({{ilo, 0.5}, {ihi, 0.5}});
}

// (seed, stream_id) names one reproducible random stream. Replication r of a
// Monte Carlo run uses stream_id r.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

using Engine = std::mt19937_64;

// Separate salts keep demand and lead-time draws independent even when both
// generators are handed the same SeededStream.
enum class StreamSalt : std::uint32_t { demand = 0xD3D3u, lead_time = 0x1EADu, aux = 0xA0Au };

inline Engine make_engine(SeededStream stream, StreamSalt salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream.seed), static_cast<std::uint32_t>(stream.seed >> 32),
                    static_cast<std::uint32_t>(stream.stream_id),
                    static_cast<std::uint32_t>(stream.stream_id >> 32), static_cast<std::uint32_t>(salt)};
  return Engine(seq);
}

// Default innovation sampler: eps ~ N(0, sigma_eps^2).
struct GaussianInnovation {
  double operator()(Engine& rng, double sigma_eps) {
    return sigma_eps * normal_(rng);
  }
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Any callable double(Engine&, double sigma_eps) returning a zero-mean draw
// with standard deviation sigma_eps.
template <class F>
concept InnovationSampler = requires(F f, Engine& rng, double s) {
  { f(rng, s) } -> std::convertible_to<double>;
};

// Emits T periods of AR(1) demand. D_0 is drawn from N(mu_D, sigma_D^2), then
// `warmup` steps are discarded before the first emitted value. Values are not
// truncated at zero.
template <InnovationSampler Innovation = GaussianInnovation>
std::vector<double> gen_demand(const DemandParams& params, std::size_t T, std::size_t warmup, SeededStream stream,
                               Innovation innovation = {}) {
  if (T == 0) throw ParameterError("demand series length must be >= 1");
  Engine rng = make_engine(stream, StreamSalt::demand);
  std::normal_distribution<double> stationary(params.mu_d(), params.sigma_d());
  const double mu = params.mu_d();
  const double rho = params.rho();
  const double s = params.sigma_eps();

  double x = stationary(rng);
  for (std::size_t i = 0; i < warmup; ++i) x = mu + rho * (x - mu) + innovation(rng, s);

  std::vector<double> out(T);
  out[0] = x;
  for (std::size_t t = 1; t < T; ++t) {
    x = mu + rho * (x - mu) + innovation(rng, s);
    out[t] = x;
  }
  return out;
}

// Inverse-CDF sampler over a LeadTimeDist.
class LeadTimeSampler {
 public:
  explicit LeadTimeSampler(const LeadTimeDist& dist) {
    const auto& pmf = dist.pmf();
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      if (pmf[i] <= 0.0) continue;
      acc += pmf[i];
      cdf_.push_back(acc);
      values_.push_back(static_cast<int>(i));
    }
  }

  int operator()(Engine& rng) {
    const double u = uniform_(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), values_.size() - 1);
    return values_[idx];
  }

 private:
  std::vector<double> cdf_;
  std::vector<int> values_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline std::vector<int> gen_leadtimes(const LeadTimeDist& dist, std::size_t T, SeededStream stream) {
  if (T == 0) throw ParameterError("lead-time series length must be >= 1");
  Engine rng = make_engine(stream, StreamSalt::lead_time);
  LeadTimeSampler sample(dist);
  std::vector<int> out(T);
  for (auto& l : out) l = sample(rng);
  return out;
}

}  // namespace bullwhip
