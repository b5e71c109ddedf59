#pragma once

// Monte Carlo estimation of BM, rho sweeps, extremum search and the
// analytic / total-variance / simulation validation table.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bullwhip/analytics.hpp"
#include "bullwhip/appendix_oracle.hpp"
#include "bullwhip/errors.hpp"
#include "bullwhip/forecasting.hpp"
#include "bullwhip/replenishment.hpp"
#include "bullwhip/stochastic_processes.hpp"

namespace bullwhip {

// ---------------------------------------------------------------------------
// small statistics helpers

inline double sample_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw ConfigError("sample variance needs at least two values");
  const double mu = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(x.size() - 1);
}

// Standard error of the mean from non-overlapping batch means; suitable for
// autocorrelated series whose correlation dies out well within one batch.
inline double batch_means_se(std::span<const double> x, std::size_t batches = 100) {
  const std::size_t len = x.size() / batches;
  if (batches < 2 || len < 1) throw ConfigError("too few observations for batch means");
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = sample_mean(x.subspan(b * len, len));
  return std::sqrt(sample_variance(means) / static_cast<double>(batches));
}

// Runs fn(i) for i in [0, count) on up to hardware_concurrency threads.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max<unsigned>(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// ---------------------------------------------------------------------------
// Monte Carlo

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr std::size_t kMinMcPeriods = 10'000;

struct McSettings {
  std::size_t T = 200'000;  // measured periods per replication, after burn-in
  std::size_t replications = 16;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::size_t> burn_in;  // default: default_burn_in(cfg)
  std::size_t demand_warmup = 1000;    // unrecorded AR(1) steps before period 0
};

struct McEstimate {
  double bm_mc = 0.0;
  double se = 0.0;
  std::vector<double> per_replication;  // Var q / Var D of each replication
  std::vector<double> var_q;            // Var q of each replication
};

inline ForecastConfig forecast_config_for(const BmInputs& in, const LeadTimeDist& dist) {
  return ForecastConfig{in.n, in.m, dist.l_plus()};
}

// One seeded replication of the OUT system.
inline SimTrace simulate_replication(const BmInputs& in, const LeadTimeDist& dist, std::size_t T,
                                     std::optional<std::size_t> burn_in, std::size_t demand_warmup,
                                     SeededStream stream, double tns = 0.0) {
  const ForecastConfig cfg = forecast_config_for(in, dist);
  const std::size_t burn = burn_in.value_or(default_burn_in(cfg));
  const std::size_t total = burn + T;
  const auto demand = gen_demand(in.demand, total, demand_warmup, stream);
  const auto leads = gen_leadtimes(dist, total, stream);
  return run_out_policy(demand, leads, cfg, tns, burn, in.demand.mu_d());
}

inline void check_moments(const BmInputs& in, const LeadTimeDist& dist) {
  constexpr double kTol = 1e-9;
  if (std::abs(dist.mu_l() - in.mu_l) > kTol || std::abs(dist.sigma_l2() - in.sigma_l2) > kTol) {
    std::ostringstream msg;
    msg << "lead-time pmf moments (mu_L=" << dist.mu_l() << ", sigma_L^2=" << dist.sigma_l2()
        << ") do not match the analytic inputs (mu_L=" << in.mu_l << ", sigma_L^2=" << in.sigma_l2 << ")";
    throw ConfigError(msg.str());
  }
}

// Mean over replications of sample Var(q) / sample Var(D) on the measured
// window, with the standard error across replications.
inline McEstimate estimate_bm_mc(const BmInputs& in, const LeadTimeDist& dist, const McSettings& mc) {
  in.validate();
  check_moments(in, dist);
  if (mc.T < kMinMcPeriods) throw ConfigError("Monte Carlo needs T >= 10000 measured periods");
  if (mc.replications < 2) throw ConfigError("Monte Carlo needs at least two replications");

  McEstimate est;
  est.per_replication.resize(mc.replications);
  est.var_q.resize(mc.replications);
  parallel_for(mc.replications, [&](std::size_t r) {
    const SimTrace tr = simulate_replication(in, dist, mc.T, mc.burn_in, mc.demand_warmup, {mc.seed, r});
    const double vq = sample_variance(tr.measured_orders());
    est.var_q[r] = vq;
    est.per_replication[r] = vq / sample_variance(tr.measured_demand());
  });
  est.bm_mc = sample_mean(est.per_replication);
  est.se = std::sqrt(sample_variance(est.per_replication) / static_cast<double>(mc.replications));
  return est;
}

using McEstimator = std::function<McEstimate(const BmInputs&, const LeadTimeDist&, const McSettings&)>;

// Default two-point pmf matching the (mu_L, sigma_L^2) of `in`.
inline LeadTimeDist two_point_for(const BmInputs& in) { return make_two_point_dist(in.mu_l, std::sqrt(in.sigma_l2)); }

// ---------------------------------------------------------------------------
// preset scenarios

struct Scenario {
  std::string name;
  std::size_t n;
  std::size_t m;
};

inline constexpr double kPaperMuD = 20.0;
inline constexpr double kPaperSigmaD = 4.0;
inline constexpr double kPaperMuL = 10.0;
inline constexpr double kPaperSigmaL = 5.0;

inline const std::vector<Scenario>& paper_scenarios() {
  static const std::vector<Scenario> all{{"fig3", 5, 2},  {"fig4", 6, 2},   {"fig5", 15, 2},  {"fig6", 16, 2},
                                         {"fig7", 5, 20}, {"fig8", 6, 20}, {"fig9", 21, 20}, {"fig10", 22, 20}};
  return all;
}

inline BmInputs paper_inputs(std::size_t n, std::size_t m, double rho = 0.0) {
  return BmInputs{DemandParams::from_sigma_d(kPaperMuD, rho, kPaperSigmaD), kPaperMuL, kPaperSigmaL * kPaperSigmaL, n,
                  m};
}

// `count` evenly spaced points on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

inline std::vector<double> default_rho_grid() { return linspace(-0.99, 0.99, 201); }

// ---------------------------------------------------------------------------
// sweeps

struct SweepSpec {
  std::vector<double> rho_grid;
  BmInputs base;  // rho of base.demand is replaced at every grid point
  std::optional<McSettings> mc;
  std::optional<LeadTimeDist> dist;  // for MC; default two-point
  bool hold_sigma_d_constant = true; // otherwise sigma_eps is held at the base value
};

struct BmCurvePoint {
  double rho = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double bm_analytic = 0.0;
  double bm_appendix = 0.0;
  std::optional<double> bm_mc;
  std::optional<double> bm_mc_se;

  [[nodiscard]] std::optional<double> z_score() const {
    if (!bm_mc || !bm_mc_se || !(*bm_mc_se > 0.0)) return std::nullopt;
    return (*bm_mc - bm_analytic) / *bm_mc_se;
  }
};

inline BmInputs inputs_at(const SweepSpec& spec, double rho) {
  if (spec.hold_sigma_d_constant) return spec.base.with_rho(rho);
  BmInputs out = spec.base;
  out.demand = DemandParams::from_sigma_eps(spec.base.demand.mu_d(), rho, spec.base.demand.sigma_eps());
  return out;
}

inline void check_grid(std::span<const double> grid) {
  for (double r : grid) {
    if (!(std::abs(r) < 1.0)) {
      std::ostringstream msg;
      msg << "rho grid point " << r << " is not strictly inside (-1, 1)";
      throw DomainError(msg.str());
    }
  }
}

inline std::vector<BmCurvePoint> sweep_rho(const SweepSpec& spec, const McEstimator& estimator = estimate_bm_mc) {
  check_grid(spec.rho_grid);
  if (spec.mc && spec.mc->T < kMinMcPeriods) throw ConfigError("sweep Monte Carlo needs T >= 10000");
  std::vector<BmCurvePoint> out;
  out.reserve(spec.rho_grid.size());
  for (std::size_t i = 0; i < spec.rho_grid.size(); ++i) {
    const BmInputs in = inputs_at(spec, spec.rho_grid[i]);
    BmCurvePoint p{in.rho(), in.n, in.m, bm_analytic(in).value, bm_appendix(in), std::nullopt, std::nullopt};
    if (spec.mc) {
      const LeadTimeDist dist = spec.dist ? *spec.dist : two_point_for(in);
      McSettings mc = *spec.mc;
      mc.seed = splitmix64(spec.mc->seed ^ splitmix64(i));
      const McEstimate est = estimator(in, dist, mc);
      p.bm_mc = est.bm_mc;
      p.bm_mc_se = est.se;
    }
    out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.rho < b.rho; });
  return out;
}

// ---------------------------------------------------------------------------
// stationary points in rho

enum class ExtremumKind { maximum, minimum };

inline const char* to_string(ExtremumKind k) { return k == ExtremumKind::maximum ? "max" : "min"; }

struct StationaryPoint {
  double rho = 0.0;
  ExtremumKind kind = ExtremumKind::minimum;
  double bm = 0.0;
};

inline constexpr double kScanStep = 1e-3;
inline constexpr double kBisectTol = 1e-6;

// Central-difference dBM/drho of the closed form.
inline double dbm_drho_numeric(const BmInputs& in, double rho, double h = 1e-6) {
  return (bm_analytic(in.with_rho(rho + h)).value - bm_analytic(in.with_rho(rho - h)).value) / (2.0 * h);
}

// Scans the open interval (lo, hi) on a 1e-3 grid for sign changes of the
// numeric derivative, refines each bracket by bisection to 1e-6 and
// classifies it by the second difference.
inline std::vector<StationaryPoint> find_stationary_points(const BmInputs& in, double lo, double hi) {
  in.validate();
  if (!(lo >= -1.0 && hi <= 1.0 && lo < hi)) {
    std::ostringstream msg;
    msg << "search region (" << lo << ", " << hi << ") must lie within (-1, 1)";
    throw DomainError(msg.str());
  }
  const double first = lo + kScanStep;
  const double last = hi - kScanStep;
  std::vector<StationaryPoint> out;
  if (!(first < last)) return out;

  auto deriv = [&](double r) { return dbm_drho_numeric(in, r); };
  const auto steps = static_cast<std::size_t>(std::floor((last - first) / kScanStep));
  double a = first;
  double da = deriv(a);
  for (std::size_t i = 1; i <= steps + 1; ++i) {
    const double b = (i <= steps) ? first + static_cast<double>(i) * kScanStep : last;
    if (!(b > a)) continue;
    const double db = deriv(b);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      double left = a;
      double right = b;
      double dleft = da;
      while (right - left > kBisectTol) {
        const double mid = 0.5 * (left + right);
        const double dmid = deriv(mid);
        if ((dleft < 0.0) == (dmid < 0.0)) {
          left = mid;
          dleft = dmid;
        } else {
          right = mid;
        }
      }
      const double r = 0.5 * (left + right);
      const double h = std::min({kScanStep, r - lo, hi - r}) * 0.5;
      const double curvature = bm_analytic(in.with_rho(r + h)).value - 2.0 * bm_analytic(in.with_rho(r)).value +
                               bm_analytic(in.with_rho(r - h)).value;
      out.push_back({r, curvature < 0.0 ? ExtremumKind::maximum : ExtremumKind::minimum,
                     bm_analytic(in.with_rho(r)).value});
    }
    a = b;
    da = db;
  }
  return out;
}

// ---------------------------------------------------------------------------
// validation

struct ValidationThresholds {
  double z_max = 4.0;
  double dual_rel_max = 1e-10;
  std::optional<double> mc_rel_max;  // optional bound on |bm_mc / bm_analytic - 1|
};

struct ValidationRow {
  std::string scenario;
  BmCurvePoint point;
  double dual_rel_error = 0.0;
  double mc_rel_error = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  [[nodiscard]] bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
  }
  [[nodiscard]] std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; }));
  }
};

struct ValidationCase {
  std::string scenario;
  BmInputs inputs;
};

using DistFactory = std::function<LeadTimeDist(const BmInputs&)>;

inline std::vector<ValidationCase> default_validation_grid() {
  std::vector<ValidationCase> grid;
  for (const auto& sc : paper_scenarios())
    for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) grid.push_back({sc.name, paper_inputs(sc.n, sc.m, rho)});
  return grid;
}

// Closed form vs total-variance route vs Monte Carlo for each case. A row fails when
// |z| > z_max, the two analytic routes differ by more than dual_rel_max, or
// (if set) the Monte Carlo relative error exceeds mc_rel_max.
inline ValidationReport validate(const std::vector<ValidationCase>& grid, const DistFactory& dist_factory,
                                 const McSettings& mc, const ValidationThresholds& thr = {},
                                 const McEstimator& estimator = estimate_bm_mc) {
  ValidationReport report;
  report.rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& c = grid[i];
    ValidationRow row;
    row.scenario = c.scenario;
    row.point = {c.inputs.rho(), c.inputs.n, c.inputs.m, bm_analytic(c.inputs).value, bm_appendix(c.inputs),
                 std::nullopt, std::nullopt};
    McSettings local = mc;
    local.seed = splitmix64(mc.seed ^ splitmix64(i));
    const McEstimate est = estimator(c.inputs, dist_factory(c.inputs), local);
    row.point.bm_mc = est.bm_mc;
    row.point.bm_mc_se = est.se;
    row.dual_rel_error = std::abs(row.point.bm_appendix / row.point.bm_analytic - 1.0);
    row.mc_rel_error = std::abs(est.bm_mc / row.point.bm_analytic - 1.0);
    const auto z = row.point.z_score();
    row.pass = z && std::abs(*z) <= thr.z_max && row.dual_rel_error <= thr.dual_rel_max &&
               (!thr.mc_rel_max || row.mc_rel_error <= *thr.mc_rel_max);
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// CSV output

namespace detail {

inline void write_comment(std::ostream& os, const std::string& text) {
  if (text.empty()) return;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
}

inline void write_optional(std::ostream& os, const std::optional<double>& v) {
  if (v) os << *v;
}

}  // namespace detail

inline constexpr const char* kCurveColumns = "rho,n,m,bm_analytic,bm_appendix,bm_mc,bm_mc_se,z_score";

inline void write_curve_row(std::ostream& os, const BmCurvePoint& p) {
  os << p.rho << ',' << p.n << ',' << p.m << ',' << p.bm_analytic << ',' << p.bm_appendix << ',';
  detail::write_optional(os, p.bm_mc);
  os << ',';
  detail::write_optional(os, p.bm_mc_se);
  os << ',';
  detail::write_optional(os, p.z_score());
}

inline void write_curve_csv(std::ostream& os, std::span<const BmCurvePoint> points, const std::string& header = {}) {
  detail::write_comment(os, header);
  const auto prec = os.precision(std::numeric_limits<double>::max_digits10);
  os << kCurveColumns << '\n';
  for (const auto& p : points) {
    write_curve_row(os, p);
    os << '\n';
  }
  os.precision(prec);
}

// Long format for plotting: one row per (scenario, rho, series).
inline void write_long_csv(std::ostream& os, const std::string& scenario, std::span<const BmCurvePoint> points,
                           bool with_header = true) {
  const auto prec = os.precision(std::numeric_limits<double>::max_digits10);
  if (with_header) os << "scenario,n,m,rho,series,value\n";
  for (const auto& p : points) {
    auto row = [&](const char* series, double v) {
      os << scenario << ',' << p.n << ',' << p.m << ',' << p.rho << ',' << series << ',' << v << '\n';
    };
    row("analytic", p.bm_analytic);
    row("appendix", p.bm_appendix);
    if (p.bm_mc) row("mc", *p.bm_mc);
    if (p.bm_mc_se) row("mc_se", *p.bm_mc_se);
  }
  os.precision(prec);
}

inline void write_validation_csv(std::ostream& os, const ValidationReport& report, const std::string& header = {}) {
  detail::write_comment(os, header);
  const auto prec = os.precision(std::numeric_limits<double>::max_digits10);
  os << "scenario," << kCurveColumns << ",dual_rel_error,mc_rel_error,status\n";
  for (const auto& r : report.rows) {
    os << r.scenario << ',';
    write_curve_row(os, r.point);
    os << ',' << r.dual_rel_error << ',' << r.mc_rel_error << ',' << (r.pass ? "pass" : "FAIL") << '\n';
  }
  os.precision(prec);
}

}  // namespace bullwhip
