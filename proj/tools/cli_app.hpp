#pragma once

// Command-line front end: analytic | simulate | sweep | validate | extrema.
//
// Every option can also come from a TOML/INI file given with --config; flags
// on the command line win over file values. CSV outputs start with the
// resolved configuration as '#' comment lines, which is itself a loadable
// config file once the '#' prefixes are stripped.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bullwhip/bullwhip.hpp"

namespace bullwhip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr const char* kSeedEnv = "BULLWHIP_SEED";

struct RunConfig {
  std::string preset;

  double mu_d = kPaperMuD;
  double sigma_d = kPaperSigmaD;
  double rho = 0.0;
  double mu_l = kPaperMuL;
  double sigma_l = kPaperSigmaL;
  std::vector<std::string> pmf;  // "lead_time:probability" entries
  long l_plus = -1;              // < 0: support ends at the last pmf entry

  std::size_t n = 5;
  std::size_t m = 2;

  std::size_t T = 200'000;
  std::size_t reps = 16;
  std::uint64_t seed = kDefaultSeed;
  long burn_in = -1;  // < 0: default_burn_in()

  std::size_t grid_points = 201;
  double rho_min = -0.99;
  double rho_max = 0.99;
  bool mc = false;
  bool hold_sigma_eps = false;

  double region_lo = -1.0;
  double region_hi = 1.0;

  std::string limit;  // rho1 | rho-1 | n-inf | m-inf | nm-inf

  double holding_cost = 0.0;
  double backlog_cost = 0.0;
  double tns = 0.0;

  std::string out;
  std::string long_out;
  std::string trace_out;
};

inline void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--preset", c.preset, "fig3 .. fig10 or paper")
      ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "paper"}));
  app.add_option("--mu-d", c.mu_d, "mean demand");
  app.add_option("--sigma-d", c.sigma_d, "stationary demand standard deviation");
  app.add_option("--rho", c.rho, "AR(1) demand autocorrelation, |rho| < 1");
  app.add_option("--mu-l", c.mu_l, "mean lead time");
  app.add_option("--sigma-l", c.sigma_l, "lead-time standard deviation");
  app.add_option("--pmf", c.pmf, "explicit lead-time pmf as lead_time:probability entries");
  app.add_option("--l-plus", c.l_plus, "declared maximum lead time (pads the pmf with zeros)");
  app.add_option("--n", c.n, "demand moving-average window")->check(CLI::PositiveNumber);
  app.add_option("--m", c.m, "lead-time moving-average window")->check(CLI::PositiveNumber);
  app.add_option("--T", c.T, "measured periods per replication");
  app.add_option("--reps", c.reps, "Monte Carlo replications");
  app.add_option("--seed", c.seed, "random seed")->envname(kSeedEnv);
  app.add_option("--burn-in", c.burn_in, "discarded periods (default 10(n+m+L+)+1000)");
  app.add_option("--grid-points", c.grid_points, "rho grid size for sweeps");
  app.add_option("--rho-min", c.rho_min, "smallest rho in sweeps");
  app.add_option("--rho-max", c.rho_max, "largest rho in sweeps");
  app.add_flag("--mc", c.mc, "add Monte Carlo estimates to sweeps");
  app.add_flag("--hold-sigma-eps", c.hold_sigma_eps, "sweep with fixed innovation sd instead of fixed sigma_D");
  app.add_option("--region-lo", c.region_lo, "extrema search: lower end of rho region");
  app.add_option("--region-hi", c.region_hi, "extrema search: upper end of rho region");
  app.add_option("--limit", c.limit, "analytic: evaluate a limit form instead")
      ->check(CLI::IsMember({"rho1", "rho-1", "n-inf", "m-inf", "nm-inf"}));
  app.add_option("--holding-cost", c.holding_cost, "unit holding cost h");
  app.add_option("--backlog-cost", c.backlog_cost, "unit backlog cost b");
  app.add_option("--tns", c.tns, "target net stock used in the simulated trace");
  app.add_option("--out", c.out, "CSV output path (default stdout)");
  app.add_option("--long-out", c.long_out, "sweep: long-format CSV for plotting");
  app.add_option("--trace-out", c.trace_out, "simulate: per-period trace CSV");
}

// TOML rendering of the resolved configuration.
inline std::string to_config_string(const RunConfig& c) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  auto str = [&](const char* key, const std::string& v) {
    if (!v.empty()) os << key << " = \"" << v << "\"\n";
  };
  str("preset", c.preset);
  os << "mu-d = " << c.mu_d << '\n' << "sigma-d = " << c.sigma_d << '\n' << "rho = " << c.rho << '\n';
  if (c.pmf.empty()) {
    os << "mu-l = " << c.mu_l << '\n' << "sigma-l = " << c.sigma_l << '\n';
  } else {
    os << "pmf = [";
    for (std::size_t i = 0; i < c.pmf.size(); ++i) os << (i ? ", " : "") << '"' << c.pmf[i] << '"';
    os << "]\n";
    if (c.l_plus >= 0) os << "l-plus = " << c.l_plus << '\n';
  }
  os << "n = " << c.n << '\n' << "m = " << c.m << '\n';
  os << "T = " << c.T << '\n' << "reps = " << c.reps << '\n' << "seed = " << c.seed << '\n';
  if (c.burn_in >= 0) os << "burn-in = " << c.burn_in << '\n';
  os << "grid-points = " << c.grid_points << '\n'
     << "rho-min = " << c.rho_min << '\n'
     << "rho-max = " << c.rho_max << '\n';
  os << "mc = " << (c.mc ? "true" : "false") << '\n'
     << "hold-sigma-eps = " << (c.hold_sigma_eps ? "true" : "false") << '\n';
  os << "region-lo = " << c.region_lo << '\n' << "region-hi = " << c.region_hi << '\n';
  str("limit", c.limit);
  os << "holding-cost = " << c.holding_cost << '\n'
     << "backlog-cost = " << c.backlog_cost << '\n'
     << "tns = " << c.tns << '\n';
  str("out", c.out);
  str("long-out", c.long_out);
  str("trace-out", c.trace_out);
  return os.str();
}

// ---------------------------------------------------------------------------
// config -> model objects

inline std::optional<LeadTimeDist> explicit_pmf(const RunConfig& c) {
  if (c.pmf.empty()) return std::nullopt;
  std::vector<std::pair<std::size_t, double>> points;
  for (const auto& entry : c.pmf) {
    const auto colon = entry.find(':');
    if (colon == std::string::npos) throw ConfigError("pmf entry '" + entry + "' is not lead_time:probability");
    try {
      const long lt = std::stol(entry.substr(0, colon));
      const double p = std::stod(entry.substr(colon + 1));
      if (lt < 0) throw ConfigError("pmf entry '" + entry + "' has a negative lead time");
      points.emplace_back(static_cast<std::size_t>(lt), p);
    } catch (const std::logic_error&) {
      throw ConfigError("pmf entry '" + entry + "' is not lead_time:probability");
    }
  }
  std::optional<std::size_t> l_plus;
  if (c.l_plus >= 0) l_plus = static_cast<std::size_t>(c.l_plus);
  return LeadTimeDist::from_points(points, l_plus);
}

struct Model {
  double mu_l = 0.0;
  double sigma_l2 = 0.0;
  std::optional<LeadTimeDist> pmf;
};

inline Model lead_time_model(const RunConfig& c, const CLI::App& app) {
  Model model;
  model.pmf = explicit_pmf(c);
  if (model.pmf) {
    model.mu_l = model.pmf->mu_l();
    model.sigma_l2 = model.pmf->sigma_l2();
    constexpr double kTol = 1e-9;
    if ((app.count("--mu-l") && std::abs(c.mu_l - model.mu_l) > kTol) ||
        (app.count("--sigma-l") && std::abs(c.sigma_l * c.sigma_l - model.sigma_l2) > kTol)) {
      std::ostringstream msg;
      msg << "--pmf has mu_L=" << model.mu_l << ", sigma_L=" << std::sqrt(model.sigma_l2)
          << ", which conflicts with --mu-l/--sigma-l";
      throw ConfigError(msg.str());
    }
  } else {
    if (c.sigma_l < 0.0) throw ConfigError("--sigma-l must be non-negative");
    model.mu_l = c.mu_l;
    model.sigma_l2 = c.sigma_l * c.sigma_l;
  }
  return model;
}

inline BmInputs bm_inputs(const RunConfig& c, const Model& model, std::size_t n, std::size_t m, double rho) {
  BmInputs in{DemandParams::from_sigma_d(c.mu_d, rho, c.sigma_d), model.mu_l, model.sigma_l2, n, m};
  in.validate();
  return in;
}

inline LeadTimeDist dist_for(const Model& model, const BmInputs& in) {
  return model.pmf ? *model.pmf : two_point_for(in);
}

inline McSettings mc_settings(const RunConfig& c) {
  McSettings mc;
  mc.T = c.T;
  mc.replications = c.reps;
  mc.seed = c.seed;
  if (c.burn_in >= 0) mc.burn_in = static_cast<std::size_t>(c.burn_in);
  return mc;
}

// (name, n, m) of every scenario selected by the config.
inline std::vector<Scenario> scenarios(const RunConfig& c) {
  if (c.preset == "paper") return paper_scenarios();
  if (!c.preset.empty()) {
    for (const auto& s : paper_scenarios())
      if (s.name == c.preset) return {s};
  }
  std::ostringstream name;
  name << "n" << c.n << "m" << c.m;
  return {{name.str(), c.n, c.m}};
}

// Presets pin the reference parameters for every model option not given
// explicitly on the command line or in the config file.
inline void apply_preset(RunConfig& c, const CLI::App& app) {
  if (c.preset.empty()) return;
  if (!app.count("--mu-d")) c.mu_d = kPaperMuD;
  if (!app.count("--sigma-d")) c.sigma_d = kPaperSigmaD;
  if (!app.count("--mu-l")) c.mu_l = kPaperMuL;
  if (!app.count("--sigma-l")) c.sigma_l = kPaperSigmaL;
  if (c.preset != "paper") {
    for (const auto& s : paper_scenarios()) {
      if (s.name != c.preset) continue;
      if (!app.count("--n")) c.n = s.n;
      if (!app.count("--m")) c.m = s.m;
    }
  }
}

// ---------------------------------------------------------------------------
// output plumbing

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline std::string header_for(const char* command, const RunConfig& c) {
  return std::string("bullwhip ") + command + "\n" + to_config_string(c);
}

inline void kv(std::ostream& os, const std::string& key, double v) { os << key << ',' << v << '\n'; }

// ---------------------------------------------------------------------------
// commands

inline int cmd_analytic(const RunConfig& c, const CLI::App& app, std::ostream& out) {
  const Model model = lead_time_model(c, app);
  Output sink(c.out, out);
  std::ostream& os = *sink;
  os.precision(std::numeric_limits<double>::max_digits10 - 2);
  detail::write_comment(os, header_for("analytic", c));
  os << "quantity,value\n";

  if (!c.limit.empty()) {
    const BmInputs in = bm_inputs(c, model, c.n, c.m, 0.0);
    if (c.limit == "rho1") kv(os, "bm_rho_to_1", bm_rho_to_1(in));
    if (c.limit == "rho-1") {
      kv(os, "bm_rho_to_minus1", bm_rho_to_minus1(in));
      kv(os, "bm_rho_to_minus1_general", bm_rho_to_minus1_general(in));
    }
    if (c.limit == "n-inf") kv(os, "bm_limit_n_inf", bm_limit_n_inf(in));
    if (c.limit == "m-inf") {
      if (!(std::abs(c.rho) < 1.0)) throw DomainError("the m -> infinity limit needs |rho| < 1");
      kv(os, "bm_limit_m_inf", bm_limit_m_inf(in.with_rho(c.rho)));
    }
    if (c.limit == "nm-inf") kv(os, "bm_limit_nm_inf", bm_limit_nm_inf());
    return kExitOk;
  }

  if (!(std::abs(c.rho) < 1.0)) {
    std::ostringstream msg;
    msg << "--rho " << c.rho << " is outside (-1, 1); use --limit " << (c.rho > 0 ? "rho1" : "rho-1")
        << " for the boundary value";
    throw DomainError(msg.str());
  }
  const BmInputs in = bm_inputs(c, model, c.n, c.m, c.rho);
  const BmResult r = bm_analytic(in);
  kv(os, "bm", r.value);
  kv(os, "lead_time_variability", r.lead_time_variability);
  kv(os, "lead_time_forecast", r.lead_time_forecast);
  kv(os, "demand_forecast", r.demand_forecast);
  kv(os, "bm_appendix", bm_appendix(in));
  kv(os, "bm_iid", bm_iid(in));
  if (in.sigma_l2 == 0.0) kv(os, "bm_constant_leadtime", bm_constant_leadtime(in.mu_l, in.n, in.rho()));
  if (in.n == 1) kv(os, "bm_n1", bm_n1(in));
  kv(os, "bm_limit_n_inf", bm_limit_n_inf(in));
  kv(os, "bm_limit_m_inf", bm_limit_m_inf(in));
  kv(os, "bm_limit_nm_inf", bm_limit_nm_inf());
  kv(os, "bm_rho_to_1", bm_rho_to_1(in));
  kv(os, "bm_rho_to_minus1", bm_rho_to_minus1(in));
  kv(os, "dbm_drho_at_zero", dbm_drho_at_zero(in));
  const StationaryPointReport sp = stationary_point_conditions(in);
  kv(os, "positive_region_rhs", sp.positive_rhs);
  kv(os, "positive_region_sufficient", sp.positive_region_sufficient ? 1.0 : 0.0);
  kv(os, "negative_region_rhs", sp.negative_rhs);
  kv(os, "negative_region_sufficient", sp.negative_region_sufficient ? 1.0 : 0.0);
  return kExitOk;
}

inline int cmd_simulate(const RunConfig& c, const CLI::App& app, std::ostream& out) {
  const Model model = lead_time_model(c, app);
  const BmInputs in = bm_inputs(c, model, c.n, c.m, c.rho);
  const LeadTimeDist dist = dist_for(model, in);
  const McSettings mc = mc_settings(c);
  if (mc.T < kMinMcPeriods) throw ConfigError("--T must be at least 10000");

  const SimTrace tr =
      simulate_replication(in, dist, mc.T, mc.burn_in, mc.demand_warmup, {mc.seed, 0}, c.tns);
  if (!c.trace_out.empty()) {
    Output trace_sink(c.trace_out, out);
    write_trace_csv(*trace_sink, tr, header_for("simulate", c));
  }

  Output sink(c.out, out);
  std::ostream& os = *sink;
  os.precision(std::numeric_limits<double>::max_digits10 - 2);
  detail::write_comment(os, header_for("simulate", c));
  os << "quantity,value\n";
  const double var_q = sample_variance(tr.measured_orders());
  const double var_d = sample_variance(tr.measured_demand());
  kv(os, "mean_order", sample_mean(tr.measured_orders()));
  kv(os, "var_q", var_q);
  kv(os, "var_d", var_d);
  kv(os, "bm_trace", var_q / var_d);
  if (c.reps >= 2) {
    const McEstimate est = estimate_bm_mc(in, dist, mc);
    kv(os, "bm_mc", est.bm_mc);
    kv(os, "bm_mc_se", est.se);
  }
  kv(os, "bm_analytic", bm_analytic(in).value);
  if (c.holding_cost > 0.0 || c.backlog_cost > 0.0) {
    const CostParams costs{c.holding_cost, c.backlog_cost};
    std::vector<double> base(tr.measured_net_stock().begin(), tr.measured_net_stock().end());
    for (double& v : base) v -= tr.tns;
    kv(os, "tns_empirical", tns_empirical(base, costs));
  }
  return kExitOk;
}

inline SweepSpec sweep_spec(const RunConfig& c, const Model& model, const Scenario& sc) {
  if (c.grid_points < 1) throw ConfigError("--grid-points must be >= 1");
  SweepSpec spec{linspace(c.rho_min, c.rho_max, c.grid_points), bm_inputs(c, model, sc.n, sc.m, 0.0),
                 std::nullopt, model.pmf, !c.hold_sigma_eps};
  if (c.mc) spec.mc = mc_settings(c);
  return spec;
}

inline int cmd_sweep(const RunConfig& c, const CLI::App& app, std::ostream& out) {
  const Model model = lead_time_model(c, app);
  std::vector<std::pair<Scenario, std::vector<BmCurvePoint>>> curves;
  for (const auto& sc : scenarios(c)) curves.emplace_back(sc, sweep_rho(sweep_spec(c, model, sc)));

  Output sink(c.out, out);
  std::vector<BmCurvePoint> all;
  for (const auto& [sc, pts] : curves) all.insert(all.end(), pts.begin(), pts.end());
  write_curve_csv(*sink, all, header_for("sweep", c));

  if (!c.long_out.empty()) {
    Output long_sink(c.long_out, out);
    detail::write_comment(*long_sink, header_for("sweep", c));
    bool first = true;
    for (const auto& [sc, pts] : curves) {
      write_long_csv(*long_sink, sc.name, pts, first);
      first = false;
    }
  }
  return kExitOk;
}

inline int cmd_validate(const RunConfig& c, const CLI::App& app, std::ostream& out, std::ostream& err) {
  const Model model = lead_time_model(c, app);
  std::vector<ValidationCase> grid;
  for (const auto& sc : scenarios(c))
    for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) grid.push_back({sc.name, bm_inputs(c, model, sc.n, sc.m, rho)});
  const ValidationReport report =
      validate(grid, [&](const BmInputs& in) { return dist_for(model, in); }, mc_settings(c));

  Output sink(c.out, out);
  write_validation_csv(*sink, report, header_for("validate", c));
  err << (report.all_pass() ? "validation passed: " : "validation FAILED: ") << report.rows.size() - report.failures()
            << "/" << report.rows.size() << " rows within tolerance\n";
  return report.all_pass() ? kExitOk : kExitValidationFailed;
}

inline int cmd_extrema(const RunConfig& c, const CLI::App& app, std::ostream& out) {
  const Model model = lead_time_model(c, app);
  Output sink(c.out, out);
  std::ostream& os = *sink;
  os.precision(std::numeric_limits<double>::max_digits10 - 2);
  detail::write_comment(os, header_for("extrema", c));
  os << "scenario,n,m,rho,kind,bm\n";
  for (const auto& sc : scenarios(c)) {
    const BmInputs in = bm_inputs(c, model, sc.n, sc.m, 0.0);
    for (const auto& p : find_stationary_points(in, c.region_lo, c.region_hi))
      os << sc.name << ',' << sc.n << ',' << sc.m << ',' << p.rho << ',' << to_string(p.kind) << ',' << p.bm << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline std::unique_ptr<CLI::App> make_app(RunConfig& c, std::string& command) {
  auto app = std::make_unique<CLI::App>("Bullwhip measure for AR(1) demand with forecast stochastic lead times",
                                        "bullwhip");
  app->set_config("--config", "", "TOML/INI configuration file");
  app->allow_config_extras(CLI::config_extras_mode::error);
  app->require_subcommand(1);
  app->fallthrough();
  add_options(*app, c);
  const std::pair<const char*, const char*> commands[] = {
      {"analytic", "closed-form bullwhip measure, components, limits and special cases"},
      {"simulate", "simulate the OUT policy and estimate the bullwhip measure"},
      {"sweep", "bullwhip measure over a rho grid, optionally with Monte Carlo"},
      {"validate", "closed form vs second analytic route vs Monte Carlo"},
      {"extrema", "stationary points of the bullwhip measure in rho"},
  };
  for (const auto& [name, description] : commands) {
    const char* cmd = name;
    app->add_subcommand(name, description)->callback([&command, cmd] { command = cmd; });
  }
  return app;
}

// Runs the CLI on argv-style arguments (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string command;
  auto app = make_app(c, command);
  try {
    std::reverse(args.begin(), args.end());
    app->parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  try {
    apply_preset(c, *app);
    if (command == "analytic") return cmd_analytic(c, *app, out);
    if (command == "simulate") return cmd_simulate(c, *app, out);
    if (command == "sweep") return cmd_sweep(c, *app, out);
    if (command == "validate") return cmd_validate(c, *app, out, err);
    if (command == "extrema") return cmd_extrema(c, *app, out);
    err << "error: no command given\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

// Parses a config file plus flags and returns the resolved configuration
// rendered as TOML. Used for round-trip checks.
inline std::string resolve_config(std::vector<std::string> args) {
  RunConfig c;
  std::string command;
  auto app = make_app(c, command);
  std::reverse(args.begin(), args.end());
  app->parse(args);
  apply_preset(c, *app);
  return to_config_string(c);
}

}  // namespace bullwhip::cli
