#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using bullwhip::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, double> key_values(const std::string& csv) {
  std::map<std::string, double> kv;
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    try {
      kv[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
    }
  }
  return kv;
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream is(csv);
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("bullwhip_cli_" + std::to_string(std::rand()) + "_" +
                                         ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

}  // namespace

TEST(CliAnalytic, IidPaperValue) {
  const auto r = invoke({"analytic", "--preset", "fig3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(key_values(r.out).at("bm"), 328.5, 1e-9);
  EXPECT_NEAR(key_values(r.out).at("bm_appendix"), 328.5, 1e-9);
}

TEST(CliAnalytic, ConstantLeadTime) {
  const auto r = invoke({"analytic", "--mu-l", "2", "--sigma-l", "0", "--n", "4", "--m", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(key_values(r.out).at("bm"), 2.5, 1e-12);
  EXPECT_NEAR(key_values(r.out).at("bm_constant_leadtime"), 2.5, 1e-12);
}

TEST(CliAnalytic, BoundaryRhoPointsToLimit) {
  const auto r = invoke({"analytic", "--preset", "fig3", "--rho", "1.0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--limit rho1"), std::string::npos) << r.err;
  const auto lim = invoke({"analytic", "--preset", "fig3", "--limit", "rho1"});
  ASSERT_EQ(lim.code, 0) << lim.err;
  EXPECT_NEAR(key_values(lim.out).at("bm_rho_to_1"), 326.0, 1e-9);
  const auto neg = invoke({"analytic", "--preset", "fig3", "--limit", "rho-1"});
  EXPECT_NEAR(key_values(neg.out).at("bm_rho_to_minus1"), 339.0, 1e-9);
}

TEST(CliAnalytic, ExplicitPmf) {
  const auto r = invoke({"analytic", "--pmf", "5:0.5", "15:0.5", "--n", "5", "--m", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(key_values(r.out).at("bm"), 328.5, 1e-9);
  const auto clash = invoke({"analytic", "--pmf", "5:0.5", "15:0.5", "--mu-l", "3"});
  EXPECT_EQ(clash.code, 2);
  const auto bad = invoke({"analytic", "--pmf", "5:0.5", "15:0.4"});
  EXPECT_EQ(bad.code, 2);
}

TEST(CliErrors, InvalidInputsExitTwo) {
  EXPECT_EQ(invoke({"analytic", "--n", "0"}).code, 2);
  EXPECT_EQ(invoke({"analytic", "--sigma-d", "-1"}).code, 2);
  EXPECT_EQ(invoke({"analytic", "--preset", "fig99"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"simulate", "--T", "100"}).code, 2);
  EXPECT_EQ(invoke({"extrema", "--region-lo", "-2"}).code, 2);
}

TEST(CliSimulate, DeterministicTraceAndSummary) {
  TempDir dir;
  const std::vector<std::string> base{"simulate", "--preset", "fig3", "--T", "20000", "--reps", "4", "--seed", "7"};
  auto a_args = base;
  a_args.insert(a_args.end(), {"--trace-out", (dir / "a.csv").string(), "--out", (dir / "a_sum.csv").string()});
  auto b_args = base;
  b_args.insert(b_args.end(), {"--trace-out", (dir / "b.csv").string(), "--out", (dir / "b_sum.csv").string()});
  ASSERT_EQ(invoke(a_args).code, 0);
  ASSERT_EQ(invoke(b_args).code, 0);
  const std::string a = slurp(dir / "a.csv");
  const std::string b = slurp(dir / "b.csv");
  // headers differ only in the output paths
  const auto body = [](const std::string& s) { return s.substr(s.find("\nt,demand")); };
  EXPECT_EQ(body(a), body(b));
  EXPECT_EQ(data_lines(a).size(), 20'000u + 10 * (5 + 2 + 15) + 1000 + 1);
}

TEST(CliSimulate, MatchesAnalytic) {
  const auto r = invoke({"simulate", "--preset", "fig3", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(r.out);
  EXPECT_NEAR(kv.at("bm_mc"), 328.5, 3 * kv.at("bm_mc_se"));
  EXPECT_NEAR(kv.at("mean_order"), 20.0, 0.5);
}

TEST(CliSimulate, EmpiricalTns) {
  const auto r = invoke({"simulate", "--preset", "fig3", "--T", "50000", "--reps", "1", "--holding-cost", "1",
                         "--backlog-cost", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(key_values(r.out).count("tns_empirical"));
  EXPECT_FALSE(key_values(r.out).count("bm_mc"));
}

TEST(CliSweep, PresetGrid) {
  const auto r = invoke({"sweep", "--preset", "fig3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 202u);
  EXPECT_EQ(lines[0], bullwhip::kCurveColumns);
  const auto all = invoke({"sweep", "--preset", "paper", "--grid-points", "11"});
  EXPECT_EQ(data_lines(all.out).size(), 8u * 11 + 1);
}

TEST(CliSweep, LongFormat) {
  TempDir dir;
  const auto r = invoke({"sweep", "--preset", "paper", "--grid-points", "3", "--long-out", (dir / "l.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(slurp(dir / "l.csv"));
  EXPECT_EQ(lines.front(), "scenario,n,m,rho,series,value");
  EXPECT_EQ(lines.size(), 8u * 3 * 2 + 1);
}

TEST(CliExtrema, OddWindow) {
  const auto r = invoke({"extrema", "--preset", "fig3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_NE(lines[1].find(",min,"), std::string::npos);
  EXPECT_NE(lines[2].find(",max,"), std::string::npos);
}

TEST(CliValidate, ExitCodes) {
  const auto ok = invoke({"validate", "--preset", "fig3", "--T", "50000", "--reps", "8"});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_EQ(data_lines(ok.out).size(), 6u);
  // too few periods for a Monte Carlo estimate
  const auto bad = invoke({"validate", "--preset", "fig3", "--T", "1000", "--reps", "8"});
  EXPECT_EQ(bad.code, 2);
}

TEST(CliConfig, RoundTripIsIdempotent) {
  TempDir dir;
  {
    std::ofstream f(dir / "in.toml");
    f << "preset = \"fig4\"\nrho = 0.25\nseed = 5\nT = 30000\nreps = 4\nmc = true\n";
  }
  const std::string first = bullwhip::cli::resolve_config({"sweep", "--config", (dir / "in.toml").string()});
  {
    std::ofstream f(dir / "out.toml");
    f << first;
  }
  const std::string second = bullwhip::cli::resolve_config({"sweep", "--config", (dir / "out.toml").string()});
  EXPECT_EQ(first, second);
  EXPECT_NE(first.find("n = 6"), std::string::npos);
  EXPECT_NE(first.find("rho = 0.25"), std::string::npos);
}

TEST(CliConfig, FlagsOverrideFile) {
  TempDir dir;
  {
    std::ofstream f(dir / "c.toml");
    f << "n = 7\nm = 3\n";
  }
  const std::string cfg = bullwhip::cli::resolve_config({"analytic", "--config", (dir / "c.toml").string(), "--n", "9"});
  EXPECT_NE(cfg.find("n = 9"), std::string::npos);
  EXPECT_NE(cfg.find("m = 3"), std::string::npos);
}

TEST(CliConfig, UnknownKeyIsAnError) {
  TempDir dir;
  {
    std::ofstream f(dir / "bad.toml");
    f << "n = 5\nwindow = 3\n";
  }
  EXPECT_EQ(invoke({"analytic", "--config", (dir / "bad.toml").string()}).code, 2);
}

TEST(CliConfig, OutputHeaderReloads) {
  TempDir dir;
  const auto r = invoke({"analytic", "--preset", "fig5", "--rho", "0.3"});
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::ofstream f(dir / "h.toml");
  std::string line;
  std::getline(is, line);  // command line
  while (std::getline(is, line) && line.rfind("# ", 0) == 0) f << line.substr(2) << '\n';
  f.close();
  const auto again = invoke({"analytic", "--config", (dir / "h.toml").string()});
  ASSERT_EQ(again.code, 0) << again.err;
  EXPECT_EQ(data_lines(again.out), data_lines(r.out));
}

TEST(CliConfig, SeedFromEnvironment) {
  ::setenv("BULLWHIP_SEED", "4242", 1);
  const std::string cfg = bullwhip::cli::resolve_config({"analytic"});
  const std::string flag = bullwhip::cli::resolve_config({"analytic", "--seed", "1"});
  ::unsetenv("BULLWHIP_SEED");
  EXPECT_NE(cfg.find("seed = 4242"), std::string::npos);
  EXPECT_NE(flag.find("seed = 1\n"), std::string::npos);
}

TEST(CliPresets, EncodeScenarioWindows) {
  for (const auto& sc : bullwhip::paper_scenarios()) {
    const std::string cfg = bullwhip::cli::resolve_config({"analytic", "--preset", sc.name});
    EXPECT_NE(cfg.find("\nn = " + std::to_string(sc.n) + "\n"), std::string::npos) << sc.name;
    EXPECT_NE(cfg.find("\nm = " + std::to_string(sc.m) + "\n"), std::string::npos) << sc.name;
    EXPECT_NE(cfg.find("mu-d = 20\n"), std::string::npos);
    EXPECT_NE(cfg.find("sigma-d = 4\n"), std::string::npos);
    EXPECT_NE(cfg.find("mu-l = 10\n"), std::string::npos);
    EXPECT_NE(cfg.find("sigma-l = 5\n"), std::string::npos);
  }
}
