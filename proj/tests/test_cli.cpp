#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "ddsim/experiments.hpp"
#include "ddsim/report.hpp"

using namespace ddsim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "ddsim_test_cli" / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_of(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  return "<missing>";
}

// Small rotator keeps these runs quick.
const std::vector<std::string> kSmall{"--N", "256", "--periods", "20"};

std::vector<std::string> with(std::vector<std::string> head, const fs::path& out) {
  head.insert(head.end(), kSmall.begin(), kSmall.end());
  head.push_back("--out");
  head.push_back(out.string());
  return head;
}

}  // namespace

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
  const CliResult v = run({"--version"});
  EXPECT_EQ(v.code, cli::kOk);
  EXPECT_NE(v.out.find(DDSIM_VERSION), std::string::npos);
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run({}).code, cli::kConfigError);
  EXPECT_EQ(run({"trace", "--bogus", "1"}).code, cli::kConfigError);
  EXPECT_EQ(run(with({"trace", "--N", "100"}, fresh_dir("badn"))).code, cli::kConfigError);
  EXPECT_EQ(run(with({"trace", "--protocol", "cdd"}, fresh_dir("badp"))).code, cli::kConfigError);
  EXPECT_EQ(run(with({"trace", "--reps", "0"}, fresh_dir("badr"))).code, cli::kConfigError);
  EXPECT_EQ(run({"trace", "--config", "/nonexistent/cfg.ini"}).code, cli::kConfigError);
}

TEST(Cli, UnwritableOutputIsRuntimeError) {
  const CliResult r = run({"trace", "--N", "256", "--n", "2", "--out", "/proc/ddsim_cannot_write"});
  EXPECT_EQ(r.code, cli::kRuntimeError);
}

TEST(Cli, IdealTrace) {
  const fs::path dir = fresh_dir("trace");
  const CliResult r = run(with({"trace", "--n", "5"}, dir));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const CsvTable t = read_csv(dir / "trace.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "s", "q"}));
  EXPECT_NEAR(t.rows.front()[1], 1.0, 1e-15);
  const KeyValues kv = read_key_values(dir / "manifest.txt");
  EXPECT_EQ(value_of(kv, "command"), "trace");
  EXPECT_EQ(value_of(kv, "N"), "256");
  EXPECT_EQ(value_of(kv, "n"), "5");
  EXPECT_EQ(value_of(kv, "protocol"), "udd");
  for (const char* key : {"tool", "version", "timestamp", "seed", "T0", "k", "T", "env", "workers",
                          "wall_seconds"}) {
    EXPECT_NE(value_of(kv, key), "<missing>") << key;
  }
  EXPECT_DOUBLE_EQ(t.rows.back()[0], std::stod(value_of(kv, "T")));
}

TEST(Cli, EnsembleTrace) {
  const fs::path dir = fresh_dir("ensemble");
  const CliResult r = run(with({"trace", "--n", "6", "--xi", "0.01", "--reps", "8"}, dir));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const CsvTable t = read_csv(dir / "trace.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "s", "q", "s_mean", "s_stderr", "q_mean"}));
}

TEST(Cli, ConfigFileWithOverride) {
  const fs::path dir = fresh_dir("config");
  fs::create_directories(dir);
  const fs::path cfg = dir / "run.ini";
  {
    std::ofstream c(cfg);
    c << "# reference-style config\nN = 256\nperiods = 20\nn = 7\nprotocol = \"pdd\"\n";
  }
  const CliResult r = run({"trace", "--config", cfg.string(), "--n", "3", "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const KeyValues kv = read_key_values(dir / "o" / "manifest.txt");
  EXPECT_EQ(value_of(kv, "n"), "3");
  EXPECT_EQ(value_of(kv, "protocol"), "pdd");
  EXPECT_EQ(value_of(kv, "N"), "256");

  {
    std::ofstream c(cfg);
    c << "N = 256\nbogus = 1\n";
  }
  EXPECT_EQ(run({"trace", "--config", cfg.string(), "--out", (dir / "p").string()}).code,
            cli::kConfigError);
}

TEST(Cli, CustomFractionsFile) {
  const fs::path dir = fresh_dir("custom");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "fr.txt");
    f << "0.2\n0.5\n0.9\n";
  }
  const CliResult r = run(with({"trace", "--protocol", "custom", "--fractions", (dir / "fr.txt").string()}, dir / "o"));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const KeyValues kv = read_key_values(dir / "o" / "manifest.txt");
  EXPECT_EQ(value_of(kv, "n"), "3");
  EXPECT_EQ(value_of(kv, "custom_fractions"), "0.20000000000000001,0.5,0.90000000000000002");
  EXPECT_EQ(run(with({"trace", "--protocol", "custom"}, dir / "p")).code, cli::kConfigError);
}

TEST(Cli, BitIdenticalAcrossRerunsAndWorkers) {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  set_worker_count(1);
  ASSERT_EQ(run(with({"trace", "--n", "10", "--xi", "0.02", "--reps", "12", "--seed", "4"}, a)).code, 0);
  set_worker_count(5);
  ASSERT_EQ(run(with({"trace", "--n", "10", "--xi", "0.02", "--reps", "12", "--seed", "4"}, b)).code, 0);
  set_worker_count(0);
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
}

TEST(Cli, SweepXi) {
  const fs::path dir = fresh_dir("sweep");
  const CliResult r = run(with({"sweep-xi", "--n", "10", "--xi-list", "0.001,0.002,0.004", "--reps", "6"}, dir));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const CsvTable t = read_csv(dir / "sweep.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"xi", "xi2", "one_minus_s_mean", "stderr"}));
  EXPECT_EQ(t.rows.size(), 3u);
  const KeyValues fit = read_key_values(dir / "fit.txt");
  EXPECT_NE(value_of(fit, "slope"), "<missing>");
  EXPECT_NE(value_of(fit, "r_squared"), "<missing>");
}

TEST(Cli, SweepXiDegenerateAndLargeRegime) {
  EXPECT_EQ(run(with({"sweep-xi", "--n", "10", "--xi-list", "0.01,0.01,0.02"}, fresh_dir("deg"))).code,
            cli::kConfigError);
  const fs::path dir = fresh_dir("large");
  const CliResult r = run(with({"sweep-xi", "--n", "100", "--xi-list", "0.01,0.02,0.05", "--reps", "2"}, dir));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(slurp(dir / "fit.txt").find("fit = skipped"), std::string::npos);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Cli, SweepN) {
  const fs::path dir = fresh_dir("sweepn");
  const CliResult r = run(with({"sweep-n", "--n-list", "4,8", "--xi", "0.01", "--reps", "4"}, dir));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "trace_n4.csv"));
  EXPECT_TRUE(fs::exists(dir / "trace_n8.csv"));
  const CsvTable t = read_csv(dir / "sweep_n.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"n", "one_minus_s_ideal", "one_minus_s_mean", "stderr"}));
  EXPECT_EQ(t.rows.size(), 2u);
}

TEST(Cli, CompareIdenticalProtocols) {
  const fs::path dir = fresh_dir("cmp");
  const CliResult r = run(with({"compare", "--n-list", "6", "--protocols", "udd,udd", "--grid", "21"}, dir));
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(slurp(dir / "crossover.txt").find("zero difference"), std::string::npos);
  const CsvTable t = read_csv(dir / "compare_udd.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"t", "s_n6", "q_n6"}));
  EXPECT_EQ(t.rows.size(), 21u);
}

TEST(Cli, VerifyExitCodes) {
  const CliResult ok = run({"verify"});
  EXPECT_EQ(ok.code, cli::kOk) << ok.out;
  EXPECT_NE(ok.out.find("0 failed"), std::string::npos);
  const CliResult bad = run({"verify", "--inject-fault"});
  EXPECT_EQ(bad.code, cli::kVerifyFailed);
  EXPECT_NE(bad.out.find("failing:"), std::string::npos);
  EXPECT_EQ(run({"verify", "--level", "slow"}).code, cli::kConfigError);
}
