#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ddsim/experiments.hpp"
#include "ddsim/model.hpp"
#include "ddsim/noise.hpp"
#include "ddsim/oracle.hpp"
#include "ddsim/report.hpp"
#include "ddsim/sequences.hpp"

namespace ddsim::cli {

namespace fs = std::filesystem;

namespace {

// Raised for anything the user can fix in the configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raw option values as parsed; resolve() turns them into domain objects.
struct Options {
  std::string config;
  double omega_a = 1.5e3;
  double g = 100.0;
  double lambda = 1e3;
  double K = 1e3;
  int N = 4096;
  int periods = 50;

  std::string protocol = "udd";
  int n = 50;
  std::string fractions;
  double xi = 0.0;
  std::string axes = "yz";
  std::uint64_t seed = 1;
  int reps = 200;
  int stride = 1;
  std::string out = "out";

  std::string env_a = "x";
  int env_l0 = 0;

  std::vector<double> xi_list;
  double xi_min = 0.0;
  double xi_max = 0.0;
  int xi_count = 8;
  std::vector<int> n_list;
  std::vector<std::string> protocols{"udd", "pdd"};
  int grid = 501;

  std::string level = "fast";
  bool inject_fault = false;
};

struct Resolved {
  ModelParams params;
  PulseSchedule schedule;
  ErrorModel errors;
  EnvInit env;
  std::vector<std::string> warnings;
};

template <class F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

EnvInit resolve_env(const Options& o, int N) {
  EnvInit env = default_env();
  const double r = 1.0 / std::sqrt(2.0);
  if (o.env_a == "x") {
    env.a_state << r, r;
  } else if (o.env_a == "y") {
    env.a_state << r, Complex(0.0, r);
  } else if (o.env_a == "up") {
    env.a_state << 1.0, 0.0;
  } else if (o.env_a == "down") {
    env.a_state << 0.0, 1.0;
  } else {
    throw ConfigError("env-a must be one of x, y, up, down");
  }
  if (o.env_l0 < -N / 2 || o.env_l0 >= N / 2) {
    throw ConfigError(fmt::format("env-l0 must lie in [{}, {})", -N / 2, N / 2));
  }
  env.rotator = MomentumEigenstate{o.env_l0};
  return env;
}

PulseSchedule resolve_schedule(const Options& o) {
  const Protocol proto = as_config([&] { return parse_protocol(o.protocol); });
  if (proto == Protocol::Custom) {
    if (o.fractions.empty()) throw ConfigError("protocol custom needs --fractions <path>");
    try {
      return load_fractions(o.fractions);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (!o.fractions.empty()) throw ConfigError("--fractions is only valid with protocol custom");
  if (o.n < 0) throw ConfigError("n must be >= 0");
  return make_schedule(proto, o.n);
}

Resolved resolve(const Options& o) {
  Resolved r;
  r.params = as_config([&] { return make_params(o.omega_a, o.g, o.lambda, o.K, o.N, o.periods); });
  r.schedule = resolve_schedule(o);
  if (!(o.xi >= 0.0) || !std::isfinite(o.xi)) throw ConfigError("xi must be finite and >= 0");
  r.errors = ErrorModel{o.xi, as_config([&] { return parse_axes(o.axes); }), o.seed};
  r.env = resolve_env(o, o.N);
  if (o.reps < 1) throw ConfigError("reps must be >= 1");
  if (o.stride < 1) throw ConfigError("stride must be >= 1");
  r.warnings = param_warnings(r.params);
  for (auto& w : error_model_warnings(r.errors)) r.warnings.push_back(std::move(w));
  return r;
}

fs::path prepare_out(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
  // Probe writability before any computation.
  const fs::path probe = dir / ".ddsim_write_probe";
  write_text(probe, "");
  fs::remove(probe, ec);
  return dir;
}

std::string join(const std::vector<std::string>& xs, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
  return s;
}

template <class T>
std::string join_numbers(const std::vector<T>& xs) {
  std::vector<std::string> parts;
  for (const T& x : xs) {
    if constexpr (std::is_floating_point_v<T>) {
      parts.push_back(format_double(x));
    } else {
      parts.push_back(std::to_string(x));
    }
  }
  return join(parts);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Manifest {
 public:
  Manifest(std::string command, const Options& o, const Resolved& r)
      : start_(std::chrono::steady_clock::now()) {
    kv_ = {
        {"tool", "ddsim"},
        {"version", DDSIM_VERSION},
        {"command", std::move(command)},
        {"timestamp", utc_timestamp()},
        {"omega-a", format_double(o.omega_a)},
        {"g", format_double(o.g)},
        {"lambda", format_double(o.lambda)},
        {"K", format_double(o.K)},
        {"N", std::to_string(o.N)},
        {"periods", std::to_string(o.periods)},
        {"protocol", o.protocol},
        {"n", std::to_string(r.schedule.n())},
        {"fractions", o.fractions},
        {"xi", format_double(o.xi)},
        {"axes", std::string(to_string(r.errors.axes))},
        {"seed", std::to_string(o.seed)},
        {"reps", std::to_string(o.reps)},
        {"stride", std::to_string(o.stride)},
        {"env-a", o.env_a},
        {"env-l0", std::to_string(o.env_l0)},
        {"T0", format_double(r.params.T0)},
        {"k", format_double(r.params.k)},
        {"T", format_double(r.params.T)},
        {"env", describe(r.env)},
    };
    if (r.schedule.protocol == Protocol::Custom) {
      kv_.emplace_back("custom_fractions", join_numbers(r.schedule.fractions));
    }
  }

  void add(std::string key, std::string value) { kv_.emplace_back(std::move(key), std::move(value)); }

  void write(const fs::path& dir, const std::vector<std::string>& warnings) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    add("workers", std::to_string(worker_count()));
    add("wall_seconds", fmt::format("{:.3f}", secs));
    for (const auto& w : warnings) add("warning", w);
    write_key_values(dir / "manifest.txt", kv_);
  }

 private:
  std::chrono::steady_clock::time_point start_;
  KeyValues kv_;
};

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

CsvTable trace_table(const std::vector<SignalPoint>& pts) {
  CsvTable t{{"t", "s", "q"}, {}};
  for (const auto& p : pts) t.rows.push_back({p.t, p.s, p.q});
  return t;
}

CsvTable ensemble_table(const EnsembleTrace& tr) {
  CsvTable t{{"t", "s", "q", "s_mean", "s_stderr", "q_mean"}, {}};
  for (std::size_t i = 0; i < tr.ideal.size(); ++i) {
    const auto& p = tr.ideal[i];
    t.rows.push_back({p.t, p.s, p.q, tr.s_mean[i], tr.s_stderr[i], tr.q_mean[i]});
  }
  return t;
}

int cmd_trace(const Options& o, std::ostream& out, std::ostream& err) {
  Resolved r = resolve(o);
  const fs::path dir = prepare_out(o);
  print_warnings(r.warnings, err);
  Manifest man("trace", o, r);
  TraceOptions topts;
  topts.stride = o.stride;
  if (o.xi == 0.0) {
    const auto pts = trace_run(r.params, r.schedule,
                               std::vector<PulseError>(static_cast<std::size_t>(r.schedule.n())),
                               r.env, topts);
    write_csv(dir / "trace.csv", trace_table(pts));
    out << fmt::format("s(T) = {}  q(T) = {}  ({} points)\n", format_double(pts.back().s),
                       format_double(pts.back().q), pts.size());
  } else {
    const EnsembleTrace tr = monte_carlo_trace(r.params, r.schedule, r.errors, o.reps, r.env, topts);
    write_csv(dir / "trace.csv", ensemble_table(tr));
    out << fmt::format("ideal s(T) = {}  mean s_eps(T) = {} +/- {}  ({} realizations)\n",
                       format_double(tr.ideal.back().s), format_double(tr.final.mean_s),
                       format_double(tr.final.stderr_s), tr.final.realizations);
  }
  man.write(dir, r.warnings);
  return kOk;
}

std::vector<double> resolve_xi_grid(const Options& o) {
  std::vector<double> grid = o.xi_list;
  if (grid.empty()) {
    if (!(o.xi_min > 0.0) || !(o.xi_max > o.xi_min) || o.xi_count < 3) {
      throw ConfigError("sweep-xi needs --xi-list or 0 < --xi-min < --xi-max with --xi-count >= 3");
    }
    grid = geometric_grid(o.xi_min, o.xi_max, o.xi_count);
  }
  for (double x : grid) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("xi values must be finite and >= 0");
  }
  const std::set<double> distinct(grid.begin(), grid.end());
  if (distinct.size() < 3) {
    throw ConfigError(fmt::format(
        "degenerate sweep: {} distinct xi value(s); a scaling fit needs at least 3", distinct.size()));
  }
  return grid;
}

int cmd_sweep_xi(const Options& o, std::ostream& out, std::ostream& err) {
  Resolved r = resolve(o);
  const std::vector<double> grid = resolve_xi_grid(o);
  if (r.schedule.n() < 1) throw ConfigError("sweep-xi needs at least one pulse");
  const fs::path dir = prepare_out(o);
  Manifest man("sweep-xi", o, r);
  man.add("xi-list", join_numbers(grid));

  const XiSweep sweep = sweep_xi(r.params, r.schedule, grid, o.reps, o.seed, r.errors.axes, r.env);
  for (const auto& w : sweep.warnings) r.warnings.push_back(w);
  print_warnings(r.warnings, err);

  CsvTable t{{"xi", "xi2", "one_minus_s_mean", "stderr"}, {}};
  for (const auto& p : sweep.points) t.rows.push_back({p.xi, p.xi2, p.one_minus_s_mean, p.stderr_s});
  write_csv(dir / "sweep.csv", t);

  const int n = r.schedule.n();
  const double root_n = std::sqrt(static_cast<double>(n));
  const double max_xi = *std::max_element(grid.begin(), grid.end());
  const SignalPoint ideal =
      SignalTracer(r.params, r.schedule, r.env).final_point(std::vector<PulseError>(std::size_t(n)));
  std::ostringstream fit;
  fit << "n = " << n << '\n'
      << "ideal_one_minus_s = " << format_double(1.0 - ideal.s) << '\n'
      << "max_xi_sqrt_n = " << format_double(max_xi * root_n) << '\n';
  if (max_xi * root_n > kSmallRegime) {
    fit << "fit = skipped (xi sqrt(n) exceeds " << kSmallRegime
        << "; the linear law in xi^2 applies only below it)\n";
    out << "large-xi sweep written; fit skipped\n";
  } else {
    const FitResult f = fit_sweep(sweep, n);
    const double z = std::abs(f.intercept - (1.0 - ideal.s)) / f.intercept_stderr;
    fit << "slope = " << format_double(f.slope) << '\n'
        << "slope_stderr = " << format_double(f.slope_stderr) << '\n'
        << "intercept = " << format_double(f.intercept) << '\n'
        << "intercept_stderr = " << format_double(f.intercept_stderr) << '\n'
        << "r_squared = " << format_double(f.r_squared) << '\n'
        << "c2_estimate = " << format_double(f.c2_estimate) << '\n'
        << "intercept_vs_ideal_sigmas = " << format_double(z) << '\n';
    out << fmt::format("slope = {:.6g}  R^2 = {:.6f}  C2 = {:.6g}\n", f.slope, f.r_squared,
                       f.c2_estimate);
  }
  write_text(dir / "fit.txt", fit.str());
  man.write(dir, r.warnings);
  return kOk;
}

std::vector<int> resolve_n_list(const Options& o, std::vector<int> fallback) {
  std::vector<int> ns = o.n_list.empty() ? std::move(fallback) : o.n_list;
  for (int n : ns) {
    if (n < 0) throw ConfigError("pulse counts must be >= 0");
  }
  if (std::set<int>(ns.begin(), ns.end()).size() != ns.size()) {
    throw ConfigError("n-list contains duplicates");
  }
  return ns;
}

int cmd_sweep_n(const Options& o, std::ostream& out, std::ostream& err) {
  Resolved r = resolve(o);
  const std::vector<int> ns = resolve_n_list(o, {200, 500});
  const Protocol proto = r.schedule.protocol;
  if (proto == Protocol::Custom) throw ConfigError("sweep-n needs a built-in protocol");
  const fs::path dir = prepare_out(o);
  print_warnings(r.warnings, err);
  Manifest man("sweep-n", o, r);
  man.add("n-list", join_numbers(ns));

  TraceOptions topts;
  topts.stride = o.stride;
  const auto entries = sweep_n(r.params, proto, r.errors, ns, o.reps, r.env, topts);
  CsvTable summary{{"n", "one_minus_s_ideal", "one_minus_s_mean", "stderr"}, {}};
  for (const auto& e : entries) {
    write_csv(dir / fmt::format("trace_n{}.csv", e.n), ensemble_table(e.trace));
    summary.rows.push_back({static_cast<double>(e.n), 1.0 - e.trace.ideal.back().s,
                            1.0 - e.trace.final.mean_s, e.trace.final.stderr_s});
    out << fmt::format("n = {}: 1 - s(T) ideal {:.6g}, mean {:.6g} +/- {:.2g}\n", e.n,
                       1.0 - e.trace.ideal.back().s, 1.0 - e.trace.final.mean_s,
                       e.trace.final.stderr_s);
  }
  write_csv(dir / "sweep_n.csv", summary);
  man.write(dir, r.warnings);
  return kOk;
}

std::string describe_leads(const std::vector<LeadInterval>& iv, const std::string& a,
                           const std::string& b, double T) {
  std::ostringstream os;
  for (const auto& x : iv) {
    const std::string who = x.leader > 0 ? a + " leads" : (x.leader < 0 ? b + " leads" : "tie");
    os << fmt::format("  {} on t/T in [{:.4f}, {:.4f}]\n", who, x.t_begin / T, x.t_end / T);
  }
  return os.str();
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
  Resolved r = resolve(o);
  const std::vector<int> ns = resolve_n_list(o, {50, 200, 500});
  std::vector<Protocol> protos;
  for (const auto& name : o.protocols) {
    const Protocol p = as_config([&] { return parse_protocol(name); });
    if (p == Protocol::Custom) throw ConfigError("compare takes udd, pdd or cpmg");
    protos.push_back(p);
  }
  if (protos.empty()) throw ConfigError("compare needs at least one protocol");
  if (o.grid < 2) throw ConfigError("grid must be >= 2");
  const fs::path dir = prepare_out(o);
  print_warnings(r.warnings, err);
  Manifest man("compare", o, r);
  man.add("n-list", join_numbers(ns));
  man.add("protocols", join(o.protocols));
  man.add("grid", std::to_string(o.grid));

  const ComparisonTable table = compare_protocols(r.params, ns, protos, o.grid, r.env);
  std::set<Protocol> written;
  for (Protocol p : protos) {
    if (!written.insert(p).second) continue;
    CsvTable t{{"t"}, {}};
    for (int n : ns) {
      t.header.push_back(fmt::format("s_n{}", n));
      t.header.push_back(fmt::format("q_n{}", n));
    }
    for (std::size_t i = 0; i < table.grid.size(); ++i) {
      std::vector<double> row{table.grid[i]};
      for (int n : ns) {
        const auto& tr = table.at(p, n);
        row.push_back(tr.s[i]);
        row.push_back(tr.q[i]);
      }
      t.rows.push_back(std::move(row));
    }
    write_csv(dir / fmt::format("compare_{}.csv", to_string(p)), t);
  }

  std::ostringstream cx;
  const double T = r.params.T;
  for (int n : ns) {
    cx << "n = " << n << '\n';
    for (std::size_t a = 0; a < protos.size(); ++a) {
      for (std::size_t b = a + 1; b < protos.size(); ++b) {
        const auto& ta = table.at(protos[a], n);
        const auto& tb = table.at(protos[b], n);
        const std::string na(to_string(protos[a]));
        const std::string nb(to_string(protos[b]));
        double max_diff = 0.0;
        for (std::size_t i = 0; i < ta.s.size(); ++i) {
          max_diff = std::max(max_diff, std::abs(ta.s[i] - tb.s[i]));
        }
        cx << " " << na << " vs " << nb << ": max |ds| = " << format_double(max_diff) << '\n';
        if (max_diff == 0.0) {
          cx << "  zero difference on t/T in [0, 1]\n";
          continue;
        }
        // Share of grid points each protocol leads, overall and for t > T/2.
        int lead_a = 0, lead_b = 0, late_a = 0, late_b = 0, total = 0, late = 0;
        for (std::size_t i = 0; i < ta.s.size(); ++i) {
          if (table.grid[i] <= 0.0) continue;
          const bool is_late = table.grid[i] > 0.5 * T;
          ++total;
          late += is_late;
          const double d = ta.s[i] - tb.s[i];
          if (d > 1e-12) {
            ++lead_a;
            late_a += is_late;
          } else if (d < -1e-12) {
            ++lead_b;
            late_b += is_late;
          }
        }
        cx << fmt::format("  summary: on (0,T] {} leads {}/{} points, {} leads {}/{}; "
                          "for t > T/2 {} leads {}/{}, {} leads {}/{}\n",
                          na, lead_a, total, nb, lead_b, total, na, late_a, late, nb, late_b, late);
        cx << describe_leads(lead_intervals(table.grid, ta.s, tb.s), na, nb, T);
      }
    }
  }
  write_text(dir / "crossover.txt", cx.str());
  out << cx.str();
  man.write(dir, r.warnings);
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  SuiteOptions so;
  so.level = as_config([&] { return parse_verify_level(o.level); });
  so.seed = o.seed;
  so.flip_pulse_sign = o.inject_fault;
  const SuiteReport rep = run_oracle_suite(so);
  for (const auto& row : rep.rows) {
    out << fmt::format("{:<4}  {:<52} {:>11.3e}  tol {:>8.1e}  {}\n", row.pass ? "ok" : "FAIL",
                       row.name, row.value, row.tolerance, row.detail);
  }
  std::vector<std::string> failed;
  for (const auto& row : rep.rows) {
    if (!row.pass) failed.push_back(row.name);
  }
  out << fmt::format("{} checks, {} failed, {:.2f} s\n", rep.rows.size(), failed.size(), rep.seconds);
  if (!failed.empty()) {
    out << "failing: " << join(failed, "; ") << '\n';
    return kVerifyFailed;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Dynamical-decoupling simulator: qubit + kicked-rotator environment", "ddsim"};
  app.set_version_flag("--version", DDSIM_VERSION);
  app.require_subcommand(1);
  app.set_config("--config", "", "Key = value file; command-line flags override its keys");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--omega-a", o.omega_a, "A-qubit splitting")->capture_default_str();
  app.add_option("--g", o.g, "S-A coupling")->capture_default_str();
  app.add_option("--lambda", o.lambda, "A-rotator kick coupling")->capture_default_str();
  app.add_option("--K", o.K, "Stochasticity parameter K = k T0")->capture_default_str();
  app.add_option("--N", o.N, "Rotator dimension (power of two >= 8)")->capture_default_str();
  app.add_option("--periods", o.periods, "Kick periods in the horizon")->capture_default_str();
  app.add_option("--protocol", o.protocol, "udd|pdd|cpmg|custom")->capture_default_str();
  app.add_option("--n", o.n, "Pulse count")->capture_default_str();
  app.add_option("--fractions", o.fractions, "Custom schedule: one fraction per line");
  app.add_option("--xi", o.xi, "Pulse-error dispersion")->capture_default_str();
  app.add_option("--axes", o.axes, "Error axes: y|yz")->capture_default_str();
  app.add_option("--seed", o.seed, "Base seed")->capture_default_str();
  app.add_option("--reps", o.reps, "Error realizations")->capture_default_str();
  app.add_option("--stride", o.stride, "Emit every stride-th event")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--env-a", o.env_a, "Initial A state: x|y|up|down")->capture_default_str();
  app.add_option("--env-l0", o.env_l0, "Initial rotator momentum")->capture_default_str();
  app.add_option("--xi-list", o.xi_list, "Explicit xi grid")->delimiter(',');
  app.add_option("--xi-min", o.xi_min, "Geometric xi grid start");
  app.add_option("--xi-max", o.xi_max, "Geometric xi grid end");
  app.add_option("--xi-count", o.xi_count, "Geometric xi grid size")->capture_default_str();
  app.add_option("--n-list", o.n_list, "Pulse counts")->delimiter(',');
  app.add_option("--protocols", o.protocols, "Protocols to compare")->delimiter(',');
  app.add_option("--grid", o.grid, "Shared time grid points")->capture_default_str();
  app.add_option("--level", o.level, "Verify level: fast|full")->capture_default_str();
  app.add_flag("--inject-fault", o.inject_fault, "Flip the substituted pulse sign (self-test)")
      ->group("");

  auto* trace = app.add_subcommand("trace", "Signal s(t), q(t) along one schedule");
  auto* sweep_xi_cmd = app.add_subcommand("sweep-xi", "Mean 1 - s_eps(T) over a xi grid, with fit");
  auto* sweep_n_cmd = app.add_subcommand("sweep-n", "Mean noisy traces over pulse counts");
  auto* compare = app.add_subcommand("compare", "Ideal traces of protocols on a shared grid");
  auto* verify = app.add_subcommand("verify", "Dense-matrix oracle suite");
  for (auto* sub : {trace, sweep_xi_cmd, sweep_n_cmd, compare, verify}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*trace) return cmd_trace(o, out, err);
    if (*sweep_xi_cmd) return cmd_sweep_xi(o, out, err);
    if (*sweep_n_cmd) return cmd_sweep_n(o, out, err);
    if (*compare) return cmd_compare(o, out, err);
    if (*verify) return cmd_verify(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace ddsim::cli
