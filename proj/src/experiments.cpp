#include "ddsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ddsim {

namespace {

std::atomic<int> g_worker_override{0};

void check_reps(int reps) {
  if (reps < 1) throw std::invalid_argument("realization count must be >= 1");
}

}  // namespace

int worker_count() {
  if (const int w = g_worker_override.load(); w > 0) return w;
  if (const char* env = std::getenv("DDSIM_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_worker_count(int workers) { g_worker_override.store(std::max(0, workers)); }

void parallel_for(int count, const std::function<void(int)>& body) {
  if (count <= 0) return;
  const int workers = std::min(worker_count(), count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  // Constant samples (the xi = 0 ensembles) come back exact, not off by an ulp.
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
    out.mean = xs.front();
    return out;
  }
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  const double n = static_cast<double>(xs.size());
  out.mean = sum.value() / n;
  if (xs.size() < 2) return out;
  // Two-pass variance around the mean.
  CompensatedSum dev;
  for (double x : xs) dev.add((x - out.mean) * (x - out.mean));
  out.stderr_mean = std::sqrt(dev.value() / (n - 1.0)) / std::sqrt(n);
  return out;
}

namespace {

MCResult summarize(std::vector<double> s, std::vector<double> q) {
  MCResult r;
  r.realizations = static_cast<int>(s.size());
  const MeanStderr ms = mean_stderr(s);
  r.mean_s = ms.mean;
  r.stderr_s = ms.stderr_mean;
  r.mean_q = mean_stderr(q).mean;
  r.s_values = std::move(s);
  r.q_values = std::move(q);
  return r;
}

std::vector<PulseError> realization_errors(const ErrorModel& model, int n, int rep) {
  ErrorModel m = model;
  m.seed = derive_seed(model.seed, static_cast<std::uint64_t>(rep));
  return sample_errors(n, m);
}

}  // namespace

MCResult monte_carlo_signal(const ModelParams& p, const PulseSchedule& schedule,
                            const ErrorModel& model, int reps, const EnvInit& env) {
  check_reps(reps);
  const SignalTracer tracer(p, schedule, env);
  const int n = schedule.n();
  if (model.xi == 0.0) {
    const std::vector<PulseError> ideal(static_cast<std::size_t>(n));
    const SignalPoint pt = tracer.final_point(ideal);
    return summarize(std::vector<double>(static_cast<std::size_t>(reps), pt.s),
                     std::vector<double>(static_cast<std::size_t>(reps), pt.q));
  }
  std::vector<double> s(static_cast<std::size_t>(reps));
  std::vector<double> q(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](int r) {
    const SignalPoint pt = tracer.final_point(realization_errors(model, n, r));
    s[static_cast<std::size_t>(r)] = pt.s;
    q[static_cast<std::size_t>(r)] = pt.q;
  });
  return summarize(std::move(s), std::move(q));
}

EnsembleTrace monte_carlo_trace(const ModelParams& p, const PulseSchedule& schedule,
                                const ErrorModel& model, int reps, const EnvInit& env,
                                const TraceOptions& opts) {
  check_reps(reps);
  const SignalTracer tracer(p, schedule, env);
  const int n = schedule.n();
  EnsembleTrace out;
  out.ideal = tracer.run(std::vector<PulseError>(static_cast<std::size_t>(n)), opts);
  const std::size_t points = out.ideal.size();

  std::vector<std::vector<SignalPoint>> runs(static_cast<std::size_t>(reps));
  if (model.xi == 0.0) {
    std::fill(runs.begin(), runs.end(), out.ideal);
  } else {
    parallel_for(reps, [&](int r) {
      runs[static_cast<std::size_t>(r)] = tracer.run(realization_errors(model, n, r), opts);
    });
  }

  out.s_mean.resize(points);
  out.s_stderr.resize(points);
  out.q_mean.resize(points);
  std::vector<double> s(static_cast<std::size_t>(reps));
  std::vector<double> q(static_cast<std::size_t>(reps));
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      s[r] = runs[r][i].s;
      q[r] = runs[r][i].q;
    }
    const MeanStderr ms = mean_stderr(s);
    out.s_mean[i] = ms.mean;
    out.s_stderr[i] = ms.stderr_mean;
    out.q_mean[i] = mean_stderr(q).mean;
  }
  if (points > 0) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      s[r] = runs[r].back().s;
      q[r] = runs[r].back().q;
    }
    out.final = summarize(std::move(s), std::move(q));
  }
  return out;
}

std::uint64_t xi_seed(std::uint64_t base, double xi) {
  return derive_seed(base, std::bit_cast<std::uint64_t>(xi));
}

XiSweep sweep_xi(const ModelParams& p, const PulseSchedule& schedule,
                 std::span<const double> xi_list, int reps, std::uint64_t seed, ErrorAxes axes,
                 const EnvInit& env) {
  if (xi_list.empty()) throw std::invalid_argument("xi list is empty");
  for (double xi : xi_list) {
    if (!(xi >= 0.0) || !std::isfinite(xi)) {
      throw std::invalid_argument("xi values must be finite and >= 0");
    }
  }
  check_reps(reps);
  XiSweep out;
  const double root_n = std::sqrt(static_cast<double>(schedule.n()));
  for (double xi : xi_list) {
    if (xi * root_n > kSmallRegime) {
      std::ostringstream os;
      os << "xi = " << xi << " gives xi sqrt(n) = " << xi * root_n
         << ", outside the linear regime (<= " << kSmallRegime << ")";
      out.warnings.push_back(os.str());
    }
    SweepPoint pt;
    pt.xi = xi;
    pt.xi2 = xi * xi;
    pt.mc = monte_carlo_signal(p, schedule, ErrorModel{xi, axes, xi_seed(seed, xi)}, reps, env);
    pt.one_minus_s_mean = 1.0 - pt.mc.mean_s;
    pt.stderr_s = pt.mc.stderr_s;
    out.points.push_back(std::move(pt));
  }
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("geometric grid needs 0 < lo <= hi and count >= 1");
  }
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

FitResult fit_linear(std::span<const double> x, std::span<const double> y, int n_pulses) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y lengths differ");
  if (x.size() < 3) throw std::invalid_argument("fit needs at least 3 points");
  if (n_pulses < 1) throw std::invalid_argument("fit needs n >= 1 to estimate C2");
  const double m = static_cast<double>(x.size());
  const MeanStderr mx = mean_stderr(x);
  const MeanStderr my = mean_stderr(y);
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx.mean;
    const double dy = y[i] - my.mean;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0)) throw std::invalid_argument("fit: all abscissae are equal");

  FitResult f;
  f.points = static_cast<int>(x.size());
  f.slope = sxy.value() / sxx.value();
  f.intercept = my.mean - f.slope * mx.mean;
  CompensatedSum ssr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ssr.add(r * r);
  }
  const double sigma2 = ssr.value() / (m - 2.0);
  f.slope_stderr = std::sqrt(sigma2 / sxx.value());
  CompensatedSum sx2;
  for (double xi : x) sx2.add(xi * xi);
  f.intercept_stderr = std::sqrt(sigma2 * sx2.value() / (m * sxx.value()));
  f.r_squared = syy.value() > 0.0 ? std::clamp(1.0 - ssr.value() / syy.value(), 0.0, 1.0) : 1.0;
  f.c2_estimate = f.slope / n_pulses;
  return f;
}

FitResult fit_sweep(const XiSweep& sweep, int n_pulses) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& pt : sweep.points) {
    x.push_back(pt.xi2);
    y.push_back(pt.one_minus_s_mean);
  }
  return fit_linear(x, y, n_pulses);
}

FirstOrderReport first_order_check(const ModelParams& p, const PulseSchedule& schedule, double xi,
                                   int reps, std::uint64_t seed, ErrorAxes axes,
                                   const EnvInit& env) {
  check_reps(reps);
  FirstOrderReport rep;
  const SignalTracer tracer(p, schedule, env);
  const int n = schedule.n();
  const SignalPoint ideal = tracer.final_point(std::vector<PulseError>(static_cast<std::size_t>(n)));
  rep.ideal_s = ideal.s;
  rep.ideal_q = ideal.q;
  rep.xi = xi;
  rep.xi_sqrt_n = xi * std::sqrt(static_cast<double>(n));
  rep.first_order_scale = 2.0 * std::abs(ideal.q) * rep.xi_sqrt_n;
  rep.first_order_bound = 2.0 * std::sqrt(std::max(0.0, 1.0 - ideal.s * ideal.s)) * rep.xi_sqrt_n;
  rep.second_order_scale = xi * xi * n;
  rep.first_order_negligible = std::abs(ideal.q) <= 0.1 * rep.xi_sqrt_n;
  rep.first_order_significant = std::abs(ideal.q) >= rep.xi_sqrt_n;

  const MCResult mc = monte_carlo_signal(p, schedule, ErrorModel{xi, axes, seed}, reps, env);
  std::vector<double> shift(mc.s_values.size());
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = mc.s_values[i] - ideal.s;
  const MeanStderr ms = mean_stderr(shift);
  rep.shift_mean = ms.mean;
  rep.shift_std = ms.stderr_mean * std::sqrt(static_cast<double>(shift.size()));
  rep.realizations = mc.realizations;
  return rep;
}

std::vector<double> uniform_grid(double horizon, int points) {
  if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = horizon * i / (points - 1);
  out.back() = horizon;
  return out;
}

const ProtocolTrace& ComparisonTable::at(Protocol protocol, int n) const {
  for (const auto& t : traces) {
    if (t.protocol == protocol && t.n == n) return t;
  }
  throw std::out_of_range("no trace for " + std::string(to_string(protocol)) + " n=" +
                          std::to_string(n));
}

ComparisonTable compare_protocols(const ModelParams& p, std::span<const int> n_list,
                                  std::span<const Protocol> protocols, int grid_points,
                                  const EnvInit& env) {
  ComparisonTable table;
  table.grid = uniform_grid(p.T, grid_points);
  for (Protocol proto : protocols) {
    if (proto == Protocol::Custom) throw std::invalid_argument("compare needs built-in protocols");
  }
  for (Protocol proto : protocols) {
    for (int n : n_list) {
      ProtocolTrace tr;
      tr.protocol = proto;
      tr.n = n;
      table.traces.push_back(std::move(tr));
    }
  }
  TraceOptions opts;
  opts.emit_events = false;
  opts.sample_times = table.grid;
  parallel_for(static_cast<int>(table.traces.size()), [&](int i) {
    ProtocolTrace& tr = table.traces[static_cast<std::size_t>(i)];
    const SignalTracer tracer(p, make_schedule(tr.protocol, tr.n), env);
    const auto pts = tracer.run(std::vector<PulseError>(static_cast<std::size_t>(tr.n)), opts);
    for (const auto& pt : pts) {
      tr.s.push_back(pt.s);
      tr.q.push_back(pt.q);
    }
  });
  return table;
}

std::vector<LeadInterval> lead_intervals(std::span<const double> grid, std::span<const double> a,
                                         std::span<const double> b, double tie_tol) {
  if (grid.size() != a.size() || grid.size() != b.size()) {
    throw std::invalid_argument("lead_intervals: lengths differ");
  }
  std::vector<LeadInterval> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = a[i] - b[i];
    const int leader = d > tie_tol ? 1 : (d < -tie_tol ? -1 : 0);
    if (!out.empty() && out.back().leader == leader) {
      out.back().t_end = grid[i];
    } else {
      out.push_back(LeadInterval{grid[i], grid[i], leader});
    }
  }
  return out;
}

bool leads_on(std::span<const double> grid, std::span<const double> a, std::span<const double> b,
              double t_from, double t_to, double tie_tol) {
  if (grid.size() != a.size() || grid.size() != b.size()) {
    throw std::invalid_argument("leads_on: lengths differ");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > t_from && grid[i] <= t_to && a[i] < b[i] - tie_tol) return false;
  }
  return true;
}

std::vector<NSweepEntry> sweep_n(const ModelParams& p, Protocol protocol, const ErrorModel& model,
                                 std::span<const int> n_list, int reps, const EnvInit& env,
                                 const TraceOptions& opts) {
  if (protocol == Protocol::Custom) throw std::invalid_argument("sweep-n needs a built-in protocol");
  std::vector<NSweepEntry> out;
  for (int n : n_list) {
    ErrorModel m = model;
    m.seed = derive_seed(model.seed, static_cast<std::uint64_t>(n));
    out.push_back(NSweepEntry{n, monte_carlo_trace(p, make_schedule(protocol, n), m, reps, env, opts)});
  }
  return out;
}

}  // namespace ddsim
