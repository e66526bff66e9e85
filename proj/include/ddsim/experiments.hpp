#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ddsim/model.hpp"
#include "ddsim/noise.hpp"
#include "ddsim/observables.hpp"
#include "ddsim/sequences.hpp"

namespace ddsim {

// Worker threads for realization loops: DDSIM_WORKERS if set, else the
// hardware concurrency. set_worker_count(0) restores that default.
int worker_count();
void set_worker_count(int workers);

// Runs body(i) for i in [0, count) on worker_count() threads. Results must
// be written to per-index slots; the first exception is rethrown.
void parallel_for(int count, const std::function<void(int)>& body);

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mean and standard error of the mean; stderr is 0 for a single sample.
struct MeanStderr {
  double mean = 0.0;
  double stderr_mean = 0.0;
};
MeanStderr mean_stderr(std::span<const double> xs);

struct MCResult {
  double mean_s = 0.0;
  double stderr_s = 0.0;
  double mean_q = 0.0;
  int realizations = 0;
  std::vector<double> s_values;  // per realization, index order
  std::vector<double> q_values;
};

// Realization r uses seed derive_seed(model.seed, r). xi = 0 skips sampling:
// every realization equals the ideal signal and stderr_s is exactly 0.
MCResult monte_carlo_signal(const ModelParams& p, const PulseSchedule& schedule,
                            const ErrorModel& model, int reps, const EnvInit& env = default_env());

// Ideal trace and per-point ensemble statistics on the same emission points.
struct EnsembleTrace {
  std::vector<SignalPoint> ideal;
  std::vector<double> s_mean;
  std::vector<double> s_stderr;
  std::vector<double> q_mean;
  MCResult final;  // the horizon point of every realization
};

EnsembleTrace monte_carlo_trace(const ModelParams& p, const PulseSchedule& schedule,
                                const ErrorModel& model, int reps,
                                const EnvInit& env = default_env(), const TraceOptions& opts = {});

struct SweepPoint {
  double xi = 0.0;
  double xi2 = 0.0;
  double one_minus_s_mean = 0.0;
  double stderr_s = 0.0;
  MCResult mc;
};

// Seed for one grid value: derive_seed(base, bit pattern of xi), so a point
// does not depend on its position in the list.
std::uint64_t xi_seed(std::uint64_t base, double xi);

// Small-error regime of the linear-in-xi^2 law.
constexpr double kSmallRegime = 0.1;

struct XiSweep {
  std::vector<SweepPoint> points;
  std::vector<std::string> warnings;  // grid values with xi sqrt(n) > kSmallRegime
};

// Throws std::invalid_argument on an empty list or a negative xi.
XiSweep sweep_xi(const ModelParams& p, const PulseSchedule& schedule,
                 std::span<const double> xi_list, int reps, std::uint64_t seed,
                 ErrorAxes axes = ErrorAxes::YAndZ, const EnvInit& env = default_env());

// Geometric grid of `count` values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int count);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r_squared = 0.0;
  double c2_estimate = 0.0;  // slope / n
  int points = 0;
};

// Unweighted least squares y = slope x + intercept. Throws std::invalid_argument
// on fewer than 3 points, mismatched lengths, equal abscissae or n_pulses < 1.
FitResult fit_linear(std::span<const double> x, std::span<const double> y, int n_pulses);

// Fit of 1 - mean s_eps(T) against xi^2.
FitResult fit_sweep(const XiSweep& sweep, int n_pulses);

struct FirstOrderReport {
  double ideal_s = 0.0;
  double ideal_q = 0.0;
  double xi = 0.0;
  double xi_sqrt_n = 0.0;
  double shift_mean = 0.0;  // mean of s_eps(T) - s(T)
  double shift_std = 0.0;   // realization spread of the same
  double first_order_scale = 0.0;  // 2 |q(T)| xi sqrt(n)
  double first_order_bound = 0.0;  // 2 sqrt(1 - s(T)^2) xi sqrt(n)
  double second_order_scale = 0.0;  // xi^2 n
  bool first_order_negligible = false;   // |q(T)| <= 0.1 xi sqrt(n)
  bool first_order_significant = false;  // |q(T)| >= xi sqrt(n)
  int realizations = 0;
};

FirstOrderReport first_order_check(const ModelParams& p, const PulseSchedule& schedule, double xi,
                                   int reps, std::uint64_t seed,
                                   ErrorAxes axes = ErrorAxes::YOnly,
                                   const EnvInit& env = default_env());

// Uniform grid t_i = i T / (points - 1), i = 0..points-1.
std::vector<double> uniform_grid(double horizon, int points);

struct ProtocolTrace {
  Protocol protocol = Protocol::Udd;
  int n = 0;
  std::vector<double> s;  // on the shared grid
  std::vector<double> q;
};

struct ComparisonTable {
  std::vector<double> grid;
  std::vector<ProtocolTrace> traces;  // protocol-major, then n in list order

  const ProtocolTrace& at(Protocol protocol, int n) const;
};

// Ideal traces per (protocol, n) sampled on uniform_grid(T, grid_points).
ComparisonTable compare_protocols(const ModelParams& p, std::span<const int> n_list,
                                  std::span<const Protocol> protocols, int grid_points = 501,
                                  const EnvInit& env = default_env());

// Maximal runs of grid points with the same leader. `leader` is +1 when a is
// larger by more than tie_tol, -1 when b is, 0 otherwise.
struct LeadInterval {
  double t_begin = 0.0;
  double t_end = 0.0;
  int leader = 0;
};

std::vector<LeadInterval> lead_intervals(std::span<const double> grid, std::span<const double> a,
                                         std::span<const double> b, double tie_tol = 1e-12);

// a >= b - tie_tol at every grid point with t in (t_from, t_to].
bool leads_on(std::span<const double> grid, std::span<const double> a, std::span<const double> b,
              double t_from, double t_to, double tie_tol = 1e-12);

struct NSweepEntry {
  int n = 0;
  EnsembleTrace trace;
};

// Mean noisy traces for one protocol family over a list of pulse counts. The
// seed for pulse count n is derive_seed(seed, n).
std::vector<NSweepEntry> sweep_n(const ModelParams& p, Protocol protocol, const ErrorModel& model,
                                 std::span<const int> n_list, int reps,
                                 const EnvInit& env = default_env(), const TraceOptions& opts = {});

}  // namespace ddsim
