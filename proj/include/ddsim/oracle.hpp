#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddsim/model.hpp"
#include "ddsim/noise.hpp"
#include "ddsim/sequences.hpp"

namespace ddsim {

// Explicit 4N x 4N matrices in the JointState basis. Brute force only, so
// everything here refuses N > kMaxDenseN.
using DenseOperator = Eigen::MatrixXcd;
constexpr int kMaxDenseN = 32;

// Factors, each built without the propagator's code paths.
DenseOperator dense_segment(double tau, const ModelParams& p);  // 4x4 eigensolver exponential
DenseOperator dense_kick(const ModelParams& p);                 // explicit DFT matrix
DenseOperator dense_pulse(const Eigen::Matrix2cd& m, int N);    // m on S, identity elsewhere

// The one-period Floquet operator from exponentials of the full 4N x 4N
// generators: exp(-i T0 p^2/2) exp(-i T0 (omega_A sx^A + g sz^S sz^A))
// exp(-i (k + lambda sz^A) cos theta), with cos theta the cyclic momentum
// shift (|l+1><l| + h.c.) / 2.
DenseOperator floquet_operator(const ModelParams& p);

// Product of timeline factors with the pulse at index j replaced by pulses[j].
DenseOperator dense_evolution(const ModelParams& p, const Timeline& tl,
                              std::span<const Eigen::Matrix2cd> pulses);
DenseOperator dense_evolution(const ModelParams& p, const Timeline& tl,
                              std::span<const PulseError> errors);

double unitarity_residual(const DenseOperator& u);

// <down, chi| R^dagger sigma_x^S R |up, chi>.
Complex dense_signal(const DenseOperator& R, const ModelParams& p, const EnvInit& env);

// |<a|b>|^2 for normalized states.
double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

struct Eps0Report {
  double matrix_residual = 0.0;  // max |R_eps0 - prod eps_x R|
  double scalar_residual = 0.0;  // |s_eps0 - prod(1 - eps^2) s|
};

// R_eps0 has every pulse replaced by eps_x sigma_x.
Eps0Report check_eps0_identity(const ModelParams& p, const Timeline& tl,
                               std::span<const PulseError> errors, const EnvInit& env = default_env());

struct Eps1Report {
  double ideal_residual = 0.0;  // vs i sum (-1)^{k+1} eps_{y,k} R sigma_z, exact
  double eps0_residual = 0.0;   // vs the same with R_eps0 in place of R
  double eps0_tolerance = 0.0;  // 2 n xi^2 with xi the rms eps_y
};

// R_eps1 = sum over single substitutions eps_{y,k} sigma_y, other pulses
// ideal. Throws std::invalid_argument when any eps_z is nonzero.
// `flip_sign` negates the substituted sigma_y; a mutation hook for the suite.
Eps1Report check_eps1_identity(const ModelParams& p, const Timeline& tl,
                               std::span<const PulseError> errors, bool flip_sign = false);

// Terms R_epsj of the expansion of R_eps: all ways of taking j pulses as
// eps_y sigma_y and the rest as eps_x sigma_x. terms[j] for j = 0..max_order.
std::vector<DenseOperator> expansion_terms(const ModelParams& p, const Timeline& tl,
                                           std::span<const PulseError> errors, int max_order);

struct ExpansionRow {
  double xi = 0.0;
  double s_exact = 0.0;
  double s_truncated = 0.0;  // s_eps0 + s_eps1 + s_eps2
  double residual = 0.0;
};

struct ExpansionReport {
  std::vector<ExpansionRow> rows;
  std::vector<double> ratios;  // residual[i] / residual[i+1]
};

// Y errors eps_{y,k} = xi * direction[k] for each xi in the list.
ExpansionReport check_expansion(const ModelParams& p, const Timeline& tl,
                                std::span<const double> direction, std::span<const double> xi_list,
                                const EnvInit& env = default_env());

// RMS of ||R_eps2||_F / (xi^2 n ||R_eps0||_F / 2) over random Gaussian draws.
double eps2_size_ratio(const ModelParams& p, const Timeline& tl, double xi, int draws,
                       std::uint64_t seed);

struct QBoundReport {
  std::size_t points = 0;
  double max_modulus_excess = -1.0;  // max of s^2 + q^2 - 1
  double max_q_excess = -1.0;        // max of |q| - sqrt(max(0, 1 - s^2))
  bool pass = true;
};

constexpr double kBoundTol = 1e-10;

// Ideal traces of every (schedule, env) pair through the split-operator path.
QBoundReport check_q_bound(const ModelParams& p, std::span<const PulseSchedule> schedules,
                           std::span<const EnvInit> envs);

// Haar-ish random environment: Gaussian A spinor and Gaussian rotator vector.
EnvInit random_env(int N, CounterRng& rng);

enum class VerifyLevel { Fast, Full };
VerifyLevel parse_verify_level(std::string_view name);

struct CheckRow {
  std::string name;
  double value = 0.0;      // worst residual or statistic
  double tolerance = 0.0;  // pass threshold
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::vector<CheckRow> rows;
  double seconds = 0.0;
  bool all_pass() const;
};

struct SuiteOptions {
  VerifyLevel level = VerifyLevel::Fast;
  std::uint64_t seed = 20240611;
  bool flip_pulse_sign = false;  // fault injection for check_eps1_identity
};

// fast: N = 8 with 60 randomized cases per identity; full: N = 8 and 16 with
// 200 cases each.
SuiteReport run_oracle_suite(const SuiteOptions& opts);

// Small parameter set with nontrivial q(T) used by the suite.
ModelParams oracle_params(int N, int periods);

}  // namespace ddsim
