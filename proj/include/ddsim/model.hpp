#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ddsim {

using Complex = std::complex<double>;

// sigma_z eigenbasis of the system qubit S and the environment qubit A.
// Up carries sigma_z = +1 and occupies index 0.
enum class Spin { Up = 0, Down = 1 };

constexpr double spin_sign(Spin s) { return s == Spin::Up ? 1.0 : -1.0; }

// Physical constants of the qubit + kicked-rotator Hamiltonian, units hbar = 1.
struct ModelParams {
  double omega_a = 0.0;  // A-qubit splitting (sigma_x^A)
  double g = 0.0;        // S-A coupling (sigma_z^S sigma_z^A)
  double lambda = 0.0;   // A-rotator kick coupling
  double K = 0.0;        // classical stochasticity parameter, K = k * T0
  int N = 0;             // rotator Hilbert dimension
  int periods = 0;       // kick periods in the horizon

  double T0 = 0.0;  // kick period, 2 pi / N (the effective Planck constant)
  double k = 0.0;   // quantum kick strength, K / T0
  double T = 0.0;   // horizon, periods * T0
};

// Throws std::invalid_argument on a non-power-of-two N < 8, periods < 1, or
// nonfinite couplings.
ModelParams make_params(double omega_a, double g, double lambda, double K, int N, int periods);

// Reference defaults: omega_A = 1.5e3, g = 100, lambda = 1e3, K = 1e3,
// N = 4096, T = 50 T0.
ModelParams reference_params();

// The kicked rotator is chaotic for K above about 6.
constexpr double kChaosThreshold = 6.0;
bool is_chaotic(const ModelParams& p);

// Non-fatal diagnostics (currently only the chaos-regime check).
std::vector<std::string> param_warnings(const ModelParams& p);

// Rotator momentum l in [-N/2, N/2) for storage slot j in [0, N).
constexpr int momentum_of(int slot, int N) { return slot - N / 2; }
constexpr int slot_of(int momentum, int N) { return momentum + N / 2; }

// Position grid theta_m = 2 pi m / N.
double theta(int m, int N);

// Joint amplitude array over (s, a, l). Storage is s-major, then a, then l in
// ascending momentum, i.e. index ((s * 2) + a) * N + (l + N / 2).
class JointState {
 public:
  JointState() = default;
  explicit JointState(int N);

  int rotator_dim() const { return N_; }
  Eigen::Index dim() const { return amps_.size(); }

  Eigen::Index index(Spin s, Spin a, int l) const {
    return (static_cast<Eigen::Index>(s) * 2 + static_cast<Eigen::Index>(a)) * N_ + slot_of(l, N_);
  }
  Complex& at(Spin s, Spin a, int l) { return amps_[index(s, a, l)]; }
  Complex at(Spin s, Spin a, int l) const { return amps_[index(s, a, l)]; }

  // Rotator amplitudes of the (s, a) sector; sector = 2 * s + a.
  auto sector(int sector) { return amps_.segment(static_cast<Eigen::Index>(sector) * N_, N_); }
  auto sector(int sector) const { return amps_.segment(static_cast<Eigen::Index>(sector) * N_, N_); }

  Eigen::VectorXcd& amplitudes() { return amps_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }

  double squared_norm() const { return amps_.squaredNorm(); }

 private:
  int N_ = 0;
  Eigen::VectorXcd amps_;
};

struct MomentumEigenstate {
  int l0 = 0;
};

// |theta_m>: diagonal under kicks, uniform modulus 1/sqrt(N) in momentum.
struct PositionEigenstate {
  int m = 0;
};

// Momentum-basis amplitudes in ascending l, length N.
struct CustomRotator {
  Eigen::VectorXcd amplitudes;
};

using RotatorInit = std::variant<MomentumEigenstate, PositionEigenstate, CustomRotator>;

// Pure product initial state of the environment (A qubit x rotator).
struct EnvInit {
  Eigen::Vector2cd a_state;
  RotatorInit rotator;
};

// A in the sigma_x = +1 eigenstate, rotator in the l0 = 0 momentum eigenstate.
EnvInit default_env();

// One-line human-readable description, recorded in run manifests.
std::string describe(const EnvInit& env);

// Rotator amplitudes in the momentum basis; throws std::invalid_argument when
// the requested state does not fit in dimension N.
Eigen::VectorXcd rotator_amplitudes(const RotatorInit& init, int N);

// |s> (x) |a> (x) |rotator>. Throws std::invalid_argument when either
// environment factor deviates from unit norm by more than 1e-12.
JointState make_state(const ModelParams& p, Spin s, const EnvInit& env);

}  // namespace ddsim
