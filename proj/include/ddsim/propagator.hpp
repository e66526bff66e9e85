#pragma once

#include <functional>
#include <memory>
#include <span>

#include <Eigen/Dense>

#include "ddsim/model.hpp"
#include "ddsim/noise.hpp"
#include "ddsim/sequences.hpp"

namespace ddsim {

// Unitary on S (x) A, basis index 2 * s + a.
using QubitBlock = Eigen::Matrix4cd;

// exp(-i tau (omega_A sigma_x^A + g sigma_z^S sigma_z^A)), block-diagonal in s.
// Each S sector is cos(Omega tau) - i sin(Omega tau) (omega_A sigma_x +/- g sigma_z) / Omega
// with Omega = sqrt(omega_A^2 + g^2).
QubitBlock qubit_block(double tau, const ModelParams& p);

// eps_x sigma_x + eps_y sigma_y + eps_z sigma_z on S.
Eigen::Matrix2cd pulse_matrix(const PulseError& err);
// pulse_matrix(err) (x) I_A.
Eigen::Matrix4cd pulse_operator(const PulseError& err);

// sigma_x^S (x) I_A.
Eigen::Matrix4cd sigma_x_s();
// sigma_z^S (x) I_A.
Eigen::Matrix4cd sigma_z_s();

// Unitary (1/sqrt(N)) transform between rotator momentum amplitudes (ascending
// l) and position amplitudes on theta_m = 2 pi m / N:
//   phi_m = sum_l exp(i l theta_m) psi_l / sqrt(N).
// Plans are shared per N; execution is thread-safe.
class RotatorDft {
 public:
  explicit RotatorDft(int N);

  void to_position(Complex* data) const;
  void to_momentum(Complex* data) const;

  // Unnormalized out-of-place transforms without the (-1)^m factors:
  //   out_m = sum_j exp(+2 pi i j m / N) in_j   (backward)
  //   out_j = sum_m exp(-2 pi i j m / N) in_m   (forward)
  // `in` and `out` must not alias.
  void backward(const Complex* in, Complex* out) const;
  void forward(const Complex* in, Complex* out) const;

 private:
  struct Plans;
  int N_;
  std::shared_ptr<const Plans> plans_;
};

using Observer = std::function<void(double t, const JointState& state)>;

// Propagation through a timeline with tables cached for one parameter set.
class Propagator {
 public:
  explicit Propagator(const ModelParams& p);

  const ModelParams& params() const { return p_; }

  // Qubit block on (s, a) and kinetic phase exp(-i tau l^2 / 2) on l.
  void free_segment(JointState& st, double tau) const;
  void kinetic(JointState& st, double tau) const;
  void apply_qubit_operator(JointState& st, const Eigen::Matrix4cd& op) const;

  // exp(-i (k + lambda sigma_z^A) cos theta) applied in the position basis.
  void kick(JointState& st) const;

  // Throws std::invalid_argument when eps_y^2 + eps_z^2 > 1.
  static void pulse(JointState& st, const PulseError& err);

  // Walks the timeline; the observer sees the state after every `stride`-th
  // event and after the trailing free segment (when the last event precedes
  // the horizon). Throws std::invalid_argument when errors.size() differs
  // from the timeline's pulse count.
  JointState evolve(JointState st, const Timeline& tl, std::span<const PulseError> errors,
                    const Observer& observer = {}, int stride = 1) const;

 private:
  ModelParams p_;
  RotatorDft dft_;
  // exp(-i (k +/- lambda) cos theta_m) / N, indexed by A spin. The (-1)^m
  // factors of the momentum <-> position maps cancel across a kick.
  Eigen::VectorXcd kick_phase_[2];
  Eigen::VectorXcd period_kinetic_;     // exp(-i T0 l^2 / 2)
};

// Free-function forms; each builds a Propagator for the call.
void free_segment(JointState& st, double tau, const ModelParams& p);
void apply_kick(JointState& st, const ModelParams& p);
void apply_pulse(JointState& st, const PulseError& err);
JointState evolve(JointState st, const ModelParams& p, const Timeline& tl,
                  std::span<const PulseError> errors, const Observer& observer = {},
                  int stride = 1);

}  // namespace ddsim
