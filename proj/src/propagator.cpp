#include "ddsim/propagator.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace ddsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

QubitBlock qubit_block(double tau, const ModelParams& p) {
  QubitBlock u = QubitBlock::Zero();
  const double omega = std::hypot(p.omega_a, p.g);
  if (omega == 0.0 || tau == 0.0) return QubitBlock::Identity();
  const double c = std::cos(omega * tau);
  const double s = std::sin(omega * tau);
  const Complex mi(0.0, -s / omega);
  for (int sector = 0; sector < 2; ++sector) {
    const double gz = (sector == 0 ? 1.0 : -1.0) * p.g;
    const int o = 2 * sector;
    u(o, o) = c + mi * gz;
    u(o + 1, o + 1) = c - mi * gz;
    u(o, o + 1) = mi * p.omega_a;
    u(o + 1, o) = mi * p.omega_a;
  }
  return u;
}

Eigen::Matrix2cd pulse_matrix(const PulseError& err) {
  const double ex = err.eps_x();
  Eigen::Matrix2cd m;
  m << Complex(err.eps_z, 0.0), Complex(ex, -err.eps_y),
       Complex(ex, err.eps_y), Complex(-err.eps_z, 0.0);
  return m;
}

Eigen::Matrix4cd pulse_operator(const PulseError& err) {
  const Eigen::Matrix2cd m = pulse_matrix(err);
  Eigen::Matrix4cd op = Eigen::Matrix4cd::Zero();
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      op(2 * s, 2 * t) = op(2 * s + 1, 2 * t + 1) = m(s, t);
    }
  }
  return op;
}

Eigen::Matrix4cd sigma_x_s() {
  Eigen::Matrix4cd x = Eigen::Matrix4cd::Zero();
  x(0, 2) = x(2, 0) = x(1, 3) = x(3, 1) = 1.0;
  return x;
}

Eigen::Matrix4cd sigma_z_s() {
  Eigen::Matrix4cd z = Eigen::Matrix4cd::Zero();
  z(0, 0) = z(1, 1) = 1.0;
  z(2, 2) = z(3, 3) = -1.0;
  return z;
}

struct RotatorDft::Plans {
  fftw_plan backward = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward_oop = nullptr;
  fftw_plan forward_oop = nullptr;
  ~Plans() {
    for (fftw_plan p : {backward, forward, backward_oop, forward_oop}) {
      if (p) fftw_destroy_plan(p);
    }
  }
};

RotatorDft::RotatorDft(int N) : N_(N) {
  // FFTW's planner is not thread-safe; plans are created once per N and reused
  // through the new-array interface. FFTW_UNALIGNED keeps the chosen codelets
  // independent of buffer alignment, so results are bit-reproducible.
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const Plans>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[N];
  if (!slot) {
    auto plans = std::make_shared<Plans>();
    std::vector<Complex> a(static_cast<std::size_t>(N));
    std::vector<Complex> b(static_cast<std::size_t>(N));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->backward = fftw_plan_dft_1d(N, as_fftw(a.data()), as_fftw(a.data()), FFTW_BACKWARD, flags);
    plans->forward = fftw_plan_dft_1d(N, as_fftw(a.data()), as_fftw(a.data()), FFTW_FORWARD, flags);
    plans->backward_oop =
        fftw_plan_dft_1d(N, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
    plans->forward_oop =
        fftw_plan_dft_1d(N, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    if (!plans->backward || !plans->forward || !plans->backward_oop || !plans->forward_oop) {
      throw std::runtime_error("FFTW planning failed");
    }
    slot = std::move(plans);
  }
  plans_ = slot;
}

// With l = j - N/2, exp(i l theta_m) = (-1)^m exp(2 pi i j m / N).
void RotatorDft::to_position(Complex* data) const {
  fftw_execute_dft(plans_->backward, as_fftw(data), as_fftw(data));
  const double scale = 1.0 / std::sqrt(static_cast<double>(N_));
  for (int m = 0; m < N_; ++m) data[m] *= (m & 1) ? -scale : scale;
}

void RotatorDft::to_momentum(Complex* data) const {
  const double scale = 1.0 / std::sqrt(static_cast<double>(N_));
  for (int m = 0; m < N_; ++m) data[m] *= (m & 1) ? -scale : scale;
  fftw_execute_dft(plans_->forward, as_fftw(data), as_fftw(data));
}

void RotatorDft::backward(const Complex* in, Complex* out) const {
  fftw_execute_dft(plans_->backward_oop, as_fftw(const_cast<Complex*>(in)), as_fftw(out));
}

void RotatorDft::forward(const Complex* in, Complex* out) const {
  fftw_execute_dft(plans_->forward_oop, as_fftw(const_cast<Complex*>(in)), as_fftw(out));
}

Propagator::Propagator(const ModelParams& p) : p_(p), dft_(p.N) {
  const int N = p.N;
  for (int a = 0; a < 2; ++a) {
    const double strength = p.k + (a == 0 ? p.lambda : -p.lambda);
    kick_phase_[a].resize(N);
    for (int m = 0; m < N; ++m) {
      const double phase = std::remainder(strength * std::cos(theta(m, N)), kTwoPi);
      kick_phase_[a][m] = std::polar(1.0 / N, -phase);
    }
  }
  // T0 l^2 / 2 = pi l^2 / N; reduce l^2 mod 2N in integers.
  period_kinetic_.resize(N);
  for (int j = 0; j < N; ++j) {
    const long long l = momentum_of(j, N);
    const long long red = (l * l) % (2LL * N);
    period_kinetic_[j] = std::polar(1.0, -std::numbers::pi * static_cast<double>(red) / N);
  }
}

void Propagator::kinetic(JointState& st, double tau) const {
  if (tau == 0.0) return;
  const int N = p_.N;
  if (tau == p_.T0) {
    for (int sec = 0; sec < 4; ++sec) st.sector(sec).array() *= period_kinetic_.array();
    return;
  }
  Eigen::VectorXcd phase(N);
  for (int j = 0; j < N; ++j) {
    const double l = momentum_of(j, N);
    phase[j] = std::polar(1.0, -std::remainder(0.5 * tau * l * l, kTwoPi));
  }
  for (int sec = 0; sec < 4; ++sec) st.sector(sec).array() *= phase.array();
}

void Propagator::apply_qubit_operator(JointState& st, const Eigen::Matrix4cd& op) const {
  const std::size_t N = static_cast<std::size_t>(p_.N);
  Complex* c0 = st.amplitudes().data();
  Complex* c1 = c0 + N;
  Complex* c2 = c1 + N;
  Complex* c3 = c2 + N;
  Complex m[4][4];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[i][j] = op(i, j);
  }
  for (std::size_t l = 0; l < N; ++l) {
    const Complex v0 = c0[l], v1 = c1[l], v2 = c2[l], v3 = c3[l];
    c0[l] = m[0][0] * v0 + m[0][1] * v1 + m[0][2] * v2 + m[0][3] * v3;
    c1[l] = m[1][0] * v0 + m[1][1] * v1 + m[1][2] * v2 + m[1][3] * v3;
    c2[l] = m[2][0] * v0 + m[2][1] * v1 + m[2][2] * v2 + m[2][3] * v3;
    c3[l] = m[3][0] * v0 + m[3][1] * v1 + m[3][2] * v2 + m[3][3] * v3;
  }
}

void Propagator::free_segment(JointState& st, double tau) const {
  if (tau < 0.0) throw std::invalid_argument("free segment duration must be >= 0");
  if (tau == 0.0) return;
  apply_qubit_operator(st, qubit_block(tau, p_));
  kinetic(st, tau);
}

void Propagator::kick(JointState& st) const {
  thread_local std::vector<Complex> scratch;
  scratch.resize(static_cast<std::size_t>(p_.N));
  for (int sec = 0; sec < 4; ++sec) {
    Complex* block = st.sector(sec).data();
    dft_.backward(block, scratch.data());
    const Complex* phase = kick_phase_[sec & 1].data();
    for (int m = 0; m < p_.N; ++m) scratch[m] *= phase[m];
    dft_.forward(scratch.data(), block);
  }
}

void Propagator::pulse(JointState& st, const PulseError& err) {
  if (err.eps_y * err.eps_y + err.eps_z * err.eps_z > 1.0) {
    throw std::invalid_argument("pulse error has eps_y^2 + eps_z^2 > 1");
  }
  const Eigen::Matrix2cd m = pulse_matrix(err);
  for (int a = 0; a < 2; ++a) {
    auto up = st.sector(a);
    auto down = st.sector(2 + a);
    const Eigen::VectorXcd u = up;
    up = m(0, 0) * u + m(0, 1) * down;
    down = m(1, 0) * u + m(1, 1) * down;
  }
}

JointState Propagator::evolve(JointState st, const Timeline& tl,
                              std::span<const PulseError> errors, const Observer& observer,
                              int stride) const {
  if (static_cast<int>(errors.size()) != tl.pulse_count) {
    throw std::invalid_argument("error list has " + std::to_string(errors.size()) +
                                " entries for " + std::to_string(tl.pulse_count) + " pulses");
  }
  if (stride < 1) throw std::invalid_argument("observer stride must be >= 1");

  for (std::size_t i = 0; i < tl.events.size(); ++i) {
    const Event& e = tl.events[i];
    free_segment(st, e.gap);
    if (e.kind == EventKind::Kick) {
      kick(st);
    } else {
      pulse(st, errors[static_cast<std::size_t>(e.pulse)]);
    }
    const bool last_event = i + 1 == tl.events.size();
    if (observer && (i % static_cast<std::size_t>(stride) == 0 || (last_event && tl.tail == 0.0))) {
      observer(e.time, st);
    }
  }
  if (tl.tail > 0.0) {
    free_segment(st, tl.tail);
    if (observer) observer(tl.horizon, st);
  }
  return st;
}

void free_segment(JointState& st, double tau, const ModelParams& p) {
  Propagator(p).free_segment(st, tau);
}

void apply_kick(JointState& st, const ModelParams& p) { Propagator(p).kick(st); }

void apply_pulse(JointState& st, const PulseError& err) { Propagator::pulse(st, err); }

JointState evolve(JointState st, const ModelParams& p, const Timeline& tl,
                  std::span<const PulseError> errors, const Observer& observer, int stride) {
  return Propagator(p).evolve(std::move(st), tl, errors, observer, stride);
}

}  // namespace ddsim
