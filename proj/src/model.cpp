#include "ddsim/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ddsim {

namespace {

constexpr double kEnvNormTol = 1e-12;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("model parameter '") + name + "' is not finite");
  }
}

}  // namespace

ModelParams make_params(double omega_a, double g, double lambda, double K, int N, int periods) {
  require_finite(omega_a, "omega_a");
  require_finite(g, "g");
  require_finite(lambda, "lambda");
  require_finite(K, "K");
  if (!is_power_of_two(N) || N < 8) {
    throw std::invalid_argument("rotator dimension N must be a power of two >= 8, got " +
                                std::to_string(N));
  }
  if (periods < 1) {
    throw std::invalid_argument("periods must be >= 1, got " + std::to_string(periods));
  }

  ModelParams p;
  p.omega_a = omega_a;
  p.g = g;
  p.lambda = lambda;
  p.K = K;
  p.N = N;
  p.periods = periods;
  p.T0 = 2.0 * std::numbers::pi / N;
  p.k = K / p.T0;
  p.T = periods * p.T0;
  return p;
}

ModelParams reference_params() { return make_params(1.5e3, 100.0, 1e3, 1e3, 4096, 50); }

bool is_chaotic(const ModelParams& p) { return p.K > kChaosThreshold; }

std::vector<std::string> param_warnings(const ModelParams& p) {
  std::vector<std::string> out;
  if (!is_chaotic(p)) {
    std::ostringstream os;
    os << "K = " << p.K << " is below the chaos threshold (" << kChaosThreshold
       << "); the rotator is not in the chaotic regime";
    out.push_back(os.str());
  }
  return out;
}

double theta(int m, int N) { return 2.0 * std::numbers::pi * m / N; }

JointState::JointState(int N) : N_(N), amps_(Eigen::VectorXcd::Zero(4 * static_cast<Eigen::Index>(N))) {}

EnvInit default_env() {
  const double h = 1.0 / std::numbers::sqrt2;
  return EnvInit{Eigen::Vector2cd(h, h), MomentumEigenstate{0}};
}

std::string describe(const EnvInit& env) {
  std::ostringstream os;
  os.precision(17);
  os << "a_state=(" << env.a_state[0].real() << (env.a_state[0].imag() < 0 ? "" : "+")
     << env.a_state[0].imag() << "i, " << env.a_state[1].real()
     << (env.a_state[1].imag() < 0 ? "" : "+") << env.a_state[1].imag() << "i); rotator=";
  std::visit(
      [&os](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, MomentumEigenstate>) {
          os << "momentum eigenstate l0=" << r.l0;
        } else if constexpr (std::is_same_v<T, PositionEigenstate>) {
          os << "position eigenstate m=" << r.m;
        } else {
          os << "custom vector (dim " << r.amplitudes.size() << ")";
        }
      },
      env.rotator);
  return os.str();
}

Eigen::VectorXcd rotator_amplitudes(const RotatorInit& init, int N) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(N);
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, MomentumEigenstate>) {
          if (r.l0 < -N / 2 || r.l0 >= N / 2) {
            throw std::invalid_argument("momentum l0 outside [-N/2, N/2)");
          }
          out[slot_of(r.l0, N)] = 1.0;
        } else if constexpr (std::is_same_v<T, PositionEigenstate>) {
          if (r.m < 0 || r.m >= N) throw std::invalid_argument("position index m outside [0, N)");
          // <l|theta_m> = exp(-i l theta_m) / sqrt(N)
          const double amp = 1.0 / std::sqrt(static_cast<double>(N));
          for (int j = 0; j < N; ++j) {
            // l * m reduced mod N keeps the phase argument small.
            const long long lm = static_cast<long long>(momentum_of(j, N)) * r.m;
            const long long red = ((lm % N) + N) % N;
            out[j] = std::polar(amp, -theta(static_cast<int>(red), N));
          }
        } else {
          if (r.amplitudes.size() != N) {
            throw std::invalid_argument("custom rotator vector has dimension " +
                                        std::to_string(r.amplitudes.size()) + ", expected " +
                                        std::to_string(N));
          }
          out = r.amplitudes;
        }
      },
      init);
  return out;
}

JointState make_state(const ModelParams& p, Spin s, const EnvInit& env) {
  const double a_norm = env.a_state.squaredNorm();
  if (std::abs(std::sqrt(a_norm) - 1.0) > kEnvNormTol) {
    throw std::invalid_argument("A-qubit initial state is not normalized");
  }
  const Eigen::VectorXcd rot = rotator_amplitudes(env.rotator, p.N);
  if (std::abs(rot.norm() - 1.0) > kEnvNormTol) {
    throw std::invalid_argument("rotator initial state is not normalized (norm " +
                                std::to_string(rot.norm()) + ")");
  }

  JointState st(p.N);
  const int s_idx = static_cast<int>(s);
  for (int a = 0; a < 2; ++a) {
    st.sector(2 * s_idx + a) = env.a_state[a] * rot;
  }
  return st;
}

}  // namespace ddsim
