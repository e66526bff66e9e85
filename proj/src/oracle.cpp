#include "ddsim/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "ddsim/observables.hpp"
#include "ddsim/propagator.hpp"

namespace ddsim {

namespace {

constexpr Complex kI(0.0, 1.0);

void require_small(int N) {
  if (N > kMaxDenseN) {
    throw std::invalid_argument(fmt::format("dense oracle limited to N <= {} (got {})", kMaxDenseN, N));
  }
}

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}
Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// Kronecker product written out; Eigen's lives in the unsupported tree.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// exp(-i t H) for Hermitian H.
Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Eigen::VectorXcd phase(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phase[i] = std::exp(-kI * t * es.eigenvalues()[i]);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::Matrix4cd qubit_hamiltonian(const ModelParams& p) {
  return p.omega_a * kron(Eigen::Matrix2cd::Identity(), pauli_x()) +
         p.g * kron(pauli_z(), pauli_z());
}

Eigen::Matrix2cd direction_matrix(const PulseError& e) {
  return e.eps_x() * pauli_x() + e.eps_y * pauli_y() + e.eps_z * pauli_z();
}

DenseOperator sigma_on_s(const Eigen::Matrix2cd& m, int N) {
  return kron(m, Eigen::MatrixXcd::Identity(2 * N, 2 * N));
}

Complex matrix_element(const DenseOperator& a, const DenseOperator& b, const Eigen::VectorXcd& up,
                       const Eigen::VectorXcd& down, const DenseOperator& sx) {
  return (a * down).dot(sx * (b * up));
}

// Walks the timeline carrying M_0..M_J, where M_j collects products with
// exactly j pulses taken from `subs` and the rest from `base`.
std::vector<DenseOperator> chain(const ModelParams& p, const Timeline& tl,
                                 std::span<const Eigen::Matrix2cd> base,
                                 std::span<const Eigen::Matrix2cd> subs, int max_order) {
  require_small(p.N);
  const Eigen::Index dim = 4 * p.N;
  std::vector<DenseOperator> m(static_cast<std::size_t>(max_order + 1),
                               DenseOperator::Zero(dim, dim));
  m[0].setIdentity();
  const DenseOperator kick = dense_kick(p);
  auto free = [&](double tau) {
    if (tau == 0.0) return;
    const DenseOperator seg = dense_segment(tau, p);
    for (auto& x : m) x = seg * x;
  };
  for (const Event& e : tl.events) {
    free(e.gap);
    if (e.kind == EventKind::Kick) {
      for (auto& x : m) x = kick * x;
      continue;
    }
    const auto j = static_cast<std::size_t>(e.pulse);
    const DenseOperator b = sigma_on_s(base[j], p.N);
    const DenseOperator s = sigma_on_s(subs[j], p.N);
    for (std::size_t ord = m.size(); ord-- > 0;) {
      DenseOperator next = b * m[ord];
      if (ord > 0) next += s * m[ord - 1];
      m[ord] = std::move(next);
    }
  }
  free(tl.tail);
  return m;
}

void check_errors(const Timeline& tl, std::size_t count) {
  if (static_cast<int>(count) != tl.pulse_count) {
    throw std::invalid_argument(fmt::format("error list has {} entries for {} pulses", count,
                                            tl.pulse_count));
  }
}

}  // namespace

DenseOperator dense_segment(double tau, const ModelParams& p) {
  require_small(p.N);
  const Eigen::Matrix4cd u = expm_hermitian(qubit_hamiltonian(p), tau);
  Eigen::VectorXcd kin(p.N);
  for (int j = 0; j < p.N; ++j) {
    const double l = j - p.N / 2;
    kin[j] = std::exp(-kI * (0.5 * tau * l * l));
  }
  return kron(u, kin.asDiagonal().toDenseMatrix());
}

DenseOperator dense_kick(const ModelParams& p) {
  require_small(p.N);
  const int N = p.N;
  // dft(m, j) = exp(i l_j theta_m) / sqrt(N) maps momentum to position.
  Eigen::MatrixXcd dft(N, N);
  for (int m = 0; m < N; ++m) {
    for (int j = 0; j < N; ++j) {
      const double l = j - N / 2;
      dft(m, j) = std::exp(kI * (l * 2.0 * std::numbers::pi * m / N)) / std::sqrt(double(N));
    }
  }
  DenseOperator out = DenseOperator::Zero(4 * N, 4 * N);
  for (int sec = 0; sec < 4; ++sec) {
    const double strength = p.k + ((sec & 1) ? -p.lambda : p.lambda);
    Eigen::VectorXcd phase(N);
    for (int m = 0; m < N; ++m) {
      phase[m] = std::exp(-kI * (strength * std::cos(2.0 * std::numbers::pi * m / N)));
    }
    out.block(sec * N, sec * N, N, N) = dft.adjoint() * phase.asDiagonal() * dft;
  }
  return out;
}

DenseOperator dense_pulse(const Eigen::Matrix2cd& m, int N) {
  require_small(N);
  return sigma_on_s(m, N);
}

DenseOperator floquet_operator(const ModelParams& p) {
  require_small(p.N);
  const int N = p.N;
  const Eigen::Index dim = 4 * N;
  Eigen::MatrixXcd cos_theta = Eigen::MatrixXcd::Zero(N, N);
  for (int j = 0; j < N; ++j) {
    cos_theta((j + 1) % N, j) += 0.5;
    cos_theta(j, (j + 1) % N) += 0.5;
  }
  Eigen::Matrix2cd a_strength = p.k * Eigen::Matrix2cd::Identity() + p.lambda * pauli_z();
  const Eigen::MatrixXcd h_kick =
      kron(Eigen::Matrix2cd::Identity(), kron(a_strength, cos_theta));
  const Eigen::MatrixXcd h_qubit = kron(qubit_hamiltonian(p), Eigen::MatrixXcd::Identity(N, N));
  Eigen::MatrixXcd h_kin = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double l = static_cast<double>(i % N) - N / 2;
    h_kin(i, i) = 0.5 * l * l;
  }
  return expm_hermitian(h_kin, p.T0) * expm_hermitian(h_qubit, p.T0) * expm_hermitian(h_kick, 1.0);
}

DenseOperator dense_evolution(const ModelParams& p, const Timeline& tl,
                              std::span<const Eigen::Matrix2cd> pulses) {
  check_errors(tl, pulses.size());
  return chain(p, tl, pulses, pulses, 0)[0];
}

DenseOperator dense_evolution(const ModelParams& p, const Timeline& tl,
                              std::span<const PulseError> errors) {
  check_errors(tl, errors.size());
  std::vector<Eigen::Matrix2cd> pulses;
  for (const auto& e : errors) pulses.push_back(direction_matrix(e));
  return dense_evolution(p, tl, pulses);
}

double unitarity_residual(const DenseOperator& u) {
  return (u.adjoint() * u - DenseOperator::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

Complex dense_signal(const DenseOperator& R, const ModelParams& p, const EnvInit& env) {
  const Eigen::VectorXcd up = make_state(p, Spin::Up, env).amplitudes();
  const Eigen::VectorXcd down = make_state(p, Spin::Down, env).amplitudes();
  return matrix_element(R, R, up, down, sigma_on_s(pauli_x(), p.N));
}

double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::norm(a.dot(b));
}

Eps0Report check_eps0_identity(const ModelParams& p, const Timeline& tl,
                               std::span<const PulseError> errors, const EnvInit& env) {
  check_errors(tl, errors.size());
  std::vector<Eigen::Matrix2cd> ideal(errors.size(), pauli_x());
  std::vector<Eigen::Matrix2cd> scaled;
  double factor = 1.0;
  for (const auto& e : errors) {
    scaled.push_back(e.eps_x() * pauli_x());
    factor *= e.eps_x();
  }
  const DenseOperator R = dense_evolution(p, tl, ideal);
  const DenseOperator R0 = dense_evolution(p, tl, scaled);
  Eps0Report rep;
  rep.matrix_residual = (R0 - factor * R).cwiseAbs().maxCoeff();
  rep.scalar_residual =
      std::abs(dense_signal(R0, p, env).real() - factor * factor * dense_signal(R, p, env).real());
  return rep;
}

Eps1Report check_eps1_identity(const ModelParams& p, const Timeline& tl,
                               std::span<const PulseError> errors, bool flip_sign) {
  check_errors(tl, errors.size());
  for (const auto& e : errors) {
    if (e.eps_z != 0.0) throw std::invalid_argument("eps1 identity holds for y errors only");
  }
  const std::size_t n = errors.size();
  std::vector<Eigen::Matrix2cd> ideal(n, pauli_x());
  std::vector<Eigen::Matrix2cd> scaled;
  std::vector<Eigen::Matrix2cd> subs;
  Complex alt = 0.0;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ey = errors[k].eps_y;
    scaled.push_back(errors[k].eps_x() * pauli_x());
    subs.push_back((flip_sign ? -ey : ey) * pauli_y());
    // k is 0-based, so (-1)^{k+1} of the 1-based index is (-1)^k here.
    alt += (k % 2 == 0 ? 1.0 : -1.0) * ey;
    sum_sq += ey * ey;
  }
  const DenseOperator sz = sigma_on_s(pauli_z(), p.N);

  const auto ideal_terms = chain(p, tl, ideal, subs, 1);
  const DenseOperator& R = ideal_terms[0];
  Eps1Report rep;
  rep.ideal_residual = (ideal_terms[1] - kI * alt * R * sz).cwiseAbs().maxCoeff();

  const auto eps0_terms = chain(p, tl, scaled, subs, 1);
  rep.eps0_residual = (eps0_terms[1] - kI * alt * eps0_terms[0] * sz).cwiseAbs().maxCoeff();
  const double xi2 = n > 0 ? sum_sq / static_cast<double>(n) : 0.0;
  rep.eps0_tolerance = 2.0 * static_cast<double>(n) * xi2;
  return rep;
}

std::vector<DenseOperator> expansion_terms(const ModelParams& p, const Timeline& tl,
                                           std::span<const PulseError> errors, int max_order) {
  check_errors(tl, errors.size());
  if (max_order < 0) throw std::invalid_argument("expansion order must be >= 0");
  std::vector<Eigen::Matrix2cd> base;
  std::vector<Eigen::Matrix2cd> subs;
  for (const auto& e : errors) {
    base.push_back(e.eps_x() * pauli_x());
    subs.push_back(e.eps_y * pauli_y() + e.eps_z * pauli_z());
  }
  return chain(p, tl, base, subs, max_order);
}

ExpansionReport check_expansion(const ModelParams& p, const Timeline& tl,
                                std::span<const double> direction, std::span<const double> xi_list,
                                const EnvInit& env) {
  check_errors(tl, direction.size());
  const Eigen::VectorXcd up = make_state(p, Spin::Up, env).amplitudes();
  const Eigen::VectorXcd down = make_state(p, Spin::Down, env).amplitudes();
  const DenseOperator sx = sigma_on_s(pauli_x(), p.N);
  ExpansionReport rep;
  for (double xi : xi_list) {
    std::vector<PulseError> errs;
    for (double d : direction) errs.push_back(PulseError{xi * d, 0.0});
    const DenseOperator R = dense_evolution(p, tl, errs);
    const auto t = expansion_terms(p, tl, errs, 2);
    auto el = [&](int i, int j) { return matrix_element(t[i], t[j], up, down, sx); };
    ExpansionRow row;
    row.xi = xi;
    row.s_exact = matrix_element(R, R, up, down, sx).real();
    const Complex z = el(0, 0) + (el(0, 1) + el(1, 0)) + (el(1, 1) + el(0, 2) + el(2, 0));
    row.s_truncated = z.real();
    row.residual = std::abs(row.s_exact - row.s_truncated);
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    rep.ratios.push_back(rep.rows[i].residual / rep.rows[i + 1].residual);
  }
  return rep;
}

double eps2_size_ratio(const ModelParams& p, const Timeline& tl, double xi, int draws,
                       std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("draws must be >= 1");
  const int n = tl.pulse_count;
  if (n < 2) throw std::invalid_argument("second-order term needs at least 2 pulses");
  CounterRng rng(seed);
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    std::vector<PulseError> errs(static_cast<std::size_t>(n));
    for (auto& e : errs) e.eps_y = xi * rng.normal();
    const auto t = expansion_terms(p, tl, errs, 2);
    const double r = t[2].norm() / (0.5 * xi * xi * n * t[0].norm());
    acc += r * r;
  }
  return std::sqrt(acc / draws);
}

QBoundReport check_q_bound(const ModelParams& p, std::span<const PulseSchedule> schedules,
                           std::span<const EnvInit> envs) {
  QBoundReport rep;
  for (const auto& sched : schedules) {
    for (const auto& env : envs) {
      const SignalTracer tracer(p, sched, env);
      const auto pts = tracer.run(std::vector<PulseError>(static_cast<std::size_t>(sched.n())));
      for (const auto& pt : pts) {
        ++rep.points;
        rep.max_modulus_excess = std::max(rep.max_modulus_excess, pt.s * pt.s + pt.q * pt.q - 1.0);
        rep.max_q_excess =
            std::max(rep.max_q_excess, std::abs(pt.q) - std::sqrt(std::max(0.0, 1.0 - pt.s * pt.s)));
      }
    }
  }
  rep.pass = rep.max_modulus_excess <= kBoundTol && rep.max_q_excess <= kBoundTol;
  return rep;
}

EnvInit random_env(int N, CounterRng& rng) {
  EnvInit env;
  for (int i = 0; i < 2; ++i) env.a_state[i] = Complex(rng.normal(), rng.normal());
  env.a_state.normalize();
  Eigen::VectorXcd rot(N);
  for (int i = 0; i < N; ++i) rot[i] = Complex(rng.normal(), rng.normal());
  rot.normalize();
  env.rotator = CustomRotator{rot};
  return env;
}

VerifyLevel parse_verify_level(std::string_view name) {
  if (name == "fast") return VerifyLevel::Fast;
  if (name == "full") return VerifyLevel::Full;
  throw std::invalid_argument("unknown verify level '" + std::string(name) + "' (fast|full)");
}

bool SuiteReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

ModelParams oracle_params(int N, int periods) {
  // Couplings of order 1/T0 so that a few periods dephase S noticeably.
  return make_params(1.3, 0.9, 1.7, 8.0, N, periods);
}

namespace {

struct Case {
  ModelParams p;
  PulseSchedule schedule;
  Timeline tl;
  EnvInit env;
  std::vector<PulseError> errors;
};

PulseSchedule random_schedule(CounterRng& rng, int min_n) {
  const int n = min_n + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(7 - min_n));
  switch (rng.next_u64() % 4) {
    case 0:
      return make_schedule(Protocol::Udd, n);
    case 1:
      return make_schedule(Protocol::Pdd, n);
    case 2:
      return make_schedule(Protocol::Cpmg, n);
    default: {
      std::vector<double> f;
      for (int i = 0; i < n; ++i) f.push_back(1.0 - rng.uniform());  // (0, 1]
      std::sort(f.begin(), f.end());
      f.erase(std::unique(f.begin(), f.end()), f.end());
      return custom_schedule(f);
    }
  }
}

Case random_case(int N, CounterRng& rng, ErrorAxes axes, int min_n) {
  const int periods = 1 + static_cast<int>(rng.next_u64() % 4);
  Case c{oracle_params(N, periods), {}, {}, random_env(N, rng), {}};
  c.schedule = random_schedule(rng, min_n);
  c.tl = build_timeline(c.p, c.schedule);
  const double xi = 0.01 + 0.29 * rng.uniform();
  c.errors = sample_errors(c.schedule.n(), ErrorModel{xi, axes, rng.next_u64()});
  return c;
}

struct Worst {
  double value = 0.0;
  std::string where;
  void update(double v, const std::string& tag) {
    if (v > value || where.empty()) {
      value = std::max(value, v);
      where = tag;
    }
  }
};

std::string tag(const Case& c) {
  return fmt::format("N={} periods={} {} n={}", c.p.N, c.p.periods, to_string(c.schedule.protocol),
                     c.schedule.n());
}

CheckRow row(std::string name, double value, double tol, std::string detail) {
  return CheckRow{std::move(name), value, tol, value <= tol, std::move(detail)};
}

}  // namespace

SuiteReport run_oracle_suite(const SuiteOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  SuiteReport rep;
  const bool full = opts.level == VerifyLevel::Full;
  const std::vector<int> sizes = full ? std::vector<int>{8, 16} : std::vector<int>{8};
  const int cases = full ? 200 : 60;

  for (int N : sizes) {
    CounterRng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(N)));
    const std::string at = fmt::format(" (N={})", N);

    // Floquet operator from its generators.
    {
      const ModelParams p = oracle_params(N, 1);
      const Timeline tl = build_timeline(p, make_schedule(Protocol::Pdd, 0));
      const DenseOperator R = dense_evolution(p, tl, std::span<const PulseError>{});
      const double res = (R - floquet_operator(p)).cwiseAbs().maxCoeff();
      rep.rows.push_back(row("floquet period" + at, res, 1e-12, "one period vs exp of generators"));
    }

    Worst eps0m, eps0s, eps1, eps1b, unit, fid, sig;
    for (int i = 0; i < cases; ++i) {
      const Case c = random_case(N, rng, ErrorAxes::YAndZ, 0);
      const Eps0Report e0 = check_eps0_identity(c.p, c.tl, c.errors, c.env);
      eps0m.update(e0.matrix_residual, tag(c));
      eps0s.update(e0.scalar_residual, tag(c));

      const DenseOperator R = dense_evolution(c.p, c.tl, c.errors);
      unit.update(unitarity_residual(R), tag(c));
      const JointState up = make_state(c.p, Spin::Up, c.env);
      const JointState down = make_state(c.p, Spin::Down, c.env);
      const Propagator prop(c.p);
      const JointState up_t = prop.evolve(up, c.tl, c.errors);
      const JointState down_t = prop.evolve(down, c.tl, c.errors);
      const double f = std::min(fidelity(R * up.amplitudes(), up_t.amplitudes()),
                                fidelity(R * down.amplitudes(), down_t.amplitudes()));
      fid.update(1.0 - f, tag(c));
      const SignalTracer tracer(c.p, c.schedule, c.env);
      const SignalPoint fp = tracer.final_point(c.errors);
      sig.update(std::abs(Complex(fp.s, fp.q) - dense_signal(R, c.p, c.env)), tag(c));

      const Case y = random_case(N, rng, ErrorAxes::YOnly, 1);
      const Eps1Report e1 = check_eps1_identity(y.p, y.tl, y.errors, opts.flip_pulse_sign);
      eps1.update(e1.ideal_residual, tag(y));
      eps1b.update(e1.eps0_tolerance > 0.0 ? e1.eps0_residual / e1.eps0_tolerance : 0.0, tag(y));
    }
    const std::string over = fmt::format("{} cases, worst at {}", cases, "");
    rep.rows.push_back(row("eps0 identity, matrix" + at, eps0m.value, 1e-12, over + eps0m.where));
    rep.rows.push_back(row("eps0 identity, signal" + at, eps0s.value, 1e-12, over + eps0s.where));
    rep.rows.push_back(row("eps1 identity, ideal R" + at, eps1.value, 1e-12, over + eps1.where));
    rep.rows.push_back(row("eps1 identity, R_eps0 form / 2n xi^2" + at, eps1b.value, 1.0,
                           over + eps1b.where));
    rep.rows.push_back(row("dense unitarity" + at, unit.value, 1e-10, over + unit.where));
    rep.rows.push_back(row("dense vs split, 1 - fidelity" + at, fid.value, 1e-10, over + fid.where));
    rep.rows.push_back(row("dense vs tracer signal" + at, sig.value, 1e-12, over + sig.where));

    // Third-order remainder of the expansion, fixed directions.
    {
      const std::vector<double> xis{4e-2, 2e-2, 1e-2};
      double worst = 0.0;
      std::string detail;
      // The xi^3 remainder is proportional to q(T) and the xi^4 one to s(T);
      // a schedule with small |q(T)| needs smaller xi to reach the asymptote.
      struct Setup {
        ModelParams p;
        PulseSchedule sched;
      };
      std::vector<Setup> setups;
      const std::size_t dirs = full ? 6 : 3;
      for (int periods = 2; periods <= 12 && setups.size() < dirs; ++periods) {
        for (int n = 2; n <= 6 && setups.size() < dirs; ++n) {
          for (Protocol proto : {Protocol::Udd, Protocol::Pdd, Protocol::Cpmg}) {
            const ModelParams p = oracle_params(N, periods);
            const PulseSchedule sched = make_schedule(proto, n);
            const SignalTracer tracer(p, sched, default_env());
            const SignalPoint pt = tracer.final_point(std::vector<PulseError>(std::size_t(n)));
            if (std::abs(pt.q) >= 0.3 && setups.size() < dirs) setups.push_back({p, sched});
          }
        }
      }
      for (const auto& [p, sched] : setups) {
        const Timeline tl = build_timeline(p, sched);
        std::vector<double> dir;
        // Signs follow (-1)^{k+1} so the cubic terms add instead of cancelling.
        for (int k = 0; k < sched.n(); ++k) dir.push_back((k % 2 ? -1.0 : 1.0) * (0.5 + rng.uniform()));
        const ExpansionReport er = check_expansion(p, tl, dir, xis, default_env());
        for (double r : er.ratios) {
          const double dev = std::abs(r / 8.0 - 1.0);
          if (dev >= worst) {
            worst = dev;
            detail = fmt::format("ratio {:.4f} with {} n={} periods={}", r, to_string(sched.protocol),
                                 sched.n(), p.periods);
          }
        }
      }
      if (setups.size() < dirs) {
        worst = 1.0;
        detail = fmt::format("only {} schedules with |q(T)| >= 0.3", setups.size());
      }
      rep.rows.push_back(row("expansion remainder ~ xi^3, |ratio/8 - 1|" + at, worst, 0.2, detail));
    }

    // Typical size of R_eps2 against xi^2 n / 2.
    {
      const ModelParams p = oracle_params(N, 3);
      const Timeline tl = build_timeline(p, make_schedule(Protocol::Udd, 4));
      const double ratio = eps2_size_ratio(p, tl, 1e-2, 1000, rng.next_u64());
      // Within a factor of 3 either way; reported as |log3(ratio)|.
      const double dev = std::abs(std::log(ratio) / std::log(3.0));
      rep.rows.push_back(row("eps2 size vs xi^2 n / 2, |log3 ratio|" + at, dev, 1.0,
                             fmt::format("rms ratio {:.4f} over 1000 draws", ratio)));
    }

    // Signal bounds on ideal traces.
    {
      const ModelParams p = oracle_params(N, 4);
      std::vector<PulseSchedule> scheds;
      for (int n : {0, 1, 2, 5}) {
        scheds.push_back(make_schedule(Protocol::Udd, n));
        scheds.push_back(make_schedule(Protocol::Pdd, n));
      }
      scheds.push_back(random_schedule(rng, 0));
      std::vector<EnvInit> envs{default_env()};
      for (int e = 0; e < 4; ++e) envs.push_back(random_env(N, rng));
      const QBoundReport qb = check_q_bound(p, scheds, envs);
      const double worst = std::max(qb.max_modulus_excess, qb.max_q_excess);
      rep.rows.push_back(row("signal bounds s^2+q^2<=1, |q|<=sqrt(1-s^2)" + at, worst, kBoundTol,
                             fmt::format("{} points", qb.points)));
    }
  }
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace ddsim
