#include "ddsim/observables.hpp"

#include <stdexcept>

namespace ddsim {

namespace {

using SectorColumns = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, 4>>;

SectorColumns columns(const JointState& st) {
  return SectorColumns(st.amplitudes().data(), st.rotator_dim(), 4);
}

// G(i, j) = sum_l conj(down[i, l]) up[j, l] over the (s, a) index.
Eigen::Matrix4cd overlap(const JointState& up, const JointState& down) {
  return columns(down).adjoint() * columns(up);
}

}  // namespace

Complex signal(const JointState& phi_up, const JointState& phi_down) {
  if (phi_up.dim() != phi_down.dim() || phi_up.rotator_dim() != phi_down.rotator_dim()) {
    throw std::invalid_argument("signal: state dimensions differ");
  }
  Complex z = 0.0;
  for (int a = 0; a < 2; ++a) {
    z += phi_down.sector(a).dot(phi_up.sector(2 + a));
    z += phi_down.sector(2 + a).dot(phi_up.sector(a));
  }
  return z;
}

SignalTracer::SignalTracer(const ModelParams& p, const PulseSchedule& schedule, const EnvInit& env)
    : prop_(p),
      timeline_(build_timeline(p, schedule)),
      up0_(make_state(p, Spin::Up, env)),
      down0_(make_state(p, Spin::Down, env)) {}

template <class Emit>
std::pair<JointState, JointState> SignalTracer::walk(std::span<const PulseError> errors,
                                                     const TraceOptions& opts, Emit&& emit,
                                                     bool want_states) const {
  const Timeline& tl = timeline_;
  const ModelParams& p = prop_.params();
  if (static_cast<int>(errors.size()) != tl.pulse_count) {
    throw std::invalid_argument("error list has " + std::to_string(errors.size()) +
                                " entries for " + std::to_string(tl.pulse_count) + " pulses");
  }
  if (opts.stride < 1) throw std::invalid_argument("trace stride must be >= 1");
  for (std::size_t i = 0; i < opts.sample_times.size(); ++i) {
    const double t = opts.sample_times[i];
    if (t < 0.0 || t > tl.horizon || (i > 0 && t < opts.sample_times[i - 1])) {
      throw std::invalid_argument("sample times must be ascending within [0, T]");
    }
  }

  JointState up = up0_;
  JointState down = down0_;
  const Eigen::Matrix4cd sx = sigma_x_s();
  Eigen::Matrix4cd W = Eigen::Matrix4cd::Identity();
  Eigen::Matrix4cd G = overlap(up, down);
  double now = 0.0;
  bool kicked = false;
  std::size_t next_sample = 0;

  auto value = [&](double t) {
    const Eigen::Matrix4cd M = W.adjoint() * sx * W;
    const Complex z = M.cwiseProduct(G).sum();
    emit(SignalPoint{t, z.real(), z.imag()});
  };
  auto advance_to = [&](double t) {
    if (t > now) {
      W = qubit_block(t - now, p) * W;
      now = t;
    }
  };
  // Applies the accumulated qubit operator and one period of kinetic phase.
  auto flush = [&] {
    prop_.apply_qubit_operator(up, W);
    prop_.apply_qubit_operator(down, W);
    if (kicked) {
      prop_.kinetic(up, p.T0);
      prop_.kinetic(down, p.T0);
    }
    W.setIdentity();
  };
  auto samples_before = [&](double t) {
    while (next_sample < opts.sample_times.size() && opts.sample_times[next_sample] < t) {
      advance_to(opts.sample_times[next_sample]);
      value(opts.sample_times[next_sample]);
      ++next_sample;
    }
  };

  if (opts.emit_events) value(0.0);

  for (std::size_t i = 0; i < tl.events.size(); ++i) {
    const Event& e = tl.events[i];
    samples_before(e.time);
    advance_to(e.time);
    if (e.kind == EventKind::Kick) {
      flush();
      prop_.kick(up);
      prop_.kick(down);
      kicked = true;
      G = overlap(up, down);
    } else {
      W = pulse_operator(errors[static_cast<std::size_t>(e.pulse)]) * W;
    }
    const bool last_event = i + 1 == tl.events.size();
    if (opts.emit_events &&
        (i % static_cast<std::size_t>(opts.stride) == 0 || (last_event && tl.tail == 0.0))) {
      value(e.time);
    }
  }

  while (next_sample < opts.sample_times.size()) {
    advance_to(opts.sample_times[next_sample]);
    value(opts.sample_times[next_sample]);
    ++next_sample;
  }
  if (tl.tail > 0.0) {
    advance_to(tl.horizon);
    if (opts.emit_events) value(tl.horizon);
  }

  if (!want_states) return {};
  advance_to(tl.horizon);
  flush();
  return {std::move(up), std::move(down)};
}

std::vector<SignalPoint> SignalTracer::run(std::span<const PulseError> errors,
                                           const TraceOptions& opts) const {
  std::vector<SignalPoint> out;
  out.reserve(timeline_.events.size() + opts.sample_times.size() + 2);
  walk(errors, opts, [&out](const SignalPoint& pt) { out.push_back(pt); }, false);
  return out;
}

SignalPoint SignalTracer::final_point(std::span<const PulseError> errors) const {
  TraceOptions opts;
  opts.emit_events = false;
  opts.sample_times = {timeline_.horizon};
  SignalPoint last;
  walk(errors, opts, [&last](const SignalPoint& pt) { last = pt; }, false);
  return last;
}

std::pair<JointState, JointState> SignalTracer::final_states(
    std::span<const PulseError> errors) const {
  TraceOptions opts;
  opts.emit_events = false;
  return walk(errors, opts, [](const SignalPoint&) {}, true);
}

std::vector<SignalPoint> trace_run(const ModelParams& p, const PulseSchedule& schedule,
                                   std::span<const PulseError> errors, const EnvInit& env,
                                   const TraceOptions& opts) {
  return SignalTracer(p, schedule, env).run(errors, opts);
}

}  // namespace ddsim
