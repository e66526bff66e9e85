#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ddsim/model.hpp"
#include "ddsim/noise.hpp"
#include "ddsim/propagator.hpp"
#include "ddsim/sequences.hpp"

namespace ddsim {

// Coherence signal s and its imaginary partner q at time t.
struct SignalPoint {
  double t = 0.0;
  double s = 0.0;
  double q = 0.0;
};

// s + i q = <phi_down| sigma_x^S |phi_up>. Throws std::invalid_argument on a
// dimension mismatch.
Complex signal(const JointState& phi_up, const JointState& phi_down);

struct TraceOptions {
  // Emit after every `stride`-th timeline event (the point at the horizon is
  // always emitted).
  int stride = 1;
  bool emit_events = true;
  // Extra observation instants in [0, T], ascending; each is taken after all
  // events at or before it.
  std::vector<double> sample_times;
};

// Runs |up>(x)|chi> and |down>(x)|chi> through one timeline with one error
// list. Between kicks the rotator kinetic phase commutes with every qubit
// factor and cancels in the signal, so each period is carried by a 4x4
// operator on S (x) A plus a 4x4 overlap matrix of the two trajectories;
// the full states are touched once per kick.
class SignalTracer {
 public:
  SignalTracer(const ModelParams& p, const PulseSchedule& schedule, const EnvInit& env);

  const ModelParams& params() const { return prop_.params(); }
  const Timeline& timeline() const { return timeline_; }

  // First point is t = 0 before the opening kick.
  std::vector<SignalPoint> run(std::span<const PulseError> errors,
                               const TraceOptions& opts = {}) const;

  // Signal at the horizon only.
  SignalPoint final_point(std::span<const PulseError> errors) const;

  // Full evolved states (up, down) at the horizon.
  std::pair<JointState, JointState> final_states(std::span<const PulseError> errors) const;

 private:
  template <class Emit>
  std::pair<JointState, JointState> walk(std::span<const PulseError> errors,
                                         const TraceOptions& opts, Emit&& emit,
                                         bool want_states) const;

  Propagator prop_;
  Timeline timeline_;
  JointState up0_;
  JointState down0_;
};

std::vector<SignalPoint> trace_run(const ModelParams& p, const PulseSchedule& schedule,
                                   std::span<const PulseError> errors, const EnvInit& env,
                                   const TraceOptions& opts = {});

}  // namespace ddsim
