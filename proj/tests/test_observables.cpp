#include <cmath>

#include <gtest/gtest.h>

#include "ddsim/noise.hpp"
#include "ddsim/observables.hpp"
#include "ddsim/oracle.hpp"

using namespace ddsim;

TEST(Signal, UnevolvedPairIsOne) {
  const ModelParams p = reference_params();
  const JointState up = make_state(p, Spin::Up, default_env());
  const JointState down = make_state(p, Spin::Down, default_env());
  const Complex z = signal(up, down);
  EXPECT_NEAR(z.real(), 1.0, 1e-15);
  EXPECT_NEAR(z.imag(), 0.0, 1e-15);
}

TEST(Signal, OrthogonalEnvironmentsGiveZero) {
  const ModelParams p = make_params(0, 0, 0, 0, 8, 1);
  const JointState up = make_state(p, Spin::Up, EnvInit{Eigen::Vector2cd(1, 0), MomentumEigenstate{0}});
  const JointState down = make_state(p, Spin::Down, EnvInit{Eigen::Vector2cd(1, 0), MomentumEigenstate{1}});
  EXPECT_EQ(signal(up, down), Complex(0));
}

TEST(Signal, DimensionMismatchThrows) {
  EXPECT_THROW(signal(JointState(8), JointState(16)), std::invalid_argument);
}

TEST(Trace, DecoupledSpinStaysCoherent) {
  const ModelParams p = make_params(1.5e3, 0, 1e3, 1e3, 256, 10);
  const auto pts = trace_run(p, make_schedule(Protocol::Udd, 4), std::vector<PulseError>(4), default_env());
  ASSERT_FALSE(pts.empty());
  EXPECT_EQ(pts.front().t, 0.0);
  EXPECT_DOUBLE_EQ(pts.back().t, p.T);
  for (const auto& pt : pts) {
    EXPECT_NEAR(pt.s, 1.0, 1e-12);
    EXPECT_NEAR(pt.q, 0.0, 1e-12);
  }
}

TEST(Trace, PointsInsideUnitDisk) {
  const ModelParams p = reference_params();
  const auto errs = sample_errors(50, ErrorModel{0.05, ErrorAxes::YAndZ, 4});
  const auto pts = trace_run(p, make_schedule(Protocol::Udd, 50), errs, default_env());
  // t = 0, every event, then the horizon after the trailing free segment.
  EXPECT_EQ(pts.size(), build_timeline(p, make_schedule(Protocol::Udd, 50)).events.size() + 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_LE(pts[i].s * pts[i].s + pts[i].q * pts[i].q, 1 + 1e-10);
    if (i > 0) {
      EXPECT_GE(pts[i].t, pts[i - 1].t);
    }
  }
}

TEST(Trace, MatchesDenseSignal) {
  CounterRng rng(21);
  for (int N : {8, 16}) {
    for (int trial = 0; trial < 8; ++trial) {
      const ModelParams p = oracle_params(N, 1 + trial % 3);
      const PulseSchedule sched = make_schedule(trial % 2 ? Protocol::Cpmg : Protocol::Pdd, 1 + trial % 4);
      const Timeline tl = build_timeline(p, sched);
      const auto errs = sample_errors(sched.n(), ErrorModel{0.15, ErrorAxes::YAndZ, rng.next_u64()});
      const EnvInit env = random_env(N, rng);
      const SignalPoint pt = SignalTracer(p, sched, env).final_point(errs);
      const Complex expect = dense_signal(dense_evolution(p, tl, errs), p, env);
      EXPECT_NEAR(pt.s, expect.real(), 1e-12);
      EXPECT_NEAR(pt.q, expect.imag(), 1e-12);
    }
  }
}

TEST(Trace, FinalStatesAgreeWithEvolve) {
  const ModelParams p = reference_params();
  const PulseSchedule sched = make_schedule(Protocol::Udd, 20);
  const auto errs = sample_errors(20, ErrorModel{0.02, ErrorAxes::YAndZ, 8});
  const SignalTracer tracer(p, sched, default_env());
  const auto [up, down] = tracer.final_states(errs);
  const JointState up_ref = evolve(make_state(p, Spin::Up, default_env()), p, tracer.timeline(), errs);
  const JointState down_ref = evolve(make_state(p, Spin::Down, default_env()), p, tracer.timeline(), errs);
  EXPECT_LT((up.amplitudes() - up_ref.amplitudes()).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((down.amplitudes() - down_ref.amplitudes()).cwiseAbs().maxCoeff(), 1e-11);
  const Complex z = signal(up_ref, down_ref);
  const SignalPoint pt = tracer.final_point(errs);
  EXPECT_NEAR(pt.s, z.real(), 1e-12);
  EXPECT_NEAR(pt.q, z.imag(), 1e-12);
}

TEST(Trace, SampleTimesAndStride) {
  const ModelParams p = oracle_params(16, 4);
  const PulseSchedule sched = make_schedule(Protocol::Udd, 3);
  const SignalTracer tracer(p, sched, default_env());
  const std::vector<PulseError> ideal(3);
  const auto full = tracer.run(ideal);

  TraceOptions only;
  only.emit_events = false;
  only.sample_times = {0.0, 0.5 * p.T, p.T};
  const auto sampled = tracer.run(ideal, only);
  ASSERT_EQ(sampled.size(), 3u);
  EXPECT_EQ(sampled[0].t, 0.0);
  EXPECT_DOUBLE_EQ(sampled[1].t, 0.5 * p.T);
  EXPECT_NEAR(sampled[2].s, full.back().s, 1e-13);
  EXPECT_NEAR(sampled[2].q, full.back().q, 1e-13);

  TraceOptions strided;
  strided.stride = 2;
  const auto fewer = tracer.run(ideal, strided);
  EXPECT_LT(fewer.size(), full.size());
  EXPECT_DOUBLE_EQ(fewer.back().t, p.T);

  TraceOptions bad;
  bad.sample_times = {0.5 * p.T, 0.1 * p.T};
  EXPECT_THROW(tracer.run(ideal, bad), std::invalid_argument);
  bad.sample_times.clear();
  bad.stride = 0;
  EXPECT_THROW(tracer.run(ideal, bad), std::invalid_argument);
  EXPECT_THROW(tracer.run(std::vector<PulseError>(2)), std::invalid_argument);
}
