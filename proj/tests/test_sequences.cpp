#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "ddsim/sequences.hpp"

using namespace ddsim;

TEST(Udd, SmallCounts) {
  EXPECT_NEAR(udd_fractions(1)[0], 0.5, 1e-15);
  const auto two = udd_fractions(2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NEAR(two[0], 0.25, 1e-15);
  EXPECT_NEAR(two[1], 0.75, 1e-15);
  const auto three = udd_fractions(3);
  EXPECT_NEAR(three[0], 0.14644661, 1e-8);
  EXPECT_NEAR(three[1], 0.5, 1e-15);
  EXPECT_NEAR(three[2], 0.85355339, 1e-8);
  EXPECT_NEAR(three[0] + three[2], 1.0, 1e-15);
}

TEST(Udd, SymmetricAndIncreasing) {
  for (int n = 1; n <= 600; n += (n < 20 ? 1 : 37)) {
    const auto f = udd_fractions(n);
    ASSERT_EQ(static_cast<int>(f.size()), n);
    for (int j = 0; j < n; ++j) {
      EXPECT_NEAR(f[j] + f[n - 1 - j], 1.0, 1e-15) << "n=" << n << " j=" << j;
      if (j > 0) {
        EXPECT_LT(f[j - 1], f[j]);
      }
      EXPECT_GT(f[j], 0.0);
      EXPECT_LE(f[j], 1.0);
    }
  }
}

TEST(Pdd, Values) {
  EXPECT_EQ(pdd_fractions(4), (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(pdd_fractions(1), (std::vector<double>{1.0}));
  for (int n : {3, 7, 50, 500}) {
    const auto f = pdd_fractions(n);
    EXPECT_EQ(f.back(), 1.0);
    for (int j = 1; j < n; ++j) EXPECT_NEAR(f[j] - f[j - 1], 1.0 / n, 1e-15);
  }
}

TEST(Cpmg, Values) {
  EXPECT_EQ(cpmg_fractions(1), (std::vector<double>{0.5}));
  EXPECT_EQ(cpmg_fractions(2), (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(cpmg_fractions(4), (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
}

TEST(Schedules, ZeroAndNegativeCounts) {
  EXPECT_TRUE(udd_fractions(0).empty());
  EXPECT_TRUE(pdd_fractions(0).empty());
  EXPECT_TRUE(cpmg_fractions(0).empty());
  EXPECT_THROW(udd_fractions(-1), std::invalid_argument);
  EXPECT_EQ(make_schedule(Protocol::Pdd, 0).n(), 0);
  EXPECT_THROW(make_schedule(Protocol::Custom, 2), std::invalid_argument);
}

TEST(Schedules, ProtocolNames) {
  EXPECT_EQ(parse_protocol("UDD"), Protocol::Udd);
  EXPECT_EQ(parse_protocol("pdd"), Protocol::Pdd);
  EXPECT_EQ(parse_protocol("Cpmg"), Protocol::Cpmg);
  EXPECT_EQ(parse_protocol("custom"), Protocol::Custom);
  EXPECT_THROW(parse_protocol("cdd"), std::invalid_argument);
  EXPECT_EQ(to_string(Protocol::Udd), "udd");
}

TEST(Custom, Validation) {
  EXPECT_NO_THROW(custom_schedule({0.1, 0.2, 1.0}));
  EXPECT_THROW(custom_schedule({0.2, 0.1}), std::invalid_argument);
  EXPECT_THROW(custom_schedule({0.2, 0.2}), std::invalid_argument);
  EXPECT_THROW(custom_schedule({0.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(custom_schedule({0.5, 1.01}), std::invalid_argument);
  EXPECT_EQ(custom_schedule({}).n(), 0);
}

TEST(Custom, ReadsFractionFile) {
  std::istringstream in("# two pulses\n0.25\n\n0.75  # second\n");
  const PulseSchedule s = read_fractions(in);
  EXPECT_EQ(s.protocol, Protocol::Custom);
  EXPECT_EQ(s.fractions, (std::vector<double>{0.25, 0.75}));
  std::istringstream bad("0.25\nabc\n");
  EXPECT_THROW(read_fractions(bad), std::invalid_argument);
  std::istringstream unordered("0.5\n0.25\n");
  EXPECT_THROW(read_fractions(unordered), std::invalid_argument);
  EXPECT_THROW(load_fractions("/nonexistent/fractions.txt"), std::invalid_argument);
}

namespace {
double reconstructed_horizon(const Timeline& tl) {
  double t = 0.0;
  for (const auto& e : tl.events) t += e.gap;
  return t + tl.tail;
}
}  // namespace

TEST(Timeline, KickPrecedesCoincidentPulse) {
  const ModelParams p = make_params(1, 1, 1, 10, 8, 2);
  const Timeline tl = build_timeline(p, custom_schedule({0.5}));
  ASSERT_EQ(tl.events.size(), 3u);
  EXPECT_EQ(tl.events[0].kind, EventKind::Kick);
  EXPECT_EQ(tl.events[0].time, 0.0);
  EXPECT_EQ(tl.events[1].kind, EventKind::Kick);
  EXPECT_NEAR(tl.events[1].time, p.T0, 1e-15);
  EXPECT_EQ(tl.events[2].kind, EventKind::Pulse);
  EXPECT_EQ(tl.events[2].pulse, 0);
  EXPECT_EQ(tl.events[2].time, tl.events[1].time);
  EXPECT_EQ(tl.events[2].gap, 0.0);
  EXPECT_NEAR(tl.tail, p.T0, 1e-15);
}

TEST(Timeline, SinglePeriodNoPulses) {
  const ModelParams p = make_params(1, 1, 1, 10, 8, 1);
  const Timeline tl = build_timeline(p, make_schedule(Protocol::Udd, 0));
  ASSERT_EQ(tl.events.size(), 1u);
  EXPECT_EQ(tl.events[0].kind, EventKind::Kick);
  EXPECT_DOUBLE_EQ(tl.tail, p.T0);
  EXPECT_EQ(tl.pulse_count, 0);
}

TEST(Timeline, UddThreeInFiftyPeriods) {
  const ModelParams p = reference_params();
  const Timeline tl = build_timeline(p, make_schedule(Protocol::Udd, 3));
  ASSERT_EQ(tl.events.size(), 53u);
  EXPECT_EQ(tl.pulse_count, 3);
  int kicks = 0;
  for (std::size_t i = 0; i < tl.events.size(); ++i) {
    kicks += tl.events[i].kind == EventKind::Kick;
    if (i > 0) {
      // The middle pulse lands on the kick at T/2 and follows it.
      EXPECT_LE(tl.events[i - 1].time, tl.events[i].time);
      if (tl.events[i - 1].time == tl.events[i].time) {
        EXPECT_EQ(tl.events[i - 1].kind, EventKind::Kick);
        EXPECT_EQ(tl.events[i].kind, EventKind::Pulse);
        EXPECT_EQ(tl.events[i].pulse, 1);
      }
    }
  }
  EXPECT_EQ(kicks, 50);
  EXPECT_NEAR(reconstructed_horizon(tl), p.T, 1e-12 * p.T);
}

TEST(Timeline, PddPulsesOnKicks) {
  const ModelParams p = reference_params();
  const Timeline tl = build_timeline(p, make_schedule(Protocol::Pdd, 50));
  ASSERT_EQ(tl.events.size(), 100u);
  // Pulses j = 1..49 share a kick instant; the last sits at T where no kick is.
  for (std::size_t i = 0; i < tl.events.size(); ++i) {
    const Event& e = tl.events[i];
    if (e.kind == EventKind::Pulse && e.pulse < 49) {
      ASSERT_GT(i, 0u);
      EXPECT_EQ(tl.events[i - 1].kind, EventKind::Kick);
      EXPECT_EQ(tl.events[i - 1].time, e.time);
    }
  }
  EXPECT_EQ(tl.events.back().kind, EventKind::Pulse);
  EXPECT_DOUBLE_EQ(tl.events.back().time, p.T);
  EXPECT_EQ(tl.tail, 0.0);
  EXPECT_NEAR(reconstructed_horizon(tl), p.T, 1e-12 * p.T);
}

TEST(Timeline, SegmentsReconstructHorizon) {
  const ModelParams p = reference_params();
  for (Protocol proto : {Protocol::Udd, Protocol::Pdd, Protocol::Cpmg}) {
    for (int n : {0, 1, 7, 50, 200, 500}) {
      const Timeline tl = build_timeline(p, make_schedule(proto, n));
      EXPECT_EQ(tl.pulse_count, n);
      EXPECT_NEAR(reconstructed_horizon(tl), p.T, 1e-12 * p.T);
      EXPECT_TRUE(std::is_sorted(tl.events.begin(), tl.events.end(),
                                 [](const Event& a, const Event& b) { return a.time < b.time; }));
      int pulses = 0;
      for (const auto& e : tl.events) {
        if (e.kind == EventKind::Pulse) {
          EXPECT_EQ(e.pulse, pulses++);
        }
        EXPECT_GE(e.gap, 0.0);
      }
      EXPECT_EQ(pulses, n);
    }
  }
}
