#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ddsim/model.hpp"

namespace ddsim {

enum class Protocol { Udd, Pdd, Cpmg, Custom };

std::string_view to_string(Protocol p);
// Accepts udd|pdd|cpmg|custom (case-insensitive).
Protocol parse_protocol(std::string_view name);

// Pulse instants as fractions of the horizon, strictly increasing in (0, 1].
struct PulseSchedule {
  Protocol protocol = Protocol::Custom;
  std::vector<double> fractions;

  int n() const { return static_cast<int>(fractions.size()); }
};

// sin^2(pi j / (2n + 2)), j = 1..n. n = 0 gives an empty list (free evolution).
std::vector<double> udd_fractions(int n);
// j / n, j = 1..n; the last pulse sits exactly at the horizon.
std::vector<double> pdd_fractions(int n);
// (j - 1/2) / n, j = 1..n.
std::vector<double> cpmg_fractions(int n);

PulseSchedule make_schedule(Protocol protocol, int n);

// Validates ordering and range; throws std::invalid_argument otherwise.
PulseSchedule custom_schedule(std::vector<double> fractions);

// One fraction per line, ascending. Blank lines and '#' comments are skipped.
PulseSchedule read_fractions(std::istream& in);
PulseSchedule load_fractions(const std::filesystem::path& path);

enum class EventKind { Kick, Pulse };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Kick;
  int pulse = -1;    // 0-based pulse index for Pulse events
  double gap = 0.0;  // free-evolution time since the previous event (or t = 0)
};

// Kicks at j T0 (j = 0..periods-1) merged with pulses at delta_j T. When a
// kick and a pulse coincide within 1e-12 T the kick comes first.
struct Timeline {
  std::vector<Event> events;
  double horizon = 0.0;
  double tail = 0.0;  // free evolution after the last event, up to the horizon
  int pulse_count = 0;
};

constexpr double kCoincidenceTol = 1e-12;

Timeline build_timeline(const ModelParams& p, const PulseSchedule& schedule);

}  // namespace ddsim
