#include "ddsim/sequences.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ddsim {

namespace {

void require_count(int n) {
  if (n < 0) throw std::invalid_argument("pulse count must be >= 0, got " + std::to_string(n));
}

void validate_fractions(const std::vector<double>& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i]) || f[i] <= 0.0 || f[i] > 1.0) {
      std::ostringstream os;
      os.precision(17);
      os << "pulse fraction " << f[i] << " at position " << i + 1 << " is outside (0, 1]";
      throw std::invalid_argument(os.str());
    }
    if (i > 0 && !(f[i] > f[i - 1])) {
      throw std::invalid_argument("pulse fractions must be strictly increasing (position " +
                                  std::to_string(i + 1) + ")");
    }
  }
}

}  // namespace

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::Udd:
      return "udd";
    case Protocol::Pdd:
      return "pdd";
    case Protocol::Cpmg:
      return "cpmg";
    case Protocol::Custom:
      return "custom";
  }
  return "custom";
}

Protocol parse_protocol(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "udd") return Protocol::Udd;
  if (lower == "pdd") return Protocol::Pdd;
  if (lower == "cpmg") return Protocol::Cpmg;
  if (lower == "custom") return Protocol::Custom;
  throw std::invalid_argument("unknown protocol '" + std::string(name) +
                              "' (expected udd, pdd, cpmg or custom)");
}

std::vector<double> udd_fractions(int n) {
  require_count(n);
  std::vector<double> f(n);
  for (int j = 1; j <= n; ++j) {
    const double s = std::sin(std::numbers::pi * j / (2.0 * n + 2.0));
    f[j - 1] = s * s;
  }
  return f;
}

std::vector<double> pdd_fractions(int n) {
  require_count(n);
  std::vector<double> f(n);
  for (int j = 1; j <= n; ++j) f[j - 1] = static_cast<double>(j) / n;
  return f;
}

std::vector<double> cpmg_fractions(int n) {
  require_count(n);
  std::vector<double> f(n);
  for (int j = 1; j <= n; ++j) f[j - 1] = (j - 0.5) / n;
  return f;
}

PulseSchedule make_schedule(Protocol protocol, int n) {
  switch (protocol) {
    case Protocol::Udd:
      return {protocol, udd_fractions(n)};
    case Protocol::Pdd:
      return {protocol, pdd_fractions(n)};
    case Protocol::Cpmg:
      return {protocol, cpmg_fractions(n)};
    case Protocol::Custom:
      break;
  }
  throw std::invalid_argument("custom schedules need explicit fractions");
}

PulseSchedule custom_schedule(std::vector<double> fractions) {
  validate_fractions(fractions);
  return {Protocol::Custom, std::move(fractions)};
}

PulseSchedule read_fractions(std::istream& in) {
  std::vector<double> f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument("fractions line " + std::to_string(lineno) +
                                  ": not a number: '" + line + "'");
    }
    std::string rest;
    if (ls >> rest) {
      throw std::invalid_argument("fractions line " + std::to_string(lineno) +
                                  ": expected exactly one value");
    }
    f.push_back(v);
  }
  return custom_schedule(std::move(f));
}

PulseSchedule load_fractions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open fractions file " + path.string());
  return read_fractions(in);
}

Timeline build_timeline(const ModelParams& p, const PulseSchedule& schedule) {
  validate_fractions(schedule.fractions);

  const double tol = kCoincidenceTol * p.T;
  Timeline tl;
  tl.horizon = p.T;
  tl.pulse_count = schedule.n();
  tl.events.reserve(static_cast<std::size_t>(p.periods) + schedule.fractions.size());

  int kick = 0;
  int pulse = 0;
  while (kick < p.periods || pulse < schedule.n()) {
    const double t_kick = kick < p.periods ? kick * p.T0 : INFINITY;
    const double t_pulse = pulse < schedule.n() ? schedule.fractions[pulse] * p.T : INFINITY;
    if (t_pulse < t_kick - tol) {
      tl.events.push_back({t_pulse, EventKind::Pulse, pulse, 0.0});
      ++pulse;
    } else {
      tl.events.push_back({t_kick, EventKind::Kick, -1, 0.0});
      // A pulse within tolerance of this kick is pinned to the kick instant.
      if (pulse < schedule.n() && std::abs(t_pulse - t_kick) <= tol) {
        tl.events.push_back({t_kick, EventKind::Pulse, pulse, 0.0});
        ++pulse;
      }
      ++kick;
    }
  }

  double prev = 0.0;
  for (auto& e : tl.events) {
    e.gap = e.time - prev;
    prev = e.time;
  }
  tl.tail = p.T - prev;
  // A final pulse at delta = 1 may round a hair past T.
  if (tl.tail < 0.0) tl.tail = 0.0;
  return tl;
}

}  // namespace ddsim
