#include "ddsim/noise.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ddsim {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::string_view to_string(ErrorAxes axes) { return axes == ErrorAxes::YOnly ? "y" : "yz"; }

ErrorAxes parse_axes(std::string_view name) {
  if (name == "y" || name == "Y") return ErrorAxes::YOnly;
  if (name == "yz" || name == "YZ") return ErrorAxes::YAndZ;
  throw std::invalid_argument("unknown error axes '" + std::string(name) + "' (expected y or yz)");
}

std::vector<std::string> error_model_warnings(const ErrorModel& m) {
  std::vector<std::string> out;
  if (m.xi >= kLargeXiWarning) {
    std::ostringstream os;
    os << "xi = " << m.xi << " is outside the small-error regime (xi < " << kLargeXiWarning << ")";
    out.push_back(os.str());
  }
  return out;
}

double PulseError::eps_x() const { return std::sqrt(1.0 - eps_y * eps_y - eps_z * eps_z); }

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + kGolden));
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::vector<PulseError> sample_errors(int n, const ErrorModel& model) {
  if (n < 0) throw std::invalid_argument("pulse count must be >= 0");
  if (!(model.xi >= 0.0) || !std::isfinite(model.xi)) {
    throw std::invalid_argument("error dispersion xi must be finite and >= 0");
  }
  std::vector<PulseError> out(static_cast<std::size_t>(n));
  if (model.xi == 0.0) return out;

  CounterRng rng(model.seed);
  for (auto& e : out) {
    do {
      e.eps_y = model.xi * rng.normal();
      e.eps_z = model.axes == ErrorAxes::YAndZ ? model.xi * rng.normal() : 0.0;
    } while (e.eps_y * e.eps_y + e.eps_z * e.eps_z > 1.0);
  }
  return out;
}

}  // namespace ddsim
