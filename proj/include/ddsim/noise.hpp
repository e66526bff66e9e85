#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ddsim {

enum class ErrorAxes { YOnly, YAndZ };

std::string_view to_string(ErrorAxes axes);
ErrorAxes parse_axes(std::string_view name);  // "y" | "yz"

// Gaussian pulse-direction errors with standard deviation xi on each active
// transverse axis.
struct ErrorModel {
  double xi = 0.0;
  ErrorAxes axes = ErrorAxes::YOnly;
  std::uint64_t seed = 0;
};

// Above this dispersion the small-error expansion is not expected to hold.
constexpr double kLargeXiWarning = 0.25;
std::vector<std::string> error_model_warnings(const ErrorModel& m);

// Pulse direction eps_x sigma_x + eps_y sigma_y + eps_z sigma_z with
// eps_x = sqrt(1 - eps_y^2 - eps_z^2).
struct PulseError {
  double eps_y = 0.0;
  double eps_z = 0.0;

  double eps_x() const;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Independent stream key for realization (or grid point) `index` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Counter-based generator: output i is mix64(key + (i + 1) * golden). Normal
// deviates come from the Marsaglia polar method, so sequences are identical
// across standard libraries.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// n independent draws; eps_y^2 + eps_z^2 > 1 draws are resampled. xi = 0
// returns exact zeros without consuming the generator.
std::vector<PulseError> sample_errors(int n, const ErrorModel& model);

}  // namespace ddsim
