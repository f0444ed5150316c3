#pragma once

// Shared expression corpus and deterministic point sampling for the test
// suites. mt19937_64 with manual scaling keeps the draws identical across
// platforms.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "shol/field.hpp"

namespace testsup {

inline const std::vector<std::string>& corpus20() {
  static const std::vector<std::string> exprs = {
      "z",
      "conj(z)",
      "z*conj(z)",
      "z^2",
      "z^3 - 2*z + 1",
      "conj(z)^2",
      "z^2*conj(z)",
      "exp(z)",
      "exp(-conj(z))",
      "exp(z*conj(z))",
      "sin(z)",
      "cos(z)",
      "sin(z)*conj(z)",
      "log(z + 4)",
      "1/(z - 4)",
      "(z + conj(z))^2",
      "re(z)*z",
      "im(z) + z^2",
      "abs2(z)*z",
      "exp(-0.5*conj(z))*z^2",
  };
  return exprs;
}

class PointSampler {
public:
  explicit PointSampler(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    const double t = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * t;
  }

  // uniform in the disk |z| <= radius (rejection from the square)
  shol::complex in_disk(double radius) {
    for (;;) {
      const double x = uniform(-radius, radius);
      const double y = uniform(-radius, radius);
      if (x * x + y * y <= radius * radius) return {x, y};
    }
  }

private:
  std::mt19937_64 eng_;
};

inline std::vector<shol::complex> disk_points(std::size_t count, double radius,
                                              std::uint64_t seed) {
  PointSampler s(seed);
  std::vector<shol::complex> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(s.in_disk(radius));
  return out;
}

}  // namespace testsup
