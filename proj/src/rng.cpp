#include "hbe/rng.hpp"

#include <cmath>
#include <limits>

#include "hbe/types.hpp"

namespace hbe {

std::uint64_t mix64(std::uint64_t v) {
  v += 0x9E3779B97F4A7C15ull;
  v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
  v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
  return v ^ (v >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index + 1));
}

double RngStream::uniform() {
  // 53-bit mantissa, shifted off lattice endpoints so the result is in (0,1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw ParameterError("gamma: shape must be > 0");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    const double u = uniform();
    double r = g * std::pow(u, 1.0 / shape);
    if (r <= 0.0) r = std::numeric_limits<double>::min(); // guard underflow
    return r;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::chi(double df) {
  if (!(df > 0.0)) throw ParameterError("chi: df must be > 0");
  return std::sqrt(2.0 * gamma(0.5 * df));
}

} // namespace hbe
