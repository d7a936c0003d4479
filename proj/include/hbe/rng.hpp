#pragma once

#include <cstdint>
#include <random>

namespace hbe {

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t v);

// Seed for replica `index` of a run keyed by `base`.  Streams for distinct
// indices are decorrelated by the mixer, so replicas can be processed in any
// order (or on any number of threads) with identical results.
std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t index);

// Deterministic random stream.  All samplers are implemented explicitly on
// top of mt19937_64 so that results are reproducible across standard
// libraries, not just across runs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  static RngStream for_replica(std::uint64_t base, std::uint64_t index) {
    return RngStream(derive_stream_seed(base, index));
  }

  // Uniform on the open interval (0, 1).
  double uniform();

  // Standard normal via Box-Muller (two uniforms per call, no cached state).
  double normal();

  // Gamma(shape, scale=1) for any shape > 0.  Marsaglia-Tsang for shape >= 1;
  // smaller shapes are boosted through Gamma(shape + 1) * U^(1/shape).
  double gamma(double shape);

  // Chi sample with real (possibly fractional) degrees of freedom > 0.
  double chi(double df);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

} // namespace hbe
