#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "hbe/asymptotics.hpp"
#include "hbe/model.hpp"
#include "hbe/phase.hpp"
#include "hbe/rng.hpp"
#include "hbe/stats.hpp"
#include "hbe/types.hpp"

using namespace hbe;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

} // namespace

TEST_CASE("drift variant names round-trip") {
  CHECK(variant_name(DriftVariant::SqrtUnscaled) == "sqrt-unscaled");
  CHECK(variant_name(DriftVariant::LinearScaled) == "linear-scaled");
  CHECK(variant_from_name("sqrt-unscaled") == DriftVariant::SqrtUnscaled);
  CHECK(variant_from_name("linear-scaled") == DriftVariant::LinearScaled);
  CHECK_THROWS_AS(variant_from_name("other"), ParameterError);
}

TEST_CASE("drift coefficient in the centered frame") {
  const SpectralFrame f = SpectralFrame::make(0.0, 500, 2.0);
  // At l = 0 the leading term is sqrt(n0)*lambda/(2*sqrt(n0)) = lambda/2, and
  // the curvature term vanishes with Im(rho^2) = 0, so both variants agree.
  CHECK(drift_b(0, 2.0, f, DriftVariant::LinearScaled) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(drift_b(0, 2.0, f, DriftVariant::SqrtUnscaled) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(drift_b(0, 0.0, f, DriftVariant::LinearScaled) ==
        doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t l = 0; l < 400; l += 50) {
    const double depth = f.n0 - static_cast<double>(l);
    const double expected = std::sqrt(f.n0) * 1.3 / (2.0 * std::sqrt(depth));
    CHECK(drift_b(l, 1.3, f, DriftVariant::LinearScaled) ==
          doctest::Approx(expected).epsilon(1e-11));
  }
  CHECK_THROWS_AS(drift_b(500, 1.0, f, DriftVariant::LinearScaled), ParameterError);
}

TEST_CASE("diffusion coefficient grows toward the top of the window") {
  const SpectralFrame f = SpectralFrame::make(0.0, 1000, 2.0);
  double prev = 0.0;
  for (std::size_t l = 0; l < 900; l += 100) {
    const double depth = f.n0 - static_cast<double>(l);
    const double a = diffusion_a(l, f);
    CHECK(a == doctest::Approx(4.0 * f.n0 / (2.0 * depth)).epsilon(1e-12));
    CHECK(a > prev);
    prev = a;
  }
  const SpectralFrame g = SpectralFrame::make(0.9, 1000, 2.0);
  CHECK_THROWS_AS(diffusion_a(1000, g), ParameterError);
}

TEST_CASE("oscillatory corrections reduce to a single harmonic at x = 0") {
  const SpectralFrame f = SpectralFrame::make(0.0, 800, 2.0);
  for (const std::size_t l : {0ul, 11ul, 200ul}) {
    const double p = 4.0 * f.n0 / (2.0 * (f.n0 - static_cast<double>(l)));
    const double sign = (l % 2 == 0) ? -1.0 : 1.0; // e^{i (l+1) pi}
    for (const double phi : {0.0, 0.7, 2.9, -1.3}) {
      const auto [osc1, osc2] =
          osc_terms(l, 1.5, phi, f, DriftVariant::LinearScaled);
      // q = 0 in the centered frame, so osc2 = p Re(e^{-i phi} eta).
      CHECK(osc2 == doctest::Approx(p * sign * std::cos(phi)).epsilon(1e-9));
      // v is real here and osc1 = -n0 v Re(e^{-i phi} eta).
      const double depth = f.n0 - static_cast<double>(l);
      const double v = -1.5 / (2.0 * std::sqrt(f.n0) * std::sqrt(depth));
      CHECK(osc1 ==
            doctest::Approx(-f.n0 * v * sign * std::cos(phi)).epsilon(1e-9));
    }
  }
}

TEST_CASE("oscillatory corrections are 2pi-periodic with zero grid mean") {
  const SpectralFrame f = SpectralFrame::make(0.6, 500, 1.0);
  for (const auto variant : {DriftVariant::SqrtUnscaled, DriftVariant::LinearScaled}) {
    const auto at = [&](double phi) { return osc_terms(40, 0.8, phi, f, variant); };
    const auto base = at(0.43);
    const auto shifted = at(0.43 + kTwoPi);
    CHECK(base.first == doctest::Approx(shifted.first).epsilon(1e-9));
    CHECK(base.second == doctest::Approx(shifted.second).epsilon(1e-9));

    // Trig polynomial in phi with frequencies 1 and 2: uniform grids average
    // to zero exactly.
    double sum1 = 0.0, sum2 = 0.0;
    const int grid = 16;
    for (int j = 0; j < grid; ++j) {
      const auto o = at(kTwoPi * j / grid);
      sum1 += o.first;
      sum2 += o.second;
    }
    const DriftPieces pieces = drift_pieces(40, 0.8, 0.0, f, variant);
    const double scale = 1.0 + std::abs(pieces.p) + std::abs(pieces.q);
    CHECK(std::abs(sum1 / grid) < 1e-10 * scale);
    CHECK(std::abs(sum2 / grid) < 1e-10 * scale);
  }
}

TEST_CASE("caller-supplied rotation angle matches the recomputed one") {
  const SpectralFrame f = SpectralFrame::make(0.4, 300, 2.0);
  double eta = 0.0;
  for (std::size_t l = 0; l < 250; ++l) {
    eta += 2.0 * std::arg(rho(l, f));
    if (l % 40 != 0) continue;
    const auto direct = osc_terms(l, 0.9, 1.1, f, DriftVariant::LinearScaled);
    const auto supplied =
        osc_terms(l, 0.9, 1.1, eta, f, DriftVariant::LinearScaled);
    CHECK(direct.first == supplied.first);
    CHECK(direct.second == supplied.second);
  }
}

TEST_CASE("a noiseless step at the window center does not move the phase") {
  const SpectralFrame f = SpectralFrame::make(0.0, 200, 2.0);
  const StepSampler still = [](std::size_t, RngStream&) {
    return std::pair<double, double>(0.0, 0.0);
  };
  RngStream rng(21);
  for (const std::size_t l : {0ul, 57ul, 150ul}) {
    CHECK(step_sample(l, 0.0, 0.9, still, f, rng) == 0.0);
  }
}

TEST_CASE("sampled steps stay inside one winding cell") {
  const SpectralFrame f = SpectralFrame::make(0.5, 400, 2.0);
  const StepSampler sampler = ensemble_step_sampler(f);
  RngStream rng(22);
  for (int i = 0; i < 2000; ++i) {
    const double d = step_sample(73, 1.2, 0.3, sampler, f, rng);
    CHECK(std::abs(d) < kTwoPi);
  }
}

TEST_CASE("ensemble step sampler pins the top row and matches chi moments") {
  const SpectralFrame f = SpectralFrame::make(0.0, 100, 2.0);
  const StepSampler sampler = ensemble_step_sampler(f);
  RngStream rng(23);
  const auto top = sampler(99, rng);
  CHECK(top.second == 0.0);

  double sx = 0.0, sxx = 0.0, sy = 0.0;
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) {
    const auto [xv, yv] = sampler(10, rng);
    sx += xv;
    sxx += xv * xv;
    sy += yv;
  }
  const double var_x = sxx / draws - (sx / draws) * (sx / draws);
  CHECK(std::abs(sx / draws) < 4.0 * std::sqrt(1.0 / draws));
  CHECK(std::abs(var_x - 1.0) < 4.0 * std::sqrt(2.0 / draws));
  // E[chi^2_k] = k with k = (n - l - 1) beta makes the mean surplus explicit.
  const double mean_y =
      static_cast<double>(100 - 10 - 1) / coupling_at(100, 11) - coupling_at(100, 10);
  CHECK(std::abs(sy / draws - mean_y) < 4.0 * std::sqrt(1.1 / draws));
}

TEST_CASE("moment diagnostics single out the linearly damped drift variant") {
  const SpectralFrame f = SpectralFrame::make(0.8, 10000, 2.0);
  const MomentReport rep = moment_check(1000, 1.0, 0.7, f, 100000, 31);
  CHECK(rep.matched_any);
  CHECK(rep.matched == DriftVariant::LinearScaled);
  CHECK(rep.mean_linear_scaled.pass);
  CHECK_FALSE(rep.mean_sqrt_unscaled.pass);
  CHECK(rep.second_moment.pass);
  CHECK(rep.third_abs.pass);
  CHECK(rep.pass);

  const MomentReport again = moment_check(1000, 1.0, 0.7, f, 100000, 31);
  CHECK(rep.mean_linear_scaled.empirical == again.mean_linear_scaled.empirical);
  CHECK(rep.second_moment.empirical == again.second_moment.empirical);
}

TEST_CASE("moment diagnostics pass at the center of the window") {
  const SpectralFrame f = SpectralFrame::make(0.0, 2000, 2.0);
  const MomentReport rep = moment_check(0, 0.5, 0.7, f, 30000, 32);
  CHECK(rep.matched_any);
  CHECK(rep.second_moment.pass);
  CHECK(rep.third_abs.pass);
  CHECK(rep.pass);
  CHECK_THROWS_AS(moment_check(0, 0.5, 0.7, f, 1, 32), ParameterError);
  CHECK_THROWS_AS(moment_check(2000, 0.5, 0.7, f, 100, 32), ParameterError);
}

TEST_CASE("deterministic drift accumulates to the spectral shift") {
  const SpectralFrame f = SpectralFrame::make(0.0, 1000000, 2.0);
  const std::size_t cut = f.default_cut();
  const double t = 1.7;
  double sum = 0.0;
  for (std::size_t l = 0; l < cut; ++l) {
    const double depth = f.n0 - static_cast<double>(l);
    sum += std::sqrt(f.n0) * t / (2.0 * std::sqrt(depth));
  }
  CHECK(std::abs(sum / f.n0 - t) < 0.02 * t);
}

TEST_CASE("accumulated diffusion grows like (4/beta) log n") {
  const double beta = 2.0;
  std::vector<double> log_ns, sums;
  for (const std::size_t n : {1000ul, 10000ul, 100000ul, 1000000ul}) {
    const SpectralFrame f = SpectralFrame::make(0.0, n, beta);
    const std::size_t cut = f.default_cut();
    double sum = 0.0;
    for (std::size_t l = 0; l < cut; ++l) sum += diffusion_a(l, f);
    log_ns.push_back(std::log(static_cast<double>(n)));
    sums.push_back(sum / f.n0);
  }
  const LineFit fit = fit_line(log_ns, sums);
  CHECK(std::abs(fit.slope - 4.0 / beta) < 0.1 * (4.0 / beta));
}

TEST_CASE("oscillatory sums cancel along the window") {
  // The per-step corrections enter the phase as osc/n0; their partial sums
  // must stay bounded uniformly in n for the drift expansion to close.
  for (const double x : {0.0, 0.5}) {
    for (const std::size_t n : {1000ul, 10000ul, 100000ul}) {
      CAPTURE(x);
      CAPTURE(n);
      const SpectralFrame f = SpectralFrame::make(x, n, 2.0);
      // Stay clear of the turning point (edge-safe cut); there the rotation
      // degenerates and the terms would add coherently.
      const std::size_t cut = f.edge_safe_cut();
      double eta = 0.0, sum1 = 0.0, sum2 = 0.0, max1 = 0.0, max2 = 0.0;
      for (std::size_t l = 0; l < cut; ++l) {
        eta += 2.0 * std::arg(rho(l, f));
        const auto [o1, o2] =
            osc_terms(l, 1.0, 0.7, eta, f, DriftVariant::LinearScaled);
        sum1 += o1 / f.n0;
        sum2 += o2 / f.n0;
        max1 = std::max(max1, std::abs(sum1));
        max2 = std::max(max2, std::abs(sum2));
      }
      CHECK(max1 < 1.5);
      CHECK(max2 < 4.0);
    }
  }
}

TEST_CASE("martingale variance closed form") {
  CHECK(martingale_variance(1e4, 2.0) ==
        doctest::Approx(18.420680743952367).epsilon(1e-14));
  CHECK(martingale_variance(std::exp(2.0), 4.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(martingale_variance(50000.0, 1.0) ==
        doctest::Approx(2.0 * martingale_variance(50000.0, 2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(martingale_variance(0.5, 2.0), ParameterError);
  CHECK_THROWS_AS(martingale_variance(100.0, 0.0), ParameterError);
}

TEST_CASE("predicted step moments expose the remainder scale") {
  const SpectralFrame f = SpectralFrame::make(0.0, 5000, 2.0);
  const StepMoments near = predicted_step_moments(10, 0.4, 0.7, f, DriftVariant::LinearScaled);
  const StepMoments deep = predicted_step_moments(4000, 0.4, 0.7, f, DriftVariant::LinearScaled);
  CHECK(near.error_scale > 0.0);
  CHECK(deep.error_scale > near.error_scale);
  CHECK(near.diffusion > 0.0);
}
