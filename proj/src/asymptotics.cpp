#include "hbe/asymptotics.hpp"

#include <cmath>

#include "hbe/model.hpp"

namespace hbe {

namespace {

// Margin over the Gaussian value E|Z|^3 = 1.60 (in units of the second
// moment to the 3/2) absorbing the oscillatory inflation of the step law.
constexpr double kThirdMomentFactor = 4.0;
// Allowance for the neglected remainder of the step expansion, in units of
// depth^(-3/2).
constexpr double kRemainderFactor = 5.0;

double checked_depth(std::size_t l, const SpectralFrame& frame) {
  const double depth = frame.n0 - static_cast<double>(l);
  if (!(depth > 0.0) || static_cast<double>(l + 1) > frame.n0) {
    throw ParameterError("step index must leave room below the usable depth");
  }
  return depth;
}

std::complex<double> centering_v(std::size_t l, double lambda,
                                 const SpectralFrame& frame) {
  const double depth = checked_depth(l, frame);
  const std::complex<double> rl = rho(l, frame);
  const std::complex<double> rn = rho(l + 1, frame);
  const double first = -lambda / (2.0 * std::sqrt(frame.n0) * std::sqrt(depth));
  return std::complex<double>(first, 0.0) + (rn - rl) / rl.imag();
}

std::complex<double> second_moment_q(std::size_t l, const SpectralFrame& frame) {
  const double depth = checked_depth(l, frame);
  const std::complex<double> rl = rho(l, frame);
  return 2.0 * frame.n0 * (1.0 + rl * rl) / (frame.beta * depth);
}

double oscillation_p(std::size_t l, const SpectralFrame& frame) {
  const double depth = checked_depth(l, frame);
  return 4.0 * frame.n0 / (frame.beta * depth);
}

AffineMap direction_map(std::size_t l, const SpectralFrame& frame) {
  const std::complex<double> r = rho(l, frame);
  if (!(r.imag() > 0.0)) {
    throw ParameterError("degenerate frame direction at the requested index");
  }
  return {1.0 / r.imag(), -r.real()};
}

// Everything about one step that does not depend on the sampled (x, y); the
// rotation angle inside `chi` costs O(l), so repeated draws share a context.
struct StepContext {
  AffineMap prefix;
  AffineMap suffix;
  double coupling = 0.0;
  double chi = 0.0;
};

StepContext make_step_context(std::size_t l, double lambda, double phi_value,
                              const SpectralFrame& frame) {
  checked_depth(l, frame);
  const double s = coupling_at(frame.n, l);
  const AffineMap shift{1.0, lambda / (2.0 * std::sqrt(frame.n0) * s)};
  return {direction_map(l, frame).inverse().then(shift),
          direction_map(l + 1, frame), s, phi_value - eta_arg(l, frame)};
}

double context_step(const StepContext& ctx, double x, double y) {
  if (!(1.0 + y / ctx.coupling > 0.0)) {
    throw NumericalError("sampled step map loses orientation");
  }
  const AffineMap noise{1.0 / (1.0 + y / ctx.coupling), -x / ctx.coupling};
  const AffineMap step = ctx.prefix.then(noise).then(ctx.suffix);
  return lift_affine(ctx.chi, step) - ctx.chi;
}

} // namespace

std::string variant_name(DriftVariant v) {
  return v == DriftVariant::SqrtUnscaled ? "sqrt-unscaled" : "linear-scaled";
}

DriftVariant variant_from_name(const std::string& name) {
  if (name == "sqrt-unscaled") return DriftVariant::SqrtUnscaled;
  if (name == "linear-scaled") return DriftVariant::LinearScaled;
  throw ParameterError("unknown drift variant '" + name +
                       "' (expected sqrt-unscaled or linear-scaled)");
}

double drift_b(std::size_t l, double lambda, const SpectralFrame& frame,
               DriftVariant variant) {
  const double depth = checked_depth(l, frame);
  const std::complex<double> rl = rho(l, frame);
  const std::complex<double> rn = rho(l + 1, frame);
  const double common = std::sqrt(frame.n0) * lambda / (2.0 * std::sqrt(depth)) -
                        frame.n0 * (rn - rl).real() / rl.imag();
  const double curvature = frame.n0 * (rl * rl).imag() / (2.0 * frame.beta);
  const double damping = variant == DriftVariant::SqrtUnscaled ? std::sqrt(depth) : depth;
  return common + curvature / damping;
}

double diffusion_a(std::size_t l, const SpectralFrame& frame) {
  const double depth = checked_depth(l, frame);
  const std::complex<double> rl = rho(l, frame);
  return frame.n0 * (5.0 + (rl * rl).real()) / (frame.beta * depth);
}

std::pair<double, double> osc_terms(std::size_t l, double lambda, double phi_value,
                                    const SpectralFrame& frame, DriftVariant variant) {
  return osc_terms(l, lambda, phi_value, eta_arg(l, frame), frame, variant);
}

std::pair<double, double> osc_terms(std::size_t l, double lambda, double phi_value,
                                    double eta_angle, const SpectralFrame& frame,
                                    DriftVariant variant) {
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> eta = std::polar(1.0, eta_angle);
  const std::complex<double> e = std::polar(1.0, -phi_value);
  const std::complex<double> v = centering_v(l, lambda, frame);
  const std::complex<double> q = second_moment_q(l, frame);
  const double p = oscillation_p(l, frame);

  double osc1;
  if (variant == DriftVariant::SqrtUnscaled) {
    osc1 = ((-v - 0.5 * i * q) * e * eta).real() +
           0.25 * (i * e * e * eta * eta * q).real();
  } else {
    osc1 = ((-frame.n0 * v - 0.5 * i * q) * e * eta).real() -
           0.25 * (i * e * e * eta * eta * q).real();
  }
  const double osc2 = p * (e * eta).real() +
                      (q * (e * eta + 0.5 * e * e * eta * eta)).real();
  return {osc1, osc2};
}

DriftPieces drift_pieces(std::size_t l, double lambda, double phi_value,
                         const SpectralFrame& frame, DriftVariant variant) {
  DriftPieces out;
  out.b = drift_b(l, lambda, frame, variant);
  out.a = diffusion_a(l, frame);
  const auto osc = osc_terms(l, lambda, phi_value, frame, variant);
  out.osc1 = osc.first;
  out.osc2 = osc.second;
  out.p = oscillation_p(l, frame);
  out.q = second_moment_q(l, frame);
  out.v = centering_v(l, lambda, frame);
  return out;
}

StepSampler ensemble_step_sampler(const SpectralFrame& frame) {
  const std::size_t n = frame.n;
  const double beta = frame.beta;
  return [n, beta](std::size_t l, RngStream& rng) -> std::pair<double, double> {
    const double x = rng.normal() * std::sqrt(2.0 / beta);
    if (l + 1 >= n) return {x, 0.0};
    const double df = static_cast<double>(n - l - 1) * beta;
    const double b = rng.chi(df);
    const double y = b * b / (beta * coupling_at(n, l + 1)) - coupling_at(n, l);
    return {x, y};
  };
}

double step_sample(std::size_t l, double lambda, double phi_value,
                   const StepSampler& sampler, const SpectralFrame& frame,
                   RngStream& rng) {
  const StepContext ctx = make_step_context(l, lambda, phi_value, frame);
  const auto perturbation = sampler(l, rng);
  return context_step(ctx, perturbation.first, perturbation.second);
}

StepMoments predicted_step_moments(std::size_t l, double lambda, double phi_value,
                                   const SpectralFrame& frame, DriftVariant variant) {
  const double depth = checked_depth(l, frame);
  const DriftPieces pieces = drift_pieces(l, lambda, phi_value, frame, variant);
  StepMoments out;
  out.l = l;
  out.lambda = lambda;
  out.phi_value = phi_value;
  out.drift = (pieces.b + pieces.osc1) / frame.n0;
  out.diffusion = (pieces.a + pieces.osc2) / frame.n0;
  out.error_scale = std::pow(depth, -1.5);
  return out;
}

MomentReport moment_check(std::size_t l, double lambda, double phi_value,
                          const SpectralFrame& frame, std::size_t num_samples,
                          std::uint64_t seed) {
  if (num_samples < 2) {
    throw ParameterError("moment check needs at least two samples");
  }
  const double depth = checked_depth(l, frame);

  RngStream rng(seed);
  const StepSampler sampler = ensemble_step_sampler(frame);
  const StepContext ctx = make_step_context(l, lambda, phi_value, frame);
  double sum1 = 0.0, sum2 = 0.0, sum3 = 0.0;
  double sumsq1 = 0.0, sumsq2 = 0.0, sumsq3 = 0.0;
  for (std::size_t k = 0; k < num_samples; ++k) {
    const auto perturbation = sampler(l, rng);
    const double d = context_step(ctx, perturbation.first, perturbation.second);
    const double d2 = d * d;
    const double d3 = std::abs(d) * d2;
    sum1 += d;
    sum2 += d2;
    sum3 += d3;
    sumsq1 += d2;
    sumsq2 += d2 * d2;
    sumsq3 += d3 * d3;
  }
  const double count = static_cast<double>(num_samples);
  const auto mean_and_se = [count](double sum, double sumsq) {
    const double mean = sum / count;
    const double var = std::max(sumsq / count - mean * mean, 0.0);
    return std::pair<double, double>(mean, std::sqrt(var / count));
  };
  const auto [m1, se1] = mean_and_se(sum1, sumsq1);
  const auto [m2, se2] = mean_and_se(sum2, sumsq2);
  const auto [m3, se3] = mean_and_se(sum3, sumsq3);

  const double remainder = kRemainderFactor * std::pow(depth, -1.5);

  MomentReport rep;
  rep.l = l;
  rep.lambda = lambda;
  rep.phi_value = phi_value;
  rep.samples = num_samples;

  const auto fill_mean = [&](DriftVariant variant) {
    MomentCheckEntry e;
    e.predicted = predicted_step_moments(l, lambda, phi_value, frame, variant).drift;
    e.empirical = m1;
    e.stderr_est = se1;
    e.band = remainder;
    e.pass = std::abs(e.predicted - e.empirical) <= 3.0 * se1 + remainder;
    return e;
  };
  rep.mean_sqrt_unscaled = fill_mean(DriftVariant::SqrtUnscaled);
  rep.mean_linear_scaled = fill_mean(DriftVariant::LinearScaled);

  rep.second_moment.predicted =
      predicted_step_moments(l, lambda, phi_value, frame, DriftVariant::LinearScaled)
          .diffusion;
  rep.second_moment.empirical = m2;
  rep.second_moment.stderr_est = se2;
  rep.second_moment.band = remainder;
  rep.second_moment.pass =
      std::abs(rep.second_moment.predicted - m2) <= 3.0 * se2 + remainder;

  rep.third_abs.predicted = 0.0;
  rep.third_abs.empirical = m3;
  rep.third_abs.stderr_est = se3;
  rep.third_abs.band =
      kThirdMomentFactor * std::pow(std::max(rep.second_moment.predicted, 0.0), 1.5) +
      remainder;
  rep.third_abs.pass = m3 <= rep.third_abs.band + 3.0 * se3;

  if (rep.mean_linear_scaled.pass) {
    rep.matched = DriftVariant::LinearScaled;
    rep.matched_any = true;
  } else if (rep.mean_sqrt_unscaled.pass) {
    rep.matched = DriftVariant::SqrtUnscaled;
    rep.matched_any = true;
  } else {
    rep.matched = DriftVariant::LinearScaled;
    rep.matched_any = false;
  }
  rep.pass = rep.matched_any && rep.second_moment.pass && rep.third_abs.pass;
  return rep;
}

double martingale_variance(double n, double beta) {
  if (!(n >= 1.0) || !(beta > 0.0)) {
    throw ParameterError("martingale variance needs n >= 1 and beta > 0");
  }
  return 4.0 / beta * std::log(n);
}

} // namespace hbe
