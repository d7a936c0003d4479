#include "hbe/phase.hpp"

#include <cmath>
#include <limits>

namespace hbe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

double mod_two_pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

// Principal image angle in (-pi, pi] of the circle action of `t` applied to
// the boundary point at angle phi0 in [-pi, pi].  The endpoint angles are the
// fixed point (half-plane infinity) and map to themselves.
double image_angle(const AffineMap& t, double phi0) {
  if (phi0 == kPi || phi0 == -kPi) return phi0;
  const double z = std::tan(0.5 * phi0);
  return 2.0 * std::atan(t.apply(z));
}

void check_affine(const AffineMap& t) {
  if (!(t.a > 0.0) || !std::isfinite(t.a) || !std::isfinite(t.b)) {
    throw ParameterError("affine map must have finite coefficients and a > 0");
  }
}

AffineMap t_map(std::size_t l, const SpectralFrame& frame) {
  const std::complex<double> r = rho(l, frame);
  if (!(r.imag() > 0.0)) {
    throw ParameterError("phase: direction parameter degenerates at this index");
  }
  return {1.0 / r.imag(), -r.real()};
}

// Perturbation map of step l: scale 1/(1 + excess/coupling), shift -diag/coupling.
AffineMap w_map(std::size_t l, const ConjugatedModel& cm) {
  const double s = cm.coupling[l];
  const double denom = 1.0 + cm.excess[l] / s;
  if (!(denom > 0.0)) {
    throw NumericalError("phase: degenerate perturbation (coupling overwhelmed)");
  }
  return {1.0 / denom, -cm.diag[l] / s};
}

void check_frame_cut(const ConjugatedModel& cm, const SpectralFrame& frame,
                     std::size_t cut) {
  if (cm.n != frame.n) throw ParameterError("phase: model/frame size mismatch");
  if (cut == 0 || static_cast<double>(cut) > frame.n0) {
    throw ParameterError("phase: cut index out of range");
  }
}

} // namespace

std::complex<double> cayley(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    return {-1.0, 0.0};
  }
  if (z.imag() < 0.0) throw ParameterError("cayley: point below the real line");
  const std::complex<double> i(0.0, 1.0);
  return (i - z) / (i + z);
}

double ash(const AffineMap& t, std::complex<double> v, std::complex<double> w) {
  check_affine(t);
  const double av = std::atan2(v.imag(), v.real());
  const double aw = std::atan2(w.imag(), w.real());
  const double tv = image_angle(t, av);
  const double tw = image_angle(t, aw);
  return mod_two_pi(tw - tv) - mod_two_pi(aw - av);
}

double lift_affine(double phi, const AffineMap& t) {
  check_affine(t);
  if (!std::isfinite(phi)) throw ParameterError("lift_affine: non-finite phase");
  // Split phi = 2*pi*m + phi0 with phi0 in [-pi, pi); the branch index m is
  // preserved exactly and the principal part moves within (-pi, pi].
  const double m = std::floor((phi + kPi) / kTwoPi);
  const double phi0 = phi - kTwoPi * m;
  return kTwoPi * m + image_angle(t, phi0);
}

SpectralFrame SpectralFrame::make(double x, std::size_t n, double beta) {
  if (!(std::fabs(x) < 2.0)) throw ParameterError("frame: |x| must be < 2");
  if (n < 2) throw ParameterError("frame: n must be >= 2");
  if (!(beta > 0.0)) throw ParameterError("frame: beta must be > 0");
  SpectralFrame f;
  f.x = x;
  f.n = n;
  f.beta = beta;
  f.n0 = static_cast<double>(n) * (1.0 - 0.25 * x * x) - 0.5;
  if (!(f.n0 > 0.0)) throw ParameterError("frame: window too close to the edge");
  return f;
}

double SpectralFrame::spectral_point(double lambda) const {
  return x * std::sqrt(static_cast<double>(n)) + lambda / (2.0 * std::sqrt(n0));
}

double SpectralFrame::local_coordinate(double spectral) const {
  return (spectral - x * std::sqrt(static_cast<double>(n))) * 2.0 * std::sqrt(n0);
}

std::size_t SpectralFrame::default_cut() const {
  double l = std::floor(n0);
  if (l == n0) l -= 1.0; // top index degenerates when n0 is integral
  if (l < 1.0) throw ParameterError("frame: no valid cut index (window too shallow)");
  return static_cast<std::size_t>(l);
}

std::size_t SpectralFrame::edge_safe_cut() const {
  const double backoff =
      0.5 * std::max(std::cbrt(x * x * static_cast<double>(n)), 1.0);
  double l = std::floor(static_cast<double>(n) * (1.0 - 0.25 * x * x) - backoff);
  const double top = static_cast<double>(default_cut());
  if (l > top) l = top;
  if (l < 1.0) throw ParameterError("frame: no valid edge-safe cut");
  return static_cast<std::size_t>(l);
}

std::complex<double> rho(std::size_t l, const SpectralFrame& frame) {
  const double depth = frame.n0 - static_cast<double>(l);
  if (depth < 0.0) throw ParameterError("rho: index beyond the frame depth");
  const double quarter = 0.25 * frame.x * frame.x * static_cast<double>(frame.n);
  const double denom = quarter + depth; // equals (coupling at l)^2
  const double re = 0.5 * frame.x * std::sqrt(static_cast<double>(frame.n)) /
                    std::sqrt(denom);
  const double im = std::sqrt(depth / denom);
  return {re, im};
}

double eta_arg(std::size_t l, const SpectralFrame& frame) {
  double s = 0.0;
  for (std::size_t k = 0; k <= l; ++k) s += 2.0 * std::arg(rho(k, frame));
  return s;
}

double eta_arg_before(std::size_t l, const SpectralFrame& frame) {
  return l == 0 ? 0.0 : eta_arg(l - 1, frame);
}

AffineMap build_S(std::size_t l, double lambda, const ConjugatedModel& cm,
                  const SpectralFrame& frame) {
  if (cm.n != frame.n) throw ParameterError("build_S: model/frame size mismatch");
  if (static_cast<double>(l) >= frame.n0) {
    throw ParameterError("build_S: step index beyond the frame depth");
  }
  const AffineMap shift{1.0, lambda / (2.0 * std::sqrt(frame.n0) * cm.coupling[l])};
  return t_map(l, frame)
      .inverse()
      .then(shift)
      .then(w_map(l, cm))
      .then(t_map(l + 1, frame));
}

PhaseTrajectory forward_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                              double lambda, std::size_t cut) {
  check_frame_cut(cm, frame, cut);
  PhaseTrajectory traj;
  traj.frame = frame;
  traj.lambda = lambda;
  traj.cut = cut;
  traj.phi.resize(cut + 1);
  traj.phi[0] = kPi;
  double eta = 0.0;
  for (std::size_t l = 0; l < cut; ++l) {
    eta += 2.0 * std::arg(rho(l, frame));
    const AffineMap s = build_S(l, lambda, cm, frame);
    const double chi = traj.phi[l] - eta;
    // ash(s, -1, e^{i chi}) computed on the principal branch of chi.
    const double chi0 = std::remainder(chi, kTwoPi);
    const double delta = image_angle(s, chi0) - chi0;
    traj.phi[l + 1] = traj.phi[l] + delta;
  }
  return traj;
}

std::vector<double> backward_hat_trajectory(const ConjugatedModel& cm,
                                            const SpectralFrame& frame, double lambda,
                                            std::size_t cut) {
  check_frame_cut(cm, frame, cut);
  const double spectral = frame.spectral_point(lambda);
  std::vector<double> hat(cm.n - cut + 1);
  hat[cm.n - cut] = 0.0;
  for (std::size_t l = cm.n; l-- > cut;) {
    const AffineMap back =
        w_map(l, cm).inverse().then({1.0, -spectral / cm.coupling[l]});
    hat[l - cut] = lift_affine(hat[l - cut + 1], back) - kPi;
  }
  return hat;
}

double backward_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                      double lambda, std::size_t cut) {
  const std::vector<double> hat = backward_hat_trajectory(cm, frame, lambda, cut);
  return lift_affine(hat[0], t_map(cut, frame)) + eta_arg_before(cut, frame);
}

double unhat(double phi, std::size_t cut, const SpectralFrame& frame) {
  if (cut == 0 || static_cast<double>(cut) > frame.n0) {
    throw ParameterError("unhat: cut index out of range");
  }
  return lift_affine(phi - eta_arg_before(cut, frame), t_map(cut, frame).inverse());
}

CountResult count_interval_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                                 double lambda, double lambda2, std::size_t cut) {
  if (!(lambda < lambda2)) {
    throw ParameterError("count_interval_phase: requires lambda < lambda2");
  }
  const double d1 =
      forward_phase(cm, frame, lambda, cut).phi[cut] - backward_phase(cm, frame, lambda, cut);
  const double d2 =
      forward_phase(cm, frame, lambda2, cut).phi[cut] - backward_phase(cm, frame, lambda2, cut);
  const double cells = std::floor(d2 / kTwoPi) - std::floor(d1 / kTwoPi);
  if (cells < 0.0) {
    throw NumericalError("count_interval_phase: phase difference not monotone");
  }
  CountResult r;
  r.lo = frame.spectral_point(lambda);
  r.hi = frame.spectral_point(lambda2);
  r.count = static_cast<std::size_t>(cells);
  return r;
}

CountResult count_upper_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                              double lambda, std::size_t cut) {
  phase_at_infinity(cut, frame); // validates the centered frame and the cut
  const double d1 =
      forward_phase(cm, frame, lambda, cut).phi[cut] - backward_phase(cm, frame, lambda, cut);
  const double upper_cell = static_cast<double>(frame.n - cut);
  const double cells = upper_cell - std::floor(d1 / kTwoPi);
  if (cells < 0.0) {
    throw NumericalError("count_upper_phase: phase difference above its limit");
  }
  CountResult r;
  r.lo = frame.spectral_point(lambda);
  r.hi = std::numeric_limits<double>::infinity();
  r.count = static_cast<std::size_t>(cells);
  return r;
}

RatioChain ratio_chain(const ConjugatedModel& cm, double spectral) {
  RatioChain chain;
  chain.r.resize(cm.n + 1);
  chain.r[0] = {0.0, true};
  for (std::size_t l = 0; l < cm.n; ++l) {
    const ProjectiveReal cur = chain.r[l];
    ProjectiveReal next;
    if (!cur.is_inf && cur.value == 0.0) {
      next.is_inf = true;
    } else {
      const double s = cm.coupling[l];
      const double inner =
          (cur.is_inf ? 0.0 : -1.0 / cur.value) + (spectral - cm.diag[l]) / s;
      const double denom = 1.0 + cm.excess[l] / s;
      if (!(denom > 0.0)) throw NumericalError("ratio_chain: degenerate perturbation");
      next.value = inner / denom;
      if (!std::isfinite(next.value)) next = {0.0, true};
    }
    chain.r[l + 1] = next;
  }
  return chain;
}

std::pair<double, double> phase_at_infinity(std::size_t cut, const SpectralFrame& frame) {
  if (frame.x != 0.0) {
    throw ParameterError("phase_at_infinity: closed forms require the centered frame");
  }
  if (cut == 0 || static_cast<double>(cut) > frame.n0) {
    throw ParameterError("phase_at_infinity: cut index out of range");
  }
  const double l = static_cast<double>(cut);
  const double n = static_cast<double>(frame.n);
  return {(l + 1.0) * kPi, -2.0 * n * kPi + 3.0 * l * kPi};
}

} // namespace hbe
