#pragma once

#include <complex>
#include <utility>

#include "hbe/types.hpp"

namespace hbe {

// Orientation-preserving affine map z -> a * (z + b) of the upper half plane,
// a > 0.  Composition is written left-to-right: z * (S then T) = (z * S) * T.
struct AffineMap {
  double a = 1.0;
  double b = 0.0;

  double apply(double z) const { return a * (z + b); }
  AffineMap then(const AffineMap& t) const { return {a * t.a, b + t.b / a}; }
  AffineMap inverse() const { return {1.0 / a, -a * b}; }
  static AffineMap identity() { return {1.0, 0.0}; }
};

// Cayley transform (i - z) / (i + z); maps the closed upper half plane onto
// the closed unit disk, with the boundary line plus the point at infinity
// going to the unit circle (infinity to -1).  Non-finite inputs are treated
// as the point at infinity.
std::complex<double> cayley(std::complex<double> z);

// Angular shift of the circle action induced by the affine map `t`, measured
// between the boundary points v and w (unit complex numbers):
//   Arg_[0,2pi)(image(w)/image(v)) - Arg_[0,2pi)(w/v).
// Lies in (-2pi, 2pi) and vanishes when v = w or when both are fixed.
double ash(const AffineMap& t, std::complex<double> v, std::complex<double> w);

// Unique lift of the circle action of `t` to the real line that fixes the
// lattice pi + 2pi*Z; equals phi + ash(t, -1, e^{i phi}) and moves every
// point by less than 2pi.
double lift_affine(double phi, const AffineMap& t);

// Rotations lift exactly.
inline double lift_rotation(double phi, double alpha) { return phi + alpha; }

// Scaling window around the spectral location x*sqrt(n).
struct SpectralFrame {
  double x = 0.0;     // bulk position, |x| < 2
  std::size_t n = 0;
  double beta = 1.0;
  double n0 = 0.0;    // n * (1 - x^2/4) - 1/2, the usable recursion depth

  static SpectralFrame make(double x, std::size_t n, double beta);

  // Spectral point addressed by the local coordinate lambda.
  double spectral_point(double lambda) const;
  // Inverse of spectral_point.
  double local_coordinate(double spectral) const;

  // Largest usable cut index: floor(n0), stepped down when n0 is integral
  // (the top index would degenerate).  Throws if no valid index exists.
  std::size_t default_cut() const;

  // Cut backed off from the top by max(cbrt(x^2 n), 1)/2, clamped to the
  // valid range; used by the local-law experiment.
  std::size_t edge_safe_cut() const;
};

// Unit-modulus direction parameter of step l; real part carries the sign
// of x.  Defined for 0 <= l <= n0 (imaginary part vanishes at l = n0).
std::complex<double> rho(std::size_t l, const SpectralFrame& frame);

// Accumulated rotation angle 2 * sum_{k<=l} Arg(rho_k).
double eta_arg(std::size_t l, const SpectralFrame& frame);
// Same sum restricted to k < l (zero when l = 0).
double eta_arg_before(std::size_t l, const SpectralFrame& frame);

// Single-step comparison map: T_l^{-1} then the lambda-translation, then the
// sampled perturbation, then T_{l+1}.
AffineMap build_S(std::size_t l, double lambda, const ConjugatedModel& cm,
                  const SpectralFrame& frame);

struct PhaseTrajectory {
  SpectralFrame frame;
  double lambda = 0.0;
  std::size_t cut = 0;             // final index L
  std::vector<double> phi;         // forward phase, l = 0..L
  std::vector<double> phi_odot;    // backward pre-lift phase, l = L..n (optional)
};

// Forward phase evolution: phi_0 = pi and
//   phi_{l+1} = phi_l + ash(S_l, -1, e^{i phi_l} * conj(eta_l)).
// Strictly increasing in lambda at every index.
PhaseTrajectory forward_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                              double lambda, std::size_t cut);

// Backward pre-lift phase values for l = cut..n (index i holds l = cut + i),
// evolved factor-by-factor from 0 at l = n through the inverse step maps.
std::vector<double> backward_hat_trajectory(const ConjugatedModel& cm,
                                            const SpectralFrame& frame, double lambda,
                                            std::size_t cut);

// Backward phase at the cut, lifted the same way as the forward phase
// (apply T_L, then the exact accumulated rotation).
double backward_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                      double lambda, std::size_t cut);

// Inverse of the lift at index L: recovers the pre-lift phase from phi.
double unhat(double phi, std::size_t cut, const SpectralFrame& frame);

// Eigenvalue count on the spectral interval (point(lambda), point(lambda2)]
// from the winding of phi - phi_backward, via integer-lattice crossings.
CountResult count_interval_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                                 double lambda, double lambda2, std::size_t cut);

// Count on (point(lambda), +infinity) in the centered (x = 0) frame, using
// the exact lambda -> infinity limits of both phases: the upper lattice cell
// is (n - cut) exactly, so count = (n - cut) - floor(d(lambda)/2pi).
CountResult count_upper_phase(const ConjugatedModel& cm, const SpectralFrame& frame,
                              double lambda, std::size_t cut);

// Boundary point of the extended real line with an explicit infinity tag.
struct ProjectiveReal {
  double value = 0.0;
  bool is_inf = false;
};

struct RatioChain {
  std::vector<ProjectiveReal> r; // size n + 1, r[0] = infinity
};

// Eigenvector consecutive-entry ratios at spectral point `spectral`;
// r[n] is (a positive multiple of) zero exactly at eigenvalues.
RatioChain ratio_chain(const ConjugatedModel& cm, double spectral);

// Closed forms of the two phases in the x = 0 frame as lambda -> +infinity:
// ((L+1)*pi, -2*n*pi + 3*L*pi).  Throws unless frame.x == 0.
std::pair<double, double> phase_at_infinity(std::size_t cut, const SpectralFrame& frame);

} // namespace hbe
