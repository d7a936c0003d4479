#include "hbe/model.hpp"

#include <cmath>

#include "hbe/sturm.hpp"

namespace hbe {

double TridiagonalModel::scaled_diag(std::size_t i) const {
  return diag[i] / std::sqrt(beta);
}

double TridiagonalModel::scaled_off(std::size_t i) const {
  return off[i] / std::sqrt(beta);
}

std::vector<double> ConjugatedModel::scale_diagonal() const {
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = std::exp(log_scale[i]);
  return d;
}

double coupling_at(std::size_t n, std::size_t j) {
  if (j >= n) throw ParameterError("coupling index must satisfy j < n");
  return std::sqrt(static_cast<double>(n) - static_cast<double>(j) - 0.5);
}

double sample_chi(double df, RngStream& rng) { return rng.chi(df); }

TridiagonalModel sample_ensemble(const EnsembleParams& params) {
  params.validate();
  RngStream rng(params.seed);
  TridiagonalModel m;
  m.n = params.n;
  m.beta = params.beta;
  m.seed = params.seed;
  m.diag.resize(m.n);
  m.off.resize(m.n - 1);
  const double sqrt2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < m.n; ++i) m.diag[i] = sqrt2 * rng.normal();
  for (std::size_t i = 0; i + 1 < m.n; ++i) {
    const double df = static_cast<double>(m.n - i - 1) * m.beta;
    m.off[i] = sample_chi(df, rng);
  }
  return m;
}

ConjugatedModel conjugate(const TridiagonalModel& model) {
  if (model.n < 2) throw ParameterError("conjugate: model too small");
  const std::size_t n = model.n;
  const double sqrt_beta = std::sqrt(model.beta);
  ConjugatedModel cm;
  cm.n = n;
  cm.beta = model.beta;
  cm.diag.resize(n);
  cm.excess.assign(n, 0.0);
  cm.coupling.resize(n);
  cm.log_scale.resize(n);
  for (std::size_t j = 0; j < n; ++j) cm.coupling[j] = coupling_at(n, j);
  for (std::size_t i = 0; i < n; ++i) cm.diag[i] = model.diag[i] / sqrt_beta;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double b = model.off[i];
    if (!(b > 0.0)) throw NumericalError("conjugate: non-positive off-diagonal sample");
    cm.excess[i] = b * b / (model.beta * cm.coupling[i + 1]) - cm.coupling[i];
  }
  // Conjugating diagonal, in log form to stay finite for large n.  The ratio
  // d[i]/d[i-1] = off[i-1] / (sqrt(beta) * coupling[i]) makes the sub-diagonal
  // of the transformed matrix exactly the coupling profile.
  cm.log_scale[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    cm.log_scale[i] =
        cm.log_scale[i - 1] + std::log(model.off[i - 1] / (sqrt_beta * cm.coupling[i]));
  }
  return cm;
}

std::vector<double> dense_eigenvalues(const TridiagonalModel& model, double tol) {
  if (!(tol > 0.0)) throw ParameterError("dense_eigenvalues: tol must be > 0");
  const std::size_t n = model.n;
  std::vector<double> eig(n);
  for (std::size_t k = 0; k < n; ++k) eig[k] = eigenvalue_by_index(model, k, tol);

  // Cross-check: det(H - t) must change sign between consecutive eigenvalues.
  // Evaluate at midpoints of the gaps (and outside the padded spectrum).
  auto [lo, hi] = padded_spectrum_bounds(model);
  std::vector<double> probes(n + 1);
  probes[0] = lo;
  probes[n] = hi;
  for (std::size_t k = 0; k + 1 < n; ++k) probes[k + 1] = 0.5 * (eig[k] + eig[k + 1]);
  int prev = char_poly_sign(model, probes[0]);
  for (std::size_t k = 0; k < n; ++k) {
    const int next = char_poly_sign(model, probes[k + 1]);
    if (prev == 0 || next == 0 || prev == next) {
      throw NumericalError("dense_eigenvalues: determinant sign cross-check failed");
    }
    prev = next;
  }
  return eig;
}

} // namespace hbe
