#include "hbe/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hbe {

namespace {

double inf_norm(const TridiagonalModel& m) {
  const double inv = 1.0 / std::sqrt(m.beta);
  double best = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    double row = std::fabs(m.diag[i]) * inv;
    if (i > 0) row += std::fabs(m.off[i - 1]) * inv;
    if (i + 1 < m.n) row += std::fabs(m.off[i]) * inv;
    best = std::max(best, row);
  }
  return best;
}

} // namespace

std::size_t count_below(const TridiagonalModel& model, double threshold) {
  if (model.n < 2) throw ParameterError("count_below: model too small");
  if (!std::isfinite(threshold)) throw ParameterError("count_below: non-finite threshold");
  const double inv = 1.0 / std::sqrt(model.beta);
  const double sub = -std::numeric_limits<double>::epsilon() * inf_norm(model);
  std::size_t count = 0;
  double q = model.diag[0] * inv - threshold;
  if (q == 0.0) q = sub;
  if (q < 0.0) ++count;
  for (std::size_t k = 1; k < model.n; ++k) {
    const double e = model.off[k - 1] * inv;
    q = (model.diag[k] * inv - threshold) - e * e / q;
    if (q == 0.0) q = sub;
    if (q < 0.0) ++count;
  }
  return count;
}

CountResult count_interval(const TridiagonalModel& model, double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw ParameterError("count_interval: NaN endpoint");
  if (!(lo < hi)) throw ParameterError("count_interval: requires lo < hi");
  const auto bounds = padded_spectrum_bounds(model);
  const double lo_eff = std::isinf(lo) ? bounds.first : lo;
  const double hi_eff = std::isinf(hi) ? bounds.second : hi;
  CountResult r;
  r.lo = lo;
  r.hi = hi;
  r.count = count_below(model, hi_eff) - count_below(model, lo_eff);
  return r;
}

std::pair<double, double> padded_spectrum_bounds(const TridiagonalModel& model) {
  const double inv = 1.0 / std::sqrt(model.beta);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < model.n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::fabs(model.off[i - 1]) * inv;
    if (i + 1 < model.n) radius += std::fabs(model.off[i]) * inv;
    const double c = model.diag[i] * inv;
    lo = std::min(lo, c - radius);
    hi = std::max(hi, c + radius);
  }
  return {lo - 1.0, hi + 1.0};
}

double eigenvalue_by_index(const TridiagonalModel& model, std::size_t k, double tol) {
  if (k >= model.n) throw ParameterError("eigenvalue_by_index: index out of range");
  if (!(tol > 0.0)) throw ParameterError("eigenvalue_by_index: tol must be > 0");
  auto [lo, hi] = padded_spectrum_bounds(model);
  // Invariant: count_below(lo) <= k < count_below(hi).
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break; // interval at floating-point resolution
    if (count_below(model, mid) <= k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

int char_poly_sign(const TridiagonalModel& model, double t) {
  const double inv = 1.0 / std::sqrt(model.beta);
  // det recurrence with magnitude renormalization; only the sign survives.
  double prev = 1.0;                          // p_0
  double cur = model.diag[0] * inv - t;       // p_1
  for (std::size_t k = 1; k < model.n; ++k) {
    const double e = model.off[k - 1] * inv;
    double next = (model.diag[k] * inv - t) * cur - e * e * prev;
    prev = cur;
    cur = next;
    const double mag = std::max(std::fabs(prev), std::fabs(cur));
    if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
      prev /= mag;
      cur /= mag;
    }
  }
  if (cur > 0.0) return 1;
  if (cur < 0.0) return -1;
  return 0;
}

} // namespace hbe
