#pragma once

#include <utility>

#include "hbe/types.hpp"

namespace hbe {

// Number of eigenvalues strictly below `threshold`, via the signs of the
// LDL^T pivots of (H - threshold I).  Exact zero pivots are replaced by
// -eps * ||H||_inf.  O(n), no allocation.
std::size_t count_below(const TridiagonalModel& model, double threshold);

// Eigenvalue count for the interval (lo, hi]; boundary hits are measure-zero
// for sampled models.  Accepts lo = -inf / hi = +inf.
CountResult count_interval(const TridiagonalModel& model, double lo, double hi);

// k-th smallest eigenvalue (k in [0, n)), located to within 2*tol by
// bisection started from the Gershgorin bounds padded by 1.
double eigenvalue_by_index(const TridiagonalModel& model, std::size_t k, double tol);

// Gershgorin enclosure of the spectrum, padded by +-1.
std::pair<double, double> padded_spectrum_bounds(const TridiagonalModel& model);

// Sign of det(H - t I) computed by the rescaled three-term recurrence;
// returns -1, 0 or +1.  Independent of the pivot-count path, used as an
// oracle cross-check.
int char_poly_sign(const TridiagonalModel& model, double t);

} // namespace hbe
