#pragma once

#include "hbe/rng.hpp"
#include "hbe/types.hpp"

namespace hbe {

// Coupling profile sqrt(n - j - 1/2), defined for 0 <= j < n.
double coupling_at(std::size_t n, std::size_t j);

// Chi sample with df degrees of freedom (thin wrapper kept as a named
// operation so the distributional contract is testable in isolation).
double sample_chi(double df, RngStream& rng);

// Draw one tridiagonal realization: diag[i] ~ N(0,2), off[i] ~ chi with
// (n-i-1)*beta degrees of freedom.  Sampling order is fixed (all diagonal
// entries, then all off-diagonal entries) so results are bitwise stable.
TridiagonalModel sample_ensemble(const EnsembleParams& params);

// Similarity transform to the (coupling, diag, coupling + excess) form.
ConjugatedModel conjugate(const TridiagonalModel& model);

// All n eigenvalues in increasing order, each located to within 2*tol by
// bisection on the pivot count, with an independent determinant-sign
// cross-check between consecutive eigenvalues.  Throws NumericalError if the
// cross-check fails.  Intended for moderate n (the cost is O(n^2 log)).
std::vector<double> dense_eigenvalues(const TridiagonalModel& model, double tol);

} // namespace hbe
