#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hbe {

// Invalid user-supplied parameters (bad sizes, out-of-range arguments, ...).
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Internal cross-checks failed (sign tests, bracket violations, degenerate samples).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct EnsembleParams {
  std::size_t n = 0;      // matrix size, >= 2
  double beta = 2.0;      // inverse-temperature parameter, > 0
  std::uint64_t seed = 0; // base seed for stream derivation

  void validate() const {
    if (n < 2) throw ParameterError("EnsembleParams: n must be >= 2");
    if (!(beta > 0.0)) throw ParameterError("EnsembleParams: beta must be > 0");
  }
};

// Symmetric tridiagonal realization.  `diag` and `off` hold the raw Gaussian /
// chi samples; the matrix entries carry an extra 1/sqrt(beta).
struct TridiagonalModel {
  std::size_t n = 0;
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> diag; // n raw diagonal samples
  std::vector<double> off;  // n-1 raw positive off-diagonal samples

  double scaled_diag(std::size_t i) const;
  double scaled_off(std::size_t i) const;
};

// Non-symmetric similarity transform of a TridiagonalModel whose sub-diagonal
// is the deterministic coupling profile.  Row l of the transformed matrix is
// (coupling[l], diag[l], coupling[l] + excess[l]).
struct ConjugatedModel {
  std::size_t n = 0;
  double beta = 1.0;
  std::vector<double> diag;      // scaled diagonal entries, size n
  std::vector<double> excess;    // super-diagonal surplus over the coupling, size n
                                 // (last entry fixed to 0 by convention)
  std::vector<double> coupling;  // sqrt(n - j - 1/2), size n
  std::vector<double> log_scale; // log of the conjugating diagonal, size n

  // Materialized conjugating diagonal; overflows for large n, intended for
  // small-n verification only.
  std::vector<double> scale_diagonal() const;
};

struct CountResult {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

} // namespace hbe
