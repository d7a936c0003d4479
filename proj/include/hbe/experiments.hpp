#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hbe/stats.hpp"
#include "hbe/types.hpp"

namespace hbe {

enum class Engine { Sturm, Phase, Both };

std::string engine_name(Engine e);
Engine engine_from_name(const std::string& name); // throws ParameterError

struct ExperimentConfig {
  EnsembleParams params;
  double x = 0.0;           // bulk position, |x| < 2
  double tn = 0.0;          // window scale; <= 0 resolves to log(n)
  std::size_t replicas = 1;
  Engine engine = Engine::Sturm;
  std::size_t threads = 1;

  double resolved_tn() const;
  void validate() const;
};

// Named per-replica output column (row r belongs to replica r).
struct NamedColumn {
  std::string name;
  std::vector<double> values;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<double> per_replica;   // primary statistic, one entry per replica
  std::vector<NamedColumn> columns;  // full per-replica table for CSV output
  double mean = 0.0;                 // of the primary statistic
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks = 1.0;                   // KS to normal after sample standardization
  std::size_t engine_agreement = 0;  // replicas where both engines agreed
  nlohmann::json metadata;           // config echo, derived values, warnings
};

double semicircle_density(double x);
// Integral of the density from the left edge: 1/2 + x*sqrt(4-x^2)/(4 pi)
// + asin(x/2)/pi on [-2, 2], clamped outside.
double semicircle_cdf(double x);

// Per replica: sup distance on a 200-point grid between the empirical CDF of
// the eigenvalues scaled by 1/sqrt(n) and the semicircle CDF.
ExperimentReport run_global_law(const ExperimentConfig& config);

// Per replica: N(x sqrt(n), x sqrt(n) + tn/sqrt(n)) / tn.  Engine `both`
// cross-checks the two counting paths for exact agreement.
ExperimentReport run_local_law(const ExperimentConfig& config);

// Per replica: N(0, inf) = n - count_below(0), optionally cross-checked
// against the phase representation (|difference| <= 1).  Reports the
// standardized sample z = (N - n/2) / ((1/2pi) sqrt(4 log(n)/beta)).
ExperimentReport run_index_clt(const ExperimentConfig& config);

struct SlopeReport {
  LineFit fit;                    // Var(N) against log n
  std::vector<double> log_ns;
  std::vector<double> variances;
  nlohmann::json metadata;
};

// Least-squares slope of Var(N(0, inf)) against log n; needs >= 3 distinct
// sizes spanning at least two decades.
SlopeReport variance_slope(const std::vector<std::size_t>& ns, double beta,
                           std::size_t replicas_per_n, std::uint64_t seed,
                           std::size_t threads = 1);

// Normality diagnostics (KS + moment statistics with bootstrap errors);
// throws ParameterError below 100 samples.
NormalityReport normality_suite(const std::vector<double>& samples,
                                std::uint64_t seed = 1);

} // namespace hbe
