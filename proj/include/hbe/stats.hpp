#pragma once

#include <cstdint>
#include <vector>

#include "hbe/types.hpp"

namespace hbe {

double standard_normal_cdf(double x);

struct SampleMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0; // unbiased
  double sd = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

SampleMoments compute_moments(const std::vector<double>& samples);

// Kolmogorov-Smirnov sup distance between the empirical distribution of the
// samples, standardized by their own mean and standard deviation, and the
// standard normal law.
double ks_statistic_normal(const std::vector<double>& samples);

// Same sup distance without re-standardizing (input taken as already
// standardized).
double ks_statistic_prestandardized(const std::vector<double>& samples);

struct NormalityReport {
  SampleMoments moments;
  double ks = 1.0;
  bool degenerate = false; // too few samples or zero spread
  // Bootstrap standard errors (deterministic resampling).
  double se_mean = 0.0;
  double se_variance = 0.0;
  double se_skewness = 0.0;
  double se_excess_kurtosis = 0.0;
};

NormalityReport normality_report(const std::vector<double>& samples,
                                 std::uint64_t seed, std::size_t replicates = 200);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace hbe
