#include "hbe/stats.hpp"

#include <algorithm>
#include <cmath>

#include "hbe/rng.hpp"

namespace hbe {

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

SampleMoments compute_moments(const std::vector<double>& samples) {
  SampleMoments m;
  m.n = samples.size();
  if (m.n == 0) return m;
  double sum = 0.0;
  for (double v : samples) sum += v;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n < 2) return m;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : samples) {
    const double d = v - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double count = static_cast<double>(m.n);
  m.variance = m2 / (count - 1.0);
  m.sd = std::sqrt(m.variance);
  const double central2 = m2 / count;
  if (central2 > 0.0) {
    m.skewness = (m3 / count) / std::pow(central2, 1.5);
    m.excess_kurtosis = (m4 / count) / (central2 * central2) - 3.0;
  }
  return m;
}

double ks_statistic_prestandardized(const std::vector<double>& samples) {
  if (samples.size() < 2) return 1.0;
  std::vector<double> z(samples);
  std::sort(z.begin(), z.end());
  const double count = static_cast<double>(z.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = standard_normal_cdf(z[i]);
    const double above = static_cast<double>(i + 1) / count - f;
    const double below = f - static_cast<double>(i) / count;
    sup = std::max(sup, std::max(above, below));
  }
  return sup;
}

double ks_statistic_normal(const std::vector<double>& samples) {
  const SampleMoments m = compute_moments(samples);
  if (m.n < 2 || !(m.sd > 0.0)) return 1.0;
  std::vector<double> z(samples);
  for (double& v : z) v = (v - m.mean) / m.sd;
  return ks_statistic_prestandardized(z);
}

NormalityReport normality_report(const std::vector<double>& samples,
                                 std::uint64_t seed, std::size_t replicates) {
  NormalityReport rep;
  rep.moments = compute_moments(samples);
  rep.degenerate = rep.moments.n < 8 || !(rep.moments.sd > 0.0);
  rep.ks = ks_statistic_normal(samples);
  if (rep.degenerate || replicates == 0) return rep;

  const std::size_t n = samples.size();
  std::vector<double> means, vars, skews, kurts;
  means.reserve(replicates);
  vars.reserve(replicates);
  skews.reserve(replicates);
  kurts.reserve(replicates);
  std::vector<double> draw(n);
  RngStream rng(derive_stream_seed(seed, 0x626f6f74));
  for (std::size_t b = 0; b < replicates; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = std::min(
          n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
      draw[i] = samples[j];
    }
    const SampleMoments bm = compute_moments(draw);
    means.push_back(bm.mean);
    vars.push_back(bm.variance);
    skews.push_back(bm.skewness);
    kurts.push_back(bm.excess_kurtosis);
  }
  const auto spread = [](const std::vector<double>& v) {
    return compute_moments(v).sd;
  };
  rep.se_mean = spread(means);
  rep.se_variance = spread(vars);
  rep.se_skewness = spread(skews);
  rep.se_excess_kurtosis = spread(kurts);
  return rep;
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3) {
    throw ParameterError("line fit needs matching samples, at least three");
  }
  const double count = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw ParameterError("line fit needs spread in x");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    rss += r * r;
  }
  const double sigma2 = rss / (count - 2.0);
  fit.slope_se = std::sqrt(sigma2 / sxx);
  fit.intercept_se = std::sqrt(sigma2 * (1.0 / count + mx * mx / sxx));
  fit.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  return fit;
}

} // namespace hbe
