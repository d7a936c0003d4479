#include "hbe/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "hbe/model.hpp"
#include "hbe/phase.hpp"
#include "hbe/rng.hpp"
#include "hbe/sturm.hpp"

namespace hbe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Replica-indexed work distribution: results land in pre-sized slots keyed by
// replica index, so the aggregate is identical for any thread count.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = std::min(threads, count);
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

nlohmann::json config_json(const ExperimentConfig& c) {
  return nlohmann::json{{"n", c.params.n},
                        {"beta", c.params.beta},
                        {"seed", c.params.seed},
                        {"x", c.x},
                        {"tn", c.resolved_tn()},
                        {"replicas", c.replicas},
                        {"engine", engine_name(c.engine)},
                        {"threads", c.threads}};
}

void fill_summary(ExperimentReport& rep) {
  const SampleMoments m = compute_moments(rep.per_replica);
  rep.mean = m.mean;
  rep.variance = m.variance;
  rep.skewness = m.skewness;
  rep.excess_kurtosis = m.excess_kurtosis;
  rep.ks = ks_statistic_normal(rep.per_replica);
}

} // namespace

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::Sturm: return "sturm";
    case Engine::Phase: return "phase";
    case Engine::Both: return "both";
  }
  return "sturm";
}

Engine engine_from_name(const std::string& name) {
  if (name == "sturm") return Engine::Sturm;
  if (name == "phase") return Engine::Phase;
  if (name == "both") return Engine::Both;
  throw ParameterError("unknown engine '" + name + "' (expected sturm, phase or both)");
}

double ExperimentConfig::resolved_tn() const {
  return tn > 0.0 ? tn : std::log(static_cast<double>(params.n));
}

void ExperimentConfig::validate() const {
  params.validate();
  if (!(std::abs(x) < 2.0)) throw ParameterError("bulk position x must satisfy |x| < 2");
  if (replicas < 1) throw ParameterError("at least one replica required");
  if (threads < 1) throw ParameterError("thread count must be >= 1");
}

double semicircle_density(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / kTwoPi;
}

double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (2.0 * kTwoPi) + std::asin(0.5 * x) / kPi;
}

ExperimentReport run_global_law(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n = config.params.n;
  const double root_n = std::sqrt(static_cast<double>(n));
  constexpr std::size_t kGridPoints = 200;

  ExperimentReport rep;
  rep.experiment = "global-law";
  rep.per_replica.assign(config.replicas, 0.0);
  parallel_for(config.replicas, config.threads, [&](std::size_t r) {
    EnsembleParams p = config.params;
    p.seed = derive_stream_seed(config.params.seed, r);
    const TridiagonalModel model = sample_ensemble(p);
    double sup = 0.0;
    for (std::size_t k = 0; k < kGridPoints; ++k) {
      const double g = -2.0 + 4.0 * static_cast<double>(k) / (kGridPoints - 1.0);
      const double ecdf = static_cast<double>(count_below(model, g * root_n)) /
                          static_cast<double>(n);
      sup = std::max(sup, std::abs(ecdf - semicircle_cdf(g)));
    }
    rep.per_replica[r] = sup;
  });
  rep.columns = {{"sup_distance", rep.per_replica}};
  fill_summary(rep);
  rep.metadata = config_json(config);
  rep.metadata["experiment"] = rep.experiment;
  rep.metadata["grid_points"] = kGridPoints;
  return rep;
}

ExperimentReport run_local_law(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n = config.params.n;
  const double root_n = std::sqrt(static_cast<double>(n));
  const double tn = config.resolved_tn();
  const double lo = config.x * root_n;
  const double hi = lo + tn / root_n;
  const bool use_sturm = config.engine != Engine::Phase;
  const bool use_phase = config.engine != Engine::Sturm;

  ExperimentReport rep;
  rep.experiment = "local-law";
  rep.per_replica.assign(config.replicas, 0.0);
  std::vector<double> counts(config.replicas, 0.0);
  std::vector<double> phase_counts;
  if (use_phase) phase_counts.assign(config.replicas, 0.0);

  parallel_for(config.replicas, config.threads, [&](std::size_t r) {
    EnsembleParams p = config.params;
    p.seed = derive_stream_seed(config.params.seed, r);
    const TridiagonalModel model = sample_ensemble(p);
    double count = 0.0;
    double pcount = 0.0;
    if (use_sturm) count = static_cast<double>(count_interval(model, lo, hi).count);
    if (use_phase) {
      const SpectralFrame frame = SpectralFrame::make(config.x, n, config.params.beta);
      const ConjugatedModel cm = conjugate(model);
      const std::size_t cut = frame.edge_safe_cut();
      const double l2 = frame.local_coordinate(hi);
      pcount = static_cast<double>(count_interval_phase(cm, frame, 0.0, l2, cut).count);
      phase_counts[r] = pcount;
    }
    counts[r] = use_sturm ? count : pcount;
    rep.per_replica[r] = counts[r] / tn;
  });

  if (config.engine == Engine::Both) {
    for (std::size_t r = 0; r < config.replicas; ++r) {
      if (counts[r] == phase_counts[r]) ++rep.engine_agreement;
    }
  }

  rep.columns = {{"count", counts}, {"statistic", rep.per_replica}};
  if (use_phase) rep.columns.push_back({"phase_count", phase_counts});
  fill_summary(rep);

  const double target = semicircle_density(config.x);
  nlohmann::json deviations;
  for (double eps : {0.05, 0.1, 0.2}) {
    std::size_t over = 0;
    for (double s : rep.per_replica) {
      if (std::abs(s - target) > eps) ++over;
    }
    char key[16];
    std::snprintf(key, sizeof(key), "%.2f", eps);
    deviations[key] =
        static_cast<double>(over) / static_cast<double>(config.replicas);
  }

  rep.metadata = config_json(config);
  rep.metadata["experiment"] = rep.experiment;
  rep.metadata["target_density"] = target;
  rep.metadata["deviation_fraction"] = deviations;
  if (config.engine == Engine::Both) rep.metadata["engine_agreement"] = rep.engine_agreement;
  nlohmann::json warnings = nlohmann::json::array();
  const double log_n = std::log(static_cast<double>(n));
  if (tn <= std::sqrt(log_n)) warnings.push_back("tn at or below sqrt(log n)");
  if (tn >= root_n) warnings.push_back("tn at or above sqrt(n)");
  rep.metadata["warnings"] = warnings;
  return rep;
}

ExperimentReport run_index_clt(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n = config.params.n;
  const double beta = config.params.beta;
  const double log_n = std::log(static_cast<double>(n));
  const double scale = std::sqrt(4.0 * log_n / beta) / kTwoPi;
  const bool use_sturm = config.engine != Engine::Phase;
  const bool use_phase = config.engine != Engine::Sturm;

  ExperimentReport rep;
  rep.experiment = "index-clt";
  rep.per_replica.assign(config.replicas, 0.0);
  std::vector<double> z(config.replicas, 0.0);
  std::vector<double> phase_values;
  std::vector<double> phase_counts;
  if (use_phase) {
    phase_values.assign(config.replicas, 0.0);
    phase_counts.assign(config.replicas, 0.0);
  }

  parallel_for(config.replicas, config.threads, [&](std::size_t r) {
    EnsembleParams p = config.params;
    p.seed = derive_stream_seed(config.params.seed, r);
    const TridiagonalModel model = sample_ensemble(p);
    double count = 0.0;
    if (use_sturm) {
      count = static_cast<double>(n - count_below(model, 0.0));
    }
    if (use_phase) {
      const SpectralFrame frame = SpectralFrame::make(0.0, n, beta);
      const ConjugatedModel cm = conjugate(model);
      const std::size_t cut = frame.default_cut();
      const double fwd = forward_phase(cm, frame, 0.0, cut).phi.back();
      const double bwd = backward_phase(cm, frame, 0.0, cut);
      const double diff = fwd - bwd;
      phase_values[r] = (3.0 * kPi - diff) / kTwoPi;
      phase_counts[r] = 1.0 - std::floor(diff / kTwoPi);
      if (!use_sturm) count = phase_counts[r];
    }
    rep.per_replica[r] = count;
    z[r] = (count - 0.5 * static_cast<double>(n)) / scale;
  });

  if (config.engine == Engine::Both) {
    for (std::size_t r = 0; r < config.replicas; ++r) {
      if (std::abs(rep.per_replica[r] - phase_values[r]) <= 1.0) ++rep.engine_agreement;
    }
  }

  rep.columns = {{"count", rep.per_replica}, {"z", z}};
  if (use_phase) {
    rep.columns.push_back({"phase_value", phase_values});
    rep.columns.push_back({"phase_count", phase_counts});
  }
  fill_summary(rep);

  rep.metadata = config_json(config);
  rep.metadata["experiment"] = rep.experiment;
  rep.metadata["mean_target"] = 0.5 * static_cast<double>(n);
  rep.metadata["predicted_variance"] = log_n / (kPi * kPi * beta);
  rep.metadata["standardization_scale"] = scale;
  rep.metadata["ks_theoretical"] = ks_statistic_prestandardized(z);
  if (config.engine == Engine::Both) rep.metadata["engine_agreement"] = rep.engine_agreement;
  return rep;
}

SlopeReport variance_slope(const std::vector<std::size_t>& ns, double beta,
                           std::size_t replicas_per_n, std::uint64_t seed,
                           std::size_t threads) {
  std::set<std::size_t> distinct(ns.begin(), ns.end());
  if (distinct.size() < 3) {
    throw ParameterError("variance slope needs at least three distinct sizes");
  }
  const double span = static_cast<double>(*distinct.rbegin()) /
                      static_cast<double>(*distinct.begin());
  if (!(span >= 100.0)) {
    throw ParameterError("variance slope needs sizes spanning two decades");
  }
  if (replicas_per_n < 2) {
    throw ParameterError("variance slope needs at least two replicas per size");
  }

  SlopeReport out;
  nlohmann::json sizes = nlohmann::json::array();
  nlohmann::json variances = nlohmann::json::array();
  for (std::size_t n : distinct) {
    ExperimentConfig c;
    c.params.n = n;
    c.params.beta = beta;
    c.params.seed = derive_stream_seed(seed, n);
    c.replicas = replicas_per_n;
    c.engine = Engine::Sturm;
    c.threads = threads;
    const ExperimentReport rep = run_index_clt(c);
    out.log_ns.push_back(std::log(static_cast<double>(n)));
    out.variances.push_back(rep.variance);
    sizes.push_back(n);
    variances.push_back(rep.variance);
  }
  out.fit = fit_line(out.log_ns, out.variances);
  out.metadata = nlohmann::json{{"experiment", "variance-slope"},
                                {"beta", beta},
                                {"replicas_per_n", replicas_per_n},
                                {"seed", seed},
                                {"threads", threads},
                                {"ns", sizes},
                                {"variances", variances},
                                {"predicted_slope", 1.0 / (kPi * kPi * beta)},
                                {"slope", out.fit.slope},
                                {"slope_se", out.fit.slope_se},
                                {"intercept", out.fit.intercept},
                                {"r_squared", out.fit.r_squared}};
  return out;
}

NormalityReport normality_suite(const std::vector<double>& samples,
                                std::uint64_t seed) {
  if (samples.size() < 100) {
    throw ParameterError("normality diagnostics need at least 100 samples");
  }
  return normality_report(samples, seed);
}

} // namespace hbe
