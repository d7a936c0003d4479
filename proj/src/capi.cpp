#include "hbe/hbe.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>

#include "json.hpp"

#include "hbe/asymptotics.hpp"
#include "hbe/experiments.hpp"
#include "hbe/io.hpp"
#include "hbe/model.hpp"
#include "hbe/phase.hpp"
#include "hbe/sturm.hpp"

struct hbe_model {
  hbe::TridiagonalModel model;
};

struct hbe_report {
  hbe::ExperimentReport report;
};

namespace {

std::string& last_error_storage() {
  thread_local std::string storage;
  return storage;
}

void set_error(const std::string& message) { last_error_storage() = message; }

char* alloc_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
hbe_status guard(F&& body) noexcept {
  try {
    body();
    last_error_storage().clear();
    return HBE_OK;
  } catch (const hbe::ParameterError& e) {
    set_error(e.what());
    return HBE_ERR_PARAM;
  } catch (const hbe::NumericalError& e) {
    set_error(e.what());
    return HBE_ERR_NUMERICAL;
  } catch (const std::filesystem::filesystem_error& e) {
    set_error(e.what());
    return HBE_ERR_IO;
  } catch (const std::ios_base::failure& e) {
    set_error(e.what());
    return HBE_ERR_IO;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HBE_ERR_NUMERICAL;
  } catch (...) {
    set_error("unknown error");
    return HBE_ERR_NUMERICAL;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw hbe::ParameterError(message);
}

nlohmann::json entry_json(const hbe::MomentCheckEntry& e) {
  return nlohmann::json{{"predicted", e.predicted},
                        {"empirical", e.empirical},
                        {"stderr", e.stderr_est},
                        {"band", e.band},
                        {"pass", e.pass}};
}

} // namespace

extern "C" {

const char* hbe_last_error(void) { return last_error_storage().c_str(); }

void hbe_string_free(char* s) { std::free(s); }

hbe_status hbe_model_sample(size_t n, double beta, uint64_t seed, hbe_model** out) {
  return guard([&] {
    require(out != nullptr, "output pointer is null");
    hbe::EnsembleParams params{n, beta, seed};
    auto holder = std::make_unique<hbe_model>();
    holder->model = hbe::sample_ensemble(params);
    *out = holder.release();
  });
}

void hbe_model_free(hbe_model* model) { delete model; }

size_t hbe_model_size(const hbe_model* model) {
  return model == nullptr ? 0 : model->model.n;
}

hbe_status hbe_model_entry(const hbe_model* model, size_t index, double* a,
                           double* b) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(index < model->model.n, "row index out of range");
    if (a != nullptr) *a = model->model.diag[index];
    if (b != nullptr) {
      *b = index + 1 < model->model.n
               ? model->model.off[index]
               : std::numeric_limits<double>::quiet_NaN();
    }
  });
}

hbe_status hbe_model_write_csv(const hbe_model* model, const char* path) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(path != nullptr, "path is null");
    hbe::write_model_csv(model->model, path);
  });
}

hbe_status hbe_count_below(const hbe_model* model, double threshold, size_t* out) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(out != nullptr, "output pointer is null");
    require(!std::isnan(threshold), "threshold is NaN");
    *out = hbe::count_below(model->model, threshold);
  });
}

hbe_status hbe_count_interval(const hbe_model* model, double lo, double hi,
                              size_t* out) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(out != nullptr, "output pointer is null");
    *out = hbe::count_interval(model->model, lo, hi).count;
  });
}

hbe_status hbe_count_interval_phase(const hbe_model* model, double x, double lo,
                                    double hi, size_t* out) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(out != nullptr, "output pointer is null");
    require(std::isfinite(lo), "phase counting needs a finite lower bound");
    require(!std::isnan(hi), "upper bound is NaN");
    const hbe::SpectralFrame frame =
        hbe::SpectralFrame::make(x, model->model.n, model->model.beta);
    const hbe::ConjugatedModel cm = hbe::conjugate(model->model);
    const std::size_t cut = frame.edge_safe_cut();
    if (std::isinf(hi)) {
      require(hi > 0.0, "upper bound must be above the lower bound");
      require(x == 0.0,
              "half-infinite phase counting is available in the centered frame only");
      *out = hbe::count_upper_phase(cm, frame, frame.local_coordinate(lo), cut).count;
      return;
    }
    *out = hbe::count_interval_phase(cm, frame, frame.local_coordinate(lo),
                                     frame.local_coordinate(hi), cut)
               .count;
  });
}

hbe_status hbe_eigenvalue(const hbe_model* model, size_t k, double tol, double* out) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(out != nullptr, "output pointer is null");
    *out = hbe::eigenvalue_by_index(model->model, k, tol);
  });
}

hbe_status hbe_eigenvalues_dense(const hbe_model* model, double tol, double* out) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(out != nullptr, "output pointer is null");
    const std::vector<double> eig = hbe::dense_eigenvalues(model->model, tol);
    std::memcpy(out, eig.data(), eig.size() * sizeof(double));
  });
}

hbe_status hbe_phase_trace_csv(const hbe_model* model, double x, double lambda,
                               size_t cut, const char* path) {
  return guard([&] {
    require(model != nullptr, "model is null");
    require(path != nullptr, "path is null");
    const hbe::SpectralFrame frame =
        hbe::SpectralFrame::make(x, model->model.n, model->model.beta);
    const hbe::ConjugatedModel cm = hbe::conjugate(model->model);
    const std::size_t resolved = cut == 0 ? frame.default_cut() : cut;
    const hbe::PhaseTrajectory traj = hbe::forward_phase(cm, frame, lambda, resolved);
    hbe::write_phase_trace_csv(traj, path);
  });
}

double hbe_semicircle_density(double x) { return hbe::semicircle_density(x); }

double hbe_martingale_variance(double n, double beta) {
  const hbe_status status =
      guard([&] { require(n >= 1.0 && beta > 0.0, "need n >= 1 and beta > 0"); });
  if (status != HBE_OK) return std::numeric_limits<double>::quiet_NaN();
  return hbe::martingale_variance(n, beta);
}

hbe_status hbe_run_global_law(size_t n, double beta, uint64_t seed, size_t replicas,
                              size_t threads, hbe_report** out) {
  return guard([&] {
    require(out != nullptr, "output pointer is null");
    hbe::ExperimentConfig config;
    config.params = {n, beta, seed};
    config.replicas = replicas;
    config.threads = threads == 0 ? 1 : threads;
    auto holder = std::make_unique<hbe_report>();
    holder->report = hbe::run_global_law(config);
    *out = holder.release();
  });
}

hbe_status hbe_run_local_law(size_t n, double beta, uint64_t seed, double x,
                             double tn, size_t replicas, const char* engine,
                             size_t threads, hbe_report** out) {
  return guard([&] {
    require(out != nullptr, "output pointer is null");
    hbe::ExperimentConfig config;
    config.params = {n, beta, seed};
    config.x = x;
    config.tn = tn;
    config.replicas = replicas;
    config.engine = hbe::engine_from_name(engine == nullptr ? "sturm" : engine);
    config.threads = threads == 0 ? 1 : threads;
    auto holder = std::make_unique<hbe_report>();
    holder->report = hbe::run_local_law(config);
    *out = holder.release();
  });
}

hbe_status hbe_run_index_clt(size_t n, double beta, uint64_t seed, size_t replicas,
                             const char* engine, size_t threads, hbe_report** out) {
  return guard([&] {
    require(out != nullptr, "output pointer is null");
    hbe::ExperimentConfig config;
    config.params = {n, beta, seed};
    config.replicas = replicas;
    config.engine = hbe::engine_from_name(engine == nullptr ? "sturm" : engine);
    config.threads = threads == 0 ? 1 : threads;
    auto holder = std::make_unique<hbe_report>();
    holder->report = hbe::run_index_clt(config);
    *out = holder.release();
  });
}

void hbe_report_free(hbe_report* report) { delete report; }

size_t hbe_report_replicas(const hbe_report* report) {
  return report == nullptr ? 0 : report->report.per_replica.size();
}

hbe_status hbe_report_statistic(const hbe_report* report, size_t replica,
                                double* out) {
  return guard([&] {
    require(report != nullptr, "report is null");
    require(out != nullptr, "output pointer is null");
    require(replica < report->report.per_replica.size(), "replica index out of range");
    *out = report->report.per_replica[replica];
  });
}

hbe_status hbe_report_summary(const hbe_report* report, double* mean,
                              double* variance, double* skewness,
                              double* excess_kurtosis, double* ks) {
  return guard([&] {
    require(report != nullptr, "report is null");
    if (mean != nullptr) *mean = report->report.mean;
    if (variance != nullptr) *variance = report->report.variance;
    if (skewness != nullptr) *skewness = report->report.skewness;
    if (excess_kurtosis != nullptr) *excess_kurtosis = report->report.excess_kurtosis;
    if (ks != nullptr) *ks = report->report.ks;
  });
}

hbe_status hbe_report_agreement(const hbe_report* report, size_t* out) {
  return guard([&] {
    require(report != nullptr, "report is null");
    require(out != nullptr, "output pointer is null");
    *out = report->report.engine_agreement;
  });
}

hbe_status hbe_report_json(const hbe_report* report, char** out) {
  return guard([&] {
    require(report != nullptr, "report is null");
    require(out != nullptr, "output pointer is null");
    const auto& r = report->report;
    nlohmann::json doc{{"experiment", r.experiment},
                       {"replicas", r.per_replica.size()},
                       {"mean", r.mean},
                       {"variance", r.variance},
                       {"skewness", r.skewness},
                       {"excess_kurtosis", r.excess_kurtosis},
                       {"ks", r.ks},
                       {"engine_agreement", r.engine_agreement},
                       {"metadata", r.metadata}};
    *out = alloc_string(doc.dump(2));
    require(*out != nullptr, "allocation failed");
  });
}

hbe_status hbe_report_write(const hbe_report* report, const char* directory,
                            char** csv_path, char** json_path) {
  return guard([&] {
    require(report != nullptr, "report is null");
    require(directory != nullptr, "directory is null");
    const std::filesystem::path dir(directory);
    const std::filesystem::path csv = hbe::write_report_csv(report->report, dir);
    const std::filesystem::path json = hbe::write_report_json(report->report, dir);
    if (csv_path != nullptr) *csv_path = alloc_string(csv.string());
    if (json_path != nullptr) *json_path = alloc_string(json.string());
  });
}

hbe_status hbe_variance_slope(const size_t* ns, size_t num_ns, double beta,
                              size_t replicas_per_n, uint64_t seed, size_t threads,
                              double* slope, double* slope_se, char** json) {
  return guard([&] {
    require(ns != nullptr && num_ns > 0, "size list is empty");
    const std::vector<std::size_t> sizes(ns, ns + num_ns);
    const hbe::SlopeReport rep = hbe::variance_slope(
        sizes, beta, replicas_per_n, seed, threads == 0 ? 1 : threads);
    if (slope != nullptr) *slope = rep.fit.slope;
    if (slope_se != nullptr) *slope_se = rep.fit.slope_se;
    if (json != nullptr) {
      *json = alloc_string(rep.metadata.dump(2));
      require(*json != nullptr, "allocation failed");
    }
  });
}

hbe_status hbe_diagnose_moments(size_t n, double beta, double x, double lambda,
                                double phi_value, size_t l, size_t samples,
                                uint64_t seed, char** out) {
  return guard([&] {
    require(out != nullptr, "output pointer is null");
    const hbe::SpectralFrame frame = hbe::SpectralFrame::make(x, n, beta);
    const hbe::MomentReport rep =
        hbe::moment_check(l, lambda, phi_value, frame, samples, seed);
    nlohmann::json doc{
        {"experiment", "diagnose-moments"},
        {"n", n},
        {"beta", beta},
        {"x", x},
        {"lambda", lambda},
        {"phi_value", phi_value},
        {"l", l},
        {"samples", samples},
        {"seed", seed},
        {"mean",
         {{"sqrt-unscaled", entry_json(rep.mean_sqrt_unscaled)},
          {"linear-scaled", entry_json(rep.mean_linear_scaled)}}},
        {"second_moment", entry_json(rep.second_moment)},
        {"third_abs", entry_json(rep.third_abs)},
        {"variant", hbe::variant_name(rep.matched)},
        {"variant_matched", rep.matched_any},
        {"pass", rep.pass}};
    *out = alloc_string(doc.dump(2));
    require(*out != nullptr, "allocation failed");
  });
}

} // extern "C"
