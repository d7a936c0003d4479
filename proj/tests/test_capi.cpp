#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hbe/hbe.h"

namespace {

struct ModelGuard {
  hbe_model* m = nullptr;
  ~ModelGuard() { hbe_model_free(m); }
};

struct ReportGuard {
  hbe_report* r = nullptr;
  ~ReportGuard() { hbe_report_free(r); }
};

std::filesystem::path fresh_dir(const char* tag) {
  const auto dir =
      std::filesystem::temp_directory_path() / (std::string("hbe_capi_") + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("status codes are stable API") {
  CHECK(HBE_OK == 0);
  CHECK(HBE_ERR_PARAM == 2);
  CHECK(HBE_ERR_NUMERICAL == 3);
  CHECK(HBE_ERR_IO == 4);
}

TEST_CASE("parameter failures set a readable thread-local message") {
  hbe_model* m = nullptr;
  CHECK(hbe_model_sample(1, 2.0, 7, &m) == HBE_ERR_PARAM);
  CHECK(m == nullptr);
  CHECK(std::strlen(hbe_last_error()) > 0);

  CHECK(hbe_model_sample(10, -1.0, 7, &m) == HBE_ERR_PARAM);
  CHECK(hbe_model_sample(10, 2.0, 7, nullptr) == HBE_ERR_PARAM);
  CHECK(hbe_count_below(nullptr, 0.0, nullptr) == HBE_ERR_PARAM);
}

TEST_CASE("model accessors expose the sampled rows") {
  ModelGuard g;
  REQUIRE(hbe_model_sample(25, 2.0, 42, &g.m) == HBE_OK);
  REQUIRE(g.m != nullptr);
  CHECK(hbe_model_size(g.m) == 25);

  double a = 0.0, b = 0.0;
  REQUIRE(hbe_model_entry(g.m, 0, &a, &b) == HBE_OK);
  CHECK(std::isfinite(a));
  CHECK(b > 0.0);
  REQUIRE(hbe_model_entry(g.m, 24, &a, &b) == HBE_OK);
  CHECK(std::isnan(b)); // no off-diagonal on the last row
  CHECK(hbe_model_entry(g.m, 25, &a, &b) == HBE_ERR_PARAM);

  // Same seed, same realization.
  ModelGuard h;
  REQUIRE(hbe_model_sample(25, 2.0, 42, &h.m) == HBE_OK);
  double a2 = 0.0, b2 = 0.0;
  for (size_t i = 0; i < 24; ++i) {
    REQUIRE(hbe_model_entry(g.m, i, &a, &b) == HBE_OK);
    REQUIRE(hbe_model_entry(h.m, i, &a2, &b2) == HBE_OK);
    CHECK(a == a2);
    CHECK(b == b2);
  }
}

TEST_CASE("counting shards the real line consistently") {
  ModelGuard g;
  REQUIRE(hbe_model_sample(60, 2.0, 3, &g.m) == HBE_OK);

  size_t all = 0, below = 0, above = 0;
  REQUIRE(hbe_count_interval(g.m, -INFINITY, INFINITY, &all) == HBE_OK);
  CHECK(all == 60);
  REQUIRE(hbe_count_below(g.m, 0.4, &below) == HBE_OK);
  REQUIRE(hbe_count_interval(g.m, 0.4, INFINITY, &above) == HBE_OK);
  CHECK(below + above == 60);

  CHECK(hbe_count_interval(g.m, 2.0, 1.0, &all) == HBE_ERR_PARAM);

  // The phase representation must agree exactly with the pivot counts.
  size_t via_phase = 0;
  REQUIRE(hbe_count_interval_phase(g.m, 0.4, 2.0, 3.1, &via_phase) == HBE_OK);
  size_t via_pivots = 0;
  REQUIRE(hbe_count_interval(g.m, 2.0, 3.1, &via_pivots) == HBE_OK);
  CHECK(via_phase == via_pivots);

  // Half-infinite phase counting is a centered-frame feature.
  REQUIRE(hbe_count_interval_phase(g.m, 0.0, 0.4, INFINITY, &via_phase) == HBE_OK);
  CHECK(via_phase == above);
  CHECK(hbe_count_interval_phase(g.m, 0.4, 0.4, INFINITY, &via_phase) ==
        HBE_ERR_PARAM);
  CHECK(hbe_count_interval_phase(g.m, 0.0, -INFINITY, 1.0, &via_phase) ==
        HBE_ERR_PARAM);
}

TEST_CASE("dense eigenvalues come out sorted and indexable") {
  ModelGuard g;
  REQUIRE(hbe_model_sample(18, 1.0, 9, &g.m) == HBE_OK);
  std::vector<double> eig(18);
  REQUIRE(hbe_eigenvalues_dense(g.m, 1e-11, eig.data()) == HBE_OK);
  for (size_t k = 1; k < 18; ++k) CHECK(eig[k] >= eig[k - 1]);
  double e5 = 0.0;
  REQUIRE(hbe_eigenvalue(g.m, 5, 1e-11, &e5) == HBE_OK);
  CHECK(std::abs(e5 - eig[5]) < 1e-9);
  CHECK(hbe_eigenvalue(g.m, 18, 1e-11, &e5) == HBE_ERR_PARAM);
}

TEST_CASE("model and trace files land on disk") {
  const auto dir = fresh_dir("files");
  ModelGuard g;
  REQUIRE(hbe_model_sample(30, 2.0, 5, &g.m) == HBE_OK);

  const auto model_csv = (dir / "model.csv").string();
  REQUIRE(hbe_model_write_csv(g.m, model_csv.c_str()) == HBE_OK);
  CHECK(std::filesystem::file_size(model_csv) > 0);

  const auto trace_csv = (dir / "trace.csv").string();
  REQUIRE(hbe_phase_trace_csv(g.m, 0.0, 1.2, 0, trace_csv.c_str()) == HBE_OK);
  std::ifstream in(trace_csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "l,phi,delta_phi,eta_arg");

  // /dev/null is a file, so no process can create a directory tree under it.
  CHECK(hbe_model_write_csv(g.m, "/dev/null/model.csv") == HBE_ERR_IO);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scalar helpers") {
  CHECK(std::abs(hbe_semicircle_density(0.0) - 0.3183098861837907) < 1e-14);
  CHECK(hbe_semicircle_density(2.5) == 0.0);
  CHECK(std::abs(hbe_martingale_variance(1e4, 2.0) - 18.420680743952367) < 1e-12);
}

TEST_CASE("experiment reports round-trip through the C surface") {
  ReportGuard g;
  REQUIRE(hbe_run_index_clt(300, 2.0, 11, 50, "both", 2, &g.r) == HBE_OK);
  REQUIRE(g.r != nullptr);
  CHECK(hbe_report_replicas(g.r) == 50);

  size_t agreement = 0;
  REQUIRE(hbe_report_agreement(g.r, &agreement) == HBE_OK);
  CHECK(agreement == 50);

  double stat = 0.0;
  REQUIRE(hbe_report_statistic(g.r, 0, &stat) == HBE_OK);
  CHECK(stat > 100.0);
  CHECK(stat < 200.0);
  CHECK(hbe_report_statistic(g.r, 50, &stat) == HBE_ERR_PARAM);

  double mean = 0.0, variance = 0.0, ks = 0.0;
  REQUIRE(hbe_report_summary(g.r, &mean, &variance, nullptr, nullptr, &ks) == HBE_OK);
  CHECK(std::abs(mean - 150.0) < 1.0);
  CHECK(variance > 0.0);

  char* json_text = nullptr;
  REQUIRE(hbe_report_json(g.r, &json_text) == HBE_OK);
  REQUIRE(json_text != nullptr);
  const auto doc = nlohmann::json::parse(json_text);
  hbe_string_free(json_text);
  CHECK(doc.at("experiment") == "index-clt");
  CHECK(doc.at("metadata").at("engine") == "both");

  const auto dir = fresh_dir("report");
  char* csv_path = nullptr;
  char* json_path = nullptr;
  REQUIRE(hbe_report_write(g.r, dir.string().c_str(), &csv_path, &json_path) ==
          HBE_OK);
  CHECK(std::filesystem::exists(csv_path));
  CHECK(std::filesystem::exists(json_path));
  CHECK(std::string(csv_path).find("index-clt_300_2_11.csv") != std::string::npos);
  hbe_string_free(csv_path);
  hbe_string_free(json_path);
  std::filesystem::remove_all(dir);

  ReportGuard bad;
  CHECK(hbe_run_index_clt(300, 2.0, 11, 50, "bogus", 1, &bad.r) == HBE_ERR_PARAM);
  CHECK(hbe_run_local_law(300, 2.0, 11, 3.0, 0.0, 2, "sturm", 1, &bad.r) ==
        HBE_ERR_PARAM);
}

TEST_CASE("global and local law runs succeed through the C surface") {
  ReportGuard g;
  REQUIRE(hbe_run_global_law(500, 2.0, 1, 2, 1, &g.r) == HBE_OK);
  double mean = 0.0;
  REQUIRE(hbe_report_summary(g.r, &mean, nullptr, nullptr, nullptr, nullptr) ==
          HBE_OK);
  CHECK(mean > 0.0);
  CHECK(mean < 0.1);

  ReportGuard l;
  REQUIRE(hbe_run_local_law(400, 2.0, 2, 0.5, 0.0, 5, "both", 1, &l.r) == HBE_OK);
  size_t agreement = 0;
  REQUIRE(hbe_report_agreement(l.r, &agreement) == HBE_OK);
  CHECK(agreement == 5);
}

TEST_CASE("variance slope and moment diagnostics return JSON documents") {
  const size_t ns[] = {100, 1000, 10000};
  double slope = 0.0, slope_se = 0.0;
  char* json_text = nullptr;
  REQUIRE(hbe_variance_slope(ns, 3, 2.0, 60, 19, 1, &slope, &slope_se, &json_text) ==
          HBE_OK);
  REQUIRE(json_text != nullptr);
  const auto doc = nlohmann::json::parse(json_text);
  hbe_string_free(json_text);
  CHECK(doc.at("variances").size() == 3);
  CHECK(slope > 0.0);

  CHECK(hbe_variance_slope(ns, 2, 2.0, 60, 19, 1, &slope, &slope_se, nullptr) ==
        HBE_ERR_PARAM);

  char* moments_text = nullptr;
  REQUIRE(hbe_diagnose_moments(2000, 2.0, 0.0, 0.5, 0.7, 0, 20000, 23,
                               &moments_text) == HBE_OK);
  REQUIRE(moments_text != nullptr);
  const auto mdoc = nlohmann::json::parse(moments_text);
  hbe_string_free(moments_text);
  CHECK(mdoc.at("experiment") == "diagnose-moments");
  CHECK(mdoc.at("samples") == 20000);
  CHECK(mdoc.at("mean").contains("linear-scaled"));
  CHECK(mdoc.at("mean").contains("sqrt-unscaled"));
  CHECK(mdoc.at("second_moment").at("pass").get<bool>());
}
