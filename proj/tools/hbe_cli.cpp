// Command-line driver for the beta-ensemble library.  Thin by design: all
// numerics live behind the C API; this file only resolves configuration
// (flags > config file > defaults), shells out to the library, and writes a
// manifest making every run reproducible via `--config <manifest>`.
#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hbe/hbe.h"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError {
  hbe_status status;
};

void check(hbe_status status) {
  if (status != HBE_OK) throw ApiError{status};
}

int exit_code(hbe_status status) {
  switch (status) {
    case HBE_OK: return 0;
    case HBE_ERR_NUMERICAL: return 3;
    default: return 2; // bad arguments / IO
  }
}

struct ModelHandle {
  hbe_model* p = nullptr;
  ~ModelHandle() { hbe_model_free(p); }
};

struct ReportHandle {
  hbe_report* p = nullptr;
  ~ReportHandle() { hbe_report_free(p); }
};

struct StringHandle {
  char* p = nullptr;
  ~StringHandle() { hbe_string_free(p); }
};

using Cfg = std::map<std::string, std::string>;

Cfg load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  Cfg cfg;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) +
                       " is not `key = value`: " + stripped);
    }
    cfg[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
  }
  return cfg;
}

double parse_double_value(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("value for '" + key + "' is not a number: " + text);
  }
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("value for '" + key + "' is not a non-negative integer: " + text);
  }
}

// Interval endpoints accept `inf` / `-inf` tokens.
double parse_bound(const std::string& key, const std::string& text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "+inf" || lower == "infinity") return HUGE_VAL;
  if (lower == "-inf" || lower == "-infinity") return -HUGE_VAL;
  return parse_double_value(key, text);
}

std::string bound_token(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// flag > config > compiled default
void use_cfg(const Cfg& cfg, const CLI::Option* opt, const char* key, std::string& var) {
  if (opt->count() == 0 && cfg.count(key)) var = cfg.at(key);
}
void use_cfg(const Cfg& cfg, const CLI::Option* opt, const char* key, double& var) {
  if (opt->count() == 0 && cfg.count(key)) var = parse_double_value(key, cfg.at(key));
}
void use_cfg(const Cfg& cfg, const CLI::Option* opt, const char* key, std::uint64_t& var) {
  if (opt->count() == 0 && cfg.count(key)) var = parse_u64_value(key, cfg.at(key));
}

std::string resolve_out_dir(const Cfg& cfg, const CLI::Option* opt, std::string& var) {
  use_cfg(cfg, opt, "out", var);
  if (var.empty()) {
    const char* env = std::getenv("HBE_OUTPUT_DIR");
    var = (env != nullptr && env[0] != '\0') ? env : ".";
  }
  return var;
}

void write_manifest(const std::filesystem::path& path,
                    const std::map<std::string, std::string>& entries) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write manifest: " + path.string());
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& text) {
  std::vector<std::size_t> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) values.push_back(static_cast<std::size_t>(parse_u64_value(key, item)));
  }
  if (values.empty()) throw UsageError("value for '" + key + "' is an empty list");
  return values;
}

void print_summary(const ReportHandle& report) {
  double mean = 0.0, variance = 0.0, skew = 0.0, kurt = 0.0, ks = 0.0;
  check(hbe_report_summary(report.p, &mean, &variance, &skew, &kurt, &ks));
  std::printf("replicas %zu mean %.6g variance %.6g skewness %.4f excess_kurtosis %.4f ks %.4f\n",
              hbe_report_replicas(report.p), mean, variance, skew, kurt, ks);
}

void write_report_files(const ReportHandle& report, const std::string& out_dir) {
  StringHandle csv, json;
  check(hbe_report_write(report.p, out_dir.c_str(), &csv.p, &json.p));
  std::printf("wrote %s\n", csv.p);
  std::printf("wrote %s\n", json.p);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral statistics of the tridiagonal beta-ensemble"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "flat `key = value` file supplying defaults (flags win)");

  // Shared option values; each subcommand registers the subset it uses.
  struct {
    std::size_t n = 1000;
    double beta = 2.0;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t replicas = 1;
    double x = 0.0;
    std::string engine = "sturm";
    std::string out;
    std::string lo = "-inf";
    std::string hi = "inf";
    std::string tn = "auto";
    double lambda = 0.0;
    double phi = 3.14159265358979323846;
    std::size_t l = 0;
    std::size_t samples = 100000;
    std::size_t cut = 0;
    std::string ns = "1000,10000,100000";
  } v;

  // All options live on the top-level app (subcommands fall through to it);
  // this lets a manifest replay (`--config file`, no subcommand on the line)
  // still accept overriding flags, per the flags > config > defaults rule.
  struct Opts {
    CLI::Option* n = nullptr;
    CLI::Option* beta = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* threads = nullptr;
    CLI::Option* replicas = nullptr;
    CLI::Option* x = nullptr;
    CLI::Option* engine = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* lo = nullptr;
    CLI::Option* hi = nullptr;
    CLI::Option* tn = nullptr;
    CLI::Option* lambda = nullptr;
    CLI::Option* phi = nullptr;
    CLI::Option* l = nullptr;
    CLI::Option* samples = nullptr;
    CLI::Option* cut = nullptr;
    CLI::Option* ns = nullptr;
  } o;

  o.n = app.add_option("--n", v.n, "matrix size");
  o.beta = app.add_option("--beta", v.beta, "ensemble parameter beta > 0");
  o.seed = app.add_option("--seed", v.seed, "base RNG seed");
  o.out = app.add_option("--out", v.out, "output directory (default $HBE_OUTPUT_DIR or .)");
  o.threads = app.add_option("--threads", v.threads, "worker threads");
  o.replicas = app.add_option("--replicas", v.replicas, "independent realizations");
  o.x = app.add_option("--x", v.x, "bulk position, |x| < 2");
  o.engine = app.add_option("--engine", v.engine, "sturm | phase | both");
  o.lo = app.add_option("--lo", v.lo, "count: lower bound (accepts -inf)");
  o.hi = app.add_option("--hi", v.hi, "count: upper bound (accepts inf)");
  o.tn = app.add_option("--tn", v.tn, "local-law: window scale (number or `auto` = log n)");
  o.lambda = app.add_option("--lambda", v.lambda, "local spectral coordinate");
  o.phi = app.add_option("--phi", v.phi, "diagnose-moments: conditioning phase value");
  o.l = app.add_option("--l", v.l, "diagnose-moments: step index");
  o.samples = app.add_option("--samples", v.samples, "diagnose-moments: Monte Carlo draws");
  o.cut = app.add_option("--cut", v.cut, "phase-trace: final index (0 = default cut)");
  o.ns = app.add_option("--ns", v.ns, "variance-slope: comma-separated matrix sizes");

  const std::vector<std::pair<const char*, const char*>> kSubcommands = {
      {"sample", "draw one realization and dump it as CSV"},
      {"count", "count eigenvalues on an interval"},
      {"global-law", "empirical CDF distance to the semicircle law"},
      {"local-law", "normalized eigenvalue count in a local window"},
      {"index-clt", "fluctuation of the positive-eigenvalue count"},
      {"variance-slope", "Var(N) against log n regression"},
      {"diagnose-moments", "Monte Carlo check of single-step moment predictions"},
      {"phase-trace", "dump one forward phase trajectory as CSV"},
  };
  for (const auto& [name, description] : kSubcommands) {
    app.add_subcommand(name, description)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Cfg cfg;
    if (!config_path.empty()) cfg = load_config(config_path);

    std::string selected;
    if (!app.get_subcommands().empty()) {
      selected = app.get_subcommands().front()->get_name();
    } else if (cfg.count("subcommand")) {
      selected = cfg.at("subcommand");
    } else {
      std::fprintf(stderr, "error: no subcommand given (and none in the config file)\n");
      return 2;
    }
    const bool known = std::any_of(
        kSubcommands.begin(), kSubcommands.end(),
        [&](const auto& entry) { return selected == entry.first; });
    if (!known) {
      std::fprintf(stderr, "error: unknown subcommand in config: %s\n", selected.c_str());
      return 2;
    }

    std::map<std::string, std::string> manifest;
    manifest["subcommand"] = selected;

    auto resolve_core = [&]() {
      use_cfg(cfg, o.n, "n", v.n);
      use_cfg(cfg, o.beta, "beta", v.beta);
      use_cfg(cfg, o.seed, "seed", v.seed);
      resolve_out_dir(cfg, o.out, v.out);
      manifest["n"] = std::to_string(v.n);
      manifest["beta"] = fmt_full(v.beta);
      manifest["seed"] = std::to_string(v.seed);
      manifest["out"] = v.out;
    };
    auto base_name = [&]() {
      return selected + "_" + std::to_string(v.n) + "_" + fmt_short(v.beta) + "_" +
             std::to_string(v.seed);
    };
    auto manifest_path = [&](const std::string& base) {
      return std::filesystem::path(v.out) / (base + ".manifest");
    };

    if (selected == "sample") {
      resolve_core();
      ModelHandle model;
      check(hbe_model_sample(v.n, v.beta, v.seed, &model.p));
      const std::filesystem::path csv = std::filesystem::path(v.out) / (base_name() + ".csv");
      check(hbe_model_write_csv(model.p, csv.string().c_str()));
      write_manifest(manifest_path(base_name()), manifest);
      std::printf("wrote %s\n", csv.string().c_str());
      return 0;
    }

    if (selected == "count") {
      resolve_core();
      use_cfg(cfg, o.lo, "lo", v.lo);
      use_cfg(cfg, o.hi, "hi", v.hi);
      use_cfg(cfg, o.engine, "engine", v.engine);
      use_cfg(cfg, o.x, "x", v.x);
      const double lo = parse_bound("lo", v.lo);
      const double hi = parse_bound("hi", v.hi);
      manifest["lo"] = bound_token(lo);
      manifest["hi"] = bound_token(hi);
      manifest["engine"] = v.engine;
      manifest["x"] = fmt_full(v.x);

      ModelHandle model;
      check(hbe_model_sample(v.n, v.beta, v.seed, &model.p));
      std::size_t count = 0;
      if (v.engine == "sturm") {
        check(hbe_count_interval(model.p, lo, hi, &count));
      } else if (v.engine == "phase") {
        check(hbe_count_interval_phase(model.p, v.x, lo, hi, &count));
      } else if (v.engine == "both") {
        std::size_t phase_count = 0;
        check(hbe_count_interval(model.p, lo, hi, &count));
        check(hbe_count_interval_phase(model.p, v.x, lo, hi, &phase_count));
        if (count != phase_count) {
          std::fprintf(stderr, "error: engine mismatch: sturm %zu, phase %zu\n", count,
                       phase_count);
          return 3;
        }
      } else {
        throw UsageError("unknown engine '" + v.engine + "' (expected sturm, phase or both)");
      }
      write_manifest(manifest_path(base_name()), manifest);
      std::printf("%zu\n", count);
      return 0;
    }

    if (selected == "global-law") {
      resolve_core();
      use_cfg(cfg, o.replicas, "replicas", v.replicas);
      use_cfg(cfg, o.threads, "threads", v.threads);
      manifest["replicas"] = std::to_string(v.replicas);
      manifest["threads"] = std::to_string(v.threads);
      ReportHandle report;
      check(hbe_run_global_law(v.n, v.beta, v.seed, v.replicas, v.threads, &report.p));
      print_summary(report);
      write_report_files(report, v.out);
      write_manifest(manifest_path(base_name()), manifest);
      return 0;
    }

    if (selected == "local-law") {
      resolve_core();
      use_cfg(cfg, o.x, "x", v.x);
      use_cfg(cfg, o.tn, "tn", v.tn);
      use_cfg(cfg, o.engine, "engine", v.engine);
      use_cfg(cfg, o.replicas, "replicas", v.replicas);
      use_cfg(cfg, o.threads, "threads", v.threads);
      const double tn_value =
          v.tn == "auto" ? std::log(static_cast<double>(v.n)) : parse_double_value("tn", v.tn);
      manifest["x"] = fmt_full(v.x);
      manifest["tn"] = fmt_full(tn_value);
      manifest["engine"] = v.engine;
      manifest["replicas"] = std::to_string(v.replicas);
      manifest["threads"] = std::to_string(v.threads);
      ReportHandle report;
      check(hbe_run_local_law(v.n, v.beta, v.seed, v.x, tn_value, v.replicas,
                              v.engine.c_str(), v.threads, &report.p));
      std::printf("target density %.6f\n", hbe_semicircle_density(v.x));
      print_summary(report);
      if (v.engine == "both") {
        std::size_t agree = 0;
        check(hbe_report_agreement(report.p, &agree));
        std::printf("engines agreed on %zu/%zu replicas\n", agree,
                    hbe_report_replicas(report.p));
      }
      write_report_files(report, v.out);
      write_manifest(manifest_path(base_name()), manifest);
      return 0;
    }

    if (selected == "index-clt") {
      resolve_core();
      use_cfg(cfg, o.engine, "engine", v.engine);
      use_cfg(cfg, o.replicas, "replicas", v.replicas);
      use_cfg(cfg, o.threads, "threads", v.threads);
      manifest["engine"] = v.engine;
      manifest["replicas"] = std::to_string(v.replicas);
      manifest["threads"] = std::to_string(v.threads);
      ReportHandle report;
      check(hbe_run_index_clt(v.n, v.beta, v.seed, v.replicas, v.engine.c_str(), v.threads,
                              &report.p));
      print_summary(report);
      if (v.engine == "both") {
        std::size_t agree = 0;
        check(hbe_report_agreement(report.p, &agree));
        std::printf("engines agreed on %zu/%zu replicas\n", agree,
                    hbe_report_replicas(report.p));
      }
      write_report_files(report, v.out);
      write_manifest(manifest_path(base_name()), manifest);
      return 0;
    }

    if (selected == "variance-slope") {
      use_cfg(cfg, o.ns, "ns", v.ns);
      use_cfg(cfg, o.beta, "beta", v.beta);
      use_cfg(cfg, o.seed, "seed", v.seed);
      use_cfg(cfg, o.replicas, "replicas", v.replicas);
      use_cfg(cfg, o.threads, "threads", v.threads);
      resolve_out_dir(cfg, o.out, v.out);
      const std::vector<std::size_t> sizes = parse_size_list("ns", v.ns);
      manifest["ns"] = v.ns;
      manifest["beta"] = fmt_full(v.beta);
      manifest["seed"] = std::to_string(v.seed);
      manifest["replicas"] = std::to_string(v.replicas);
      manifest["threads"] = std::to_string(v.threads);
      manifest["out"] = v.out;
      double slope = 0.0, slope_se = 0.0;
      StringHandle json;
      check(hbe_variance_slope(sizes.data(), sizes.size(), v.beta, v.replicas, v.seed,
                               v.threads, &slope, &slope_se, &json.p));
      const std::string base =
          "variance-slope_" + fmt_short(v.beta) + "_" + std::to_string(v.seed);
      const std::filesystem::path out_json = std::filesystem::path(v.out) / (base + ".json");
      std::filesystem::create_directories(v.out);
      std::ofstream stream(out_json);
      if (!stream) throw UsageError("cannot write: " + out_json.string());
      stream << json.p << '\n';
      stream.close();
      write_manifest(std::filesystem::path(v.out) / (base + ".manifest"), manifest);
      std::printf("slope %.6f se %.6f\n", slope, slope_se);
      std::printf("wrote %s\n", out_json.string().c_str());
      return 0;
    }

    if (selected == "diagnose-moments") {
      resolve_core();
      use_cfg(cfg, o.x, "x", v.x);
      use_cfg(cfg, o.lambda, "lambda", v.lambda);
      use_cfg(cfg, o.phi, "phi", v.phi);
      use_cfg(cfg, o.l, "l", v.l);
      use_cfg(cfg, o.samples, "samples", v.samples);
      manifest["x"] = fmt_full(v.x);
      manifest["lambda"] = fmt_full(v.lambda);
      manifest["phi"] = fmt_full(v.phi);
      manifest["l"] = std::to_string(v.l);
      manifest["samples"] = std::to_string(v.samples);
      StringHandle json;
      check(hbe_diagnose_moments(v.n, v.beta, v.x, v.lambda, v.phi, v.l, v.samples, v.seed,
                                 &json.p));
      const std::filesystem::path out_json =
          std::filesystem::path(v.out) / (base_name() + ".json");
      std::filesystem::create_directories(v.out);
      std::ofstream stream(out_json);
      if (!stream) throw UsageError("cannot write: " + out_json.string());
      stream << json.p << '\n';
      stream.close();
      const nlohmann::json doc = nlohmann::json::parse(json.p);
      std::printf("variant %s pass %s\n", doc.at("variant").get<std::string>().c_str(),
                  doc.at("pass").get<bool>() ? "true" : "false");
      write_manifest(manifest_path(base_name()), manifest);
      std::printf("wrote %s\n", out_json.string().c_str());
      return 0;
    }

    if (selected == "phase-trace") {
      resolve_core();
      use_cfg(cfg, o.x, "x", v.x);
      use_cfg(cfg, o.lambda, "lambda", v.lambda);
      use_cfg(cfg, o.cut, "cut", v.cut);
      manifest["x"] = fmt_full(v.x);
      manifest["lambda"] = fmt_full(v.lambda);
      manifest["cut"] = std::to_string(v.cut);
      ModelHandle model;
      check(hbe_model_sample(v.n, v.beta, v.seed, &model.p));
      const std::filesystem::path csv = std::filesystem::path(v.out) / (base_name() + ".csv");
      check(hbe_phase_trace_csv(model.p, v.x, v.lambda, v.cut, csv.string().c_str()));
      write_manifest(manifest_path(base_name()), manifest);
      std::printf("wrote %s\n", csv.string().c_str());
      return 0;
    }

    std::fprintf(stderr, "error: unhandled subcommand: %s\n", selected.c_str());
    return 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ApiError& e) {
    std::fprintf(stderr, "error: %s\n", hbe_last_error());
    return exit_code(e.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
