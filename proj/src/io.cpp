#include "hbe/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hbe {

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open for writing: " + path.string());
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

} // namespace

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("HBE_OUTPUT_DIR");
  if (env != nullptr && env[0] != '\0') return std::filesystem::path(env);
  return std::filesystem::current_path();
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void write_model_csv(const TridiagonalModel& model,
                     const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "index,a,b\n";
  for (std::size_t i = 0; i < model.n; ++i) {
    out << i << ',' << full_precision(model.diag[i]) << ',';
    if (i + 1 < model.n) out << full_precision(model.off[i]);
    out << '\n';
  }
}

void write_phase_trace_csv(const PhaseTrajectory& trajectory,
                           const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "l,phi,delta_phi,eta_arg\n";
  for (std::size_t l = 0; l < trajectory.phi.size(); ++l) {
    out << l << ',' << full_precision(trajectory.phi[l]) << ',';
    if (l + 1 < trajectory.phi.size()) {
      out << full_precision(trajectory.phi[l + 1] - trajectory.phi[l]);
    }
    out << ',' << full_precision(eta_arg(l, trajectory.frame)) << '\n';
  }
}

std::string report_basename(const ExperimentReport& report) {
  const auto& meta = report.metadata;
  std::ostringstream name;
  name << report.experiment << '_' << meta.at("n").get<std::size_t>() << '_'
       << format_number(meta.at("beta").get<double>()) << '_'
       << meta.at("seed").get<std::uint64_t>();
  return name.str();
}

std::filesystem::path write_report_csv(const ExperimentReport& report,
                                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / (report_basename(report) + ".csv");
  std::ofstream out = open_for_write(path);
  out << "replica";
  for (const auto& col : report.columns) out << ',' << col.name;
  out << '\n';
  for (std::size_t r = 0; r < report.per_replica.size(); ++r) {
    out << r;
    for (const auto& col : report.columns) out << ',' << full_precision(col.values[r]);
    out << '\n';
  }
  return path;
}

std::filesystem::path write_report_json(const ExperimentReport& report,
                                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / (report_basename(report) + ".json");
  nlohmann::json doc{{"experiment", report.experiment},
                     {"replicas", report.per_replica.size()},
                     {"mean", report.mean},
                     {"variance", report.variance},
                     {"skewness", report.skewness},
                     {"excess_kurtosis", report.excess_kurtosis},
                     {"ks", report.ks},
                     {"metadata", report.metadata}};
  if (report.engine_agreement > 0 || report.metadata.contains("engine_agreement")) {
    doc["engine_agreement"] = report.engine_agreement;
  }
  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << '\n';
  return path;
}

void write_manifest(const std::map<std::string, std::string>& entries,
                    const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  for (const auto& [key, value] : entries) {
    out << key << " = " << value << '\n';
  }
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open manifest: " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("manifest line " + std::to_string(lineno) +
                           " is not `key = value`: " + stripped);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ParameterError("manifest line " + std::to_string(lineno) + " has empty key");
    }
    entries[key] = value;
  }
  return entries;
}

} // namespace hbe
