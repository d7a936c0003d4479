#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "hbe/experiments.hpp"
#include "hbe/phase.hpp"
#include "hbe/types.hpp"

namespace hbe {

// $HBE_OUTPUT_DIR when set, otherwise the current directory.
std::filesystem::path default_output_dir();

// Numeric rendering used inside file names: trailing zeros trimmed
// (2 -> "2", 0.5 -> "0.5").
std::string format_number(double v);

// One realization as CSV `index,a,b`; the b field is empty on the last row.
void write_model_csv(const TridiagonalModel& model,
                     const std::filesystem::path& path);

// Forward trajectory as CSV `l,phi,delta_phi,eta_arg`; delta_phi is empty on
// the last row.
void write_phase_trace_csv(const PhaseTrajectory& trajectory,
                           const std::filesystem::path& path);

// {experiment}_{n}_{beta}_{seed}, resolved from the report metadata.
std::string report_basename(const ExperimentReport& report);

// Per-replica table `replica,<columns...>`; returns the file written.
std::filesystem::path write_report_csv(const ExperimentReport& report,
                                       const std::filesystem::path& dir);

// Summary statistics plus metadata; returns the file written.
std::filesystem::path write_report_json(const ExperimentReport& report,
                                        const std::filesystem::path& dir);

// Flat `key = value` manifest, keys emitted in sorted order.
void write_manifest(const std::map<std::string, std::string>& entries,
                    const std::filesystem::path& path);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& path);

} // namespace hbe
