#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmtx/harness/experiment.hpp"

namespace rmtx {

/// Hex FNV-1a hash of the canonical (sorted-key) JSON form of the settings
/// that affect results. Output location, format, plotting and thread count
/// are excluded.
[[nodiscard]] std::string config_hash(const ExperimentConfig& cfg);

/// Writes the result. CSV: one file per aggregate histogram and value series
/// plus a summary file; JSON: one document with schema "v1". Every file name
/// contains the config hash. Returns the paths written.
std::vector<std::filesystem::path> write_results(const ExperimentResult& res, OutputFormat format);

void write_results_json(const ExperimentResult& res, std::ostream& out);
[[nodiscard]] ExperimentResult read_results_json(std::istream& in);

void write_table_csv(const MomentTable& table, std::ostream& out);

}  // namespace rmtx
