#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tips/estimator.hpp"

namespace tips {

// Shortest round-trip decimal rendering of a double ("inf"/"-inf"/"nan"
// for non-finite values), so equal numbers always print identically.
std::string format_double(double v);

// Provenance block embedded in every emitted file: enough to re-run the
// command and reproduce the file byte for byte.
nlohmann::ordered_json provenance_block(const std::string& command,
                                        std::uint64_t seed,
                                        const nlohmann::ordered_json& config);

// Sweep table as CSV. The provenance block rides along as a single leading
// comment line ("# provenance: {...}").
std::string sweep_csv(std::span<const SweepRecord> rows,
                      const nlohmann::ordered_json& provenance);

// Parameter-chain CSV: iter, accepted, log_z, then one column per name.
// `values` holds one series per parameter, aligned with parameter_names.
std::string chain_csv(std::span<const std::string> parameter_names,
                      std::span<const long> iterations,
                      std::span<const int> accepted,
                      std::span<const double> log_z,
                      const std::vector<std::vector<double>>& values,
                      const nlohmann::ordered_json& provenance);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Extracts the provenance block from an emitted file (JSON document or CSV
// with the leading comment line).
nlohmann::ordered_json extract_provenance(const std::string& file_content);

}  // namespace tips
