#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "tips/finite_model.hpp"
#include "tips/rna_model.hpp"
#include "tips/string_model.hpp"

namespace tips {

using ModelVariant = std::variant<FiniteModel, StringModel, RnaModel>;

// Parsed and validated run configuration. Validation is strict: unknown
// keys anywhere in the document are rejected with their path, required keys
// must be present, and scalar fields are range-checked. The effective
// config (after command-line overrides) is what provenance blocks echo.
struct RunConfig {
  nlohmann::ordered_json raw;

  std::uint64_t seed() const;
  int workers() const;
  int replicates() const;
  bool record_timing() const;

  const nlohmann::ordered_json& section(const std::string& name) const;
  bool has(const std::string& section, const std::string& key) const;
};

// Parses the JSON document and validates it for the given command
// ("estimate", "sweep", "gimh", "smc", "simulate", "validate-potential").
// Throws ConfigError with a key path on any violation.
RunConfig parse_config(const std::string& json_text,
                       const std::string& command);

RunConfig load_config(const std::string& path, const std::string& command);

// Builds the model described by the config's model section.
ModelVariant build_model(const nlohmann::ordered_json& model_section);

}  // namespace tips
