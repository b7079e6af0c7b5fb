#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vrt/terrain.hpp"

namespace vrt {

inline constexpr int kScenarioVersion = 1;

struct ImpactVariant {
  std::string label;
  ImpactModel model;
};

struct OracleCheck {
  ImpactVariant impact;
  std::vector<double> altitudes_m;
};

struct OracleSettings {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 20231015;
  std::vector<OracleCheck> checks;
};

struct OutputSettings {
  std::filesystem::path dir = "out";
  bool mesh = true;
};

/// One parsed scenario document. `config` holds the base case; the sweep
/// lists expand it (each defaults to the base value alone).
struct ScenarioFile {
  int version = kScenarioVersion;
  std::string name;
  std::filesystem::path base_dir;
  ScenarioConfig config;
  std::vector<std::string> times;
  std::vector<double> failure_rates;
  std::vector<ImpactVariant> impact_models;
  OracleSettings oracle;
  OutputSettings outputs;
  /// SHA-256 over the canonical scenario document and every referenced input.
  std::string content_hash;
};

/// Throws Error(Parse) naming the JSON path of the offending field,
/// Error(Io) for unreadable referenced files, Error(Config) for values that
/// parse but do not fit together.
ScenarioFile parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir);
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Parses an "impact" fragment: {"model": "gaussian", "alpha": ...} or
/// {"model": "rayleigh", "beta": ..., "gamma": ..., "mode": ...}.
ImpactModel parse_impact_model(const nlohmann::json& j, const std::string& path);
std::string impact_label(const ImpactModel& model);

/// Kernel spec of the base case with a different impact model.
KernelSpec kernel_spec_for(const ScenarioFile& scenario, const ImpactModel& model);

}  // namespace vrt
