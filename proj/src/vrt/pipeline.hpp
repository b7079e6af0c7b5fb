#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vrt/oracle.hpp"
#include "vrt/scenario.hpp"

namespace vrt {

/// Kernel for one impact model of a scenario: loaded from `cache` when it
/// holds an identical spec, otherwise built (and written to `cache` if set).
ImpactKernel obtain_kernel(const KernelSpec& spec, const std::optional<std::filesystem::path>& cache,
                           const std::string& scenario_hash, unsigned threads);

struct KernelBuildResult {
  std::filesystem::path file;
  std::string payload_sha256;
  std::size_t levels = 0;
};

KernelBuildResult run_kernel_build(const ScenarioFile& scenario, const std::filesystem::path& out_file, unsigned threads);

struct TerrainRunOptions {
  std::filesystem::path out_dir;
  unsigned threads = 1;
  bool mesh = true;
};

struct TerrainRunResult {
  nlohmann::json summary;  ///< also written to <out_dir>/summary.json
  bool pass = true;        ///< every cross-case consistency check held
};

/// Runs every (impact model, time, failure rate) case of the sweep: risk
/// volume, one terrain per threshold (nesting checked before anything is
/// written), clearance CSVs and optional meshes.
TerrainRunResult run_terrain_build(const ScenarioFile& scenario, const TerrainRunOptions& options);

struct ClearanceRunResult {
  nlohmann::json summary;
};

/// Thresholds a stored volume and writes clearance-<t>.csv files to out_dir.
ClearanceRunResult run_clearance(const std::filesystem::path& volume_file, const std::vector<double>& thresholds,
                                 double ceiling_m, const std::filesystem::path& out_dir);

/// Parses {"kind": "acoustic", "zones": [{"center_m", "radius_m", "bottom_m", "top_m"}]}.
std::vector<CylinderZone> parse_acoustic_zones(std::string_view json_text);

/// Inputs are terrain containers or acoustic zone files (".json"); zones are
/// rasterized onto the grid of the first terrain. Returns the payload SHA-256
/// of the fused terrain.
std::string run_fuse(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out_file);

/// Writes an OBJ mesh (".obj") or a clearance CSV (".csv") of a terrain file.
void run_export(const std::filesystem::path& terrain_file, const std::filesystem::path& out_file, double ceiling_m);

struct OracleRunOptions {
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> kernel_file;  ///< check this kernel instead of the scenario checks
  std::vector<double> altitudes_m;                   ///< for kernel_file; empty tests every slice
  bool z_correction = false;
  unsigned threads = 1;
};

struct OracleRunResult {
  nlohmann::json report;
  bool pass = true;
};

OracleRunResult run_oracle(const ScenarioFile* scenario, const OracleRunOptions& options);

/// True iff every set bit of `inner` is set in `outer`.
bool is_subset(const std::vector<std::uint8_t>& inner, const std::vector<std::uint8_t>& outer);

}  // namespace vrt
