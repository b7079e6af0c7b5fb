#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrt/exposure.hpp"
#include "vrt/grid.hpp"
#include "vrt/hazard.hpp"
#include "vrt/impact.hpp"

namespace vrt {

inline constexpr double kRegulatoryLimitM = 122.0;

/// Everything needed to evaluate one risk volume.
struct ScenarioConfig {
  UrbanModel urban;
  GridSpec3 grid;
  KernelSpec kernel;
  HazardChain chain;
  ExposureModel exposure;
  std::string time_label = "5pm";
  std::vector<double> thresholds{1e-6, 1e-7, 1e-8};
  double ceiling_m = 200.0;

  /// Thresholds in (0, 1) and strictly decreasing; ceiling within the kernel
  /// altitude range; kernel spacing equal to the horizontal grid spacing.
  void validate() const;
};

/// Geometry-resolved inputs of the risk evaluation.
struct RiskProblem {
  GridSpec3 spec;
  OccupancyMask occupancy;
  ExposureGrid exposure;
  std::vector<double> ground_elevation;  ///< per column; empty means flat z = 0
  HazardChain chain;

  double elevation(std::size_t i, std::size_t j) const {
    return ground_elevation.empty() ? 0.0 : ground_elevation[spec.ground().index(i, j)];
  }
};

RiskProblem make_risk_problem(const ScenarioConfig& cfg);

/// Factors of one (air voxel, ground cell) pair.
struct RiskFactors {
  double failure_rate = 0.0;     ///< lambda_F, per flight hour
  double p_unrecoverable = 1.0;  ///< P_R at the failure altitude
  double p_impact = 0.0;         ///< P_G of the ground cell
  double p_harm = 0.0;           ///< P_H for the cell's class and fall height
};

/// Expected harm events per flight hour. Evaluated as
/// P_G * ((lambda * P_R) * (P_H * N)); every route uses this order.
inline double individual_risk(double expected_count, const RiskFactors& f) {
  return f.p_impact * ((f.failure_rate * f.p_unrecoverable) * (f.p_harm * expected_count));
}

inline constexpr double kBlockedRisk = -1.0;

/// Cumulative risk in double precision; blocked voxels hold kBlockedRisk.
/// Gather form, parallel over (altitude, row) tiles.
std::vector<double> cumulative_risk_gather(const RiskProblem& problem, const ImpactKernel& kernel, unsigned threads = 1);

/// Same quantity, scattered from each exposed ground cell into the air.
std::vector<double> cumulative_risk_scatter(const RiskProblem& problem, const ImpactKernel& kernel);

struct RiskVolume {
  GridSpec3 spec;
  std::vector<float> values;  ///< blocked voxels hold kBlockedRisk
  std::vector<GroundClass> column_classes;
  std::string scenario_hash;

  bool is_blocked(std::size_t index) const { return values[index] < 0.0f; }
  double max_value() const;
};

RiskVolume make_risk_volume(const RiskProblem& problem, const std::vector<double>& values, std::string scenario_hash = {});
RiskVolume cumulative_risk_volume(const ScenarioConfig& cfg, const ImpactKernel& kernel, unsigned threads = 1,
                                  std::string scenario_hash = {});

enum class TerrainKind { Risk, Acoustic, Fused };
const char* to_string(TerrainKind kind) noexcept;
std::optional<TerrainKind> parse_terrain_kind(const std::string& name);

struct NoFlyTerrain {
  GridSpec3 spec;
  std::vector<std::uint8_t> excluded;
  std::vector<std::uint8_t> blocked;
  TerrainKind kind = TerrainKind::Risk;
  std::optional<double> threshold;
  std::string scenario_hash;
  std::vector<std::string> inputs;  ///< provenance of fused inputs, sorted
  std::vector<GroundClass> column_classes;  ///< optional; empty when unknown

  /// Throws Error(Argument) unless sizes match and excluded contains blocked.
  void validate() const;
  std::size_t excluded_count() const;
  std::string provenance() const;
};

NoFlyTerrain threshold_terrain(const RiskVolume& volume, double threshold);

/// Terrain from externally produced masks (e.g. an acoustic exclusion set).
NoFlyTerrain terrain_from_mask(const GridSpec3& spec, std::vector<std::uint8_t> excluded,
                               std::vector<std::uint8_t> blocked, TerrainKind kind, std::string scenario_hash = {});

/// Vertical cylinder: voxels whose centre lies within radius_m of centre_m
/// horizontally and within [bottom_m, top_m] vertically.
struct CylinderZone {
  Point2 center_m;
  double radius_m = 0.0;
  double bottom_m = 0.0;
  double top_m = 0.0;
};

/// Acoustic exclusion terrain over `spec`. Throws Error(Domain) on a
/// non-positive radius or an inverted altitude band.
NoFlyTerrain acoustic_terrain(const GridSpec3& spec, std::span<const CylinderZone> zones, std::string source_hash);

/// Voxelwise union. Throws Error(Extent) on mismatched specs.
NoFlyTerrain fuse_terrains(std::span<const NoFlyTerrain> terrains);

enum class ClearanceStatus : std::uint8_t {
  Open,        ///< nothing excluded; clearance 0
  Restricted,  ///< numeric clearance at or below the regulatory limit
  AboveLimit,  ///< numeric clearance above the regulatory limit
  Closed,      ///< excluded up to the ceiling
};
const char* to_string(ClearanceStatus status) noexcept;

struct ClearanceField {
  GridSpec2 spec;
  std::vector<double> clearance_m;  ///< in [0, ceiling]; ceiling for closed columns
  std::vector<ClearanceStatus> status;
  std::vector<GroundClass> classes;  ///< empty when the terrain carries none
  double ceiling_m = 200.0;
};

/// Per column, the lowest altitude above which no voxel up to the ceiling is
/// excluded: the top face of the highest excluded voxel. Building voxels
/// count as excluded.
ClearanceField min_clearance(const NoFlyTerrain& terrain, double ceiling_m = 200.0);

struct ClearanceSummary {
  GroundClass cls = GroundClass::None;
  std::size_t columns = 0;
  std::size_t open = 0;
  std::size_t closed = 0;
  /// Over columns with a numeric clearance (open counts as 0); NaN if none.
  double min_m = 0.0;
  double median_m = 0.0;
  double max_m = 0.0;
};

ClearanceSummary summarize_clearance(const ClearanceField& field, GroundClass cls);

/// CSV with columns x_m,y_m,ground_class,clearance_m,status after one comment
/// line carrying ceiling, regulatory limit, threshold and scenario hash.
std::string clearance_csv(const ClearanceField& field, std::optional<double> threshold,
                          const std::string& scenario_hash);

/// Exposed-face boundary mesh of the excluded set as OBJ text. Vertices are
/// lattice corners numbered by first use in voxel order.
std::string export_terrain_mesh(const NoFlyTerrain& terrain);

}  // namespace vrt
