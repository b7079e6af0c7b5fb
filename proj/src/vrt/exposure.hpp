#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrt/grid.hpp"

namespace vrt {

struct TemporalFactors {
  double pedestrian = 1.0;
  double vehicle = 1.0;
  bool operator==(const TemporalFactors&) const = default;
};

struct ExposureModel {
  double ped_base = 0.15;  ///< people per m^2 at the base (peak) time
  double veh_base = 0.04;  ///< windshield strike targets per m^2 at the base time
  std::map<std::string, TemporalFactors> times{
      {"12pm", {0.5, 0.6}},
      {"5pm", {1.0, 1.0}},
      {"10pm", {0.1, 0.2}},
  };
  /// Optional per-cell base density rasters replacing the uniform bases.
  std::optional<ScalarField2> ped_base_raster;
  std::optional<ScalarField2> veh_base_raster;

  void validate() const;
  bool operator==(const ExposureModel& other) const;
};

/// Throws Error(Config) for an unknown time label.
double temporal_factor(const ExposureModel& model, const std::string& time, GroundClass cls);

/// Density per m^2 for a class at a time using the uniform base densities.
double exposure_at(const ExposureModel& model, GroundClass cls, const std::string& time);

struct ExposureGrid {
  GridSpec2 spec;
  std::vector<double> expected;  ///< expected EoV count per cell (density x cell area)
  std::vector<GroundClass> classes;

  double at(std::size_t i, std::size_t j) const { return expected[spec.index(i, j)]; }
  double total(GroundClass cls) const;
};

ExposureGrid build_exposure_grid(const GroundUseGrid& ground, const ExposureModel& model, const std::string& time);

/// Descriptive density classes. Pedestrian bounds are people/m^2; vehicle
/// bounds are vehicles per 100 m per lane. The top class has no upper bound.
struct DensityClass {
  const char* name;
  double lower;
  double upper;
};

std::span<const DensityClass> pedestrian_density_classes() noexcept;
std::span<const DensityClass> vehicle_density_classes() noexcept;

/// Windshield targets per m^2 from a traffic density in vehicles/100 m/lane.
double vehicle_target_density(double vehicles_per_100m_lane, double lane_width_m = 3.0,
                              double windshield_area_m2 = 1.28);

}  // namespace vrt
