#include "vrt/exposure.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "vrt/error.hpp"

namespace vrt {

namespace {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

constexpr std::array<DensityClass, 5> kPedestrianClasses{{
    {"very low", 0.0, 0.05},
    {"low", 0.05, 0.1},
    {"moderate", 0.1, 0.2},
    {"high", 0.2, 0.3},
    {"very high", 0.3, kUnbounded},
}};

constexpr std::array<DensityClass, 5> kVehicleClasses{{
    {"very low", 0.0, 2.0},
    {"low", 2.0, 5.0},
    {"moderate", 5.0, 10.0},
    {"high", 10.0, 15.0},
    {"very high", 15.0, kUnbounded},
}};

const TemporalFactors& factors_for(const ExposureModel& model, const std::string& time) {
  auto it = model.times.find(time);
  if (it == model.times.end()) fail(ErrorKind::Config, "unknown time label \"" + time + "\"");
  return it->second;
}

void check_raster(const std::optional<ScalarField2>& raster, const char* what) {
  if (!raster) return;
  raster->validate();
  for (double v : raster->values)
    if (v < 0.0) fail(ErrorKind::Argument, std::string(what) + " density raster has negative values");
}

}  // namespace

void ExposureModel::validate() const {
  if (!(ped_base >= 0.0) || !(veh_base >= 0.0) || !std::isfinite(ped_base) || !std::isfinite(veh_base))
    fail(ErrorKind::Argument, "base densities must be finite and >= 0");
  if (times.empty()) fail(ErrorKind::Argument, "exposure model needs at least one time label");
  bool has_base = false;
  for (const auto& [label, f] : times) {
    if (!(f.pedestrian >= 0.0) || !(f.vehicle >= 0.0) || !std::isfinite(f.pedestrian) || !std::isfinite(f.vehicle))
      fail(ErrorKind::Argument, "temporal factors for \"" + label + "\" must be finite and >= 0");
    if (f.pedestrian == 1.0 && f.vehicle == 1.0) has_base = true;
  }
  if (!has_base) fail(ErrorKind::Argument, "exposure model needs a base time with both temporal factors equal to 1");
  check_raster(ped_base_raster, "pedestrian");
  check_raster(veh_base_raster, "vehicle");
}

bool ExposureModel::operator==(const ExposureModel& other) const {
  auto same_raster = [](const std::optional<ScalarField2>& a, const std::optional<ScalarField2>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->spec == b->spec && a->values == b->values);
  };
  return ped_base == other.ped_base && veh_base == other.veh_base && times == other.times &&
         same_raster(ped_base_raster, other.ped_base_raster) && same_raster(veh_base_raster, other.veh_base_raster);
}

double temporal_factor(const ExposureModel& model, const std::string& time, GroundClass cls) {
  const auto& f = factors_for(model, time);
  switch (cls) {
    case GroundClass::Pedestrian: return f.pedestrian;
    case GroundClass::Vehicle: return f.vehicle;
    case GroundClass::None: return 0.0;
  }
  return 0.0;
}

double exposure_at(const ExposureModel& model, GroundClass cls, const std::string& time) {
  const double factor = temporal_factor(model, time, cls);
  switch (cls) {
    case GroundClass::Pedestrian: return model.ped_base * factor;
    case GroundClass::Vehicle: return model.veh_base * factor;
    case GroundClass::None: return 0.0;
  }
  return 0.0;
}

double ExposureGrid::total(GroundClass cls) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (classes[i] == cls) sum += expected[i];
  return sum;
}

ExposureGrid build_exposure_grid(const GroundUseGrid& ground, const ExposureModel& model, const std::string& time) {
  model.validate();
  if (ground.classes.size() != ground.spec.size()) fail(ErrorKind::Argument, "ground-use grid is inconsistent");
  if (model.ped_base_raster && !(model.ped_base_raster->spec == ground.spec))
    fail(ErrorKind::Extent, "pedestrian density raster is not aligned with the ground grid");
  if (model.veh_base_raster && !(model.veh_base_raster->spec == ground.spec))
    fail(ErrorKind::Extent, "vehicle density raster is not aligned with the ground grid");

  const auto& f = factors_for(model, time);
  const double area = ground.spec.cell_area();
  ExposureGrid grid{ground.spec, std::vector<double>(ground.spec.size(), 0.0), ground.classes};
  for (std::size_t c = 0; c < grid.expected.size(); ++c) {
    switch (ground.classes[c]) {
      case GroundClass::Pedestrian: {
        const double base = model.ped_base_raster ? model.ped_base_raster->values[c] : model.ped_base;
        grid.expected[c] = base * f.pedestrian * area;
        break;
      }
      case GroundClass::Vehicle: {
        const double base = model.veh_base_raster ? model.veh_base_raster->values[c] : model.veh_base;
        grid.expected[c] = base * f.vehicle * area;
        break;
      }
      case GroundClass::None: break;
    }
  }
  return grid;
}

std::span<const DensityClass> pedestrian_density_classes() noexcept { return kPedestrianClasses; }
std::span<const DensityClass> vehicle_density_classes() noexcept { return kVehicleClasses; }

double vehicle_target_density(double vehicles_per_100m_lane, double lane_width_m, double windshield_area_m2) {
  return vehicles_per_100m_lane * windshield_area_m2 / (100.0 * lane_width_m);
}

}  // namespace vrt
