#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "vrt/grid.hpp"

namespace vrt {

inline constexpr double kAirDensity = 1.225;  // kg/m^3, sea level
inline constexpr double kGravity = 9.8;       // m/s^2

struct UavSpec {
  double mass_kg = 25.0;
  double cross_section_m2 = 0.2;
  double drag_coeff = 1.8;
  double diameter_cm = 50.0;
  double cruise_speed_ms = 10.0;
  void validate() const;
  bool operator==(const UavSpec&) const = default;
};

struct FailureModel {
  double lambda_per_hour = 1e-5;  ///< catastrophic failures per flight hour
  std::string label = "catastrophic";
  void validate() const;
  bool operator==(const FailureModel&) const = default;
};

/// One row of a component reliability breakdown (failures per 10^6 hours).
struct ReliabilityRow {
  const char* system;
  double fit_per_million_h;
  double mtbf_h;
  double incidence_pct;
};

/// Commercial-drone component reliability presets.
std::span<const ReliabilityRow> reliability_table() noexcept;
double reliability_total_fit() noexcept;

/// Named failure-rate presets: "catastrophic-1e-5", "catastrophic-5e-6",
/// "catastrophic-2e-6", "catastrophic-1e-6", "fit-total", or "fit-<system>"
/// with the system name lower-cased and spaces replaced by dashes.
std::optional<FailureModel> failure_preset(const std::string& name);

struct RecoveryModel {
  bool parachute = false;
  double max_success = 0.5;
  double steepness = 1.35;
  double midpoint_m = 45.0;
  void validate() const;
  bool operator==(const RecoveryModel&) const = default;
};

/// Probability that recovery fails after a failure at altitude h0 (m AGL).
double p_unrecoverable(const RecoveryModel& recovery, double h0);

/// Vertical impact speed after a free fall of h metres from rest with
/// quadratic drag.
double terminal_velocity(const UavSpec& uav, double h);

/// Kinetic energy (J) at ground impact after a free fall of h metres.
double impact_kinetic_energy(const UavSpec& uav, double h);

/// Limit of impact_kinetic_energy as h grows without bound: m^2 g / (rho S C_D).
double terminal_kinetic_energy(const UavSpec& uav);

struct BodyModel {
  double mass_kg = 70.0;
  double wall_coeff = 0.652;
  void validate() const;
  bool operator==(const BodyModel&) const = default;
};

/// ln(E / (k D M^(2/3))), D in cm.
double blunt_criterion(double energy_j, const BodyModel& body, double diameter_cm);

/// Logistic AIS-3 injury probability from a blunt-criterion value.
double p_ais3(double bc);

double p_fatality_shelley(double energy_j, double e0_j, double k_per_j);

/// Fatality probability with sheltering coefficient cs in (0, 1].
/// Throws Error(Evaluation) when the denominator is not positive.
double p_fatality_primatesta(double energy_j, double alpha_j, double beta_j, double cs);

/// Probability of medium windshield damage; energy in kilojoules.
/// Inputs above 1000 kJ are rejected as a probable J/kJ mix-up.
double p_vehicle_medium_damage(double energy_kj);

struct BcAis3 {
  BodyModel body;
  double impactor_diameter_cm = 50.0;
  bool operator==(const BcAis3&) const = default;
};

struct ShelleyFatality {
  double e0_j = 0.0;
  double k_per_j = 0.0;
  bool operator==(const ShelleyFatality&) const = default;
};

struct PrimatestaFatality {
  double alpha_j = 0.0;
  double beta_j = 0.0;
  double sheltering = 1.0;
  bool operator==(const PrimatestaFatality&) const = default;
};

struct VehicleWindshield {
  double offset = 6.0;
  double slope_per_kj = 5.0;
  double floor_coeff = 0.5;
  bool operator==(const VehicleWindshield&) const = default;
};

using HarmModel = std::variant<BcAis3, ShelleyFatality, PrimatestaFatality, VehicleWindshield>;

void validate(const HarmModel& model);
std::string harm_model_name(const HarmModel& model);

/// Probability of the reference harm level from one harm model.
double evaluate_harm(const HarmModel& model, double energy_j);

struct HarmConfig {
  std::optional<HarmModel> pedestrian = BcAis3{};
  std::optional<HarmModel> vehicle = VehicleWindshield{};
  bool operator==(const HarmConfig&) const = default;
};

/// Dispatches on the exposed class; GroundClass::None carries no EoV and
/// yields 0. Throws Error(Config) when the class has no model configured.
double p_harm(GroundClass eov, double energy_j, const HarmConfig& config);

/// Abbreviated Injury Scale levels.
enum class AisLevel { Minor = 1, Moderate, Serious, Severe, Critical, Unsurvivable };
const char* describe(AisLevel level) noexcept;

/// Impact Effect Assessment damage levels for vehicle components.
enum class IeaLevel { Low, Medium, High };
const char* describe(IeaLevel level) noexcept;

/// Everything of the per-event probability chain that does not depend on
/// geometry.
struct HazardChain {
  FailureModel failure;
  RecoveryModel recovery;
  UavSpec uav;
  HarmConfig harm;
  bool include_cruise_energy = false;  ///< add 1/2 m v^2 of cruise speed to the impact energy

  void validate() const;
  double impact_energy(double fall_height_m) const;
  double p_unrecoverable(double h0) const { return vrt::p_unrecoverable(recovery, h0); }
  double p_harm(GroundClass eov, double fall_height_m) const {
    return vrt::p_harm(eov, impact_energy(fall_height_m), harm);
  }
  bool operator==(const HazardChain&) const = default;
};

}  // namespace vrt
