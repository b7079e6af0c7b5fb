#include "vrt/hazard.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "vrt/error.hpp"

namespace vrt {

namespace {

// Logistic 1 / (1 + exp(-t)) without overflow for large |t|.
double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::Argument, std::string(what) + " must be > 0");
}

constexpr std::array<ReliabilityRow, 6> kReliability{{
    {"Ground control system", 2.00, 500000.0, 6.62},
    {"Mainframe", 2.77, 360984.8, 9.16},
    {"Power plant", 9.94, 100603.6, 32.88},
    {"Navigation system", 9.41, 106269.9, 31.13},
    {"Electronic system", 5.01, 199600.8, 16.57},
    {"Payload", 1.10, 909090.9, 3.64},
}};

// 1 / (1 + floor * exp(offset - slope * E)), E in kJ.
double windshield_damage(const VehicleWindshield& m, double energy_kj) {
  return logistic(m.slope_per_kj * energy_kj - m.offset - std::log(m.floor_coeff));
}

std::string slug(const char* name) {
  std::string out;
  for (const char* c = name; *c; ++c)
    out.push_back(*c == ' ' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(*c))));
  return out;
}

}  // namespace

void UavSpec::validate() const {
  require_positive(mass_kg, "uav mass");
  require_positive(cross_section_m2, "uav cross section");
  require_positive(drag_coeff, "uav drag coefficient");
  require_positive(diameter_cm, "uav diameter");
  require_positive(cruise_speed_ms, "uav cruise speed");
}

void FailureModel::validate() const {
  if (!(lambda_per_hour > 0.0 && lambda_per_hour < 1.0))
    fail(ErrorKind::Argument, "failure rate must lie in (0, 1) per flight hour");
}

std::span<const ReliabilityRow> reliability_table() noexcept { return kReliability; }

double reliability_total_fit() noexcept {
  double total = 0.0;
  for (const auto& row : kReliability) total += row.fit_per_million_h;
  return total;
}

std::optional<FailureModel> failure_preset(const std::string& name) {
  if (name == "catastrophic-1e-5") return FailureModel{1e-5, name};
  if (name == "catastrophic-5e-6") return FailureModel{5e-6, name};
  if (name == "catastrophic-2e-6") return FailureModel{2e-6, name};
  if (name == "catastrophic-1e-6") return FailureModel{1e-6, name};
  if (name == "fit-total") return FailureModel{reliability_total_fit() * 1e-6, name};
  for (const auto& row : kReliability)
    if (name == "fit-" + slug(row.system)) return FailureModel{row.fit_per_million_h * 1e-6, name};
  return std::nullopt;
}

void RecoveryModel::validate() const {
  if (!(max_success >= 0.0 && max_success <= 1.0)) fail(ErrorKind::Argument, "recovery max_success must lie in [0, 1]");
  require_positive(midpoint_m, "recovery midpoint altitude");
  if (!(steepness >= 0.0) || !std::isfinite(steepness)) fail(ErrorKind::Argument, "recovery steepness must be >= 0");
}

double p_unrecoverable(const RecoveryModel& recovery, double h0) {
  if (!(h0 > 0.0) || !std::isfinite(h0)) fail(ErrorKind::Domain, "altitude h0 must be > 0");
  if (!recovery.parachute) return 1.0;
  // 1 - s / (1 + c exp(m - h)), written so large (m - h) cannot overflow.
  const double t = recovery.midpoint_m - h0;
  double success;
  if (t > 0.0) {
    const double e = std::exp(-t);
    success = recovery.max_success * e / (e + recovery.steepness);
  } else {
    success = recovery.max_success / (1.0 + recovery.steepness * std::exp(t));
  }
  return 1.0 - success;
}

double terminal_kinetic_energy(const UavSpec& uav) {
  return uav.mass_kg * uav.mass_kg * kGravity / (kAirDensity * uav.cross_section_m2 * uav.drag_coeff);
}

double impact_kinetic_energy(const UavSpec& uav, double h) {
  if (!(h >= 0.0)) fail(ErrorKind::Domain, "fall height must be >= 0");
  const double decay = kAirDensity * uav.cross_section_m2 * uav.drag_coeff / uav.mass_kg;
  return terminal_kinetic_energy(uav) * -std::expm1(-decay * h);
}

double terminal_velocity(const UavSpec& uav, double h) {
  if (!(h >= 0.0)) fail(ErrorKind::Domain, "fall height must be >= 0");
  const double rho_s_cd = kAirDensity * uav.cross_section_m2 * uav.drag_coeff;
  return std::sqrt(2.0 * uav.mass_kg * kGravity / rho_s_cd * -std::expm1(-rho_s_cd * h / uav.mass_kg));
}

void BodyModel::validate() const {
  require_positive(mass_kg, "body mass");
  require_positive(wall_coeff, "body wall coefficient");
}

double blunt_criterion(double energy_j, const BodyModel& body, double diameter_cm) {
  if (!(energy_j > 0.0)) fail(ErrorKind::Domain, "impact energy must be > 0 for the blunt criterion");
  return std::log(energy_j / (body.wall_coeff * diameter_cm * std::pow(body.mass_kg, 2.0 / 3.0)));
}

double p_ais3(double bc) { return logistic(38.50 * bc - 17.76); }

double p_fatality_shelley(double energy_j, double e0_j, double k_per_j) {
  return logistic(k_per_j * (energy_j - e0_j));
}

double p_fatality_primatesta(double energy_j, double alpha_j, double beta_j, double cs) {
  if (!(cs > 0.0 && cs <= 1.0)) fail(ErrorKind::Domain, "sheltering coefficient must lie in (0, 1]");
  if (!(energy_j > 0.0)) fail(ErrorKind::Domain, "impact energy must be > 0");
  const double ratio = std::pow(beta_j / energy_j, 1.0 / (4.0 * cs));
  const double k = std::min(1.0, ratio);
  const double denominator = 1.0 - 2.0 * k + std::sqrt(alpha_j / beta_j) * ratio;
  if (!(denominator > 0.0)) fail(ErrorKind::Evaluation, "fatality model denominator is not positive");
  const double p = (1.0 - k) / denominator;
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::Evaluation, "fatality model produced a value outside [0, 1]");
  return p;
}

double p_vehicle_medium_damage(double energy_kj) {
  if (!(energy_kj >= 0.0)) fail(ErrorKind::Domain, "impact energy must be >= 0 kJ");
  if (energy_kj > 1e3) fail(ErrorKind::Domain, "impact energy above 1000 kJ: value looks like joules, not kilojoules");
  return windshield_damage(VehicleWindshield{}, energy_kj);
}

void validate(const HarmModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BcAis3>) {
          m.body.validate();
          require_positive(m.impactor_diameter_cm, "impactor diameter");
        } else if constexpr (std::is_same_v<T, ShelleyFatality>) {
          require_positive(m.e0_j, "shelley E0");
          require_positive(m.k_per_j, "shelley k");
        } else if constexpr (std::is_same_v<T, PrimatestaFatality>) {
          require_positive(m.alpha_j, "primatesta alpha");
          require_positive(m.beta_j, "primatesta beta");
          if (!(m.sheltering > 0.0 && m.sheltering <= 1.0))
            fail(ErrorKind::Argument, "sheltering coefficient must lie in (0, 1]");
        } else {
          require_positive(m.slope_per_kj, "windshield slope");
          require_positive(m.floor_coeff, "windshield floor coefficient");
        }
      },
      model);
}

std::string harm_model_name(const HarmModel& model) {
  switch (model.index()) {
    case 0: return "bc_ais3";
    case 1: return "shelley_fatality";
    case 2: return "primatesta_fatality";
    default: return "vehicle_windshield";
  }
}

double evaluate_harm(const HarmModel& model, double energy_j) {
  return std::visit(
      [energy_j](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BcAis3>) {
          if (energy_j <= 0.0) return 0.0;
          return p_ais3(blunt_criterion(energy_j, m.body, m.impactor_diameter_cm));
        } else if constexpr (std::is_same_v<T, ShelleyFatality>) {
          return p_fatality_shelley(energy_j, m.e0_j, m.k_per_j);
        } else if constexpr (std::is_same_v<T, PrimatestaFatality>) {
          if (energy_j <= 0.0) return 0.0;
          return p_fatality_primatesta(energy_j, m.alpha_j, m.beta_j, m.sheltering);
        } else {
          const double kj = energy_j / 1000.0;
          if (!(kj >= 0.0)) fail(ErrorKind::Domain, "impact energy must be >= 0");
          if (kj > 1e3) fail(ErrorKind::Domain, "impact energy above 1000 kJ: value looks like joules, not kilojoules");
          return windshield_damage(m, kj);
        }
      },
      model);
}

double p_harm(GroundClass eov, double energy_j, const HarmConfig& config) {
  switch (eov) {
    case GroundClass::None: return 0.0;
    case GroundClass::Pedestrian:
      if (!config.pedestrian) fail(ErrorKind::Config, "no harm model configured for pedestrians");
      return evaluate_harm(*config.pedestrian, energy_j);
    case GroundClass::Vehicle:
      if (!config.vehicle) fail(ErrorKind::Config, "no harm model configured for vehicles");
      return evaluate_harm(*config.vehicle, energy_j);
  }
  return 0.0;
}

const char* describe(AisLevel level) noexcept {
  switch (level) {
    case AisLevel::Minor: return "Minor: superficial laceration; probability of death 0%";
    case AisLevel::Moderate: return "Moderate: minor skull fracture; probability of death 1-2%";
    case AisLevel::Serious: return "Serious: major skull fracture; probability of death 8-10%";
    case AisLevel::Severe: return "Severe: life-endangering fracture; probability of death 5-50%";
    case AisLevel::Critical: return "Critical: ruptured liver with tissue loss; probability of death 5-50%";
    case AisLevel::Unsurvivable: return "Unsurvivable: death; probability of death 100%";
  }
  return "";
}

const char* describe(IeaLevel level) noexcept {
  switch (level) {
    case IeaLevel::Low: return "Low: no or limited windshield damage, nonsignificant loss of visibility";
    case IeaLevel::Medium: return "Medium: no penetration, partial loss of visibility";
    case IeaLevel::High: return "High: penetration or total loss of visibility";
  }
  return "";
}

void HazardChain::validate() const {
  failure.validate();
  recovery.validate();
  uav.validate();
  if (harm.pedestrian) vrt::validate(*harm.pedestrian);
  if (harm.vehicle) vrt::validate(*harm.vehicle);
}

double HazardChain::impact_energy(double fall_height_m) const {
  double energy = impact_kinetic_energy(uav, fall_height_m);
  if (include_cruise_energy) energy += 0.5 * uav.mass_kg * uav.cruise_speed_ms * uav.cruise_speed_ms;
  return energy;
}

}  // namespace vrt
