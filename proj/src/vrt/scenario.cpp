#include "vrt/scenario.hpp"

#include <algorithm>

#include "vrt/artifacts.hpp"
#include "vrt/error.hpp"
#include "vrt/gridio.hpp"
#include "vrt/json_util.hpp"

namespace vrt {

namespace {

using detail::child_path;
using detail::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& ref) {
  const std::filesystem::path p(ref);
  return p.is_absolute() ? p : base / p;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  detail::require_array(v, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(detail::finite_number(v[i], child_path(path, i)));
  return out;
}

std::vector<double> parse_altitudes(const json& v, const std::string& path) {
  if (v.is_array()) return number_list(v, path);
  detail::require_object(v, path);
  const double first = detail::number_member(v, "first", path);
  const double last = detail::number_member(v, "last", path);
  const double step = detail::number_member(v, "step", path);
  try {
    return altitude_range(first, last, step);
  } catch (const Error& e) {
    detail::parse_fail(path, e.what());
  }
}

GridSpec3 parse_grid(const json& doc) { return grid_from_json(detail::member(doc, "grid", ""), "/grid"); }

UavSpec parse_uav(const json& v, const std::string& path) {
  detail::require_object(v, path);
  UavSpec u;
  u.mass_kg = detail::number_member(v, "mass_kg", path);
  u.cross_section_m2 = detail::number_member(v, "cross_section_m2", path);
  u.drag_coeff = detail::number_member(v, "drag_coeff", path);
  u.diameter_cm = detail::number_member(v, "diameter_cm", path);
  u.cruise_speed_ms = detail::number_member(v, "speed_ms", path);
  return u;
}

FailureModel parse_failure(const json& v, const std::string& path) {
  detail::require_object(v, path);
  if (const auto* preset = detail::optional_member(v, "preset")) {
    if (!preset->is_string()) detail::parse_fail(path + "/preset", "expected a string");
    const auto name = preset->get<std::string>();
    auto model = failure_preset(name);
    if (!model) detail::parse_fail(path + "/preset", "unknown failure-rate preset \"" + name + "\"");
    return *model;
  }
  return FailureModel{detail::number_member(v, "lambda_per_hour", path), "catastrophic"};
}

RecoveryModel parse_recovery(const json* v, const std::string& path) {
  RecoveryModel r;
  if (!v) return r;
  detail::require_object(*v, path);
  r.parachute = detail::bool_member_or(*v, "parachute", path, r.parachute);
  r.max_success = detail::number_member_or(*v, "max_success", path, r.max_success);
  r.steepness = detail::number_member_or(*v, "steepness", path, r.steepness);
  r.midpoint_m = detail::number_member_or(*v, "midpoint_m", path, r.midpoint_m);
  return r;
}

std::optional<HarmModel> parse_harm_model(const std::string& name, const json& params, const std::string& name_path,
                                          const std::string& params_path, const UavSpec& uav) {
  if (name == "none") return std::nullopt;
  if (name == "bc_ais3") {
    BcAis3 m;
    m.body.mass_kg = detail::number_member_or(params, "body_mass_kg", params_path, m.body.mass_kg);
    m.body.wall_coeff = detail::number_member_or(params, "wall_coeff", params_path, m.body.wall_coeff);
    m.impactor_diameter_cm = uav.diameter_cm;
    return m;
  }
  if (name == "shelley_fatality")
    return ShelleyFatality{detail::number_member(params, "shelley_e0_j", params_path),
                           detail::number_member(params, "shelley_k_per_j", params_path)};
  if (name == "primatesta_fatality")
    return PrimatestaFatality{detail::number_member(params, "primatesta_alpha_j", params_path),
                              detail::number_member(params, "primatesta_beta_j", params_path),
                              detail::number_member(params, "sheltering", params_path)};
  if (name == "vehicle_windshield") {
    VehicleWindshield m;
    m.offset = detail::number_member_or(params, "windshield_offset", params_path, m.offset);
    m.slope_per_kj = detail::number_member_or(params, "windshield_slope_per_kj", params_path, m.slope_per_kj);
    m.floor_coeff = detail::number_member_or(params, "windshield_floor", params_path, m.floor_coeff);
    return m;
  }
  detail::parse_fail(name_path, "unknown harm model \"" + name + "\"");
}

HarmConfig parse_harm(const json* v, const std::string& path, const UavSpec& uav) {
  const json empty = json::object();
  const json& h = v ? detail::require_object(*v, path) : empty;
  const json* params_ptr = detail::optional_member(h, "parameters");
  const json& params = params_ptr ? detail::require_object(*params_ptr, path + "/parameters") : empty;
  auto name_of = [&](const char* key, const char* fallback) {
    const json* n = detail::optional_member(h, key);
    if (!n) return std::string(fallback);
    if (!n->is_string()) detail::parse_fail(child_path(path, key), "expected a string");
    return n->get<std::string>();
  };
  HarmConfig cfg;
  cfg.pedestrian = parse_harm_model(name_of("pedestrian_model", "bc_ais3"), params, path + "/pedestrian_model",
                                    path + "/parameters", uav);
  cfg.vehicle = parse_harm_model(name_of("vehicle_model", "vehicle_windshield"), params, path + "/vehicle_model",
                                 path + "/parameters", uav);
  return cfg;
}

ExposureModel parse_exposure(const json* v, const std::string& path, const std::filesystem::path& base,
                             std::string& input_digest) {
  ExposureModel m;
  if (!v) return m;
  detail::require_object(*v, path);
  m.ped_base = detail::number_member_or(*v, "ped_base", path, m.ped_base);
  m.veh_base = detail::number_member_or(*v, "veh_base", path, m.veh_base);
  if (const auto* times = detail::optional_member(*v, "times")) {
    detail::require_object(*times, path + "/times");
    m.times.clear();
    for (const auto& [label, f] : times->items()) {
      const std::string tp = path + "/times/" + label;
      detail::require_object(f, tp);
      m.times[label] = {detail::number_member(f, "tp", tp), detail::number_member(f, "tv", tp)};
    }
  }
  auto raster = [&](const char* key) -> std::optional<ScalarField2> {
    const json* r = detail::optional_member(*v, key);
    if (!r) return std::nullopt;
    if (!r->is_string()) detail::parse_fail(child_path(path, key), "expected a file path");
    const auto file = resolve(base, r->get<std::string>());
    input_digest += sha256_hex(read_file_bytes(file)) + "\n";
    return read_field(file);
  };
  m.ped_base_raster = raster("ped_base_raster");
  m.veh_base_raster = raster("veh_base_raster");
  return m;
}

}  // namespace

std::string impact_label(const ImpactModel& model) {
  if (const auto* r = std::get_if<RayleighImpactParams>(&model))
    return std::string("rayleigh-") + (r->mode == RayleighMode::Normalized ? "normalized" : "paper-faithful");
  return "gaussian";
}

ImpactModel parse_impact_model(const json& j, const std::string& path) {
  detail::require_object(j, path);
  const auto name = detail::string_member(j, "model", path);
  if (name == "gaussian") return GaussianImpactParams{detail::number_member(j, "alpha", path)};
  if (name == "rayleigh") {
    RayleighImpactParams r;
    r.beta = detail::number_member(j, "beta", path);
    r.gamma = detail::number_member(j, "gamma", path);
    if (const auto* mode = detail::optional_member(j, "mode")) {
      const auto m = mode->is_string() ? mode->get<std::string>() : std::string();
      if (m == "paper_faithful") r.mode = RayleighMode::PaperFaithful;
      else if (m == "normalized") r.mode = RayleighMode::Normalized;
      else detail::parse_fail(path + "/mode", "expected \"paper_faithful\" or \"normalized\"");
    }
    return r;
  }
  detail::parse_fail(path + "/model", "unknown impact model \"" + name + "\"");
}

KernelSpec kernel_spec_for(const ScenarioFile& scenario, const ImpactModel& model) {
  KernelSpec spec = scenario.config.kernel;
  spec.model = model;
  return spec;
}

ScenarioFile parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("/: malformed JSON: ") + e.what());
  }
  detail::require_object(doc, "");

  ScenarioFile s;
  s.base_dir = base_dir;
  const json& version = detail::member(doc, "version", "");
  if (!version.is_number_integer()) detail::parse_fail("/version", "expected an integer");
  s.version = version.get<int>();
  if (s.version != kScenarioVersion)
    detail::parse_fail("/version", "unsupported scenario version " + std::to_string(s.version));
  if (const auto* name = detail::optional_member(doc, "name")) {
    if (!name->is_string()) detail::parse_fail("/name", "expected a string");
    s.name = name->get<std::string>();
  }

  std::string input_digest;
  auto& cfg = s.config;
  const json& urban = detail::member(doc, "urban_model", "");
  if (urban.is_string()) {
    const auto file = resolve(base_dir, urban.get<std::string>());
    const std::string text = read_text_file(file);
    try {
      cfg.urban = load_urban_model(text);
    } catch (const Error& e) {
      fail(e.kind(), file.string() + ": " + e.what());
    }
  } else {
    cfg.urban = load_urban_model(urban.dump());
  }
  input_digest += sha256_hex(serialize_urban_model(cfg.urban)) + "\n";

  cfg.grid = parse_grid(doc);

  const json& impact = detail::member(doc, "impact", "");
  cfg.kernel.model = parse_impact_model(impact, "/impact");
  cfg.kernel.half_extent_m = detail::number_member_or(impact, "half_extent_m", "/impact", 20.0);
  cfg.kernel.delta_m = detail::number_member_or(impact, "delta_m", "/impact", 1.0);
  cfg.kernel.spacing_m = detail::number_member_or(impact, "spacing_m", "/impact", cfg.grid.spacing[0]);
  if (const auto* alts = detail::optional_member(impact, "altitudes_m"))
    cfg.kernel.altitudes_m = parse_altitudes(*alts, "/impact/altitudes_m");
  else
    cfg.kernel.altitudes_m = altitude_range(2.0, 200.0, 2.0);

  cfg.chain.uav = parse_uav(detail::member(doc, "uav", ""), "/uav");
  cfg.chain.failure = parse_failure(detail::member(doc, "failure", ""), "/failure");
  cfg.chain.recovery = parse_recovery(detail::optional_member(doc, "recovery"), "/recovery");
  cfg.chain.harm = parse_harm(detail::optional_member(doc, "harm"), "/harm", cfg.chain.uav);
  cfg.chain.include_cruise_energy = detail::bool_member_or(doc, "include_cruise_energy", "", false);
  cfg.exposure = parse_exposure(detail::optional_member(doc, "exposure"), "/exposure", base_dir, input_digest);

  cfg.time_label = detail::string_member(doc, "time", "");
  cfg.thresholds = number_list(detail::member(doc, "thresholds", ""), "/thresholds");
  cfg.ceiling_m = detail::number_member_or(doc, "ceiling_m", "", 200.0);

  s.times = {cfg.time_label};
  s.failure_rates = {cfg.chain.failure.lambda_per_hour};
  s.impact_models = {{impact_label(cfg.kernel.model), cfg.kernel.model}};
  if (const auto* sweep = detail::optional_member(doc, "sweep")) {
    detail::require_object(*sweep, "/sweep");
    if (const auto* times = detail::optional_member(*sweep, "times")) {
      detail::require_array(*times, "/sweep/times");
      s.times.clear();
      for (std::size_t i = 0; i < times->size(); ++i) {
        if (!(*times)[i].is_string()) detail::parse_fail(child_path("/sweep/times", i), "expected a time label");
        s.times.push_back((*times)[i].get<std::string>());
      }
    }
    if (const auto* rates = detail::optional_member(*sweep, "failure_rates"))
      s.failure_rates = number_list(*rates, "/sweep/failure_rates");
    if (const auto* models = detail::optional_member(*sweep, "impact_models")) {
      detail::require_array(*models, "/sweep/impact_models");
      s.impact_models.clear();
      for (std::size_t i = 0; i < models->size(); ++i) {
        const std::string path = child_path("/sweep/impact_models", i);
        ImpactVariant v;
        v.model = parse_impact_model((*models)[i], path);
        const json* label = detail::optional_member((*models)[i], "label");
        v.label = label && label->is_string() ? label->get<std::string>() : impact_label(v.model);
        s.impact_models.push_back(std::move(v));
      }
    }
  }

  s.oracle.checks = {{{impact_label(cfg.kernel.model), cfg.kernel.model}, {}}};
  if (const auto* oracle = detail::optional_member(doc, "oracle")) {
    const std::string path = "/oracle";
    detail::require_object(*oracle, path);
    if (const auto* n = detail::optional_member(*oracle, "samples")) s.oracle.samples = detail::count_value(*n, path + "/samples");
    if (const auto* seed = detail::optional_member(*oracle, "seed")) {
      if (!seed->is_number_unsigned() && !seed->is_number_integer())
        detail::parse_fail(path + "/seed", "expected a non-negative integer");
      s.oracle.seed = seed->get<std::uint64_t>();
    }
    if (const auto* checks = detail::optional_member(*oracle, "checks")) {
      detail::require_array(*checks, path + "/checks");
      s.oracle.checks.clear();
      for (std::size_t i = 0; i < checks->size(); ++i) {
        const std::string cp = child_path(path + "/checks", i);
        const json& c = detail::require_object((*checks)[i], cp);
        OracleCheck check;
        check.impact.model = c.contains("impact") ? parse_impact_model(c["impact"], cp + "/impact") : cfg.kernel.model;
        check.impact.label = impact_label(check.impact.model);
        if (const auto* alts = detail::optional_member(c, "altitudes_m"))
          check.altitudes_m = number_list(*alts, cp + "/altitudes_m");
        s.oracle.checks.push_back(std::move(check));
      }
    }
  }

  if (const auto* outputs = detail::optional_member(doc, "outputs")) {
    detail::require_object(*outputs, "/outputs");
    if (const auto* dir = detail::optional_member(*outputs, "dir")) {
      if (!dir->is_string()) detail::parse_fail("/outputs/dir", "expected a string");
      s.outputs.dir = resolve(base_dir, dir->get<std::string>());
    } else {
      s.outputs.dir = base_dir / "out";
    }
    s.outputs.mesh = detail::bool_member_or(*outputs, "mesh", "/outputs", true);
  } else {
    s.outputs.dir = base_dir / "out";
  }

  cfg.validate();
  for (const auto& t : s.times)
    if (!cfg.exposure.times.contains(t)) fail(ErrorKind::Config, "sweep time label \"" + t + "\" is not in the exposure table");
  for (double rate : s.failure_rates) FailureModel{rate, "sweep"}.validate();
  for (const auto& v : s.impact_models) kernel_spec_for(s, v.model).validate();
  if (s.oracle.samples < 1) fail(ErrorKind::Config, "oracle sample count must be >= 1");

  // Canonical form: nlohmann objects keep keys sorted, so dump() is stable.
  json canonical = doc;
  canonical.erase("outputs");
  s.content_hash = sha256_hex(canonical.dump() + "\n" + input_digest);
  return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_scenario(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace vrt
