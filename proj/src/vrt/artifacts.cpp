#include "vrt/artifacts.hpp"

#include "vrt/error.hpp"
#include "vrt/json_util.hpp"

namespace vrt {

namespace {

void expect_artifact(const Container& c, const char* type) {
  const auto it = c.header.find("artifact");
  if (it == c.header.end() || !it->is_string() || it->get<std::string>() != type)
    fail(ErrorKind::Parse, std::string("container is not a ") + type);
}

std::string header_hash(const Container& c) {
  const auto it = c.header.find("scenario_sha256");
  return (it != c.header.end() && it->is_string()) ? it->get<std::string>() : std::string();
}

nlohmann::json grid2_json(const GridSpec2& s) {
  return {{"origin_m", {s.origin[0], s.origin[1]}}, {"spacing_m", {s.spacing[0], s.spacing[1]}},
          {"dims", {s.dims[0], s.dims[1]}}};
}

GridSpec2 grid2_from_json(const nlohmann::json& j, const std::string& path) {
  const GridSpec3 s = grid_from_json({{"origin_m", {j.at("origin_m")[0], j.at("origin_m")[1], 0.0}},
                                      {"spacing_m", {j.at("spacing_m")[0], j.at("spacing_m")[1], 1.0}},
                                      {"dims", {j.at("dims")[0], j.at("dims")[1], 1}}},
                                     path);
  return s.ground();
}

std::vector<std::uint8_t> class_bytes(const std::vector<GroundClass>& classes) {
  std::vector<std::uint8_t> out(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) out[i] = static_cast<std::uint8_t>(classes[i]);
  return out;
}

std::vector<GroundClass> classes_from(const Container& c, std::size_t expected) {
  for (const auto& s : c.sections) {
    if (s.name != "ground_class") continue;
    const auto bytes = read_u8(s);
    if (bytes.size() != expected) fail(ErrorKind::Parse, "ground class section has the wrong size");
    std::vector<GroundClass> out(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      if (bytes[i] > 2) fail(ErrorKind::Parse, "invalid ground class value");
      out[i] = static_cast<GroundClass>(bytes[i]);
    }
    return out;
  }
  return {};
}

template <class F>
auto parse_guard(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed artifact header: ") + e.what());
  }
}

}  // namespace

nlohmann::json impact_model_json(const ImpactModel& model) {
  if (const auto* g = std::get_if<GaussianImpactParams>(&model)) return {{"model", "gaussian"}, {"alpha", g->alpha}};
  const auto& r = std::get<RayleighImpactParams>(model);
  return {{"model", "rayleigh"}, {"beta", r.beta}, {"gamma", r.gamma}, {"mode", to_string(r.mode)}};
}

nlohmann::json grid_json(const GridSpec3& s) {
  return {{"origin_m", {s.origin[0], s.origin[1], s.origin[2]}},
          {"spacing_m", {s.spacing[0], s.spacing[1], s.spacing[2]}},
          {"dims", {s.dims[0], s.dims[1], s.dims[2]}}};
}

GridSpec3 grid_from_json(const nlohmann::json& j, const std::string& path) {
  detail::require_object(j, path);
  const auto& o = detail::require_array(detail::member(j, "origin_m", path), path + "/origin_m");
  const auto& s = detail::require_array(detail::member(j, "spacing_m", path), path + "/spacing_m");
  const auto& d = detail::require_array(detail::member(j, "dims", path), path + "/dims");
  if (o.size() != 3 || s.size() != 3 || d.size() != 3) detail::parse_fail(path, "origin_m/spacing_m/dims need 3 entries");
  GridSpec3 spec;
  for (std::size_t a = 0; a < 3; ++a) {
    spec.origin[a] = detail::finite_number(o[a], detail::child_path(path + "/origin_m", a));
    spec.spacing[a] = detail::finite_number(s[a], detail::child_path(path + "/spacing_m", a));
    spec.dims[a] = detail::count_value(d[a], detail::child_path(path + "/dims", a));
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    detail::parse_fail(path, e.what());
  }
  return spec;
}

std::string payload_hash(const Container& c) { return sha256_hex(c.payload()); }

Container kernel_container(const ImpactKernel& kernel, const std::string& scenario_hash) {
  const auto& s = kernel.spec();
  Container c;
  c.header = {{"artifact", "impact_kernel"},
              {"scenario_sha256", scenario_hash},
              {"impact", impact_model_json(s.model)},
              {"half_extent_m", s.half_extent_m},
              {"altitudes_m", s.altitudes_m},
              {"delta_m", s.delta_m},
              {"spacing_m", s.spacing_m},
              {"layout", "altitude,y,x"}};
  c.sections.push_back(f32_section("probs", kernel.probs()));
  return c;
}

ImpactKernel kernel_from_container(const Container& c) {
  expect_artifact(c, "impact_kernel");
  return parse_guard([&] {
    const auto& h = c.header;
    KernelSpec spec;
    const auto& impact = h.at("impact");
    const auto name = impact.at("model").get<std::string>();
    if (name == "gaussian") {
      spec.model = GaussianImpactParams{impact.at("alpha").get<double>()};
    } else if (name == "rayleigh") {
      RayleighImpactParams r;
      r.beta = impact.at("beta").get<double>();
      r.gamma = impact.at("gamma").get<double>();
      const auto mode = impact.at("mode").get<std::string>();
      if (mode == "normalized") r.mode = RayleighMode::Normalized;
      else if (mode == "paper_faithful") r.mode = RayleighMode::PaperFaithful;
      else fail(ErrorKind::Parse, "unknown rayleigh mode \"" + mode + "\"");
      spec.model = r;
    } else {
      fail(ErrorKind::Parse, "unknown impact model \"" + name + "\"");
    }
    spec.half_extent_m = h.at("half_extent_m").get<double>();
    spec.altitudes_m = h.at("altitudes_m").get<std::vector<double>>();
    spec.delta_m = h.at("delta_m").get<double>();
    spec.spacing_m = h.at("spacing_m").get<double>();
    try {
      return ImpactKernel(spec, read_f32(c.section("probs")));
    } catch (const Error& e) {
      fail(ErrorKind::Parse, std::string("invalid kernel file: ") + e.what());
    }
  });
}

Container volume_container(const RiskVolume& volume) {
  Container c;
  c.header = {{"artifact", "risk_volume"},
              {"scenario_sha256", volume.scenario_hash},
              {"grid", grid_json(volume.spec)},
              {"units", "expected harm events per flight hour"},
              {"blocked_value", kBlockedRisk},
              {"layout", "z,y,x"}};
  c.sections.push_back(f32_section("risk", volume.values));
  c.sections.push_back(u8_section("ground_class", class_bytes(volume.column_classes)));
  return c;
}

RiskVolume volume_from_container(const Container& c) {
  expect_artifact(c, "risk_volume");
  return parse_guard([&] {
    RiskVolume v;
    v.spec = grid_from_json(c.header.at("grid"), "/grid");
    v.values = read_f32(c.section("risk"));
    if (v.values.size() != v.spec.size()) fail(ErrorKind::Parse, "risk section does not match the grid");
    v.column_classes = classes_from(c, v.spec.column_count());
    v.scenario_hash = header_hash(c);
    return v;
  });
}

Container terrain_container(const NoFlyTerrain& terrain) {
  Container c;
  c.header = {{"artifact", "no_fly_terrain"},
              {"scenario_sha256", terrain.scenario_hash},
              {"grid", grid_json(terrain.spec)},
              {"kind", to_string(terrain.kind)},
              {"threshold", terrain.threshold ? nlohmann::json(*terrain.threshold) : nlohmann::json(nullptr)},
              {"inputs", terrain.inputs},
              {"layout", "z,y,x"}};
  c.sections.push_back(bits_section("excluded", terrain.excluded));
  c.sections.push_back(bits_section("blocked", terrain.blocked));
  if (!terrain.column_classes.empty())
    c.sections.push_back(u8_section("ground_class", class_bytes(terrain.column_classes)));
  return c;
}

NoFlyTerrain terrain_from_container(const Container& c) {
  expect_artifact(c, "no_fly_terrain");
  return parse_guard([&] {
    NoFlyTerrain t;
    t.spec = grid_from_json(c.header.at("grid"), "/grid");
    t.excluded = read_bits(c.section("excluded"));
    t.blocked = read_bits(c.section("blocked"));
    const auto kind = parse_terrain_kind(c.header.at("kind").get<std::string>());
    if (!kind) fail(ErrorKind::Parse, "unknown terrain kind");
    t.kind = *kind;
    if (const auto& th = c.header.at("threshold"); !th.is_null()) t.threshold = th.get<double>();
    t.inputs = c.header.at("inputs").get<std::vector<std::string>>();
    t.scenario_hash = header_hash(c);
    t.column_classes = classes_from(c, t.spec.column_count());
    try {
      t.validate();
    } catch (const Error& e) {
      fail(ErrorKind::Parse, std::string("invalid terrain file: ") + e.what());
    }
    return t;
  });
}

Container field_container(const ScalarField2& field, const std::string& scenario_hash) {
  field.validate();
  Container c;
  c.header = {{"artifact", "scalar_field2"}, {"scenario_sha256", scenario_hash}, {"grid", grid2_json(field.spec)},
              {"layout", "y,x"}};
  std::vector<float> values(field.values.begin(), field.values.end());
  c.sections.push_back(f32_section("values", values));
  return c;
}

ScalarField2 field_from_container(const Container& c) {
  expect_artifact(c, "scalar_field2");
  return parse_guard([&] {
    ScalarField2 f;
    f.spec = grid2_from_json(c.header.at("grid"), "/grid");
    const auto values = read_f32(c.section("values"));
    f.values.assign(values.begin(), values.end());
    try {
      f.validate();
    } catch (const Error& e) {
      fail(ErrorKind::Parse, std::string("invalid field file: ") + e.what());
    }
    return f;
  });
}

void write_kernel(const std::filesystem::path& path, const ImpactKernel& kernel, const std::string& scenario_hash) {
  write_container(path, kernel_container(kernel, scenario_hash));
}

ImpactKernel read_kernel(const std::filesystem::path& path) { return kernel_from_container(read_container(path)); }

void write_volume(const std::filesystem::path& path, const RiskVolume& volume) {
  write_container(path, volume_container(volume));
}

RiskVolume read_volume(const std::filesystem::path& path) { return volume_from_container(read_container(path)); }

void write_terrain(const std::filesystem::path& path, const NoFlyTerrain& terrain) {
  write_container(path, terrain_container(terrain));
}

NoFlyTerrain read_terrain(const std::filesystem::path& path) { return terrain_from_container(read_container(path)); }

ScalarField2 read_field(const std::filesystem::path& path) { return field_from_container(read_container(path)); }

}  // namespace vrt
