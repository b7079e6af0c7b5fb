#include "vrt/pipeline.hpp"

#include <cmath>

#include "vrt/artifacts.hpp"
#include "vrt/error.hpp"
#include "vrt/gridio.hpp"
#include "vrt/json_util.hpp"

namespace vrt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

using PackedMask = std::vector<std::uint64_t>;

PackedMask pack(const std::vector<std::uint8_t>& flags) {
  PackedMask out((flags.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) out[i / 64] |= std::uint64_t{1} << (i % 64);
  return out;
}

bool packed_subset(const PackedMask& inner, const PackedMask& outer) {
  for (std::size_t w = 0; w < inner.size(); ++w)
    if (inner[w] & ~outer[w]) return false;
  return true;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json summary_json(const ClearanceSummary& s) {
  return {{"columns", s.columns},      {"open", s.open},
          {"closed", s.closed},        {"min_m", number_or_null(s.min_m)},
          {"median_m", number_or_null(s.median_m)}, {"max_m", number_or_null(s.max_m)}};
}

json clearance_json(const ClearanceField& field) {
  return {{"pedestrian", summary_json(summarize_clearance(field, GroundClass::Pedestrian))},
          {"vehicle", summary_json(summarize_clearance(field, GroundClass::Vehicle))}};
}

std::string text_hash(const std::string& text) { return sha256_hex(text); }

std::string write_artifact(const fs::path& path, const Container& c) {
  write_container(path, c);
  return payload_hash(c);
}

std::string tag(double v) { return format_double(v); }

}  // namespace

bool is_subset(const std::vector<std::uint8_t>& inner, const std::vector<std::uint8_t>& outer) {
  if (inner.size() != outer.size()) return false;
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner[i] && !outer[i]) return false;
  return true;
}

ImpactKernel obtain_kernel(const KernelSpec& spec, const std::optional<fs::path>& cache, const std::string& scenario_hash,
                           unsigned threads) {
  if (cache && fs::exists(*cache)) {
    const Container c = read_container(*cache);
    ImpactKernel cached = kernel_from_container(c);
    if (cached.spec() == spec) {
      if (c.header.value("scenario_sha256", std::string()) != scenario_hash) write_kernel(*cache, cached, scenario_hash);
      return cached;
    }
  }
  ImpactKernel kernel = build_kernel(spec, threads);
  if (cache) write_kernel(*cache, kernel, scenario_hash);
  return kernel;
}

KernelBuildResult run_kernel_build(const ScenarioFile& scenario, const fs::path& out_file, unsigned threads) {
  const ImpactKernel kernel = build_kernel(scenario.config.kernel, threads);
  const std::string hash = write_artifact(out_file, kernel_container(kernel, scenario.content_hash));
  return {out_file, hash, kernel.levels()};
}

TerrainRunResult run_terrain_build(const ScenarioFile& scenario, const TerrainRunOptions& options) {
  const auto& base = scenario.config;
  base.validate();
  const fs::path out = options.out_dir;
  const auto& thresholds = base.thresholds;
  const auto& times = scenario.times;
  const auto& rates = scenario.failure_rates;
  const auto& models = scenario.impact_models;

  ScenarioConfig first = base;
  first.time_label = times.front();
  RiskProblem problem = make_risk_problem(first);
  const GroundUseGrid ground = classify_ground(base.urban, base.grid.ground());

  // masks[((m * times + t) * rates + r) * thresholds + k]
  std::vector<PackedMask> masks(models.size() * times.size() * rates.size() * thresholds.size());
  auto mask_at = [&](std::size_t m, std::size_t t, std::size_t r, std::size_t k) -> PackedMask& {
    return masks[((m * times.size() + t) * rates.size() + r) * thresholds.size() + k];
  };
  std::vector<json> ped_min(masks.size());

  json cases = json::array();
  for (std::size_t m = 0; m < models.size(); ++m) {
    const ImpactKernel kernel = obtain_kernel(kernel_spec_for(scenario, models[m].model),
                                              out / "kernels" / (models[m].label + ".vrtg"), scenario.content_hash,
                                              options.threads);
    for (std::size_t t = 0; t < times.size(); ++t) {
      problem.exposure = build_exposure_grid(ground, base.exposure, times[t]);
      for (std::size_t r = 0; r < rates.size(); ++r) {
        problem.chain.failure.lambda_per_hour = rates[r];
        const RiskVolume volume = make_risk_volume(problem, cumulative_risk_gather(problem, kernel, options.threads),
                                                   scenario.content_hash);
        std::vector<NoFlyTerrain> terrains;
        for (double th : thresholds) terrains.push_back(threshold_terrain(volume, th));
        for (std::size_t k = 1; k < terrains.size(); ++k)
          if (!is_subset(terrains[k - 1].excluded, terrains[k].excluded))
            fail(ErrorKind::Validation, "terrain at threshold " + tag(thresholds[k - 1]) +
                                            " is not contained in the terrain at " + tag(thresholds[k]));

        const fs::path rel = fs::path("cases") / models[m].label / times[t] / ("lambda-" + tag(rates[r]));
        const fs::path dir = out / rel;
        json entry = {{"impact", models[m].label},
                      {"time", times[t]},
                      {"failure_rate", rates[r]},
                      {"dir", rel.generic_string()},
                      {"max_risk", volume.max_value()},
                      {"volume_sha256", write_artifact(dir / "volume.vrtg", volume_container(volume))}};
        json per_threshold = json::array();
        for (std::size_t k = 0; k < terrains.size(); ++k) {
          const auto& terrain = terrains[k];
          const ClearanceField field = min_clearance(terrain, base.ceiling_m);
          const std::string csv = clearance_csv(field, thresholds[k], scenario.content_hash);
          write_text_file(dir / ("clearance-" + tag(thresholds[k]) + ".csv"), csv);
          json item = {{"threshold", thresholds[k]},
                       {"excluded_voxels", terrain.excluded_count()},
                       {"terrain_sha256",
                        write_artifact(dir / ("terrain-" + tag(thresholds[k]) + ".vrtg"), terrain_container(terrain))},
                       {"clearance_csv_sha256", text_hash(csv)},
                       {"clearance", clearance_json(field)}};
          if (options.mesh) {
            const std::string mesh = export_terrain_mesh(terrain);
            write_text_file(dir / ("mesh-" + tag(thresholds[k]) + ".obj"), mesh);
            item["mesh_sha256"] = text_hash(mesh);
          }
          ped_min[((m * times.size() + t) * rates.size() + r) * thresholds.size() + k] =
              item["clearance"]["pedestrian"]["min_m"];
          mask_at(m, t, r, k) = pack(terrain.excluded);
          per_threshold.push_back(std::move(item));
        }
        entry["thresholds"] = std::move(per_threshold);
        cases.push_back(std::move(entry));
      }
    }
  }

  bool pass = true;
  json time_checks = json::array();
  for (std::size_t a = 0; a < times.size(); ++a) {
    for (std::size_t b = 0; b < times.size(); ++b) {
      if (a == b) continue;
      const auto& fa = base.exposure.times.at(times[a]);
      const auto& fb = base.exposure.times.at(times[b]);
      if (!(fa.pedestrian <= fb.pedestrian && fa.vehicle <= fb.vehicle) || fa == fb) continue;
      bool holds = true;
      for (std::size_t m = 0; m < models.size(); ++m)
        for (std::size_t r = 0; r < rates.size(); ++r)
          for (std::size_t k = 0; k < thresholds.size(); ++k)
            holds = holds && packed_subset(mask_at(m, a, r, k), mask_at(m, b, r, k));
      pass = pass && holds;
      time_checks.push_back({{"inner", times[a]}, {"outer", times[b]}, {"holds", holds}});
    }
  }
  json rate_checks = json::array();
  for (std::size_t a = 0; a < rates.size(); ++a) {
    for (std::size_t b = 0; b < rates.size(); ++b) {
      if (!(rates[a] < rates[b])) continue;
      bool holds = true;
      for (std::size_t m = 0; m < models.size(); ++m)
        for (std::size_t t = 0; t < times.size(); ++t)
          for (std::size_t k = 0; k < thresholds.size(); ++k)
            holds = holds && packed_subset(mask_at(m, t, a, k), mask_at(m, t, b, k));
      pass = pass && holds;
      rate_checks.push_back({{"inner", rates[a]}, {"outer", rates[b]}, {"holds", holds}});
    }
  }
  json comparison = json::array();
  if (models.size() > 1) {
    for (std::size_t t = 0; t < times.size(); ++t)
      for (std::size_t r = 0; r < rates.size(); ++r)
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
          json row = {{"time", times[t]}, {"failure_rate", rates[r]}, {"threshold", thresholds[k]}};
          for (std::size_t m = 0; m < models.size(); ++m)
            row["pedestrian_min_clearance_m"][models[m].label] =
                ped_min[((m * times.size() + t) * rates.size() + r) * thresholds.size() + k];
          comparison.push_back(std::move(row));
        }
  }

  json summary = {{"scenario", scenario.name},
                  {"scenario_sha256", scenario.content_hash},
                  {"ceiling_m", base.ceiling_m},
                  {"regulatory_limit_m", kRegulatoryLimitM},
                  {"thresholds", thresholds},
                  {"cases", std::move(cases)},
                  {"checks",
                   {{"threshold_nesting", true},
                    {"time_ordering", std::move(time_checks)},
                    {"failure_rate_monotone", std::move(rate_checks)}}},
                  {"impact_comparison", std::move(comparison)},
                  {"result", pass ? "PASS" : "FAIL"}};
  write_text_file(out / "summary.json", summary.dump(2) + "\n");
  return {std::move(summary), pass};
}

ClearanceRunResult run_clearance(const fs::path& volume_file, const std::vector<double>& thresholds, double ceiling_m,
                                 const fs::path& out_dir) {
  if (thresholds.empty()) fail(ErrorKind::Config, "at least one threshold is required");
  const RiskVolume volume = read_volume(volume_file);
  json items = json::array();
  for (double th : thresholds) {
    if (!(th > 0.0 && th < 1.0)) fail(ErrorKind::Config, "risk thresholds must lie in (0, 1)");
    const NoFlyTerrain terrain = threshold_terrain(volume, th);
    const ClearanceField field = min_clearance(terrain, ceiling_m);
    const std::string csv = clearance_csv(field, th, volume.scenario_hash);
    const fs::path file = out_dir / ("clearance-" + tag(th) + ".csv");
    write_text_file(file, csv);
    items.push_back({{"threshold", th},
                     {"excluded_voxels", terrain.excluded_count()},
                     {"csv", file.generic_string()},
                     {"csv_sha256", text_hash(csv)},
                     {"clearance", clearance_json(field)}});
  }
  return {{{"volume", volume_file.generic_string()},
           {"scenario_sha256", volume.scenario_hash},
           {"ceiling_m", ceiling_m},
           {"regulatory_limit_m", kRegulatoryLimitM},
           {"thresholds", std::move(items)}}};
}

std::vector<CylinderZone> parse_acoustic_zones(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
  }
  detail::require_object(doc, "");
  const auto kind = detail::string_member(doc, "kind", "");
  if (kind != "acoustic") detail::parse_fail("/kind", "expected \"acoustic\"");
  const json& zones = detail::member(doc, "zones", "");
  detail::require_array(zones, "/zones");
  std::vector<CylinderZone> out;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const auto path = "/zones/" + std::to_string(i);
    const json& z = zones[i];
    detail::require_object(z, path);
    const json& c = detail::member(z, "center_m", path);
    if (!c.is_array() || c.size() != 2) detail::parse_fail(path + "/center_m", "expected [x, y]");
    CylinderZone zone;
    zone.center_m = {detail::finite_number(c[0], path + "/center_m/0"), detail::finite_number(c[1], path + "/center_m/1")};
    zone.radius_m = detail::number_member(z, "radius_m", path);
    zone.bottom_m = detail::number_member(z, "bottom_m", path);
    zone.top_m = detail::number_member(z, "top_m", path);
    out.push_back(zone);
  }
  return out;
}

std::string run_fuse(const std::vector<fs::path>& inputs, const fs::path& out_file) {
  std::vector<NoFlyTerrain> terrains;
  std::vector<fs::path> zone_files;
  for (const auto& p : inputs) {
    if (p.extension() == ".json")
      zone_files.push_back(p);
    else
      terrains.push_back(read_terrain(p));
  }
  if (terrains.empty()) fail(ErrorKind::Config, "fusion needs at least one terrain file to define the grid");
  for (const auto& p : zone_files) {
    const std::string text = read_text_file(p);
    try {
      terrains.push_back(acoustic_terrain(terrains.front().spec, parse_acoustic_zones(text), sha256_hex(text)));
    } catch (const Error& e) {
      throw Error(e.kind(), p.string() + ": " + e.what());
    }
  }
  return write_artifact(out_file, terrain_container(fuse_terrains(terrains)));
}

void run_export(const fs::path& terrain_file, const fs::path& out_file, double ceiling_m) {
  const NoFlyTerrain terrain = read_terrain(terrain_file);
  const auto ext = out_file.extension().string();
  if (ext == ".obj")
    write_text_file(out_file, export_terrain_mesh(terrain));
  else if (ext == ".csv")
    write_text_file(out_file, clearance_csv(min_clearance(terrain, ceiling_m), terrain.threshold, terrain.scenario_hash));
  else
    fail(ErrorKind::Config, "export target must end in .obj or .csv");
}

OracleRunResult run_oracle(const ScenarioFile* scenario, const OracleRunOptions& options) {
  OracleOptions base;
  base.threads = options.threads;
  base.z_correction = options.z_correction;
  if (scenario) {
    base.samples = scenario->oracle.samples;
    base.seed = scenario->oracle.seed;
  }
  if (options.samples) base.samples = *options.samples;
  if (options.seed) base.seed = *options.seed;

  json checks = json::array();
  bool pass = true;
  auto run = [&](const ImpactKernel& kernel, const std::vector<double>& altitudes) {
    OracleOptions o = base;
    o.altitudes_m = altitudes;
    const OracleReport report = compare_kernel(kernel, o);
    pass = pass && report.pass;
    checks.push_back(report.to_json());
  };
  if (options.kernel_file) {
    run(read_kernel(*options.kernel_file), options.altitudes_m);
  } else {
    if (!scenario) fail(ErrorKind::Config, "oracle needs a scenario or a kernel file");
    for (const auto& check : scenario->oracle.checks)
      run(build_kernel(kernel_spec_for(*scenario, check.impact.model), options.threads), check.altitudes_m);
  }
  json report = {{"samples", base.samples}, {"seed", base.seed}, {"checks", std::move(checks)},
                 {"result", pass ? "PASS" : "FAIL"}};
  if (scenario) report["scenario_sha256"] = scenario->content_hash;
  return {std::move(report), pass};
}

}  // namespace vrt
