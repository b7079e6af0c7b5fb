#include "vrt/vrt.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "vrt/artifacts.hpp"
#include "vrt/error.hpp"
#include "vrt/parallel.hpp"
#include "vrt/pipeline.hpp"
#include "vrt/scenario.hpp"

struct vrt_scenario {
  vrt::ScenarioFile file;
  std::string output_dir;
};
struct vrt_kernel {
  vrt::ImpactKernel kernel;
};
struct vrt_volume {
  vrt::RiskVolume volume;
};
struct vrt_terrain {
  vrt::NoFlyTerrain terrain;
};
struct vrt_clearance {
  vrt::ClearanceField field;
};
struct vrt_report {
  std::string json;
  bool pass = true;
};

namespace {

thread_local std::string g_last_error;

vrt_status status_of(vrt::ErrorKind kind) {
  switch (kind) {
    case vrt::ErrorKind::Argument: return VRT_E_ARGUMENT;
    case vrt::ErrorKind::Domain: return VRT_E_DOMAIN;
    case vrt::ErrorKind::Parse: return VRT_E_PARSE;
    case vrt::ErrorKind::Geometry: return VRT_E_GEOMETRY;
    case vrt::ErrorKind::Extent: return VRT_E_EXTENT;
    case vrt::ErrorKind::Config: return VRT_E_CONFIG;
    case vrt::ErrorKind::Io: return VRT_E_IO;
    case vrt::ErrorKind::Evaluation: return VRT_E_EVALUATION;
    case vrt::ErrorKind::Validation: return VRT_E_VALIDATION;
  }
  return VRT_E_INTERNAL;
}

template <class F>
vrt_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return VRT_OK;
  } catch (const vrt::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return VRT_E_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) vrt::fail(vrt::ErrorKind::Argument, what);
}

void copy_hash(const std::string& hash, char* out) {
  if (out) std::memcpy(out, hash.c_str(), hash.size() + 1);
}

vrt_grid to_c(const vrt::GridSpec3& s) {
  vrt_grid g{};
  for (int a = 0; a < 3; ++a) {
    g.origin_m[a] = s.origin[a];
    g.spacing_m[a] = s.spacing[a];
    g.dims[a] = s.dims[a];
  }
  return g;
}

vrt::GridSpec3 from_c(const vrt_grid& g) {
  vrt::GridSpec3 s;
  for (int a = 0; a < 3; ++a) {
    s.origin[a] = g.origin_m[a];
    s.spacing[a] = g.spacing_m[a];
    s.dims[a] = g.dims[a];
  }
  return s;
}

void check_voxel(const vrt::GridSpec3& s, size_t i, size_t j, size_t k) {
  require(i < s.dims[0] && j < s.dims[1] && k < s.dims[2], "voxel index out of range");
}

vrt_report* make_report(const nlohmann::json& j, bool pass) { return new vrt_report{j.dump(2), pass}; }

}  // namespace

extern "C" {

const char* vrt_last_error(void) { return g_last_error.c_str(); }

const char* vrt_status_name(vrt_status status) {
  switch (status) {
    case VRT_OK: return "ok";
    case VRT_E_ARGUMENT: return "argument";
    case VRT_E_DOMAIN: return "domain";
    case VRT_E_PARSE: return "parse";
    case VRT_E_GEOMETRY: return "geometry";
    case VRT_E_EXTENT: return "extent";
    case VRT_E_CONFIG: return "config";
    case VRT_E_IO: return "io";
    case VRT_E_EVALUATION: return "evaluation";
    case VRT_E_VALIDATION: return "validation";
    case VRT_E_INTERNAL: return "internal";
  }
  return "unknown";
}

int vrt_exit_code(vrt_status status) {
  switch (status) {
    case VRT_OK: return 0;
    case VRT_E_VALIDATION: return 1;
    case VRT_E_IO: return 3;
    default: return 2;
  }
}

const char* vrt_version(void) { return "1.0.0"; }

unsigned vrt_default_threads(void) { return vrt::default_thread_count(); }

vrt_status vrt_scenario_load(const char* path, vrt_scenario** out) {
  return guarded([&] {
    require(path && out, "null argument");
    auto s = std::make_unique<vrt_scenario>();
    s->file = vrt::load_scenario(path);
    s->output_dir = s->file.outputs.dir.generic_string();
    *out = s.release();
  });
}

vrt_status vrt_scenario_parse(const char* json_text, const char* base_dir, vrt_scenario** out) {
  return guarded([&] {
    require(json_text && out, "null argument");
    auto s = std::make_unique<vrt_scenario>();
    s->file = vrt::parse_scenario(json_text, base_dir ? base_dir : ".");
    s->output_dir = s->file.outputs.dir.generic_string();
    *out = s.release();
  });
}

void vrt_scenario_free(vrt_scenario* scenario) { delete scenario; }

const char* vrt_scenario_name(const vrt_scenario* scenario) { return scenario ? scenario->file.name.c_str() : ""; }

const char* vrt_scenario_hash(const vrt_scenario* scenario) {
  return scenario ? scenario->file.content_hash.c_str() : "";
}

const char* vrt_scenario_output_dir(const vrt_scenario* scenario) {
  return scenario ? scenario->output_dir.c_str() : "";
}

int vrt_scenario_mesh_enabled(const vrt_scenario* scenario) { return scenario && scenario->file.outputs.mesh ? 1 : 0; }

vrt_status vrt_scenario_grid(const vrt_scenario* scenario, vrt_grid* out) {
  return guarded([&] {
    require(scenario && out, "null argument");
    *out = to_c(scenario->file.config.grid);
  });
}

vrt_status vrt_kernel_build(const vrt_scenario* scenario, unsigned threads, vrt_kernel** out) {
  return guarded([&] {
    require(scenario && out, "null argument");
    *out = new vrt_kernel{vrt::build_kernel(scenario->file.config.kernel, threads ? threads : 1)};
  });
}

vrt_status vrt_kernel_read(const char* path, vrt_kernel** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new vrt_kernel{vrt::read_kernel(path)};
  });
}

vrt_status vrt_kernel_write(const vrt_kernel* kernel, const char* path, const char* scenario_hash, char* sha256_hex) {
  return guarded([&] {
    require(kernel && path, "null argument");
    const auto c = vrt::kernel_container(kernel->kernel, scenario_hash ? scenario_hash : "");
    vrt::write_container(path, c);
    copy_hash(vrt::payload_hash(c), sha256_hex);
  });
}

void vrt_kernel_free(vrt_kernel* kernel) { delete kernel; }

vrt_status vrt_kernel_shape(const vrt_kernel* kernel, size_t* levels, size_t* width) {
  return guarded([&] {
    require(kernel, "null argument");
    if (levels) *levels = kernel->kernel.levels();
    if (width) *width = kernel->kernel.width();
  });
}

vrt_status vrt_kernel_altitude(const vrt_kernel* kernel, size_t level, double* altitude_m) {
  return guarded([&] {
    require(kernel && altitude_m, "null argument");
    require(level < kernel->kernel.levels(), "kernel level out of range");
    *altitude_m = kernel->kernel.spec().altitudes_m[level];
  });
}

vrt_status vrt_kernel_prob(const vrt_kernel* kernel, size_t level, size_t iy, size_t ix, double* prob) {
  return guarded([&] {
    require(kernel && prob, "null argument");
    const auto& k = kernel->kernel;
    require(level < k.levels() && iy < k.width() && ix < k.width(), "kernel index out of range");
    *prob = k.prob(level, iy, ix);
  });
}

vrt_status vrt_kernel_set_prob(vrt_kernel* kernel, size_t level, size_t iy, size_t ix, double prob) {
  return guarded([&] {
    require(kernel, "null argument");
    auto& k = kernel->kernel;
    require(level < k.levels() && iy < k.width() && ix < k.width(), "kernel index out of range");
    if (!(prob >= 0.0 && prob <= 1.0)) vrt::fail(vrt::ErrorKind::Domain, "kernel probability must lie in [0, 1]");
    k.set_prob(level, iy, ix, static_cast<float>(prob));
  });
}

vrt_status vrt_volume_compute(const vrt_scenario* scenario, const vrt_kernel* kernel, unsigned threads,
                              vrt_volume** out) {
  return guarded([&] {
    require(scenario && kernel && out, "null argument");
    *out = new vrt_volume{vrt::cumulative_risk_volume(scenario->file.config, kernel->kernel, threads ? threads : 1,
                                                      scenario->file.content_hash)};
  });
}

vrt_status vrt_volume_read(const char* path, vrt_volume** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new vrt_volume{vrt::read_volume(path)};
  });
}

vrt_status vrt_volume_write(const vrt_volume* volume, const char* path, char* sha256_hex) {
  return guarded([&] {
    require(volume && path, "null argument");
    const auto c = vrt::volume_container(volume->volume);
    vrt::write_container(path, c);
    copy_hash(vrt::payload_hash(c), sha256_hex);
  });
}

void vrt_volume_free(vrt_volume* volume) { delete volume; }

vrt_status vrt_volume_grid(const vrt_volume* volume, vrt_grid* out) {
  return guarded([&] {
    require(volume && out, "null argument");
    *out = to_c(volume->volume.spec);
  });
}

vrt_status vrt_volume_value(const vrt_volume* volume, size_t i, size_t j, size_t k, double* value) {
  return guarded([&] {
    require(volume && value, "null argument");
    const auto& v = volume->volume;
    check_voxel(v.spec, i, j, k);
    *value = v.values[v.spec.index(i, j, k)];
  });
}

vrt_status vrt_terrain_threshold(const vrt_volume* volume, double threshold, vrt_terrain** out) {
  return guarded([&] {
    require(volume && out, "null argument");
    *out = new vrt_terrain{vrt::threshold_terrain(volume->volume, threshold)};
  });
}

vrt_status vrt_terrain_from_mask(const vrt_grid* grid, const uint8_t* excluded, const uint8_t* blocked, size_t count,
                                 vrt_terrain_kind kind, vrt_terrain** out) {
  return guarded([&] {
    require(grid && excluded && out, "null argument");
    const auto spec = from_c(*grid);
    spec.validate();
    require(count == spec.size(), "mask size does not match the grid");
    std::vector<std::uint8_t> ex(excluded, excluded + count);
    std::vector<std::uint8_t> bl;
    if (blocked) bl.assign(blocked, blocked + count);
    vrt::TerrainKind k = vrt::TerrainKind::Risk;
    if (kind == VRT_TERRAIN_ACOUSTIC) k = vrt::TerrainKind::Acoustic;
    else if (kind == VRT_TERRAIN_FUSED) k = vrt::TerrainKind::Fused;
    else require(kind == VRT_TERRAIN_RISK, "unknown terrain kind");
    *out = new vrt_terrain{vrt::terrain_from_mask(spec, std::move(ex), std::move(bl), k)};
  });
}

vrt_status vrt_terrain_fuse(const vrt_terrain* const* terrains, size_t count, vrt_terrain** out) {
  return guarded([&] {
    require(terrains && count > 0 && out, "null argument");
    std::vector<vrt::NoFlyTerrain> items;
    items.reserve(count);
    for (size_t n = 0; n < count; ++n) {
      require(terrains[n] != nullptr, "null terrain");
      items.push_back(terrains[n]->terrain);
    }
    *out = new vrt_terrain{vrt::fuse_terrains(items)};
  });
}

vrt_status vrt_terrain_read(const char* path, vrt_terrain** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new vrt_terrain{vrt::read_terrain(path)};
  });
}

vrt_status vrt_terrain_write(const vrt_terrain* terrain, const char* path, char* sha256_hex) {
  return guarded([&] {
    require(terrain && path, "null argument");
    const auto c = vrt::terrain_container(terrain->terrain);
    vrt::write_container(path, c);
    copy_hash(vrt::payload_hash(c), sha256_hex);
  });
}

vrt_status vrt_terrain_write_mesh(const vrt_terrain* terrain, const char* path) {
  return guarded([&] {
    require(terrain && path, "null argument");
    vrt::write_text_file(path, vrt::export_terrain_mesh(terrain->terrain));
  });
}

void vrt_terrain_free(vrt_terrain* terrain) { delete terrain; }

vrt_status vrt_terrain_grid(const vrt_terrain* terrain, vrt_grid* out) {
  return guarded([&] {
    require(terrain && out, "null argument");
    *out = to_c(terrain->terrain.spec);
  });
}

vrt_status vrt_terrain_excluded(const vrt_terrain* terrain, size_t i, size_t j, size_t k, int* excluded) {
  return guarded([&] {
    require(terrain && excluded, "null argument");
    const auto& t = terrain->terrain;
    check_voxel(t.spec, i, j, k);
    *excluded = t.excluded[t.spec.index(i, j, k)] ? 1 : 0;
  });
}

vrt_status vrt_terrain_excluded_count(const vrt_terrain* terrain, size_t* count) {
  return guarded([&] {
    require(terrain && count, "null argument");
    *count = terrain->terrain.excluded_count();
  });
}

vrt_status vrt_clearance_compute(const vrt_terrain* terrain, double ceiling_m, vrt_clearance** out) {
  return guarded([&] {
    require(terrain && out, "null argument");
    *out = new vrt_clearance{vrt::min_clearance(terrain->terrain, ceiling_m)};
  });
}

void vrt_clearance_free(vrt_clearance* clearance) { delete clearance; }

vrt_status vrt_clearance_at(const vrt_clearance* clearance, size_t i, size_t j, double* clearance_m,
                            vrt_clearance_status* status) {
  return guarded([&] {
    require(clearance, "null argument");
    const auto& f = clearance->field;
    require(i < f.spec.dims[0] && j < f.spec.dims[1], "column index out of range");
    const size_t c = f.spec.index(i, j);
    if (clearance_m) *clearance_m = f.clearance_m[c];
    if (status) *status = static_cast<vrt_clearance_status>(f.status[c]);
  });
}

vrt_status vrt_clearance_summary(const vrt_clearance* clearance, vrt_ground_class cls, vrt_clearance_stats* out) {
  return guarded([&] {
    require(clearance && out, "null argument");
    require(cls == VRT_GROUND_NONE || cls == VRT_GROUND_PEDESTRIAN || cls == VRT_GROUND_VEHICLE,
            "unknown ground class");
    const auto s = vrt::summarize_clearance(clearance->field, static_cast<vrt::GroundClass>(cls));
    *out = {s.columns, s.open, s.closed, s.min_m, s.median_m, s.max_m};
  });
}

vrt_status vrt_clearance_write_csv(const vrt_clearance* clearance, const vrt_terrain* terrain, const char* path) {
  return guarded([&] {
    require(clearance && terrain && path, "null argument");
    vrt::write_text_file(path, vrt::clearance_csv(clearance->field, terrain->terrain.threshold,
                                                  terrain->terrain.scenario_hash));
  });
}

const char* vrt_report_json(const vrt_report* report) { return report ? report->json.c_str() : ""; }

int vrt_report_pass(const vrt_report* report) { return report && report->pass ? 1 : 0; }

void vrt_report_free(vrt_report* report) { delete report; }

vrt_status vrt_run_kernel(const vrt_scenario* scenario, const char* out_file, unsigned threads, vrt_report** out) {
  return guarded([&] {
    require(scenario && out_file && out, "null argument");
    const auto r = vrt::run_kernel_build(scenario->file, out_file, threads ? threads : 1);
    *out = make_report({{"file", r.file.generic_string()},
                        {"payload_sha256", r.payload_sha256},
                        {"levels", r.levels},
                        {"scenario_sha256", scenario->file.content_hash}},
                       true);
  });
}

vrt_status vrt_run_terrain(const vrt_scenario* scenario, const char* out_dir, unsigned threads, int mesh,
                           vrt_report** out) {
  return guarded([&] {
    require(scenario && out, "null argument");
    vrt::TerrainRunOptions o;
    o.out_dir = out_dir ? std::filesystem::path(out_dir) : scenario->file.outputs.dir;
    o.threads = threads ? threads : 1;
    o.mesh = mesh < 0 ? scenario->file.outputs.mesh : mesh != 0;
    const auto r = vrt::run_terrain_build(scenario->file, o);
    *out = make_report(r.summary, r.pass);
  });
}

vrt_status vrt_run_clearance(const char* volume_file, const double* thresholds, size_t threshold_count,
                             double ceiling_m, const char* out_dir, vrt_report** out) {
  return guarded([&] {
    require(volume_file && out_dir && out && (thresholds || threshold_count == 0), "null argument");
    const auto r = vrt::run_clearance(volume_file, std::vector<double>(thresholds, thresholds + threshold_count),
                                      ceiling_m, out_dir);
    *out = make_report(r.summary, true);
  });
}

vrt_status vrt_run_fuse(const char* const* inputs, size_t count, const char* out_file, vrt_report** out) {
  return guarded([&] {
    require(inputs && out_file && out, "null argument");
    std::vector<std::filesystem::path> paths;
    for (size_t n = 0; n < count; ++n) {
      require(inputs[n] != nullptr, "null input path");
      paths.emplace_back(inputs[n]);
    }
    const std::string hash = vrt::run_fuse(paths, out_file);
    nlohmann::json names = nlohmann::json::array();
    for (const auto& p : paths) names.push_back(p.generic_string());
    *out = make_report({{"file", out_file}, {"payload_sha256", hash}, {"inputs", names}}, true);
  });
}

vrt_status vrt_run_export(const char* terrain_file, const char* out_file, double ceiling_m) {
  return guarded([&] {
    require(terrain_file && out_file, "null argument");
    vrt::run_export(terrain_file, out_file, ceiling_m);
  });
}

vrt_status vrt_run_oracle(const vrt_scenario* scenario, const vrt_oracle_options* options, vrt_report** out) {
  return guarded([&] {
    require(options && out, "null argument");
    require(scenario || options->kernel_file, "oracle needs a scenario or a kernel file");
    require(options->altitudes_m || options->altitude_count == 0, "null altitude list");
    vrt::OracleRunOptions o;
    if (options->samples) o.samples = options->samples;
    if (options->has_seed) o.seed = options->seed;
    if (options->kernel_file) o.kernel_file = std::filesystem::path(options->kernel_file);
    o.altitudes_m.assign(options->altitudes_m, options->altitudes_m + options->altitude_count);
    o.z_correction = options->z_correction != 0;
    o.threads = options->threads ? options->threads : 1;
    const auto r = vrt::run_oracle(scenario ? &scenario->file : nullptr, o);
    *out = make_report(r.report, r.pass);
  });
}

}  // extern "C"
