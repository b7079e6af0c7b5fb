// vrt: command-line front end over the C API.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrt/vrt.h"

namespace {

int report_error(vrt_status status) {
  std::fprintf(stderr, "vrt: %s error: %s\n", vrt_status_name(status), vrt_last_error());
  return vrt_exit_code(status);
}

// Prints the report; exit 1 when a check failed.
int finish(vrt_report* report) {
  std::printf("%s\n", vrt_report_json(report));
  const int code = vrt_report_pass(report) ? 0 : 1;
  if (code) std::fprintf(stderr, "vrt: FAIL\n");
  vrt_report_free(report);
  return code;
}

struct ScenarioHandle {
  vrt_scenario* ptr = nullptr;
  ~ScenarioHandle() { vrt_scenario_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual risk terrains for low-altitude UAS operations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vrt_version());

  unsigned threads = vrt_default_threads();
  std::string scenario_path;
  std::string out;

  auto* kernel = app.add_subcommand("kernel", "Build the impact kernel of a scenario");
  kernel->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  kernel->add_option("--out", out, "Kernel file (default <outputs.dir>/kernel.vrtg)");
  kernel->add_option("--threads", threads, "Worker threads (speed only)")->check(CLI::PositiveNumber);

  bool no_mesh = false;
  auto* terrain = app.add_subcommand("terrain", "Compute risk volumes, terrains, clearance and meshes for every case");
  terrain->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  terrain->add_option("--out", out, "Output directory (default outputs.dir)");
  terrain->add_option("--threads", threads, "Worker threads (speed only)")->check(CLI::PositiveNumber);
  terrain->add_flag("--no-mesh", no_mesh, "Skip OBJ meshes");

  std::string volume_file;
  std::vector<double> thresholds;
  double ceiling = 200.0;
  auto* clearance = app.add_subcommand("clearance", "Threshold a risk volume and write clearance tables");
  clearance->add_option("--volume", volume_file, "Risk volume file")->required();
  clearance->add_option("--thresholds", thresholds, "Risk thresholds per flight hour")->required();
  clearance->add_option("--ceiling", ceiling, "Airspace ceiling in metres");
  clearance->add_option("--out", out, "Output directory")->required();

  std::vector<std::string> inputs;
  auto* fuse = app.add_subcommand("fuse", "Union of no-fly terrains and acoustic zone files");
  fuse->add_option("inputs", inputs, "Terrain files (.vrtg) or acoustic zone files (.json)")->required();
  fuse->add_option("--out", out, "Fused terrain file")->required();

  std::string terrain_file;
  auto* exporter = app.add_subcommand("export", "Write a terrain as an OBJ mesh or a clearance CSV");
  exporter->add_option("--terrain", terrain_file, "Terrain file")->required();
  exporter->add_option("--out", out, "Target file (.obj or .csv)")->required();
  exporter->add_option("--ceiling", ceiling, "Airspace ceiling in metres for .csv");

  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::string kernel_file;
  std::vector<double> altitudes;
  bool z_correction = false;
  auto* oracle = app.add_subcommand("oracle", "Check kernel probabilities against Monte Carlo sampling");
  auto* oracle_scenario = oracle->add_option("--scenario", scenario_path, "Scenario JSON file (runs its checks)");
  auto* oracle_kernel = oracle->add_option("--kernel", kernel_file, "Kernel file to check instead");
  oracle_scenario->excludes(oracle_kernel);
  oracle->add_option("--altitudes", altitudes, "Slices to test with --kernel (default all)");
  oracle->add_option("--samples", samples, "Samples per slice");
  oracle->add_option("--seed", seed, "Random seed");
  oracle->add_flag("--z-correction", z_correction, "Renormalize paper-faithful Rayleigh samples");
  oracle->add_option("--threads", threads, "Worker threads (speed only)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vrt_exit_code(VRT_E_ARGUMENT);
  }

  ScenarioHandle scenario;
  if (!scenario_path.empty()) {
    if (const vrt_status s = vrt_scenario_load(scenario_path.c_str(), &scenario.ptr); s != VRT_OK)
      return report_error(s);
  }

  vrt_report* report = nullptr;
  vrt_status status = VRT_OK;
  if (kernel->parsed()) {
    if (out.empty())
      out = (std::filesystem::path(vrt_scenario_output_dir(scenario.ptr)) / "kernel.vrtg").string();
    status = vrt_run_kernel(scenario.ptr, out.c_str(), threads, &report);
  } else if (terrain->parsed()) {
    status = vrt_run_terrain(scenario.ptr, out.empty() ? nullptr : out.c_str(), threads, no_mesh ? 0 : -1, &report);
  } else if (clearance->parsed()) {
    status = vrt_run_clearance(volume_file.c_str(), thresholds.data(), thresholds.size(), ceiling, out.c_str(),
                               &report);
  } else if (fuse->parsed()) {
    std::vector<const char*> names;
    for (const auto& s : inputs) names.push_back(s.c_str());
    status = vrt_run_fuse(names.data(), names.size(), out.c_str(), &report);
  } else if (exporter->parsed()) {
    status = vrt_run_export(terrain_file.c_str(), out.c_str(), ceiling);
    if (status == VRT_OK) std::printf("%s\n", out.c_str());
    return status == VRT_OK ? 0 : report_error(status);
  } else if (oracle->parsed()) {
    if (!scenario.ptr && kernel_file.empty()) {
      std::fprintf(stderr, "vrt: argument error: oracle needs --scenario or --kernel\n");
      return vrt_exit_code(VRT_E_ARGUMENT);
    }
    vrt_oracle_options o{};
    o.samples = samples.value_or(0);
    o.has_seed = seed.has_value();
    o.seed = seed.value_or(0);
    o.kernel_file = kernel_file.empty() ? nullptr : kernel_file.c_str();
    o.altitudes_m = altitudes.data();
    o.altitude_count = altitudes.size();
    o.z_correction = z_correction;
    o.threads = threads;
    status = vrt_run_oracle(scenario.ptr, &o, &report);
  }
  if (status != VRT_OK) return report_error(status);
  return finish(report);
}
