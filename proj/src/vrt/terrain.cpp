#include "vrt/terrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "vrt/error.hpp"
#include "vrt/gridio.hpp"
#include "vrt/parallel.hpp"

namespace vrt {

namespace {

// Per-altitude tables shared by the gather and scatter forms.
struct LayerTables {
  std::vector<double> column_factor;  // lambda * P_R per column; unused on blocked voxels
  std::vector<double> cell_weight;    // P_H * N per ground cell
  std::vector<int> cell_level;        // kernel slice per ground cell; -1 when the cell contributes nothing
};

std::size_t level_for(const ImpactKernel& kernel, double fall) {
  if (auto level = kernel.nearest_level(fall)) return *level;
  if (fall < kernel.spec().altitudes_m.front()) return 0;
  fail(ErrorKind::Config, "fall height " + format_double(fall) + " m lies above the kernel altitude range");
}

void check_alignment(const RiskProblem& problem, const ImpactKernel& kernel) {
  const auto& s = problem.spec;
  if (kernel.levels() == 0) fail(ErrorKind::Config, "kernel has no altitude slices");
  if (kernel.spec().spacing_m != s.spacing[0] || kernel.spec().spacing_m != s.spacing[1])
    fail(ErrorKind::Config, "kernel spacing does not match the horizontal grid spacing");
  if (!(problem.occupancy.spec == s) || problem.occupancy.blocked.size() != s.size())
    fail(ErrorKind::Config, "occupancy mask is not aligned with the risk grid");
  if (!(problem.exposure.spec == s.ground()) || problem.exposure.expected.size() != s.column_count())
    fail(ErrorKind::Config, "exposure grid is not aligned with the risk grid");
  if (!problem.ground_elevation.empty() && problem.ground_elevation.size() != s.column_count())
    fail(ErrorKind::Config, "ground elevation is not aligned with the risk grid");
}

LayerTables layer_tables(const RiskProblem& problem, const ImpactKernel& kernel, std::size_t k) {
  const auto& s = problem.spec;
  const double z = s.center_z(k);
  const std::size_t n = s.column_count();
  LayerTables t{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<int>(n, -1)};
  const double lambda = problem.chain.failure.lambda_per_hour;
  for (std::size_t j = 0; j < s.ny(); ++j) {
    for (std::size_t i = 0; i < s.nx(); ++i) {
      const std::size_t c = j * s.nx() + i;
      const double height = z - problem.elevation(i, j);
      if (!problem.occupancy.is_blocked(i, j, k) && height > 0.0)
        t.column_factor[c] = lambda * problem.chain.p_unrecoverable(height);
      const double count = problem.exposure.expected[c];
      if (!(count > 0.0) || !(height > 0.0)) continue;
      const double weight = problem.chain.p_harm(problem.exposure.classes[c], height) * count;
      if (!(weight > 0.0)) continue;
      t.cell_weight[c] = weight;
      t.cell_level[c] = static_cast<int>(level_for(kernel, height));
    }
  }
  return t;
}

std::vector<double> blocked_template(const RiskProblem& problem) {
  std::vector<double> out(problem.spec.size(), 0.0);
  for (std::size_t v = 0; v < out.size(); ++v)
    if (problem.occupancy.blocked[v]) out[v] = kBlockedRisk;
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  grid.validate();
  try {
    kernel.validate();
    chain.validate();
    exposure.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  if (kernel.spacing_m != grid.spacing[0] || kernel.spacing_m != grid.spacing[1])
    fail(ErrorKind::Config, "kernel spacing does not match the horizontal grid spacing");
  if (!exposure.times.contains(time_label)) fail(ErrorKind::Config, "unknown time label \"" + time_label + "\"");
  if (thresholds.empty()) fail(ErrorKind::Config, "at least one risk threshold is required");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0)) fail(ErrorKind::Config, "risk thresholds must lie in (0, 1)");
    if (i > 0 && !(thresholds[i] < thresholds[i - 1]))
      fail(ErrorKind::Config, "risk thresholds must be strictly decreasing");
  }
  if (!(ceiling_m > 0.0) || ceiling_m > kernel.altitudes_m.back())
    fail(ErrorKind::Config, "ceiling must lie in (0, max kernel altitude]");
}

RiskProblem make_risk_problem(const ScenarioConfig& cfg) {
  cfg.validate();
  RiskProblem p;
  p.spec = cfg.grid;
  p.occupancy = rasterize_occupancy(cfg.urban, cfg.grid);
  p.exposure = build_exposure_grid(classify_ground(cfg.urban, cfg.grid.ground()), cfg.exposure, cfg.time_label);
  if (cfg.urban.elevation) {
    p.ground_elevation.resize(cfg.grid.column_count());
    for (std::size_t j = 0; j < cfg.grid.ny(); ++j)
      for (std::size_t i = 0; i < cfg.grid.nx(); ++i)
        p.ground_elevation[j * cfg.grid.nx() + i] = cfg.urban.elevation_at(cfg.grid.center_x(i), cfg.grid.center_y(j));
  }
  p.chain = cfg.chain;
  return p;
}

std::vector<double> cumulative_risk_gather(const RiskProblem& problem, const ImpactKernel& kernel, unsigned threads) {
  check_alignment(problem, kernel);
  const auto& s = problem.spec;
  const auto r = static_cast<std::ptrdiff_t>(kernel.radius());
  const auto nx = static_cast<std::ptrdiff_t>(s.nx());
  const auto ny = static_cast<std::ptrdiff_t>(s.ny());
  std::vector<double> out = blocked_template(problem);

  parallel_for(s.nz(), threads, [&](std::size_t k) {
    const LayerTables t = layer_tables(problem, kernel, k);
    for (std::ptrdiff_t j = 0; j < ny; ++j) {
      for (std::ptrdiff_t i = 0; i < nx; ++i) {
        const std::size_t v = s.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), k);
        if (problem.occupancy.blocked[v]) continue;
        const double a = t.column_factor[static_cast<std::size_t>(j * nx + i)];
        double best = 0.0;
        for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
          const std::ptrdiff_t cj = j + dy;
          if (cj < 0 || cj >= ny) continue;
          for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            const std::ptrdiff_t ci = i + dx;
            if (ci < 0 || ci >= nx) continue;
            const auto c = static_cast<std::size_t>(cj * nx + ci);
            const int level = t.cell_level[c];
            if (level < 0) continue;
            const double pg = kernel.prob(static_cast<std::size_t>(level), static_cast<std::size_t>(dy + r),
                                          static_cast<std::size_t>(dx + r));
            best = std::max(best, pg * (a * t.cell_weight[c]));
          }
        }
        out[v] = best;
      }
    }
  });
  return out;
}

std::vector<double> cumulative_risk_scatter(const RiskProblem& problem, const ImpactKernel& kernel) {
  check_alignment(problem, kernel);
  const auto& s = problem.spec;
  const auto r = static_cast<std::ptrdiff_t>(kernel.radius());
  const auto nx = static_cast<std::ptrdiff_t>(s.nx());
  const auto ny = static_cast<std::ptrdiff_t>(s.ny());
  std::vector<double> out = blocked_template(problem);

  for (std::size_t k = 0; k < s.nz(); ++k) {
    const LayerTables t = layer_tables(problem, kernel, k);
    for (std::ptrdiff_t cj = 0; cj < ny; ++cj) {
      for (std::ptrdiff_t ci = 0; ci < nx; ++ci) {
        const auto c = static_cast<std::size_t>(cj * nx + ci);
        const int level = t.cell_level[c];
        if (level < 0) continue;
        for (std::ptrdiff_t dy = -r; dy <= r; ++dy) {
          const std::ptrdiff_t j = cj - dy;
          if (j < 0 || j >= ny) continue;
          for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            const std::ptrdiff_t i = ci - dx;
            if (i < 0 || i >= nx) continue;
            const std::size_t v = s.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), k);
            if (problem.occupancy.blocked[v]) continue;
            const double pg = kernel.prob(static_cast<std::size_t>(level), static_cast<std::size_t>(dy + r),
                                          static_cast<std::size_t>(dx + r));
            const double a = t.column_factor[static_cast<std::size_t>(j * nx + i)];
            out[v] = std::max(out[v], pg * (a * t.cell_weight[c]));
          }
        }
      }
    }
  }
  return out;
}

double RiskVolume::max_value() const {
  float best = 0.0f;
  for (float v : values) best = std::max(best, v);
  return best;
}

RiskVolume make_risk_volume(const RiskProblem& problem, const std::vector<double>& values, std::string scenario_hash) {
  if (values.size() != problem.spec.size()) fail(ErrorKind::Argument, "risk values do not match the grid");
  RiskVolume vol{problem.spec, std::vector<float>(values.size()), problem.exposure.classes, std::move(scenario_hash)};
  for (std::size_t v = 0; v < values.size(); ++v)
    vol.values[v] = problem.occupancy.blocked[v] ? static_cast<float>(kBlockedRisk) : static_cast<float>(values[v]);
  return vol;
}

RiskVolume cumulative_risk_volume(const ScenarioConfig& cfg, const ImpactKernel& kernel, unsigned threads,
                                  std::string scenario_hash) {
  const RiskProblem problem = make_risk_problem(cfg);
  return make_risk_volume(problem, cumulative_risk_gather(problem, kernel, threads), std::move(scenario_hash));
}

const char* to_string(TerrainKind kind) noexcept {
  switch (kind) {
    case TerrainKind::Risk: return "risk";
    case TerrainKind::Acoustic: return "acoustic";
    case TerrainKind::Fused: return "fused";
  }
  return "risk";
}

std::optional<TerrainKind> parse_terrain_kind(const std::string& name) {
  if (name == "risk") return TerrainKind::Risk;
  if (name == "acoustic") return TerrainKind::Acoustic;
  if (name == "fused") return TerrainKind::Fused;
  return std::nullopt;
}

void NoFlyTerrain::validate() const {
  spec.validate();
  if (excluded.size() != spec.size() || blocked.size() != spec.size())
    fail(ErrorKind::Argument, "terrain masks do not match the grid");
  if (!column_classes.empty() && column_classes.size() != spec.column_count())
    fail(ErrorKind::Argument, "terrain column classes do not match the grid");
  for (std::size_t v = 0; v < excluded.size(); ++v)
    if (blocked[v] && !excluded[v]) fail(ErrorKind::Argument, "terrain must exclude every blocked voxel");
}

std::size_t NoFlyTerrain::excluded_count() const {
  return static_cast<std::size_t>(std::count_if(excluded.begin(), excluded.end(), [](std::uint8_t b) { return b != 0; }));
}

std::string NoFlyTerrain::provenance() const {
  std::string out = to_string(kind);
  out += ":";
  out += scenario_hash.empty() ? "-" : scenario_hash;
  if (threshold) out += ":" + format_double(*threshold);
  return out;
}

NoFlyTerrain threshold_terrain(const RiskVolume& volume, double threshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) fail(ErrorKind::Argument, "risk threshold must be > 0");
  NoFlyTerrain t;
  t.spec = volume.spec;
  t.excluded.assign(volume.values.size(), 0);
  t.blocked.assign(volume.values.size(), 0);
  for (std::size_t v = 0; v < volume.values.size(); ++v) {
    if (volume.is_blocked(v)) {
      t.blocked[v] = 1;
      t.excluded[v] = 1;
    } else if (static_cast<double>(volume.values[v]) > threshold) {
      t.excluded[v] = 1;
    }
  }
  t.kind = TerrainKind::Risk;
  t.threshold = threshold;
  t.scenario_hash = volume.scenario_hash;
  t.column_classes = volume.column_classes;
  return t;
}

NoFlyTerrain terrain_from_mask(const GridSpec3& spec, std::vector<std::uint8_t> excluded,
                               std::vector<std::uint8_t> blocked, TerrainKind kind, std::string scenario_hash) {
  NoFlyTerrain t;
  t.spec = spec;
  t.excluded = std::move(excluded);
  t.blocked = blocked.empty() ? std::vector<std::uint8_t>(t.excluded.size(), 0) : std::move(blocked);
  for (std::size_t v = 0; v < t.excluded.size() && v < t.blocked.size(); ++v)
    t.excluded[v] = (t.excluded[v] || t.blocked[v]) ? 1 : 0;
  for (auto& b : t.blocked) b = b ? 1 : 0;
  t.kind = kind;
  t.scenario_hash = std::move(scenario_hash);
  t.validate();
  return t;
}

NoFlyTerrain acoustic_terrain(const GridSpec3& spec, std::span<const CylinderZone> zones, std::string source_hash) {
  spec.validate();
  std::vector<std::uint8_t> excluded(spec.size(), 0);
  for (const auto& zone : zones) {
    if (!(std::isfinite(zone.radius_m) && zone.radius_m > 0.0)) fail(ErrorKind::Domain, "zone radius must be positive");
    if (!(zone.bottom_m <= zone.top_m)) fail(ErrorKind::Domain, "zone bottom must not exceed its top");
    const double r2 = zone.radius_m * zone.radius_m;
    for (std::size_t j = 0; j < spec.dims[1]; ++j)
      for (std::size_t i = 0; i < spec.dims[0]; ++i) {
        const double dx = spec.center_x(i) - zone.center_m.x;
        const double dy = spec.center_y(j) - zone.center_m.y;
        if (dx * dx + dy * dy > r2) continue;
        for (std::size_t k = 0; k < spec.dims[2]; ++k) {
          const double z = spec.center_z(k);
          if (z >= zone.bottom_m && z <= zone.top_m) excluded[spec.index(i, j, k)] = 1;
        }
      }
  }
  return terrain_from_mask(spec, std::move(excluded), {}, TerrainKind::Acoustic, std::move(source_hash));
}

NoFlyTerrain fuse_terrains(std::span<const NoFlyTerrain> terrains) {
  if (terrains.empty()) fail(ErrorKind::Argument, "fusion needs at least one terrain");
  const auto& first = terrains.front();
  NoFlyTerrain out;
  out.spec = first.spec;
  out.excluded.assign(first.spec.size(), 0);
  out.blocked.assign(first.spec.size(), 0);
  out.kind = TerrainKind::Fused;
  out.column_classes = first.column_classes;
  for (const auto& t : terrains) {
    if (!(t.spec == first.spec)) fail(ErrorKind::Extent, "cannot fuse terrains with different grid specs");
    t.validate();
    for (std::size_t v = 0; v < out.excluded.size(); ++v) {
      out.excluded[v] |= t.excluded[v];
      out.blocked[v] |= t.blocked[v];
    }
    if (t.kind == TerrainKind::Fused)
      out.inputs.insert(out.inputs.end(), t.inputs.begin(), t.inputs.end());
    else
      out.inputs.push_back(t.provenance());
    if (out.column_classes.empty()) out.column_classes = t.column_classes;
  }
  std::sort(out.inputs.begin(), out.inputs.end());
  out.inputs.erase(std::unique(out.inputs.begin(), out.inputs.end()), out.inputs.end());
  std::string joined;
  for (const auto& s : out.inputs) joined += s + "\n";
  out.scenario_hash = sha256_hex(joined);
  return out;
}

const char* to_string(ClearanceStatus status) noexcept {
  switch (status) {
    case ClearanceStatus::Open: return "open";
    case ClearanceStatus::Restricted: return "restricted";
    case ClearanceStatus::AboveLimit: return "above_limit";
    case ClearanceStatus::Closed: return "closed";
  }
  return "open";
}

ClearanceField min_clearance(const NoFlyTerrain& terrain, double ceiling_m) {
  terrain.validate();
  if (!(ceiling_m > 0.0)) fail(ErrorKind::Argument, "ceiling must be > 0");
  const auto& s = terrain.spec;
  ClearanceField f;
  f.spec = s.ground();
  f.ceiling_m = ceiling_m;
  f.classes = terrain.column_classes;
  f.clearance_m.assign(s.column_count(), 0.0);
  f.status.assign(s.column_count(), ClearanceStatus::Open);

  for (std::size_t j = 0; j < s.ny(); ++j) {
    for (std::size_t i = 0; i < s.nx(); ++i) {
      const std::size_t c = j * s.nx() + i;
      std::optional<std::size_t> top;
      for (std::size_t k = 0; k < s.nz() && s.center_z(k) <= ceiling_m; ++k)
        if (terrain.excluded[s.index(i, j, k)]) top = k;
      if (!top) continue;
      const double h = s.center_z(*top) + 0.5 * s.spacing[2];
      if (h >= ceiling_m) {
        f.clearance_m[c] = ceiling_m;
        f.status[c] = ClearanceStatus::Closed;
      } else {
        f.clearance_m[c] = std::max(h, 0.0);
        f.status[c] = h > kRegulatoryLimitM ? ClearanceStatus::AboveLimit : ClearanceStatus::Restricted;
      }
    }
  }
  return f;
}

ClearanceSummary summarize_clearance(const ClearanceField& field, GroundClass cls) {
  ClearanceSummary out;
  out.cls = cls;
  std::vector<double> values;
  for (std::size_t c = 0; c < field.status.size(); ++c) {
    if (field.classes.empty() || field.classes[c] != cls) continue;
    ++out.columns;
    if (field.status[c] == ClearanceStatus::Closed) {
      ++out.closed;
      continue;
    }
    if (field.status[c] == ClearanceStatus::Open) ++out.open;
    values.push_back(field.clearance_m[c]);
  }
  if (values.empty()) {
    out.min_m = out.median_m = out.max_m = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  std::sort(values.begin(), values.end());
  out.min_m = values.front();
  out.max_m = values.back();
  const std::size_t n = values.size();
  out.median_m = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return out;
}

std::string clearance_csv(const ClearanceField& field, std::optional<double> threshold,
                          const std::string& scenario_hash) {
  std::ostringstream out;
  out << "# ceiling_m=" << format_double(field.ceiling_m) << " regulatory_limit_m=" << format_double(kRegulatoryLimitM)
      << " threshold=" << (threshold ? format_double(*threshold) : std::string("none"))
      << " scenario_sha256=" << (scenario_hash.empty() ? std::string("none") : scenario_hash) << "\n";
  out << "x_m,y_m,ground_class,clearance_m,status\n";
  for (std::size_t j = 0; j < field.spec.ny(); ++j) {
    for (std::size_t i = 0; i < field.spec.nx(); ++i) {
      const std::size_t c = field.spec.index(i, j);
      const GroundClass cls = field.classes.empty() ? GroundClass::None : field.classes[c];
      out << format_double(field.spec.center_x(i)) << ',' << format_double(field.spec.center_y(j)) << ','
          << to_string(cls) << ',' << format_double(field.clearance_m[c]) << ',' << to_string(field.status[c]) << "\n";
    }
  }
  return out.str();
}

std::string export_terrain_mesh(const NoFlyTerrain& terrain) {
  terrain.validate();
  const auto& s = terrain.spec;
  const std::size_t lx = s.nx() + 1;
  const std::size_t ly = s.ny() + 1;

  // Corner offsets of each face, counter-clockwise seen from outside.
  using Corner = std::array<int, 3>;
  static constexpr std::array<std::array<Corner, 4>, 6> kFaces{{
      {{{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {0, 1, 0}}},  // -x
      {{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 1}}},  // +x
      {{{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}}},  // -y
      {{{0, 1, 0}, {0, 1, 1}, {1, 1, 1}, {1, 1, 0}}},  // +y
      {{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}}},  // -z
      {{{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}},  // +z
  }};
  static constexpr std::array<Corner, 6> kNormals{{{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

  auto excluded_at = [&](long i, long j, long k) {
    if (i < 0 || j < 0 || k < 0 || i >= static_cast<long>(s.nx()) || j >= static_cast<long>(s.ny()) ||
        k >= static_cast<long>(s.nz()))
      return false;
    return terrain.excluded[s.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k))] != 0;
  };

  std::unordered_map<std::size_t, std::size_t> vertex_ids;
  std::vector<std::array<std::size_t, 3>> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
  auto vertex = [&](std::size_t i, std::size_t j, std::size_t k) {
    const std::size_t key = (k * ly + j) * lx + i;
    auto [it, inserted] = vertex_ids.try_emplace(key, vertices.size() + 1);
    if (inserted) vertices.push_back({i, j, k});
    return it->second;
  };

  for (std::size_t k = 0; k < s.nz(); ++k) {
    for (std::size_t j = 0; j < s.ny(); ++j) {
      for (std::size_t i = 0; i < s.nx(); ++i) {
        if (!terrain.excluded[s.index(i, j, k)]) continue;
        for (std::size_t f = 0; f < 6; ++f) {
          const auto& n = kNormals[f];
          if (excluded_at(static_cast<long>(i) + n[0], static_cast<long>(j) + n[1], static_cast<long>(k) + n[2]))
            continue;
          std::array<std::size_t, 4> q{};
          for (std::size_t c = 0; c < 4; ++c) {
            const auto& o = kFaces[f][c];
            q[c] = vertex(i + static_cast<std::size_t>(o[0]), j + static_cast<std::size_t>(o[1]),
                          k + static_cast<std::size_t>(o[2]));
          }
          triangles.push_back({q[0], q[1], q[2]});
          triangles.push_back({q[0], q[2], q[3]});
        }
      }
    }
  }

  std::ostringstream out;
  out << "# no-fly terrain boundary mesh\n";
  out << "# kind " << to_string(terrain.kind) << "\n";
  out << "# scenario_sha256 " << (terrain.scenario_hash.empty() ? std::string("none") : terrain.scenario_hash) << "\n";
  out << "# vertices " << vertices.size() << " triangles " << triangles.size() << "\n";
  out << "o terrain\n";
  for (const auto& v : vertices)
    out << "v " << format_double(s.origin[0] + static_cast<double>(v[0]) * s.spacing[0]) << ' '
        << format_double(s.origin[1] + static_cast<double>(v[1]) * s.spacing[1]) << ' '
        << format_double(s.origin[2] + static_cast<double>(v[2]) * s.spacing[2]) << "\n";
  for (const auto& t : triangles) out << "f " << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  return out.str();
}

}  // namespace vrt
