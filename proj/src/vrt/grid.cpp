#include "vrt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "vrt/error.hpp"
#include "vrt/json_util.hpp"

namespace bg = boost::geometry;

namespace vrt {

namespace {

using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, true, false>;
using BgBox = bg::model::box<BgPoint>;

BgPolygon to_bg(const Polygon& polygon) {
  BgPolygon out;
  for (const auto& p : polygon) out.outer().emplace_back(p.x, p.y);
  bg::correct(out);
  return out;
}

// Polygon with its bounding box, for repeated point queries.
struct PreparedPolygon {
  BgPolygon shape;
  BgBox box;

  explicit PreparedPolygon(const Polygon& polygon) : shape(to_bg(polygon)) { bg::envelope(shape, box); }

  bool covers(double x, double y) const {
    if (x < box.min_corner().x() || x > box.max_corner().x() || y < box.min_corner().y() ||
        y > box.max_corner().y())
      return false;
    return bg::covered_by(BgPoint(x, y), shape);
  }
};

void check_polygon(const Polygon& polygon, const std::string& path) {
  if (polygon.size() < 3) fail(ErrorKind::Geometry, path + ": polygon needs at least 3 vertices");
  BgPolygon shape = to_bg(polygon);
  bg::validity_failure_type failure;
  if (!bg::is_valid(shape, failure)) {
    if (failure == bg::failure_self_intersections)
      fail(ErrorKind::Geometry, path + ": polygon is self-intersecting");
    fail(ErrorKind::Geometry, path + ": invalid polygon (" + bg::validity_failure_type_message(failure) + ")");
  }
}

Polygon parse_polygon(const detail::json& v, const std::string& path) {
  detail::require_array(v, path);
  Polygon out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string vp = detail::child_path(path, i);
    const auto& pt = detail::require_array(v[i], vp);
    if (pt.size() != 2) detail::parse_fail(vp, "expected [x, y]");
    out.push_back({detail::finite_number(pt[0], detail::child_path(vp, 0)),
                   detail::finite_number(pt[1], detail::child_path(vp, 1))});
  }
  // Tolerate an explicitly closed ring.
  if (out.size() > 3 && out.front() == out.back()) out.pop_back();
  return out;
}

detail::json polygon_json(const Polygon& polygon) {
  detail::json arr = detail::json::array();
  for (const auto& p : polygon) arr.push_back({p.x, p.y});
  return arr;
}

GroundUse parse_ground_use(const detail::json& v, const std::string& path) {
  if (!v.is_string()) detail::parse_fail(path, "expected \"sidewalk\", \"road\" or \"other\"");
  const auto s = v.get<std::string>();
  if (s == "sidewalk") return GroundUse::Sidewalk;
  if (s == "road") return GroundUse::Road;
  if (s == "other") return GroundUse::Other;
  detail::parse_fail(path, "unknown ground-use class \"" + s + "\"");
}

const char* ground_use_name(GroundUse use) {
  switch (use) {
    case GroundUse::Sidewalk: return "sidewalk";
    case GroundUse::Road: return "road";
    case GroundUse::Other: return "other";
  }
  return "other";
}

void check_inside_extent(const Polygon& polygon, const Extent& extent, const std::string& path) {
  for (const auto& p : polygon)
    if (!extent.contains(p.x, p.y)) fail(ErrorKind::Geometry, path + ": vertex lies outside the model extent");
}

void check_centers_inside(const Extent& extent, double x0, double x1, double y0, double y1) {
  if (!extent.contains(x0, y0) || !extent.contains(x1, y1))
    fail(ErrorKind::Extent, "grid cell centers extend beyond the urban model extent");
}

}  // namespace

void GridSpec2::validate() const {
  for (int a = 0; a < 2; ++a) {
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) fail(ErrorKind::Argument, "grid spacing must be > 0");
    if (!std::isfinite(origin[a])) fail(ErrorKind::Argument, "grid origin must be finite");
    if (dims[a] < 1) fail(ErrorKind::Argument, "grid dims must be >= 1");
  }
  if (dims[0] > std::numeric_limits<std::size_t>::max() / dims[1])
    fail(ErrorKind::Argument, "grid cell count overflows");
}

void GridSpec3::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) fail(ErrorKind::Argument, "grid spacing must be > 0");
    if (!std::isfinite(origin[a])) fail(ErrorKind::Argument, "grid origin must be finite");
    if (dims[a] < 1) fail(ErrorKind::Argument, "grid dims must be >= 1");
  }
  const std::size_t max = std::numeric_limits<std::size_t>::max();
  if (dims[0] > max / dims[1] || dims[0] * dims[1] > max / dims[2])
    fail(ErrorKind::Argument, "grid cell count overflows");
}

void ScalarField2::validate() const {
  spec.validate();
  if (values.size() != spec.size()) fail(ErrorKind::Argument, "field value count does not match grid dims");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorKind::Argument, "field values must be finite");
}

void ScalarField3::validate() const {
  spec.validate();
  if (values.size() != spec.size()) fail(ErrorKind::Argument, "field value count does not match grid dims");
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorKind::Argument, "field values must be finite");
}

double UrbanModel::elevation_at(double x, double y) const noexcept {
  if (!elevation) return 0.0;
  const auto& s = elevation->spec;
  auto cell = [](double v, double o, double d, std::size_t n) {
    double f = std::floor((v - o) / d);
    if (f < 0.0) return std::size_t{0};
    auto i = static_cast<std::size_t>(f);
    return std::min(i, n - 1);
  };
  return elevation->at(cell(x, s.origin[0], s.spacing[0], s.dims[0]), cell(y, s.origin[1], s.spacing[1], s.dims[1]));
}

bool UrbanModel::operator==(const UrbanModel& other) const {
  if (!(extent == other.extent && buildings == other.buildings && ground_use == other.ground_use)) return false;
  if (elevation.has_value() != other.elevation.has_value()) return false;
  if (!elevation) return true;
  return elevation->spec == other.elevation->spec && elevation->values == other.elevation->values;
}

bool covers(const Polygon& polygon, double x, double y) { return PreparedPolygon(polygon).covers(x, y); }

double polygon_area(const Polygon& polygon) { return bg::area(to_bg(polygon)); }

UrbanModel load_urban_model(std::string_view json_text) {
  detail::json doc;
  try {
    doc = detail::json::parse(json_text);
  } catch (const detail::json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("/: malformed JSON: ") + e.what());
  }
  detail::require_object(doc, "");

  UrbanModel model;
  const auto& ext = detail::require_array(detail::member(doc, "extent", ""), "/extent");
  if (ext.size() != 4) detail::parse_fail("/extent", "expected [xmin, ymin, xmax, ymax]");
  model.extent = {detail::finite_number(ext[0], "/extent/0"), detail::finite_number(ext[1], "/extent/1"),
                  detail::finite_number(ext[2], "/extent/2"), detail::finite_number(ext[3], "/extent/3")};
  if (!(model.extent.xmin < model.extent.xmax && model.extent.ymin < model.extent.ymax))
    detail::parse_fail("/extent", "expected xmin < xmax and ymin < ymax");

  const auto& buildings = detail::require_array(detail::member(doc, "buildings", ""), "/buildings");
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const std::string path = detail::child_path("/buildings", i);
    detail::require_object(buildings[i], path);
    Building b;
    b.footprint = parse_polygon(detail::member(buildings[i], "footprint", path), path + "/footprint");
    b.height_m = detail::number_member(buildings[i], "height_m", path);
    if (b.height_m < 0.0) detail::parse_fail(path + "/height_m", "height must be >= 0");
    check_polygon(b.footprint, path + "/footprint");
    check_inside_extent(b.footprint, model.extent, path + "/footprint");
    model.buildings.push_back(std::move(b));
  }

  if (const auto* uses = detail::optional_member(doc, "ground_use")) {
    detail::require_array(*uses, "/ground_use");
    for (std::size_t i = 0; i < uses->size(); ++i) {
      const std::string path = detail::child_path("/ground_use", i);
      const auto& u = detail::require_object((*uses)[i], path);
      GroundUsePolygon g;
      g.polygon = parse_polygon(detail::member(u, "polygon", path), path + "/polygon");
      g.use = parse_ground_use(detail::member(u, "class", path), path + "/class");
      if (const auto* pr = detail::optional_member(u, "priority")) {
        if (!pr->is_number_integer()) detail::parse_fail(path + "/priority", "expected an integer");
        g.priority = pr->get<int>();
      }
      check_polygon(g.polygon, path + "/polygon");
      check_inside_extent(g.polygon, model.extent, path + "/polygon");
      model.ground_use.push_back(std::move(g));
    }
  }

  if (const auto* elev = detail::optional_member(doc, "ground_elevation")) {
    const std::string path = "/ground_elevation";
    detail::require_object(*elev, path);
    ScalarField2 field;
    const auto& o = detail::require_array(detail::member(*elev, "origin", path), path + "/origin");
    const auto& s = detail::require_array(detail::member(*elev, "spacing", path), path + "/spacing");
    const auto& d = detail::require_array(detail::member(*elev, "dims", path), path + "/dims");
    if (o.size() != 2 || s.size() != 2 || d.size() != 2) detail::parse_fail(path, "origin/spacing/dims need 2 entries");
    for (std::size_t a = 0; a < 2; ++a) {
      field.spec.origin[a] = detail::finite_number(o[a], path + "/origin/" + std::to_string(a));
      field.spec.spacing[a] = detail::finite_number(s[a], path + "/spacing/" + std::to_string(a));
      field.spec.dims[a] = detail::count_value(d[a], path + "/dims/" + std::to_string(a));
    }
    const auto& vals = detail::require_array(detail::member(*elev, "values_m", path), path + "/values_m");
    for (std::size_t i = 0; i < vals.size(); ++i)
      field.values.push_back(detail::finite_number(vals[i], detail::child_path(path + "/values_m", i)));
    try {
      field.validate();
    } catch (const Error& e) {
      detail::parse_fail(path, e.what());
    }
    model.elevation = std::move(field);
  }
  return model;
}

std::string serialize_urban_model(const UrbanModel& model) {
  detail::json doc;
  doc["extent"] = {model.extent.xmin, model.extent.ymin, model.extent.xmax, model.extent.ymax};
  doc["buildings"] = detail::json::array();
  for (const auto& b : model.buildings)
    doc["buildings"].push_back({{"footprint", polygon_json(b.footprint)}, {"height_m", b.height_m}});
  doc["ground_use"] = detail::json::array();
  for (const auto& g : model.ground_use) {
    detail::json u = {{"polygon", polygon_json(g.polygon)}, {"class", ground_use_name(g.use)}};
    if (g.priority != 0) u["priority"] = g.priority;
    doc["ground_use"].push_back(std::move(u));
  }
  if (model.elevation) {
    const auto& s = model.elevation->spec;
    doc["ground_elevation"] = {{"origin", {s.origin[0], s.origin[1]}},
                               {"spacing", {s.spacing[0], s.spacing[1]}},
                               {"dims", {s.dims[0], s.dims[1]}},
                               {"values_m", model.elevation->values}};
  }
  return doc.dump(2);
}

std::size_t OccupancyMask::blocked_count() const {
  return static_cast<std::size_t>(std::count(blocked.begin(), blocked.end(), std::uint8_t{1}));
}

OccupancyMask rasterize_occupancy(const UrbanModel& model, const GridSpec3& spec) {
  spec.validate();
  if (spec.spacing[0] != spec.spacing[1]) fail(ErrorKind::Argument, "horizontal grid spacing must be uniform");
  check_centers_inside(model.extent, spec.center_x(0), spec.center_x(spec.nx() - 1), spec.center_y(0),
                       spec.center_y(spec.ny() - 1));

  std::vector<PreparedPolygon> footprints;
  footprints.reserve(model.buildings.size());
  for (const auto& b : model.buildings) footprints.emplace_back(b.footprint);

  OccupancyMask mask{spec, std::vector<std::uint8_t>(spec.size(), 0)};
  for (std::size_t j = 0; j < spec.ny(); ++j) {
    for (std::size_t i = 0; i < spec.nx(); ++i) {
      const double x = spec.center_x(i);
      const double y = spec.center_y(j);
      double roof = 0.0;
      for (std::size_t b = 0; b < footprints.size(); ++b)
        if (footprints[b].covers(x, y)) roof = std::max(roof, model.buildings[b].height_m);
      const double top = model.elevation_at(x, y) + roof;
      for (std::size_t k = 0; k < spec.nz(); ++k)
        if (spec.center_z(k) <= top) mask.blocked[spec.index(i, j, k)] = 1;
    }
  }
  return mask;
}

const char* to_string(GroundClass c) noexcept {
  switch (c) {
    case GroundClass::Pedestrian: return "pedestrian";
    case GroundClass::Vehicle: return "vehicle";
    case GroundClass::None: return "none";
  }
  return "none";
}

std::size_t GroundUseGrid::count(GroundClass c) const {
  return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), c));
}

GroundUseGrid classify_ground(const UrbanModel& model, const GridSpec2& spec) {
  spec.validate();
  check_centers_inside(model.extent, spec.center_x(0), spec.center_x(spec.nx() - 1), spec.center_y(0),
                       spec.center_y(spec.ny() - 1));

  std::vector<PreparedPolygon> footprints;
  for (const auto& b : model.buildings) footprints.emplace_back(b.footprint);
  std::vector<PreparedPolygon> uses;
  for (const auto& g : model.ground_use) uses.emplace_back(g.polygon);

  auto class_of = [](GroundUse u) {
    switch (u) {
      case GroundUse::Sidewalk: return GroundClass::Pedestrian;
      case GroundUse::Road: return GroundClass::Vehicle;
      case GroundUse::Other: return GroundClass::None;
    }
    return GroundClass::None;
  };

  GroundUseGrid grid{spec, std::vector<GroundClass>(spec.size(), GroundClass::None)};
  for (std::size_t j = 0; j < spec.ny(); ++j) {
    for (std::size_t i = 0; i < spec.nx(); ++i) {
      const double x = spec.center_x(i);
      const double y = spec.center_y(j);
      bool under_building = false;
      for (const auto& f : footprints)
        if (f.covers(x, y)) {
          under_building = true;
          break;
        }
      if (under_building) continue;

      std::optional<int> best_priority;
      GroundClass best = GroundClass::None;
      bool ambiguous = false;
      for (std::size_t u = 0; u < uses.size(); ++u) {
        if (!uses[u].covers(x, y)) continue;
        const auto& g = model.ground_use[u];
        const GroundClass c = class_of(g.use);
        if (!best_priority || g.priority > *best_priority) {
          best_priority = g.priority;
          best = c;
          ambiguous = false;
        } else if (g.priority == *best_priority && c != best) {
          ambiguous = true;
        }
      }
      if (ambiguous)
        fail(ErrorKind::Geometry, "ambiguous ground use at (" + std::to_string(x) + ", " + std::to_string(y) +
                                      "): overlapping polygons of different class share priority " +
                                      std::to_string(*best_priority));
      grid.classes[spec.index(i, j)] = best;
    }
  }
  return grid;
}

}  // namespace vrt
