#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vrt {

// Sampled grids use the lower-corner convention: cell i along an axis spans
// [origin + i*spacing, origin + (i+1)*spacing] and is sampled at its center.
// Values are stored row-major with x varying fastest.

struct GridSpec2 {
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> spacing{2.0, 2.0};
  std::array<std::size_t, 2> dims{1, 1};

  std::size_t nx() const noexcept { return dims[0]; }
  std::size_t ny() const noexcept { return dims[1]; }
  std::size_t size() const noexcept { return dims[0] * dims[1]; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * dims[0] + i; }
  double center_x(std::size_t i) const noexcept { return origin[0] + (static_cast<double>(i) + 0.5) * spacing[0]; }
  double center_y(std::size_t j) const noexcept { return origin[1] + (static_cast<double>(j) + 0.5) * spacing[1]; }
  double cell_area() const noexcept { return spacing[0] * spacing[1]; }

  /// Throws Error(Argument) when spacing or dims are out of range.
  void validate() const;

  bool operator==(const GridSpec2&) const = default;
};

struct GridSpec3 {
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> spacing{2.0, 2.0, 2.0};
  std::array<std::size_t, 3> dims{1, 1, 1};

  std::size_t nx() const noexcept { return dims[0]; }
  std::size_t ny() const noexcept { return dims[1]; }
  std::size_t nz() const noexcept { return dims[2]; }
  std::size_t size() const noexcept { return dims[0] * dims[1] * dims[2]; }
  std::size_t column_count() const noexcept { return dims[0] * dims[1]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return (k * dims[1] + j) * dims[0] + i;
  }
  double center_x(std::size_t i) const noexcept { return origin[0] + (static_cast<double>(i) + 0.5) * spacing[0]; }
  double center_y(std::size_t j) const noexcept { return origin[1] + (static_cast<double>(j) + 0.5) * spacing[1]; }
  double center_z(std::size_t k) const noexcept { return origin[2] + (static_cast<double>(k) + 0.5) * spacing[2]; }

  /// Horizontal footprint of the volume.
  GridSpec2 ground() const noexcept { return {{origin[0], origin[1]}, {spacing[0], spacing[1]}, {dims[0], dims[1]}}; }

  void validate() const;

  bool operator==(const GridSpec3&) const = default;
};

struct ScalarField2 {
  GridSpec2 spec;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[spec.index(i, j)]; }
  /// Checks value count and finiteness.
  void validate() const;
};

struct ScalarField3 {
  GridSpec3 spec;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j, std::size_t k) const { return values[spec.index(i, j, k)]; }
  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// Open ring; the closing vertex is implied.
using Polygon = std::vector<Point2>;

struct Extent {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;
  bool contains(double x, double y) const noexcept { return x >= xmin && x <= xmax && y >= ymin && y <= ymax; }
  bool operator==(const Extent&) const = default;
};

struct Building {
  Polygon footprint;
  double height_m = 0.0;
  bool operator==(const Building&) const = default;
};

enum class GroundUse { Sidewalk, Road, Other };

struct GroundUsePolygon {
  Polygon polygon;
  GroundUse use = GroundUse::Other;
  int priority = 0;
  bool operator==(const GroundUsePolygon&) const = default;
};

struct UrbanModel {
  Extent extent;
  std::vector<Building> buildings;
  std::vector<GroundUsePolygon> ground_use;
  /// Optional ground elevation raster; flat z = 0 when absent.
  std::optional<ScalarField2> elevation;

  /// Ground elevation at (x, y): containing raster cell, clamped at the raster edge.
  double elevation_at(double x, double y) const noexcept;

  bool operator==(const UrbanModel& other) const;
};

/// Parses and validates an urban-model JSON document.
/// Throws Error(Parse) naming the offending JSON path, or Error(Geometry)
/// for degenerate or self-intersecting polygons.
UrbanModel load_urban_model(std::string_view json_text);

/// Inverse of load_urban_model.
std::string serialize_urban_model(const UrbanModel& model);

/// True iff (x, y) lies inside or on the boundary of the polygon.
bool covers(const Polygon& polygon, double x, double y);

double polygon_area(const Polygon& polygon);

struct OccupancyMask {
  GridSpec3 spec;
  std::vector<std::uint8_t> blocked;

  bool is_blocked(std::size_t i, std::size_t j, std::size_t k) const { return blocked[spec.index(i, j, k)] != 0; }
  std::size_t blocked_count() const;
};

/// Voxel is blocked iff its center lies inside (or on the boundary of) a
/// building prism, or at or below the ground surface.
OccupancyMask rasterize_occupancy(const UrbanModel& model, const GridSpec3& spec);

enum class GroundClass : std::uint8_t { None = 0, Pedestrian = 1, Vehicle = 2 };

const char* to_string(GroundClass c) noexcept;

struct GroundUseGrid {
  GridSpec2 spec;
  std::vector<GroundClass> classes;

  GroundClass at(std::size_t i, std::size_t j) const { return classes[spec.index(i, j)]; }
  std::size_t count(GroundClass c) const;
};

/// Per-cell class from the highest-priority ground-use polygon covering the
/// cell center. Cells under a building footprint are None.
GroundUseGrid classify_ground(const UrbanModel& model, const GridSpec2& spec);

}  // namespace vrt
