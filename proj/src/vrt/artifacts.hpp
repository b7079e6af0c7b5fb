#pragma once

#include <filesystem>
#include <string>

#include "vrt/gridio.hpp"
#include "vrt/impact.hpp"
#include "vrt/terrain.hpp"

namespace vrt {

// Typed artifacts on top of the grid container. Every artifact header carries
// "artifact" (its type) and "scenario_sha256".

Container kernel_container(const ImpactKernel& kernel, const std::string& scenario_hash);
ImpactKernel kernel_from_container(const Container& c);

Container volume_container(const RiskVolume& volume);
RiskVolume volume_from_container(const Container& c);

Container terrain_container(const NoFlyTerrain& terrain);
NoFlyTerrain terrain_from_container(const Container& c);

Container field_container(const ScalarField2& field, const std::string& scenario_hash = {});
ScalarField2 field_from_container(const Container& c);

/// SHA-256 of the container payload bytes.
std::string payload_hash(const Container& c);

void write_kernel(const std::filesystem::path& path, const ImpactKernel& kernel, const std::string& scenario_hash);
ImpactKernel read_kernel(const std::filesystem::path& path);
void write_volume(const std::filesystem::path& path, const RiskVolume& volume);
RiskVolume read_volume(const std::filesystem::path& path);
void write_terrain(const std::filesystem::path& path, const NoFlyTerrain& terrain);
NoFlyTerrain read_terrain(const std::filesystem::path& path);
ScalarField2 read_field(const std::filesystem::path& path);

nlohmann::json impact_model_json(const ImpactModel& model);
nlohmann::json grid_json(const GridSpec3& spec);
GridSpec3 grid_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace vrt
