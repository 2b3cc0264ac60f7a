#pragma once

// Synthetic scene generators and the on-disk scene bundle
// (<prefix>.intensity.pfm, <prefix>.depth.pfm, <prefix>.meta.json).

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "sp3d/forward.hpp"

namespace sp3d {

// Axis-aligned rectangular plateaus of constant depth and intensity.
// Boundaries snap to multiples of `quantum` (default side/8) so plateaus
// stay aligned to the coarsest stage blocks.
struct StepsParams {
  Index cells_x = 3;
  Index cells_y = 2;
  Index quantum = 0;  // 0 -> side / 8
  double depth_min_m = 1.5;
  double depth_max_m = 4.0;
  double total_flux = 500.0;  // expected photons per all-on pattern
};

// Lambertian-shaded spheres in front of a flat background plane.
struct SpheresParams {
  int count = 2;
  double background_m = 3.0;
  double center_min_m = 2.62;
  double center_max_m = 2.85;
  double radius_min_m = 0.055;
  double radius_max_m = 0.09;
  double extent_m = 0.5;  // physical width of the field of view
  double background_albedo = 0.25;
  double total_flux = 500.0;
};

// Tilted background plane plus a tilted foreground panel; smooth depth
// gradients everywhere, nothing is piecewise constant.
struct PlanesParams {
  double base_min_m = 2.0;
  double base_max_m = 3.0;
  double tilt_max_m = 1.0;
  double total_flux = 500.0;
};

Scene make_steps_scene(Index side, std::uint64_t seed, const StepsParams& params = {});
Scene make_spheres_scene(Index side, std::uint64_t seed, const SpheresParams& params = {});
Scene make_planes_scene(Index side, std::uint64_t seed, const PlanesParams& params = {});

// Default-parameter dispatch by kind name; unknown kinds are a usage error.
Scene generate_scene(const std::string& kind, Index side, std::uint64_t seed);

struct SceneMeta {
  std::string kind;
  Index side = 0;
  std::uint64_t seed = 0;
  nlohmann::json params;
};

struct SceneBundle {
  Scene scene;
  SceneMeta meta;
};

void write_scene_bundle(const std::filesystem::path& prefix, const Scene& scene,
                        const SceneMeta& meta);
SceneBundle read_scene_bundle(const std::filesystem::path& prefix);

}  // namespace sp3d
