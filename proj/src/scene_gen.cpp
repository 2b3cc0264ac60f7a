#include "sp3d/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <vector>

#include "sp3d/errors.hpp"
#include "sp3d/image_io.hpp"

namespace sp3d {

using nlohmann::json;

namespace {

void require_pow2_side(Index side) {
  if (!is_pow2(side)) throw SizeError("scene: side must be a power of two");
}

void scale_total_flux(Image& intensity, double total_flux) {
  const double sum = intensity.sum();
  if (sum > 0.0 && total_flux > 0.0) intensity *= total_flux / sum;
}

// Distinct interior cut positions snapped to the quantum grid.
std::vector<Index> pick_cuts(std::mt19937_64& rng, Index side, Index quantum, Index n_cells) {
  std::vector<Index> cuts;
  if (n_cells <= 1) return cuts;
  const Index slots = side / quantum;  // candidate boundaries at 1..slots-1
  std::set<Index> chosen;
  std::uniform_int_distribution<Index> pick(1, slots - 1);
  while (static_cast<Index>(chosen.size()) < std::min(n_cells - 1, slots - 1))
    chosen.insert(pick(rng) * quantum);
  cuts.assign(chosen.begin(), chosen.end());
  return cuts;
}

}  // namespace

Scene make_steps_scene(Index side, std::uint64_t seed, const StepsParams& params) {
  require_pow2_side(side);
  Index quantum = params.quantum > 0 ? params.quantum : std::max<Index>(1, side / 8);
  if (side % quantum != 0) throw SizeError("steps scene: quantum must divide the side");
  if (params.cells_x < 1 || params.cells_y < 1)
    throw SizeError("steps scene: need at least one cell per axis");

  std::mt19937_64 rng(seed);
  const auto cuts_x = pick_cuts(rng, side, quantum, params.cells_x);
  const auto cuts_y = pick_cuts(rng, side, quantum, params.cells_y);

  const Index nx = static_cast<Index>(cuts_x.size()) + 1;
  const Index ny = static_cast<Index>(cuts_y.size()) + 1;
  std::uniform_real_distribution<double> depth_draw(params.depth_min_m, params.depth_max_m);
  std::uniform_real_distribution<double> weight_draw(0.3, 1.0);
  std::vector<double> depths, weights;
  for (Index i = 0; i < nx * ny; ++i) {
    depths.push_back(depth_draw(rng));
    weights.push_back(weight_draw(rng));
  }

  auto cell_of = [](const std::vector<Index>& cuts, Index v) {
    Index c = 0;
    while (c < static_cast<Index>(cuts.size()) && v >= cuts[static_cast<std::size_t>(c)]) ++c;
    return c;
  };

  Scene scene;
  scene.side = side;
  scene.intensity = Image::Zero(side, side);
  scene.depth = Image::Zero(side, side);
  for (Index p = 0; p < side; ++p) {
    const Index cy = cell_of(cuts_y, p);
    for (Index q = 0; q < side; ++q) {
      const Index cell = cy * nx + cell_of(cuts_x, q);
      scene.depth(p, q) = depths[static_cast<std::size_t>(cell)];
      scene.intensity(p, q) = weights[static_cast<std::size_t>(cell)];
    }
  }
  scale_total_flux(scene.intensity, params.total_flux);
  return scene;
}

Scene make_spheres_scene(Index side, std::uint64_t seed, const SpheresParams& params) {
  require_pow2_side(side);
  if (params.count < 0) throw SizeError("spheres scene: count must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center_uv(-0.22, 0.22);
  std::uniform_real_distribution<double> center_z(params.center_min_m, params.center_max_m);
  std::uniform_real_distribution<double> radius(params.radius_min_m, params.radius_max_m);
  std::uniform_real_distribution<double> albedo(0.7, 1.0);

  struct Ball {
    double u, v, z, r, a;
  };
  std::vector<Ball> balls;
  for (int i = 0; i < params.count; ++i)
    balls.push_back({center_uv(rng) * params.extent_m, center_uv(rng) * params.extent_m,
                     center_z(rng), radius(rng), albedo(rng)});

  Scene scene;
  scene.side = side;
  scene.intensity = Image::Constant(side, side, params.background_albedo);
  scene.depth = Image::Constant(side, side, params.background_m);
  const double pitch = params.extent_m / static_cast<double>(side);
  for (Index p = 0; p < side; ++p) {
    const double v = (static_cast<double>(p) + 0.5) * pitch - params.extent_m / 2.0;
    for (Index q = 0; q < side; ++q) {
      const double u = (static_cast<double>(q) + 0.5) * pitch - params.extent_m / 2.0;
      for (const auto& b : balls) {
        const double rho2 = (u - b.u) * (u - b.u) + (v - b.v) * (v - b.v);
        if (rho2 >= b.r * b.r) continue;
        const double bulge = std::sqrt(b.r * b.r - rho2);
        const double z = b.z - bulge;  // front hemisphere toward the camera
        if (z < scene.depth(p, q)) {
          scene.depth(p, q) = z;
          scene.intensity(p, q) = b.a * (bulge / b.r);  // lambertian falloff
        }
      }
    }
  }
  scale_total_flux(scene.intensity, params.total_flux);
  return scene;
}

Scene make_planes_scene(Index side, std::uint64_t seed, const PlanesParams& params) {
  require_pow2_side(side);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> base(params.base_min_m, params.base_max_m);
  std::uniform_real_distribution<double> tilt(-params.tilt_max_m, params.tilt_max_m);
  std::uniform_real_distribution<double> frac(0.2, 0.45);

  const double back_z = base(rng) + 1.0;
  const double back_gu = tilt(rng), back_gv = tilt(rng);
  const double panel_z = base(rng);
  const double panel_gu = tilt(rng), panel_gv = tilt(rng);
  const double pu = frac(rng), pv = frac(rng);  // panel extents as frame fractions
  const double cu = 0.5, cv = 0.5;

  Scene scene;
  scene.side = side;
  scene.intensity = Image::Zero(side, side);
  scene.depth = Image::Zero(side, side);
  for (Index p = 0; p < side; ++p) {
    const double v = (static_cast<double>(p) + 0.5) / static_cast<double>(side) - 0.5;
    for (Index q = 0; q < side; ++q) {
      const double u = (static_cast<double>(q) + 0.5) / static_cast<double>(side) - 0.5;
      double z = back_z + back_gu * u + back_gv * v;
      double shade = 0.45 + 0.3 * (u + 0.5);
      if (std::abs(u + 0.5 - cu) < pu / 2.0 && std::abs(v + 0.5 - cv) < pv / 2.0) {
        z = panel_z + panel_gu * u + panel_gv * v;
        shade = 0.8 + 0.2 * (v + 0.5);
      }
      scene.depth(p, q) = std::clamp(z, 0.5, 7.0);
      scene.intensity(p, q) = shade;
    }
  }
  scale_total_flux(scene.intensity, params.total_flux);
  return scene;
}

Scene generate_scene(const std::string& kind, Index side, std::uint64_t seed) {
  if (kind == "steps") return make_steps_scene(side, seed);
  if (kind == "spheres") return make_spheres_scene(side, seed);
  if (kind == "planes") return make_planes_scene(side, seed);
  throw ConfigError("scene: kind must be steps, spheres, or planes (got '" + kind + "')");
}

void write_scene_bundle(const std::filesystem::path& prefix, const Scene& scene,
                        const SceneMeta& meta) {
  if (scene.side != meta.side)
    throw SizeError("scene bundle: metadata side does not match the maps");
  write_pfm(prefix.string() + ".intensity.pfm", scene.intensity);
  write_pfm(prefix.string() + ".depth.pfm", scene.depth);
  json j;
  j["kind"] = meta.kind;
  j["side"] = meta.side;
  j["seed"] = meta.seed;
  j["units"] = {{"intensity", "photons/pixel/dwell"}, {"depth", "m"}};
  j["params"] = meta.params.is_null() ? json::object() : meta.params;
  std::ofstream out(prefix.string() + ".meta.json", std::ios::binary);
  if (!out) throw IoError("scene bundle: cannot open " + prefix.string() + ".meta.json");
  out << j.dump(2) << '\n';
}

SceneBundle read_scene_bundle(const std::filesystem::path& prefix) {
  SceneBundle bundle;
  bundle.scene.intensity = read_pfm(prefix.string() + ".intensity.pfm");
  bundle.scene.depth = read_pfm(prefix.string() + ".depth.pfm");

  std::ifstream in(prefix.string() + ".meta.json");
  if (!in) throw IoError("scene bundle: cannot open " + prefix.string() + ".meta.json");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("scene bundle: bad metadata: " + std::string(e.what()));
  }
  bundle.meta.kind = j.value("kind", "");
  bundle.meta.side = j.at("side").get<Index>();
  bundle.meta.seed = j.value("seed", std::uint64_t{0});
  bundle.meta.params = j.value("params", json::object());

  const auto& s = bundle.scene;
  if (s.intensity.rows() != s.intensity.cols() || s.depth.rows() != s.depth.cols() ||
      s.intensity.rows() != s.depth.rows())
    throw SizeError("scene bundle: intensity and depth maps must be square and equal-sized");
  bundle.scene.side = s.intensity.rows();
  if (bundle.scene.side != bundle.meta.side)
    throw SizeError("scene bundle: metadata side does not match the maps");
  if (!is_pow2(bundle.scene.side)) throw SizeError("scene bundle: side must be a power of two");
  return bundle;
}

}  // namespace sp3d
