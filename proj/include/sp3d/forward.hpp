#pragma once

// Forward model of the single-pixel photon-counting camera: per-pattern
// photon counts and per-pattern TOF sums, noiseless or with Poisson photon
// statistics, timing jitter, TCSPC bin quantization, and dark counts.

#include <cstdint>
#include <vector>

#include "sp3d/hadamard.hpp"
#include "sp3d/types.hpp"

namespace sp3d {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Ground truth being imaged. Intensity is the expected number of detected
// photons per pixel per dwell (laser power, reflectivity, and detector
// efficiency folded into one number); depth is in meters.
struct Scene {
  Index side = 0;
  Image intensity;
  Image depth;
};

enum class NoiseMode { noiseless, poisson };

struct SimConfig {
  NoiseMode mode = NoiseMode::noiseless;
  double dwell_s = 1e-3;
  double jitter_fwhm_s = 300e-12;
  double bin_width_s = 64e-12;
  double dark_rate_hz = 0.0;
  double range_gate_m = 7.5;
  std::uint64_t seed = 0;
};

// One pattern's measurement. count stays real-valued in noiseless mode and
// integer-valued under Poisson statistics; tof_sum_s is zero when count is.
struct MeasurementRecord {
  int stage = 0;
  Index pattern_index = 0;
  double count = 0.0;
  double tof_sum_s = 0.0;
};

// Stable per-pattern seed so simulation is schedule-independent: the same
// (seed, stage, pattern_index) always produces the same record.
std::uint64_t derive_pattern_seed(std::uint64_t seed, std::uint64_t stage,
                                  std::uint64_t pattern_index);

// Coarse version of a scene: intensity block-summed (flux aggregates over
// merged pixels), depth block-averaged weighted by intensity.
Scene downsample_scene(const Scene& scene, Index side);

MeasurementRecord measure(const Scene& scene, const MarkBits& pattern, const SimConfig& cfg,
                          std::uint64_t pattern_seed, int stage = 0, Index pattern_index = 0);

// One record per pattern row of the plan, ordered by pattern index. The scene
// must already be at the plan's resolution.
std::vector<MeasurementRecord> acquire_stage(const Scene& scene, const MaskedSensingPlan& plan,
                                             const SimConfig& cfg, int stage);

}  // namespace sp3d
