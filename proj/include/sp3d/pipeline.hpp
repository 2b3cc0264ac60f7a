#pragma once

// Staged adaptive acquisition and reconstruction: a fully sampled coarse
// stage, then per-stage edge prediction on the depth map, masked Hadamard
// sampling of the predicted regions, and the intensity / modulated / depth
// combination rules.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "sp3d/forward.hpp"
#include "sp3d/haar.hpp"

namespace sp3d {

// How refinement stages decide what to resample: a fixed depth threshold,
// explicit per-stage pattern budgets, or a global compression-ratio target
// that the run splits across stages.
struct SamplingPolicy {
  enum class Kind { fixed_threshold, stage_budgets, compression_target };
  Kind kind = Kind::fixed_threshold;
  double threshold_m = 0.05;
  std::vector<Index> budgets;  // one entry per refinement stage
  double target_ratio = 0.1;   // total patterns / final pixel count

  static SamplingPolicy fixed(double threshold_m) {
    SamplingPolicy p;
    p.kind = Kind::fixed_threshold;
    p.threshold_m = threshold_m;
    return p;
  }
  static SamplingPolicy stage_budgets(std::vector<Index> per_stage) {
    SamplingPolicy p;
    p.kind = Kind::stage_budgets;
    p.budgets = std::move(per_stage);
    return p;
  }
  static SamplingPolicy compression(double ratio) {
    SamplingPolicy p;
    p.kind = Kind::compression_target;
    p.target_ratio = ratio;
    return p;
  }
};

struct ReconConfig {
  Index initial_side = 64;
  Index final_side = 512;
  SamplingPolicy policy;
  double c_factor = 1.49896229e8;   // TOF-sum to modulated-image scale, c/2
  double epsilon_intensity = 1e-6;  // relative to the stage max intensity
  SimConfig sim;

  int stage_count() const;
  void validate() const;
};

// Carried between stages. Intensity and modulated are per-pixel flux at this
// stage's own resolution; modulated equals intensity * depth wherever the
// stage sampled fresh values.
struct StageState {
  Index side = 0;
  Image intensity;
  Image depth;
  Image modulated;
  MarkVector mark;  // the mark this stage was acquired with
  Index patterns_used = 0;
};

struct RunStats {
  std::vector<Index> patterns_per_stage;
  Index total_patterns = 0;
  double compression_ratio = 0.0;
  double reconstruction_time_s = 0.0;
  std::optional<double> psnr_intensity_db;
  std::optional<double> psnr_depth_db;
};

class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;
  virtual std::vector<MeasurementRecord> acquire(int stage, const MaskedSensingPlan& plan) = 0;
};

// Live simulator. Downsamples the scene to each requested stage resolution
// and keeps every record it served so the run can be logged and replayed.
class SimulatorSource final : public MeasurementSource {
 public:
  SimulatorSource(Scene scene, SimConfig cfg);
  std::vector<MeasurementRecord> acquire(int stage, const MaskedSensingPlan& plan) override;
  const std::vector<MeasurementRecord>& records() const { return records_; }

 private:
  Scene scene_;
  SimConfig cfg_;
  std::vector<MeasurementRecord> records_;
};

// Replays a recorded measurement log; serving a stage with missing or
// mismatched records raises IncompleteLogError.
class ReplaySource final : public MeasurementSource {
 public:
  explicit ReplaySource(const std::vector<MeasurementRecord>& records);
  std::vector<MeasurementRecord> acquire(int stage, const MaskedSensingPlan& plan) override;

 private:
  std::map<int, std::vector<MeasurementRecord>> by_stage_;
};

// Full sampling at the initial resolution: all-ones mark, intensity and
// modulated from the debiased inverse transform, depth as their guarded
// ratio. recon_seconds, when given, accumulates time spent reconstructing
// (source acquisition excluded).
StageState initial_stage(MeasurementSource& source, const ReconConfig& cfg,
                         double* recon_seconds = nullptr);

// One refinement step: predict edge regions from the previous depth map,
// acquire them at twice the side, and combine with the upsampled carry.
StageState run_stage(const StageState& prev, MeasurementSource& source, const ReconConfig& cfg,
                     int stage_index, const ThresholdPolicy& policy,
                     double* recon_seconds = nullptr);

struct RunResult {
  Image intensity;
  Image depth;
  RunStats stats;
};

RunResult run(const ReconConfig& cfg, MeasurementSource& source);

}  // namespace sp3d
