#include "sp3d/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "sp3d/errors.hpp"

namespace sp3d {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd counts_of(const std::vector<MeasurementRecord>& records) {
  Eigen::VectorXd y(static_cast<Index>(records.size()));
  for (Index m = 0; m < y.size(); ++m) y(m) = records[static_cast<std::size_t>(m)].count;
  return y;
}

Eigen::VectorXd tof_sums_of(const std::vector<MeasurementRecord>& records) {
  Eigen::VectorXd y(static_cast<Index>(records.size()));
  for (Index m = 0; m < y.size(); ++m) y(m) = records[static_cast<std::size_t>(m)].tof_sum_s;
  return y;
}

void require_full_stage(const std::vector<MeasurementRecord>& records,
                        const MaskedSensingPlan& plan, int stage) {
  if (static_cast<Index>(records.size()) != plan.order)
    throw IncompleteLogError("stage " + std::to_string(stage) + ": got " +
                             std::to_string(records.size()) + " records, need " +
                             std::to_string(plan.order));
  for (Index m = 0; m < plan.order; ++m)
    if (records[static_cast<std::size_t>(m)].pattern_index != m)
      throw IncompleteLogError("stage " + std::to_string(stage) +
                               ": pattern indices are not the contiguous range 0.." +
                               std::to_string(plan.order - 1));
}

}  // namespace

int ReconConfig::stage_count() const {
  int stages = 1;
  for (Index side = initial_side; side < final_side; side *= 2) ++stages;
  return stages;
}

void ReconConfig::validate() const {
  if (!is_pow2(initial_side) || !is_pow2(final_side))
    throw SizeError("config: initial_side and final_side must be powers of two");
  if (final_side < initial_side)
    throw SizeError("config: final_side must be >= initial_side");
  if (c_factor <= 0.0) throw SizeError("config: c_factor must be positive");
  if (epsilon_intensity < 0.0) throw SizeError("config: epsilon_intensity must be >= 0");
  if (policy.kind == SamplingPolicy::Kind::stage_budgets &&
      static_cast<int>(policy.budgets.size()) != stage_count() - 1)
    throw SizeError("config: stage_budgets needs one entry per refinement stage (" +
                    std::to_string(stage_count() - 1) + ")");
  if (policy.kind == SamplingPolicy::Kind::compression_target) {
    if (policy.target_ratio <= 0.0)
      throw SizeError("config: compression target ratio must be positive");
    const double target = policy.target_ratio * static_cast<double>(final_side) * static_cast<double>(final_side);
    if (target < static_cast<double>(initial_side) * static_cast<double>(initial_side))
      throw BudgetError("config: compression target is below the fully sampled initial stage");
  }
}

SimulatorSource::SimulatorSource(Scene scene, SimConfig cfg)
    : scene_(std::move(scene)), cfg_(cfg) {
  if (!is_pow2(scene_.side) || scene_.intensity.rows() != scene_.side ||
      scene_.intensity.cols() != scene_.side || scene_.depth.rows() != scene_.side ||
      scene_.depth.cols() != scene_.side)
    throw SizeError("simulator: scene maps must be square with a power-of-two side");
}

std::vector<MeasurementRecord> SimulatorSource::acquire(int stage, const MaskedSensingPlan& plan) {
  const Index side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(plan.n_pixels))));
  if (side * side != plan.n_pixels)
    throw SizeError("simulator: plan pixel count is not a square");
  const Scene coarse = downsample_scene(scene_, side);
  auto records = acquire_stage(coarse, plan, cfg_, stage);
  records_.insert(records_.end(), records.begin(), records.end());
  return records;
}

ReplaySource::ReplaySource(const std::vector<MeasurementRecord>& records) {
  for (const auto& rec : records) by_stage_[rec.stage].push_back(rec);
  for (auto& [stage, recs] : by_stage_)
    std::sort(recs.begin(), recs.end(),
              [](const MeasurementRecord& a, const MeasurementRecord& b) {
                return a.pattern_index < b.pattern_index;
              });
}

std::vector<MeasurementRecord> ReplaySource::acquire(int stage, const MaskedSensingPlan& plan) {
  auto it = by_stage_.find(stage);
  if (it == by_stage_.end())
    throw IncompleteLogError("replay: log has no records for stage " + std::to_string(stage));
  require_full_stage(it->second, plan, stage);
  return it->second;
}

StageState initial_stage(MeasurementSource& source, const ReconConfig& cfg,
                         double* recon_seconds) {
  cfg.validate();
  const Index side = cfg.initial_side;

  MarkVector mark;
  mark.side = side;
  mark.bits = MarkBits::Ones(side * side);
  mark.n_marked = side * side;
  const auto plan = MaskedSensingPlan::from_mark(mark.bits);

  const auto records = source.acquire(0, plan);
  const auto t0 = Clock::now();
  require_full_stage(records, plan, 0);

  const Eigen::VectorXd flux = iht(debias(counts_of(records)));
  const Eigen::VectorXd mod = iht(debias(tof_sums_of(records)));

  StageState st;
  st.side = side;
  st.intensity = Image::Zero(side, side);
  st.modulated = Image::Zero(side, side);
  st.depth = Image::Zero(side, side);
  for (Index n = 0; n < plan.n_pixels; ++n) {
    const Index p = n / side, q = n % side;
    st.intensity(p, q) = std::max(0.0, flux(n));
    st.modulated(p, q) = cfg.c_factor * mod(n);
  }
  const double eps = cfg.epsilon_intensity * st.intensity.maxCoeff();
  for (Index p = 0; p < side; ++p) {
    for (Index q = 0; q < side; ++q) {
      const double x = st.intensity(p, q);
      st.depth(p, q) = (x > 0.0 && x >= eps) ? st.modulated(p, q) / x : 0.0;
    }
  }
  st.mark = std::move(mark);
  st.patterns_used = plan.order;
  if (recon_seconds) *recon_seconds += seconds_since(t0);
  return st;
}

StageState run_stage(const StageState& prev, MeasurementSource& source, const ReconConfig& cfg,
                     int stage_index, const ThresholdPolicy& policy, double* recon_seconds) {
  if (prev.side >= cfg.final_side)
    throw SizeError("run_stage: previous stage is already at the final resolution");
  const Index side = 2 * prev.side;

  auto t0 = Clock::now();
  const HaarBands bands = haar_analyze(prev.depth);
  // predict_mark works at the previous stage's own side; doubling it gives
  // the sampling mark at the new side, one 2x2 child block per marked pixel.
  MarkVector mark = upsample_mark(predict_mark(bands, policy));

  StageState st;
  st.side = side;
  if (mark.n_marked == 0) {
    // Nothing to resample; this stage is the carried coarse image. Parent
    // flux splits across the four children, depth replicates unchanged.
    st.intensity = upsample2(prev.intensity) * 0.25;
    st.modulated = upsample2(prev.modulated) * 0.25;
    st.depth = upsample2(prev.depth);
    st.mark = std::move(mark);
    st.patterns_used = prev.patterns_used;
    if (recon_seconds) *recon_seconds += seconds_since(t0);
    return st;
  }

  const auto plan = MaskedSensingPlan::from_mark(mark.bits);
  if (recon_seconds) *recon_seconds += seconds_since(t0);
  const auto records = source.acquire(stage_index, plan);
  t0 = Clock::now();
  require_full_stage(records, plan, stage_index);

  const Eigen::VectorXd flux = iht(debias(counts_of(records)));
  const Eigen::VectorXd mod = iht(debias(tof_sums_of(records)));

  st.intensity = upsample2(prev.intensity) * 0.25;
  st.modulated = upsample2(prev.modulated) * 0.25;
  const Image up_depth = upsample2(prev.depth);
  st.depth = up_depth;

  // Fresh edge values overwrite the carry on marked pixels; negative
  // intensities are noise artifacts and clamp to zero before the ratio.
  for (Index c = 0; c < plan.n_marked; ++c) {
    const Index n = plan.pixel_of_column(c);
    const Index p = n / side, q = n % side;
    st.intensity(p, q) = std::max(0.0, flux(c));
    st.modulated(p, q) = cfg.c_factor * mod(c);
  }
  const double eps = cfg.epsilon_intensity * st.intensity.maxCoeff();
  for (Index c = 0; c < plan.n_marked; ++c) {
    const Index n = plan.pixel_of_column(c);
    const Index p = n / side, q = n % side;
    const double x = st.intensity(p, q);
    st.depth(p, q) = (x > 0.0 && x >= eps) ? st.modulated(p, q) / x : up_depth(p, q);
  }

  st.mark = std::move(mark);
  st.patterns_used = prev.patterns_used + plan.order;
  if (recon_seconds) *recon_seconds += seconds_since(t0);
  return st;
}

RunResult run(const ReconConfig& cfg, MeasurementSource& source) {
  cfg.validate();
  const int stages = cfg.stage_count();
  const Index final_pixels = cfg.final_side * cfg.final_side;

  // Refinement allocations for the compression-target policy: whatever the
  // initial stage leaves is split proportionally to 4^j, flooring remainder
  // to the finest stage; slack a stage does not use rolls forward.
  std::vector<Index> alloc(static_cast<std::size_t>(stages - 1), 0);
  if (cfg.policy.kind == SamplingPolicy::Kind::compression_target && stages > 1) {
    const auto target = static_cast<Index>(cfg.policy.target_ratio * static_cast<double>(final_pixels));
    const Index remaining = std::max<Index>(0, target - cfg.initial_side * cfg.initial_side);
    double weight_sum = 0.0;
    for (int j = 1; j < stages; ++j) weight_sum += std::pow(4.0, j);
    Index given = 0;
    for (int j = 1; j < stages; ++j) {
      alloc[static_cast<std::size_t>(j - 1)] =
          static_cast<Index>(std::floor(static_cast<double>(remaining) * std::pow(4.0, j) / weight_sum));
      given += alloc[static_cast<std::size_t>(j - 1)];
    }
    alloc.back() += remaining - given;
  }

  double recon_s = 0.0;
  RunStats stats;
  StageState st = initial_stage(source, cfg, &recon_s);
  stats.patterns_per_stage.push_back(st.patterns_used);

  Index carry = 0;
  for (int j = 1; j < stages; ++j) {
    ThresholdPolicy policy;
    Index stage_budget = 0;
    switch (cfg.policy.kind) {
      case SamplingPolicy::Kind::fixed_threshold:
        policy = ThresholdPolicy::fixed(cfg.policy.threshold_m);
        break;
      case SamplingPolicy::Kind::stage_budgets:
        stage_budget = cfg.policy.budgets[static_cast<std::size_t>(j - 1)];
        // the sampling mark doubles the predicted one, so its pattern cost
        // is exactly 4x the wavelet-level budget
        policy = ThresholdPolicy::budgeted(std::max<Index>(1, stage_budget / 4));
        break;
      case SamplingPolicy::Kind::compression_target:
        stage_budget = alloc[static_cast<std::size_t>(j - 1)] + carry;
        policy = ThresholdPolicy::budgeted(std::max<Index>(1, stage_budget / 4));
        break;
    }
    const Index before = st.patterns_used;
    st = run_stage(st, source, cfg, j, policy, &recon_s);
    const Index used = st.patterns_used - before;
    stats.patterns_per_stage.push_back(used);
    if (cfg.policy.kind == SamplingPolicy::Kind::compression_target)
      carry = stage_budget - used;
  }

  stats.total_patterns = st.patterns_used;
  stats.compression_ratio = static_cast<double>(st.patterns_used) / static_cast<double>(final_pixels);
  stats.reconstruction_time_s = recon_s;
  return RunResult{std::move(st.intensity), std::move(st.depth), std::move(stats)};
}

}  // namespace sp3d
