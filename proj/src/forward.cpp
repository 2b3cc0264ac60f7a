#include "sp3d/forward.hpp"

#include <cmath>
#include <random>

#include "sp3d/errors.hpp"

namespace sp3d {

namespace {

constexpr double kFwhmToSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Round to the nearest TCSPC bin center; photons never land before bin 0.
double quantize_tof(double t, double bin_width) {
  const double idx = std::max(0.0, std::floor(t / bin_width));
  return (idx + 0.5) * bin_width;
}

}  // namespace

std::uint64_t derive_pattern_seed(std::uint64_t seed, std::uint64_t stage,
                                  std::uint64_t pattern_index) {
  std::uint64_t h = splitmix64(seed ^ 0x243F6A8885A308D3ull);
  h = splitmix64(h ^ stage);
  h = splitmix64(h ^ pattern_index);
  return h;
}

Scene downsample_scene(const Scene& scene, Index side) {
  if (!is_pow2(side) || !is_pow2(scene.side) || side > scene.side || scene.side % side != 0)
    throw SizeError("downsample_scene: target side must be a power-of-two divisor of the scene side");
  if (side == scene.side) return scene;
  const Index f = scene.side / side;
  Scene out;
  out.side = side;
  out.intensity = Image::Zero(side, side);
  out.depth = Image::Zero(side, side);
  for (Index p = 0; p < side; ++p) {
    for (Index q = 0; q < side; ++q) {
      auto iblk = scene.intensity.block(p * f, q * f, f, f);
      auto dblk = scene.depth.block(p * f, q * f, f, f);
      const double flux = iblk.sum();
      out.intensity(p, q) = flux;
      out.depth(p, q) = flux > 0.0 ? (iblk * dblk).sum() / flux : dblk.mean();
    }
  }
  return out;
}

MeasurementRecord measure(const Scene& scene, const MarkBits& pattern, const SimConfig& cfg,
                          std::uint64_t pattern_seed, int stage, Index pattern_index) {
  const Index n_pixels = scene.side * scene.side;
  if (pattern.size() != n_pixels) throw SizeError("measure: pattern/scene size mismatch");

  MeasurementRecord rec;
  rec.stage = stage;
  rec.pattern_index = pattern_index;

  if (cfg.mode == NoiseMode::noiseless) {
    double count = 0.0, tof = 0.0;
    for (Index n = 0; n < n_pixels; ++n) {
      if (!pattern(n)) continue;
      const Index p = n / scene.side, q = n % scene.side;
      const double x = scene.intensity(p, q);
      count += x;
      tof += x * (2.0 * scene.depth(p, q) / kSpeedOfLight);
    }
    rec.count = count;
    rec.tof_sum_s = tof;
    return rec;
  }

  std::mt19937_64 rng(splitmix64(cfg.seed) ^ pattern_seed);
  const double sigma = cfg.jitter_fwhm_s / kFwhmToSigma;
  std::normal_distribution<double> jitter(0.0, sigma > 0.0 ? sigma : 1.0);

  long long photons = 0;
  double tof_sum = 0.0;
  for (Index n = 0; n < n_pixels; ++n) {
    if (!pattern(n)) continue;
    const Index p = n / scene.side, q = n % scene.side;
    const double x = scene.intensity(p, q);
    if (x <= 0.0) continue;
    std::poisson_distribution<long long> arrivals(x);
    const long long k = arrivals(rng);
    const double t0 = 2.0 * scene.depth(p, q) / kSpeedOfLight;
    for (long long i = 0; i < k; ++i) {
      const double t = sigma > 0.0 ? t0 + jitter(rng) : t0;
      tof_sum += quantize_tof(t, cfg.bin_width_s);
    }
    photons += k;
  }

  const double dark_mean = cfg.dark_rate_hz * cfg.dwell_s;
  if (dark_mean > 0.0) {
    std::poisson_distribution<long long> dark(dark_mean);
    const long long k = dark(rng);
    std::uniform_real_distribution<double> gate(0.0, 2.0 * cfg.range_gate_m / kSpeedOfLight);
    for (long long i = 0; i < k; ++i) tof_sum += quantize_tof(gate(rng), cfg.bin_width_s);
    photons += k;
  }

  rec.count = static_cast<double>(photons);
  rec.tof_sum_s = tof_sum;
  return rec;
}

std::vector<MeasurementRecord> acquire_stage(const Scene& scene, const MaskedSensingPlan& plan,
                                             const SimConfig& cfg, int stage) {
  if (scene.side * scene.side != plan.n_pixels)
    throw SizeError("acquire_stage: plan resolution does not match the scene");

  std::vector<MeasurementRecord> records;
  records.reserve(static_cast<std::size_t>(plan.order));

  if (cfg.mode == NoiseMode::noiseless) {
    // y_raw = (H x_pad + (sum x) 1) / 2 with the marked fluxes in columns
    // 0..M-1; one transform per channel instead of L dot products.
    Eigen::VectorXd flux = Eigen::VectorXd::Zero(plan.order);
    Eigen::VectorXd tof = Eigen::VectorXd::Zero(plan.order);
    for (Index c = 0; c < plan.n_marked; ++c) {
      const Index n = plan.pixel_of_column(c);
      const Index p = n / scene.side, q = n % scene.side;
      const double x = scene.intensity(p, q);
      flux(c) = x;
      tof(c) = x * (2.0 * scene.depth(p, q) / kSpeedOfLight);
    }
    fwht_inplace<double>(flux);
    fwht_inplace<double>(tof);
    const double flux_dc = flux(0), tof_dc = tof(0);
    for (Index m = 0; m < plan.order; ++m)
      records.push_back({stage, m, 0.5 * (flux(m) + flux_dc), 0.5 * (tof(m) + tof_dc)});
    return records;
  }

  for (Index m = 0; m < plan.order; ++m) {
    const auto seed = derive_pattern_seed(cfg.seed, static_cast<std::uint64_t>(stage),
                                          static_cast<std::uint64_t>(m));
    records.push_back(measure(scene, pattern_row(plan, m), cfg, seed, stage, m));
  }
  return records;
}

}  // namespace sp3d
