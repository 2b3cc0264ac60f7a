// Command-line front end: scene generation, end-to-end simulation,
// log replay, quality metrics, and pattern dumps.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sp3d/config_io.hpp"
#include "sp3d/image_io.hpp"
#include "sp3d/log_io.hpp"
#include "sp3d/metrics.hpp"
#include "sp3d/pipeline.hpp"
#include "sp3d/scene_gen.hpp"

namespace fs = std::filesystem;
using namespace sp3d;

namespace {

struct SceneGenArgs {
  std::string kind;
  Index side = 512;
  std::uint64_t seed = 1;
  std::string out;
};

struct SimulateArgs {
  std::string scene;
  std::string config;
  std::string out_log, out_intensity, out_depth, report;
};

struct ReconstructArgs {
  std::string log;
  std::string config;
  std::string out_intensity, out_depth;
};

struct MetricsArgs {
  std::string ref_scene;
  std::string intensity, depth;
  std::string report;
  double range_gate_m = 7.5;
};

struct PatternsArgs {
  Index side = 0;
  std::string mark_file;
  std::string out;
  Index max_rows = 64;
};

Scene truth_at(const Scene& scene, Index side) {
  return side == scene.side ? scene : downsample_scene(scene, side);
}

int do_scene_gen(const SceneGenArgs& a) {
  const Scene scene = generate_scene(a.kind, a.side, a.seed);
  SceneMeta meta;
  meta.kind = a.kind;
  meta.side = a.side;
  meta.seed = a.seed;
  write_scene_bundle(a.out, scene, meta);
  std::cout << "wrote scene bundle " << a.out << ".{intensity.pfm,depth.pfm,meta.json} (side "
            << a.side << ", total flux " << scene.intensity.sum() << ")\n";
  return 0;
}

int do_simulate(const SimulateArgs& a) {
  const SceneBundle bundle = read_scene_bundle(a.scene);
  const ReconConfig cfg = load_recon_config(a.config);
  if (cfg.final_side > bundle.scene.side)
    throw SizeError("simulate: final_side exceeds the scene side");

  SimulatorSource source(bundle.scene, cfg.sim);
  const RunResult result = run(cfg, source);

  if (!a.out_log.empty()) write_measurement_log(a.out_log, source.records());
  if (!a.out_intensity.empty()) write_pfm(a.out_intensity, result.intensity);
  if (!a.out_depth.empty()) write_pfm(a.out_depth, result.depth);

  const Scene truth = truth_at(bundle.scene, cfg.final_side);
  QualityReport report;
  const double peak_i = truth.intensity.maxCoeff();
  if (peak_i > 0.0) {
    report.psnr_intensity_db = psnr(result.intensity, truth.intensity, peak_i);
    report.psnr_peak_intensity = peak_i;
  }
  report.psnr_depth_db = psnr(result.depth, truth.depth, cfg.sim.range_gate_m);
  report.psnr_peak_depth = cfg.sim.range_gate_m;
  report.compression_ratio = result.stats.compression_ratio;
  report.patterns_per_stage = result.stats.patterns_per_stage;
  report.total_patterns = result.stats.total_patterns;
  report.reconstruction_time_s = result.stats.reconstruction_time_s;
  if (!a.report.empty()) write_report(a.report, report);

  std::ostringstream line;
  line << "patterns=" << result.stats.total_patterns
       << " ratio=" << result.stats.compression_ratio
       << " recon_s=" << result.stats.reconstruction_time_s;
  if (report.psnr_intensity_db) line << " psnr_intensity_db=" << *report.psnr_intensity_db;
  if (report.psnr_depth_db) line << " psnr_depth_db=" << *report.psnr_depth_db;
  std::cout << line.str() << "\n";
  return 0;
}

int do_reconstruct(const ReconstructArgs& a) {
  const ReconConfig cfg = load_recon_config(a.config);
  ReplaySource source(read_measurement_log(a.log));
  const RunResult result = run(cfg, source);
  if (!a.out_intensity.empty()) write_pfm(a.out_intensity, result.intensity);
  if (!a.out_depth.empty()) write_pfm(a.out_depth, result.depth);
  std::cout << "patterns=" << result.stats.total_patterns
            << " ratio=" << result.stats.compression_ratio
            << " recon_s=" << result.stats.reconstruction_time_s << "\n";
  return 0;
}

int do_metrics(const MetricsArgs& a) {
  const SceneBundle bundle = read_scene_bundle(a.ref_scene);
  const Image intensity = read_pfm(a.intensity);
  const Image depth = read_pfm(a.depth);
  if (intensity.rows() != intensity.cols() || depth.rows() != depth.cols() ||
      intensity.rows() != depth.rows())
    throw SizeError("metrics: images must be square and equal-sized");
  const Scene truth = truth_at(bundle.scene, intensity.rows());

  QualityReport report;
  const double peak_i = truth.intensity.maxCoeff();
  if (peak_i > 0.0) {
    report.psnr_intensity_db = psnr(intensity, truth.intensity, peak_i);
    report.psnr_peak_intensity = peak_i;
  }
  report.psnr_depth_db = psnr(depth, truth.depth, a.range_gate_m);
  report.psnr_peak_depth = a.range_gate_m;
  if (!a.report.empty()) write_report(a.report, report);

  std::cout << "psnr_intensity_db="
            << (report.psnr_intensity_db ? std::to_string(*report.psnr_intensity_db) : "n/a")
            << " psnr_depth_db=" << *report.psnr_depth_db << "\n";
  return 0;
}

int do_patterns_export(const PatternsArgs& a) {
  if (!is_pow2(a.side)) throw SizeError("patterns: side must be a power of two");
  MarkBits mark;
  if (a.mark_file.empty()) {
    mark = MarkBits::Ones(a.side * a.side);
  } else {
    const Image m = read_pgm(a.mark_file);
    if (m.rows() != a.side || m.cols() != a.side)
      throw SizeError("patterns: mark file dimensions do not match --side");
    mark = MarkBits::Zero(a.side * a.side);
    for (Index p = 0; p < a.side; ++p)
      for (Index q = 0; q < a.side; ++q)
        if (m(p, q) > 0.0) mark(p * a.side + q) = 1;
  }
  const auto plan = MaskedSensingPlan::from_mark(mark);
  const Index rows = std::min(plan.order, a.max_rows);
  for (Index m = 0; m < rows; ++m) {
    const MarkBits row = pattern_row(plan, m);
    Image img(a.side, a.side);
    for (Index n = 0; n < row.size(); ++n) img(n / a.side, n % a.side) = row(n);
    std::ostringstream name;
    name << a.out << "_row" << m << ".pgm";
    write_pgm(name.str(), img, 0.0, 1.0);
  }
  std::cout << "wrote " << rows << " of " << plan.order << " pattern rows to " << a.out
            << "_row*.pgm (M=" << plan.n_marked << ", L=" << plan.order << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-pixel photon-counting 3D imaging: simulate, reconstruct, measure"};
  app.require_subcommand(1);

  SceneGenArgs scene_args;
  auto* scene_cmd = app.add_subcommand("scene", "scene bundle tools");
  scene_cmd->require_subcommand(1);
  auto* gen_cmd = scene_cmd->add_subcommand("gen", "generate a synthetic scene bundle");
  gen_cmd->add_option("--kind", scene_args.kind, "steps | spheres | planes")->required();
  gen_cmd->add_option("--side", scene_args.side, "side in pixels (power of two)")->required();
  gen_cmd->add_option("--seed", scene_args.seed, "generator seed");
  gen_cmd->add_option("--out", scene_args.out, "output path prefix")->required();

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "simulate an acquisition and reconstruct");
  sim_cmd->add_option("--scene", sim_args.scene, "scene bundle prefix")->required();
  sim_cmd->add_option("--config", sim_args.config, "run config JSON")->required();
  sim_cmd->add_option("--out-log", sim_args.out_log, "measurement log (JSON lines)");
  sim_cmd->add_option("--out-intensity", sim_args.out_intensity, "intensity PFM");
  sim_cmd->add_option("--out-depth", sim_args.out_depth, "depth PFM");
  sim_cmd->add_option("--report", sim_args.report, "quality report JSON");

  ReconstructArgs rec_args;
  auto* rec_cmd = app.add_subcommand("reconstruct", "reconstruct from a recorded log");
  rec_cmd->add_option("--log", rec_args.log, "measurement log")->required();
  rec_cmd->add_option("--config", rec_args.config, "run config JSON")->required();
  rec_cmd->add_option("--out-intensity", rec_args.out_intensity, "intensity PFM");
  rec_cmd->add_option("--out-depth", rec_args.out_depth, "depth PFM");

  MetricsArgs met_args;
  auto* met_cmd = app.add_subcommand("metrics", "PSNR of reconstructions vs ground truth");
  met_cmd->add_option("--ref-scene", met_args.ref_scene, "ground-truth scene bundle prefix")->required();
  met_cmd->add_option("--intensity", met_args.intensity, "reconstructed intensity PFM")->required();
  met_cmd->add_option("--depth", met_args.depth, "reconstructed depth PFM")->required();
  met_cmd->add_option("--report", met_args.report, "quality report JSON");
  met_cmd->add_option("--range-gate", met_args.range_gate_m, "depth PSNR peak (m)");

  PatternsArgs pat_args;
  auto* pat_cmd = app.add_subcommand("patterns", "pattern tools");
  pat_cmd->require_subcommand(1);
  auto* exp_cmd = pat_cmd->add_subcommand("export", "dump sensing pattern rows as PGM images");
  exp_cmd->add_option("--side", pat_args.side, "pattern side in pixels")->required();
  exp_cmd->add_option("--mark-file", pat_args.mark_file, "PGM mask; nonzero pixels are marked");
  exp_cmd->add_option("--out", pat_args.out, "output path prefix")->required();
  exp_cmd->add_option("--max-rows", pat_args.max_rows, "cap on exported rows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return do_scene_gen(scene_args);
    if (sim_cmd->parsed()) return do_simulate(sim_args);
    if (rec_cmd->parsed()) return do_reconstruct(rec_args);
    if (met_cmd->parsed()) return do_metrics(met_args);
    if (exp_cmd->parsed()) return do_patterns_export(pat_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
