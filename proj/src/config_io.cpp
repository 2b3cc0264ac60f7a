#include "sp3d/config_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "sp3d/errors.hpp"

namespace sp3d {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(std::string("config: unknown field '") + key + "' in " + where);
  }
}

double positive(const json& j, const char* name) {
  const double v = j.get<double>();
  if (!(v > 0.0)) throw ConfigError(std::string("config: ") + name + " must be positive");
  return v;
}

SimConfig sim_from_json(const json& j) {
  reject_unknown_keys(j, {"mode", "dwell_s", "jitter_fwhm_s", "bin_width_s", "dark_rate_hz",
                          "range_gate_m", "seed"},
                      "sim");
  SimConfig sim;
  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "noiseless")
      sim.mode = NoiseMode::noiseless;
    else if (mode == "poisson")
      sim.mode = NoiseMode::poisson;
    else
      throw ConfigError("config: sim.mode must be 'noiseless' or 'poisson'");
  }
  if (j.contains("dwell_s")) sim.dwell_s = positive(j.at("dwell_s"), "sim.dwell_s");
  if (j.contains("jitter_fwhm_s"))
    sim.jitter_fwhm_s = positive(j.at("jitter_fwhm_s"), "sim.jitter_fwhm_s");
  if (j.contains("bin_width_s")) sim.bin_width_s = positive(j.at("bin_width_s"), "sim.bin_width_s");
  if (j.contains("dark_rate_hz")) {
    sim.dark_rate_hz = j.at("dark_rate_hz").get<double>();
    if (sim.dark_rate_hz < 0.0) throw ConfigError("config: sim.dark_rate_hz must be >= 0");
  }
  if (j.contains("range_gate_m"))
    sim.range_gate_m = positive(j.at("range_gate_m"), "sim.range_gate_m");
  if (j.contains("seed")) sim.seed = j.at("seed").get<std::uint64_t>();
  return sim;
}

SamplingPolicy policy_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError("config: policy must be an object with a 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "fixed_threshold") {
    reject_unknown_keys(j, {"type", "threshold_m"}, "policy");
    SamplingPolicy p = SamplingPolicy::fixed(0.05);
    if (j.contains("threshold_m")) {
      p.threshold_m = j.at("threshold_m").get<double>();
      if (p.threshold_m < 0.0) throw ConfigError("config: policy.threshold_m must be >= 0");
    }
    return p;
  }
  if (type == "stage_budgets") {
    reject_unknown_keys(j, {"type", "budgets"}, "policy");
    if (!j.contains("budgets")) throw ConfigError("config: stage_budgets policy needs 'budgets'");
    auto budgets = j.at("budgets").get<std::vector<Index>>();
    for (Index b : budgets)
      if (b < 0) throw ConfigError("config: policy.budgets entries must be >= 0");
    return SamplingPolicy::stage_budgets(std::move(budgets));
  }
  if (type == "compression_target") {
    reject_unknown_keys(j, {"type", "ratio"}, "policy");
    if (!j.contains("ratio")) throw ConfigError("config: compression_target policy needs 'ratio'");
    const double ratio = j.at("ratio").get<double>();
    if (!(ratio > 0.0)) throw ConfigError("config: policy.ratio must be positive");
    return SamplingPolicy::compression(ratio);
  }
  throw ConfigError("config: policy.type must be fixed_threshold, stage_budgets, or compression_target");
}

json value_or_inf(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return "inf";
  return *v;
}

}  // namespace

ReconConfig recon_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  reject_unknown_keys(j, {"initial_side", "final_side", "policy", "c_factor", "epsilon_intensity",
                          "sim"},
                      "config");
  ReconConfig cfg;
  if (j.contains("initial_side")) cfg.initial_side = j.at("initial_side").get<Index>();
  if (j.contains("final_side")) cfg.final_side = j.at("final_side").get<Index>();
  if (j.contains("policy")) cfg.policy = policy_from_json(j.at("policy"));
  if (j.contains("c_factor")) cfg.c_factor = positive(j.at("c_factor"), "c_factor");
  if (j.contains("epsilon_intensity")) {
    cfg.epsilon_intensity = j.at("epsilon_intensity").get<double>();
    if (cfg.epsilon_intensity < 0.0) throw ConfigError("config: epsilon_intensity must be >= 0");
  }
  if (j.contains("sim")) cfg.sim = sim_from_json(j.at("sim"));
  cfg.validate();
  return cfg;
}

ReconConfig load_recon_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return recon_config_from_json(j);
}

json report_to_json(const QualityReport& report) {
  json j;
  j["psnr_intensity_db"] = value_or_inf(report.psnr_intensity_db);
  j["psnr_depth_db"] = value_or_inf(report.psnr_depth_db);
  j["psnr_peak_intensity"] = report.psnr_peak_intensity ? json(*report.psnr_peak_intensity) : json(nullptr);
  j["psnr_peak_depth"] = report.psnr_peak_depth ? json(*report.psnr_peak_depth) : json(nullptr);
  j["compression_ratio"] = report.compression_ratio ? json(*report.compression_ratio) : json(nullptr);
  j["patterns_per_stage"] = report.patterns_per_stage ? json(*report.patterns_per_stage) : json(nullptr);
  j["total_patterns"] = report.total_patterns ? json(*report.total_patterns) : json(nullptr);
  j["reconstruction_time_s"] =
      report.reconstruction_time_s ? json(*report.reconstruction_time_s) : json(nullptr);
  return j;
}

void write_report(const std::filesystem::path& path, const QualityReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write report: cannot open " + path.string());
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw IoError("write report: write failed for " + path.string());
}

}  // namespace sp3d
