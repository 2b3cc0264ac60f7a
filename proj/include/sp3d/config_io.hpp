#pragma once

// JSON run configuration and quality reports. Config field names match the
// ReconConfig / SimConfig fields one-to-one; unknown fields are rejected.

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sp3d/pipeline.hpp"

namespace sp3d {

ReconConfig recon_config_from_json(const nlohmann::json& j);
ReconConfig load_recon_config(const std::filesystem::path& path);

struct QualityReport {
  std::optional<double> psnr_intensity_db;
  std::optional<double> psnr_depth_db;
  std::optional<double> psnr_peak_intensity;  // ground-truth max
  std::optional<double> psnr_peak_depth;      // range gate
  std::optional<double> compression_ratio;
  std::optional<std::vector<Index>> patterns_per_stage;
  std::optional<Index> total_patterns;
  std::optional<double> reconstruction_time_s;
};

// Infinite PSNR serializes as the string "inf"; absent fields as null.
nlohmann::json report_to_json(const QualityReport& report);
void write_report(const std::filesystem::path& path, const QualityReport& report);

}  // namespace sp3d
