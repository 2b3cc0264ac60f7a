#pragma once

// Measurement logs are JSON lines, one record per line:
//   {"count":..., "pattern_index":..., "stage":..., "tof_sum_s":...}
// Doubles round-trip exactly, so a replayed log reproduces the run.

#include <filesystem>
#include <vector>

#include "sp3d/forward.hpp"

namespace sp3d {

void write_measurement_log(const std::filesystem::path& path,
                           const std::vector<MeasurementRecord>& records);

std::vector<MeasurementRecord> read_measurement_log(const std::filesystem::path& path);

}  // namespace sp3d
