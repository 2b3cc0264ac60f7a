#include "sp3d/log_io.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "sp3d/errors.hpp"

namespace sp3d {

using nlohmann::json;

void write_measurement_log(const std::filesystem::path& path,
                           const std::vector<MeasurementRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write log: cannot open " + path.string());
  for (const auto& rec : records) {
    const json j = {{"stage", rec.stage},
                    {"pattern_index", rec.pattern_index},
                    {"count", rec.count},
                    {"tof_sum_s", rec.tof_sum_s}};
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write log: write failed for " + path.string());
}

std::vector<MeasurementRecord> read_measurement_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read log: cannot open " + path.string());
  std::vector<MeasurementRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError("read log: " + path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || j.size() != 4 || !j.contains("stage") || !j.contains("pattern_index") ||
        !j.contains("count") || !j.contains("tof_sum_s"))
      throw IoError("read log: " + path.string() + ":" + std::to_string(lineno) +
                    ": record must have exactly stage, pattern_index, count, tof_sum_s");
    MeasurementRecord rec;
    rec.stage = j.at("stage").get<int>();
    rec.pattern_index = j.at("pattern_index").get<Index>();
    rec.count = j.at("count").get<double>();
    rec.tof_sum_s = j.at("tof_sum_s").get<double>();
    records.push_back(rec);
  }
  return records;
}

}  // namespace sp3d
