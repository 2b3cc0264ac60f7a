#pragma once

// PFM (32-bit float, little-endian, scale -1.0) for data maps and binary
// PGM (8-bit) for previews and pattern dumps.

#include <filesystem>

#include "sp3d/types.hpp"

namespace sp3d {

void write_pfm(const std::filesystem::path& path, const Image& img);
Image read_pfm(const std::filesystem::path& path);

// Linear map of [lo, hi] onto 0..255, clipped.
void write_pgm(const std::filesystem::path& path, const Image& img, double lo, double hi);
Image read_pgm(const std::filesystem::path& path);  // raw 0..255 values

}  // namespace sp3d
