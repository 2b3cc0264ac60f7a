#pragma once

#include <cmath>
#include <limits>

#include "sp3d/errors.hpp"
#include "sp3d/types.hpp"

namespace sp3d {

// 10 log10(peak^2 / MSE), in dB; identical images give +infinity.
inline double psnr(const Image& a, const Image& b, double peak) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw SizeError("psnr: image dimensions do not match");
  if (peak <= 0.0) throw SizeError("psnr: peak must be positive");
  const double mse = (a - b).square().mean();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace sp3d
