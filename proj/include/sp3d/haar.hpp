#pragma once

// One-level orthonormal Haar analysis, block-replication upsampling, and
// edge-region prediction over the detail bands of a coarse depth map.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sp3d/errors.hpp"
#include "sp3d/types.hpp"

namespace sp3d {

template <typename Scalar>
struct HaarBandsT {
  ImageT<Scalar> ll, lh, hl, hh;  // each half the analyzed side
};
using HaarBands = HaarBandsT<double>;

// Per 2x2 block (a b; c d): ll=(a+b+c+d)/2, lh=(a-b+c-d)/2, hl=(a+b-c-d)/2,
// hh=(a-b-c+d)/2. Orthonormal, so energy is preserved and constant blocks
// give exactly zero details.
template <typename Derived>
HaarBandsT<typename Derived::Scalar> haar_analyze(const Eigen::ArrayBase<Derived>& img) {
  using Scalar = typename Derived::Scalar;
  const Index rows = img.rows(), cols = img.cols();
  if (rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0)
    throw SizeError("haar_analyze: side must be even and >= 2");
  const auto& x = img.derived();
  auto a = x(Eigen::seq(0, rows - 2, 2), Eigen::seq(0, cols - 2, 2));
  auto b = x(Eigen::seq(0, rows - 2, 2), Eigen::seq(1, cols - 1, 2));
  auto c = x(Eigen::seq(1, rows - 1, 2), Eigen::seq(0, cols - 2, 2));
  auto d = x(Eigen::seq(1, rows - 1, 2), Eigen::seq(1, cols - 1, 2));
  const Scalar half(0.5);
  HaarBandsT<Scalar> out;
  out.ll = ((a + b) + (c + d)) * half;
  out.lh = ((a - b) + (c - d)) * half;
  out.hl = ((a + b) - (c + d)) * half;
  out.hh = ((a - b) - (c - d)) * half;
  return out;
}

// U(X) = X kron [[1,1],[1,1]]: every source pixel replicated into a 2x2 block.
template <typename Derived>
ImageT<typename Derived::Scalar> upsample2(const Eigen::ArrayBase<Derived>& x) {
  const Index rows = x.rows(), cols = x.cols();
  if (rows == 0 || cols == 0) throw SizeError("upsample2: empty input");
  ImageT<typename Derived::Scalar> out(2 * rows, 2 * cols);
  out(Eigen::seq(0, 2 * rows - 2, 2), Eigen::seq(0, 2 * cols - 2, 2)) = x.derived();
  out(Eigen::seq(0, 2 * rows - 2, 2), Eigen::seq(1, 2 * cols - 1, 2)) = x.derived();
  out(Eigen::seq(1, 2 * rows - 1, 2), Eigen::seq(0, 2 * cols - 2, 2)) = x.derived();
  out(Eigen::seq(1, 2 * rows - 1, 2), Eigen::seq(1, 2 * cols - 1, 2)) = x.derived();
  return out;
}

// Binary per-pixel mask of regions to resample, flattened row-major.
struct MarkVector {
  MarkBits bits;
  Index side = 0;
  Index n_marked = 0;
};

// Selection rule for predict_mark: compare detail magnitudes against a fixed
// threshold (depth units), or keep the K largest magnitudes with K capped so
// the implied pattern count 2^ceil(log2 4K) stays within the budget.
struct ThresholdPolicy {
  enum class Kind { fixed_threshold, pattern_budget };
  Kind kind = Kind::fixed_threshold;
  double threshold = 0.05;
  Index budget = 0;

  static ThresholdPolicy fixed(double threshold_m) {
    ThresholdPolicy p;
    p.kind = Kind::fixed_threshold;
    p.threshold = threshold_m;
    return p;
  }
  static ThresholdPolicy budgeted(Index patterns) {
    ThresholdPolicy p;
    p.kind = Kind::pattern_budget;
    p.budget = patterns;
    return p;
  }
};

// Detail magnitude per coefficient position, max over the three orientations.
template <typename Scalar>
ImageT<Scalar> detail_magnitude(const HaarBandsT<Scalar>& bands) {
  return bands.lh.abs().max(bands.hl.abs()).max(bands.hh.abs());
}

// Marks the aligned 2x2 child block of every selected coefficient, at twice
// the band side (the analyzed image's own resolution); equivalent to
// thresholding the block-upsampled magnitude field. Fixed policy selects by
// |D| >= threshold (inclusive); budget policy selects the K largest nonzero
// magnitudes, ties broken by row-major position.
inline MarkVector predict_mark(const HaarBands& bands, const ThresholdPolicy& policy) {
  const Index brows = bands.lh.rows(), bcols = bands.lh.cols();
  if (brows == 0 || bcols == 0 || brows != bcols ||
      bands.hl.rows() != brows || bands.hh.rows() != brows ||
      bands.hl.cols() != bcols || bands.hh.cols() != bcols)
    throw SizeError("predict_mark: detail bands must be square and equal-sized");
  const Image mag = detail_magnitude(bands);
  const Index side = 2 * brows;

  MarkVector mv;
  mv.side = side;
  mv.bits = MarkBits::Zero(side * side);
  auto mark_children = [&](Index p, Index q) {
    mv.bits((2 * p) * side + 2 * q) = 1;
    mv.bits((2 * p) * side + 2 * q + 1) = 1;
    mv.bits((2 * p + 1) * side + 2 * q) = 1;
    mv.bits((2 * p + 1) * side + 2 * q + 1) = 1;
    mv.n_marked += 4;
  };

  if (policy.kind == ThresholdPolicy::Kind::fixed_threshold) {
    for (Index p = 0; p < brows; ++p)
      for (Index q = 0; q < bcols; ++q)
        if (mag(p, q) >= policy.threshold) mark_children(p, q);
    return mv;
  }

  if (policy.budget < 1) throw BudgetError("predict_mark: pattern budget must be at least 1");
  // largest K with 2^ceil(log2 4K) <= budget
  const Index cap =
      static_cast<Index>(std::bit_floor(static_cast<std::uint64_t>(policy.budget / 4)));
  if (cap == 0) return mv;
  std::vector<std::pair<double, Index>> ranked;
  ranked.reserve(static_cast<std::size_t>(brows * bcols));
  for (Index p = 0; p < brows; ++p)
    for (Index q = 0; q < bcols; ++q)
      if (mag(p, q) > 0.0) ranked.emplace_back(mag(p, q), p * bcols + q);
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(cap), ranked.size());
  for (std::size_t i = 0; i < take; ++i)
    mark_children(ranked[i].second / bcols, ranked[i].second % bcols);
  return mv;
}

// Doubles the mark side; each marked pixel covers its four children at the
// finer resolution.
inline MarkVector upsample_mark(const MarkVector& mv) {
  if (mv.side <= 0 || mv.bits.size() != mv.side * mv.side)
    throw SizeError("upsample_mark: inconsistent mark vector");
  const Index side = 2 * mv.side;
  MarkVector out;
  out.side = side;
  out.bits = MarkBits::Zero(side * side);
  out.n_marked = 4 * mv.n_marked;
  for (Index p = 0; p < mv.side; ++p) {
    for (Index q = 0; q < mv.side; ++q) {
      if (!mv.bits(p * mv.side + q)) continue;
      out.bits((2 * p) * side + 2 * q) = 1;
      out.bits((2 * p) * side + 2 * q + 1) = 1;
      out.bits((2 * p + 1) * side + 2 * q) = 1;
      out.bits((2 * p + 1) * side + 2 * q + 1) = 1;
    }
  }
  return out;
}

}  // namespace sp3d
