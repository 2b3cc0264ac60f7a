#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace sp3d {

using Index = Eigen::Index;

template <typename Scalar>
using ImageT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Images are indexed (row p, col q); the flattened pixel index is
// n = p * side + q (zero-based, row-major). Every module shares this.
using Image = ImageT<double>;

// 0/1 per-pixel masks and DMD patterns, flattened row-major.
using MarkBits = Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>;

inline bool is_pow2(Index n) { return n > 0 && (n & (n - 1)) == 0; }

template <typename Scalar>
Eigen::VectorX<Scalar> flatten_rowmajor(const ImageT<Scalar>& img) {
  Eigen::VectorX<Scalar> v(img.size());
  Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), img.rows(), img.cols()) = img;
  return v;
}

template <typename Scalar>
ImageT<Scalar> unflatten_rowmajor(const Eigen::VectorX<Scalar>& v, Index rows, Index cols) {
  return Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), rows, cols);
}

}  // namespace sp3d
