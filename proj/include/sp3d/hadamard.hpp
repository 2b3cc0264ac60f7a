#pragma once

// Walsh-Hadamard core: Sylvester (natural-order) matrices, the fast
// transform, zero-shifted sensing patterns restricted to a marked pixel
// set, and the differential mean subtraction that undoes the zero shift.

#include <bit>
#include <cstdint>

#include <Eigen/Dense>

#include "sp3d/errors.hpp"
#include "sp3d/types.hpp"

namespace sp3d {

// H(i,j) = +1 when popcount(i & j) is even, -1 otherwise. Identical to
// iterating the Kronecker doubling from [[1,1],[1,-1]].
inline int hadamard_sign(Index row, Index col) {
  const auto bits = static_cast<std::uint64_t>(row) & static_cast<std::uint64_t>(col);
  return (std::popcount(bits) & 1) ? -1 : 1;
}

// Dense H_{2^k} built by Kronecker doubling. Meant for oracles and small
// orders; everything larger goes through the fast transform.
inline Eigen::MatrixXi dense_hadamard(int order_log2) {
  if (order_log2 < 0 || order_log2 > 12)
    throw SizeError("dense_hadamard: order_log2 must be in [0, 12]");
  Eigen::MatrixXi h(1, 1);
  h(0, 0) = 1;
  for (int k = 0; k < order_log2; ++k) {
    const Index n = h.rows();
    Eigen::MatrixXi next(2 * n, 2 * n);
    next.topLeftCorner(n, n) = h;
    next.topRightCorner(n, n) = h;
    next.bottomLeftCorner(n, n) = h;
    next.bottomRightCorner(n, n) = -h;
    h.swap(next);
  }
  return h;
}

// In-place v <- H_L v, radix-2 butterflies, O(L log L). Applying it twice
// yields L v.
template <typename Scalar>
void fwht_inplace(Eigen::Ref<Eigen::VectorX<Scalar>> v) {
  const Index n = v.size();
  if (!is_pow2(n)) throw SizeError("fwht: length must be a power of two");
  for (Index h = 1; h < n; h <<= 1) {
    for (Index i = 0; i < n; i += h << 1) {
      for (Index j = i; j < i + h; ++j) {
        const Scalar a = v(j);
        const Scalar b = v(j + h);
        v(j) = a + b;
        v(j + h) = a - b;
      }
    }
  }
}

template <typename Derived>
Eigen::VectorX<typename Derived::Scalar> fwht(const Eigen::MatrixBase<Derived>& v) {
  Eigen::VectorX<typename Derived::Scalar> out = v;
  fwht_inplace<typename Derived::Scalar>(out);
  return out;
}

// Inverse Hadamard transform, (1/L) H_L v; iht(fwht(x)) == x.
template <typename Derived>
Eigen::VectorX<typename Derived::Scalar> iht(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Eigen::VectorX<Scalar> out = v;
  fwht_inplace<Scalar>(out);
  out /= static_cast<Scalar>(out.size());
  return out;
}

// Measurements under zero-shifted patterns H01 = (H+1)/2 relate to bipolar
// ones through H x = 2 H01 x - (sum x) 1, and row 0 measures exactly sum x,
// so y_bip(m) = 2 y_raw(m) - y_raw(0).
template <typename Derived>
Eigen::VectorX<typename Derived::Scalar> debias(const Eigen::MatrixBase<Derived>& y_raw) {
  using Scalar = typename Derived::Scalar;
  if (y_raw.size() == 0) throw SizeError("debias: empty measurement vector");
  const Scalar y0 = y_raw(0);
  Eigen::VectorX<Scalar> out = Scalar(2) * y_raw.derived();
  out.array() -= y0;
  return out;
}

// Pattern bookkeeping for one acquisition stage: which pixels are marked and
// which Hadamard column drives each marked pixel. The column assignment is
// the prefix count of the mark vector, so marked pixels map onto columns
// 0..M-1 in pixel order.
struct MaskedSensingPlan {
  MarkBits mark;                         // length n_pixels, row-major
  Index n_pixels = 0;                    // N
  Index n_marked = 0;                    // M
  Index order = 0;                       // L = 2^ceil(log2 M)
  Eigen::ArrayX<Index> column_of_pixel;  // length N, -1 where unmarked
  Eigen::ArrayX<Index> pixel_of_column;  // length M

  static MaskedSensingPlan from_mark(const MarkBits& mark) {
    MaskedSensingPlan plan;
    plan.mark = mark;
    plan.n_pixels = mark.size();
    if (plan.n_pixels == 0) throw SizeError("sensing plan: empty mark vector");
    plan.column_of_pixel = Eigen::ArrayX<Index>::Constant(plan.n_pixels, -1);
    Index m = 0;
    for (Index n = 0; n < plan.n_pixels; ++n)
      if (mark(n)) plan.column_of_pixel(n) = m++;
    plan.n_marked = m;
    if (plan.n_marked == 0) throw SizeError("sensing plan: mark selects no pixels");
    plan.order = static_cast<Index>(std::bit_ceil(static_cast<std::uint64_t>(plan.n_marked)));
    plan.pixel_of_column.resize(plan.n_marked);
    for (Index n = 0; n < plan.n_pixels; ++n)
      if (plan.column_of_pixel(n) >= 0) plan.pixel_of_column(plan.column_of_pixel(n)) = n;
    return plan;
  }
};

// Zero-shifted Hadamard row m scattered into the marked pixels. Rows are
// generated on demand; the L x N matrix is never stored.
inline MarkBits pattern_row(const MaskedSensingPlan& plan, Index m) {
  if (m < 0 || m >= plan.order) throw IndexError("pattern_row: row index out of range");
  MarkBits row = MarkBits::Zero(plan.n_pixels);
  for (Index c = 0; c < plan.n_marked; ++c)
    row(plan.pixel_of_column(c)) = hadamard_sign(m, c) > 0 ? 1 : 0;
  return row;
}

}  // namespace sp3d
