#pragma once

// Internal helpers shared by the format implementations.

#include "fftlr/tensor/formats.hpp"

namespace fftlr::detail {

using Idx = Eigen::Index;
using ColMap = Eigen::Map<DenseMatrix>;
using ConstColMap = Eigen::Map<const DenseMatrix>;

/// t x_j m : replaces mode j (size n) by m.rows(); m is (a x n).
FullTensor mode_product(const FullTensor& t, std::size_t j, const DenseMatrix& m);

/// Mode-j unfolding, n_j x (product of the other sizes).
DenseMatrix unfold(const FullTensor& t, std::size_t j);

/// Centered crop or zero-extension of the rows of m to n.
DenseMatrix resize_rows_centered(const DenseMatrix& m, std::size_t n);

/// Applies the centered 1-D transform to each column of m in place, scaled
/// by `scale` afterwards.
void fft_columns(DenseMatrix& m, Direction dir, double scale = 1.0);

inline std::span<const double> as_span(const la::RealVector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace fftlr::detail
