#pragma once

#include <Eigen/Dense>
#include <span>
#include <variant>

#include "fftlr/common.hpp"

namespace fftlr::la {

using DenseMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

struct SvdFactors {
  DenseMatrix left;       // rows x k, orthonormal columns
  RealVector singular_values;  // k = min(rows, cols), non-increasing
  DenseMatrix right_adj;  // k x cols, orthonormal rows
};

struct QrFactors {
  DenseMatrix q;  // rows x k, orthonormal columns
  DenseMatrix r;  // k x cols, upper triangular
};

SvdFactors svd_thin(const DenseMatrix& m);
QrFactors qr_thin(const DenseMatrix& m);

struct FixedRank {
  std::size_t rank;
};
struct Tolerance {
  double tau;
};
using RankRule = std::variant<FixedRank, Tolerance>;

/// Number of singular values to keep. Fixed rank clamps to the length;
/// tolerance keeps the fewest values whose discarded tail has 2-norm <= tau.
std::size_t truncation_index(std::span<const double> singular_values, const RankRule& rule);

/// sqrt(sum_{i >= keep} sigma_i^2)
double discarded_norm(std::span<const double> singular_values, std::size_t keep);

bool all_finite(const DenseMatrix& m);

}  // namespace fftlr::la
