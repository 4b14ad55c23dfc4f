#include "fftlr/la/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fftlr::la {

bool all_finite(const DenseMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

SvdFactors svd_thin(const DenseMatrix& m) {
  require(all_finite(m), "svd_thin: non-finite entries");
  SvdFactors f;
  if (m.rows() == 0 || m.cols() == 0) {
    f.left = DenseMatrix(m.rows(), 0);
    f.singular_values = RealVector(0);
    f.right_adj = DenseMatrix(0, m.cols());
    return f;
  }
  // BDC falls back to Jacobi for small blocks and is faster for large ones.
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.left = svd.matrixU();
  f.singular_values = svd.singularValues();
  f.right_adj = svd.matrixV().adjoint();
  // deflation can leave round-off level values slightly out of order
  const auto k = f.singular_values.size();
  bool sorted = true;
  for (Eigen::Index i = 1; i < k; ++i) sorted = sorted && f.singular_values[i] <= f.singular_values[i - 1];
  if (!sorted) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return f.singular_values[a] > f.singular_values[b]; });
    SvdFactors s{DenseMatrix(f.left.rows(), k), RealVector(k), DenseMatrix(k, f.right_adj.cols())};
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::Index src = order[static_cast<std::size_t>(i)];
      s.left.col(i) = f.left.col(src);
      s.singular_values[i] = f.singular_values[src];
      s.right_adj.row(i) = f.right_adj.row(src);
    }
    return s;
  }
  return f;
}

QrFactors qr_thin(const DenseMatrix& m) {
  require(all_finite(m), "qr_thin: non-finite entries");
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const Eigen::Index k = std::min(rows, cols);
  QrFactors f;
  if (k == 0) {
    f.q = DenseMatrix(rows, 0);
    f.r = DenseMatrix(0, cols);
    return f;
  }
  Eigen::HouseholderQR<DenseMatrix> qr(m);
  f.q = qr.householderQ() * DenseMatrix::Identity(rows, k);
  f.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  // Normalise so that diag(r) is real non-negative; keeps q*r unchanged.
  for (Eigen::Index i = 0; i < k; ++i) {
    const cplx d = f.r(i, i);
    const double a = std::abs(d);
    if (a == 0.0) continue;
    const cplx phase = d / a;
    f.r.row(i) *= std::conj(phase);
    f.q.col(i) *= phase;
  }
  return f;
}

std::size_t truncation_index(std::span<const double> sv, const RankRule& rule) {
  for (std::size_t i = 0; i < sv.size(); ++i) {
    require(sv[i] >= 0.0, "truncation_index: negative singular value");
    if (i > 0) require(sv[i] <= sv[i - 1], "truncation_index: values not non-increasing");
  }
  if (const auto* fixed = std::get_if<FixedRank>(&rule)) return std::min(fixed->rank, sv.size());
  const double tau = std::get<Tolerance>(rule).tau;
  require(tau >= 0.0, "truncation_index: negative tolerance");
  // walk from the tail, accumulating the discarded energy
  double tail = 0.0;
  std::size_t keep = sv.size();
  while (keep > 0) {
    const double next = tail + sv[keep - 1] * sv[keep - 1];
    if (std::sqrt(next) > tau) break;
    tail = next;
    --keep;
  }
  return keep;
}

double discarded_norm(std::span<const double> sv, std::size_t keep) {
  double s = 0.0;
  for (std::size_t i = keep; i < sv.size(); ++i) s += sv[i] * sv[i];
  return std::sqrt(s);
}

}  // namespace fftlr::la
