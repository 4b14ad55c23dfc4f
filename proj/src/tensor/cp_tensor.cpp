#include <cmath>

#include "fftlr/simd/kernels.hpp"
#include "fftlr/tensor/formats.hpp"

namespace fftlr {

namespace {

constexpr const char* kCpOrderError = "CP construction for d>=3 not supported";

using Idx = Eigen::Index;

void check_pair(const CpTensor& v, const CpTensor& w, const char* op) {
  require(v.shape() == w.shape(), std::string(op) + ": shape mismatch");
}

DenseMatrix as_matrix(const FullTensor& t) {
  const auto n1 = static_cast<Idx>(t.shape()[0]);
  const auto n2 = static_cast<Idx>(t.shape()[1]);
  DenseMatrix m(n1, n2);
  for (Idx i = 0; i < n1; ++i)
    for (Idx j = 0; j < n2; ++j) m(i, j) = t[static_cast<std::size_t>(i * n2 + j)];
  return m;
}

CpTensor zero_cp(const Shape& shape) {
  std::vector<DenseMatrix> f;
  for (auto n : shape) f.push_back(DenseMatrix::Zero(static_cast<Idx>(n), 1));
  return CpTensor({0.0}, std::move(f));
}

}  // namespace

CpTensor::CpTensor(std::vector<double> weights, std::vector<DenseMatrix> factors)
    : weights_(std::move(weights)), factors_(std::move(factors)) {
  require(factors_.size() <= 2, kCpOrderError);
  require(factors_.size() == 2, "CpTensor: order must be 2");
  for (const auto& f : factors_)
    require(static_cast<std::size_t>(f.cols()) == weights_.size(), "CpTensor: factor column count != rank");
}

Shape CpTensor::shape() const {
  Shape s;
  for (const auto& f : factors_) s.push_back(static_cast<std::size_t>(f.rows()));
  return s;
}

FullTensor reconstruct(const CpTensor& v) {
  const Shape s = v.shape();
  require(shape_product(s) <= dense_entry_cap(), "reconstruct: dense size above configured cap");
  const auto& b1 = v.factors()[0];
  const auto& b2 = v.factors()[1];
  Eigen::VectorXcd c(static_cast<Idx>(v.rank()));
  for (std::size_t i = 0; i < v.rank(); ++i) c(static_cast<Idx>(i)) = v.weights()[i];
  const DenseMatrix m = b1 * c.asDiagonal() * b2.transpose();
  FullTensor out(s);
  for (Idx i = 0; i < m.rows(); ++i)
    for (Idx j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return out;
}

cplx entry(const CpTensor& v, std::span<const std::size_t> idx) {
  cplx acc{};
  for (std::size_t i = 0; i < v.rank(); ++i) {
    cplx p = v.weights()[i];
    for (std::size_t j = 0; j < v.order(); ++j) p *= v.factors()[j](static_cast<Idx>(idx[j]), static_cast<Idx>(i));
    acc += p;
  }
  return acc;
}

CpTensor linear_combine(cplx alpha, const CpTensor& v, cplx beta, const CpTensor& w) {
  check_pair(v, w, "linear_combine");
  const auto r = static_cast<Idx>(v.rank());
  const auto s = static_cast<Idx>(w.rank());
  std::vector<double> c(v.weights());
  c.insert(c.end(), w.weights().begin(), w.weights().end());
  std::vector<DenseMatrix> f;
  for (std::size_t j = 0; j < v.order(); ++j) {
    const auto& a = v.factors()[j];
    const auto& b = w.factors()[j];
    DenseMatrix m(a.rows(), r + s);
    m.leftCols(r) = a;
    m.rightCols(s) = b;
    if (j == 0) {
      m.leftCols(r) *= alpha;
      m.rightCols(s) *= beta;
    }
    f.push_back(std::move(m));
  }
  return CpTensor(std::move(c), std::move(f));
}

CpTensor scaled(cplx alpha, CpTensor v) {
  v.factors()[0] *= alpha;
  return v;
}

CpTensor hadamard(const CpTensor& v, const CpTensor& w) {
  check_pair(v, w, "hadamard");
  const std::size_t r = v.rank(), s = w.rank();
  std::vector<double> c(r * s);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < s; ++k) c[i * s + k] = v.weights()[i] * w.weights()[k];
  const auto& kern = simd::kernels();
  std::vector<DenseMatrix> f;
  for (std::size_t j = 0; j < v.order(); ++j) {
    const auto& a = v.factors()[j];
    const auto& b = w.factors()[j];
    DenseMatrix m(a.rows(), static_cast<Idx>(r * s));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < s; ++k)
        kern.cmul(a.col(static_cast<Idx>(i)).data(), b.col(static_cast<Idx>(k)).data(),
                  m.col(static_cast<Idx>(i * s + k)).data(), static_cast<std::size_t>(a.rows()));
    f.push_back(std::move(m));
  }
  return CpTensor(std::move(c), std::move(f));
}

CpTensor fft_d(const CpTensor& v, Direction dir) {
  CpTensor out = v;
  for (auto& f : out.factors()) {
    auto plan = la::plan_for(static_cast<std::size_t>(f.rows()));
    for (Idx i = 0; i < f.cols(); ++i) plan->execute(std::span<cplx>(f.col(i).data(), static_cast<std::size_t>(f.rows())), dir);
  }
  return out;
}

CpTensor truncate(const CpTensor& v, const TruncationPolicy& policy, TruncationInfo* info) {
  policy.validate();
  std::vector<std::size_t> keep_terms;
  double dropped = 0.0;
  {
    std::vector<double> weight(v.rank());
    double wmax = 0.0;
    for (std::size_t i = 0; i < v.rank(); ++i) {
      double w = std::abs(v.weights()[i]);
      for (const auto& f : v.factors()) w *= f.col(static_cast<Idx>(i)).norm();
      weight[i] = w;
      wmax = std::max(wmax, w);
    }
    const double thr = policy.drop_small_norm_threshold.value_or(0.0) * wmax;
    for (std::size_t i = 0; i < v.rank(); ++i) {
      if (weight[i] > thr || (!policy.drop_small_norm_threshold && weight[i] > 0.0))
        keep_terms.push_back(i);
      else
        dropped += weight[i];
    }
  }
  if (info) info->ranks_before = {v.rank()};
  if (keep_terms.empty()) {
    if (info) {
      info->ranks_after = {1};
      info->error_bound = dropped;
    }
    return zero_cp(v.shape());
  }
  const auto r = static_cast<Idx>(keep_terms.size());
  DenseMatrix b1(v.factors()[0].rows(), r), b2(v.factors()[1].rows(), r);
  Eigen::VectorXcd c(r);
  for (Idx t = 0; t < r; ++t) {
    const auto i = static_cast<Idx>(keep_terms[static_cast<std::size_t>(t)]);
    b1.col(t) = v.factors()[0].col(i);
    b2.col(t) = v.factors()[1].col(i);
    c(t) = v.weights()[static_cast<std::size_t>(i)];
  }
  const auto qr1 = la::qr_thin(b1);
  const auto qr2 = la::qr_thin(b2);
  const DenseMatrix core = qr1.r * c.asDiagonal() * qr2.r.transpose();
  const auto svd = la::svd_thin(core);
  std::span<const double> sv(svd.singular_values.data(), static_cast<std::size_t>(svd.singular_values.size()));
  const std::size_t k = select_rank(sv, policy, 0, 1);
  const auto ki = static_cast<Idx>(k);
  std::vector<double> weights(sv.begin(), sv.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<DenseMatrix> factors{qr1.q * svd.left.leftCols(ki), qr2.q * svd.right_adj.topRows(ki).transpose()};
  if (info) {
    info->ranks_after = {k};
    info->error_bound = la::discarded_norm(sv, k) + dropped;
  }
  return CpTensor(std::move(weights), std::move(factors));
}

CpTensor truncate(const CpTensor& v, const TruncationPolicy& policy) { return truncate(v, policy, nullptr); }

CpTensor hadamard_truncate(const CpTensor& v, const CpTensor& w, const TruncationPolicy& p) {
  return truncate(hadamard(v, w), p);
}

cplx inner(const CpTensor& v, const CpTensor& w) {
  check_pair(v, w, "inner");
  DenseMatrix g = DenseMatrix::Ones(static_cast<Idx>(v.rank()), static_cast<Idx>(w.rank()));
  for (std::size_t j = 0; j < v.order(); ++j) g.array() *= (v.factors()[j].adjoint() * w.factors()[j]).array();
  cplx acc{};
  for (std::size_t i = 0; i < v.rank(); ++i)
    for (std::size_t k = 0; k < w.rank(); ++k)
      acc += v.weights()[i] * w.weights()[k] * g(static_cast<Idx>(i), static_cast<Idx>(k));
  return acc;
}

double norm(const CpTensor& v) { return std::sqrt(std::max(0.0, inner(v, v).real())); }

std::size_t param_count(const CpTensor& v) {
  std::size_t p = 0;
  for (auto n : v.shape()) p += n * v.rank();
  return p;
}
RankVector rank_vector(const CpTensor& v) { return {v.rank()}; }
Shape shape_of(const CpTensor& v) { return v.shape(); }

CpTensor resize_centered(const CpTensor& v, std::size_t n) {
  std::vector<DenseMatrix> f;
  for (const auto& b : v.factors()) {
    const auto m = static_cast<std::size_t>(b.rows());
    require(m % 2 == 1 && n % 2 == 1, "resize_centered: sizes must be odd");
    DenseMatrix out = DenseMatrix::Zero(static_cast<Idx>(n), b.cols());
    const std::size_t common = std::min(m, n);
    out.middleRows(static_cast<Idx>((n - common) / 2), static_cast<Idx>(common)) =
        b.middleRows(static_cast<Idx>((m - common) / 2), static_cast<Idx>(common));
    f.push_back(std::move(out));
  }
  return CpTensor(v.weights(), std::move(f));
}

CpTensor annihilate_entry(CpTensor v, std::span<const std::size_t> idx) {
  // d = 2: the tensor is M B^T with M = B_0 diag(c). Changing row b of B by
  // delta changes column b of the tensor by M delta; the smallest such change
  // that zeroes entry (a, b) is -m Q conj(q_a) / |q_a|^2 with M = Q R.
  require(v.order() == 2, kCpOrderError);
  const auto r = static_cast<Idx>(v.rank());
  const auto a = static_cast<Idx>(idx[0]);
  const auto b = static_cast<Idx>(idx[1]);
  DenseMatrix m = v.factors()[0];
  for (Idx i = 0; i < r; ++i) m.col(i) *= v.weights()[static_cast<std::size_t>(i)];
  auto& last = v.factors()[1];
  const cplx val = (m.row(a).transpose().array() * last.row(b).transpose().array()).sum();
  if (val == cplx{}) return v;
  Eigen::HouseholderQR<DenseMatrix> qr(m);
  const Idx k = std::min<Idx>(m.rows(), r);
  const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(m.rows(), k);
  const DenseMatrix rr = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::VectorXcd qa = q.row(a).transpose();
  const double qa2 = qa.squaredNorm();
  if (qa2 == 0.0) return v;
  const Eigen::VectorXcd y = -val * qa.conjugate() / qa2;
  const Eigen::VectorXcd delta = rr.completeOrthogonalDecomposition().solve(y);
  last.row(b) += delta.transpose();
  return v;
}

template <> CpTensor rank_one<CpTensor>(const std::vector<std::vector<cplx>>& vectors) {
  std::vector<DenseMatrix> f;
  for (const auto& vec : vectors) {
    DenseMatrix m(static_cast<Idx>(vec.size()), 1);
    for (std::size_t i = 0; i < vec.size(); ++i) m(static_cast<Idx>(i), 0) = vec[i];
    f.push_back(std::move(m));
  }
  return CpTensor({1.0}, std::move(f));
}

template <> CpTensor decompose<CpTensor>(const FullTensor& t, const TruncationPolicy& policy) {
  require(t.order() <= 2, kCpOrderError);
  require(t.order() == 2, "CP decomposition requires an order-2 tensor");
  policy.validate();
  const auto svd = la::svd_thin(as_matrix(t));
  std::span<const double> sv(svd.singular_values.data(), static_cast<std::size_t>(svd.singular_values.size()));
  const std::size_t k = select_rank(sv, policy, 0, 1);
  const auto ki = static_cast<Idx>(k);
  std::vector<double> weights(sv.begin(), sv.begin() + static_cast<std::ptrdiff_t>(k));
  return CpTensor(std::move(weights), {svd.left.leftCols(ki), svd.right_adj.topRows(ki).transpose()});
}

}  // namespace fftlr
