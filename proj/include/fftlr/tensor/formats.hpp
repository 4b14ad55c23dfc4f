#pragma once

// Order-d tensors in full storage and in three compressed formats.
//
// All factor data is complex. Factor vectors are stored as matrix columns
// (N_j x r), which keeps each vector contiguous for the 1-D transforms.
//
//   CpTensor      v = sum_i c[i] (x)_j B_j[:, i]                  (d = 2 only)
//   TuckerTensor  v = sum_{i_1..i_d} core[i] (x)_j U_j[:, i_j]
//   TtTensor      v[k] = G_1[:, k_1, :] G_2[:, k_2, :] ... G_d[:, k_d, :]

#include <functional>
#include <span>
#include <variant>

#include "fftlr/la/dense.hpp"
#include "fftlr/la/fft.hpp"
#include "fftlr/tensor/policy.hpp"

namespace fftlr {

using la::DenseMatrix;
using la::Direction;

class FullTensor {
 public:
  FullTensor() = default;
  explicit FullTensor(Shape shape);
  FullTensor(Shape shape, std::vector<cplx> data);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }
  std::vector<cplx>& values() { return data_; }
  const std::vector<cplx>& values() const { return data_; }

  cplx& operator[](std::size_t flat) { return data_[flat]; }
  const cplx& operator[](std::size_t flat) const { return data_[flat]; }

  /// Row-major offset of a multi-index (last index fastest).
  std::size_t offset(std::span<const std::size_t> idx) const;
  cplx& at(std::span<const std::size_t> idx) { return data_[offset(idx)]; }
  const cplx& at(std::span<const std::size_t> idx) const { return data_[offset(idx)]; }

  /// Distance between consecutive entries along mode j.
  std::size_t stride(std::size_t j) const;

 private:
  Shape shape_;
  std::vector<cplx> data_;
};

class CpTensor {
 public:
  CpTensor() = default;
  CpTensor(std::vector<double> weights, std::vector<DenseMatrix> factors);

  std::size_t order() const { return factors_.size(); }
  std::size_t rank() const { return weights_.size(); }
  Shape shape() const;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<DenseMatrix>& factors() const { return factors_; }
  std::vector<double>& weights() { return weights_; }
  std::vector<DenseMatrix>& factors() { return factors_; }

 private:
  std::vector<double> weights_;
  std::vector<DenseMatrix> factors_;
};

class TuckerTensor {
 public:
  TuckerTensor() = default;
  TuckerTensor(FullTensor core, std::vector<DenseMatrix> factors, std::vector<bool> orthonormal);

  std::size_t order() const { return factors_.size(); }
  Shape shape() const;
  RankVector ranks() const { return core_.shape(); }

  const FullTensor& core() const { return core_; }
  FullTensor& core() { return core_; }
  const std::vector<DenseMatrix>& factors() const { return factors_; }
  std::vector<DenseMatrix>& factors() { return factors_; }
  const std::vector<bool>& orthonormal() const { return orthonormal_; }
  bool all_orthonormal() const;
  void clear_orthonormal();

  /// Checks every factor flagged orthonormal against `tol`.
  bool verify_orthonormal(double tol = 1e-10) const;

 private:
  FullTensor core_;
  std::vector<DenseMatrix> factors_;
  std::vector<bool> orthonormal_;
};

struct Carriage {
  std::size_t r0 = 1, n = 0, r1 = 1;
  // (r0*n) x r1; element (a, i, b) lives at row a + r0*i, column b. The same
  // buffer read as an r0 x (n*r1) column-major matrix is the right unfolding.
  DenseMatrix data;

  Carriage() = default;
  Carriage(std::size_t r0_, std::size_t n_, std::size_t r1_)
      : r0(r0_), n(n_), r1(r1_), data(DenseMatrix::Zero(static_cast<Eigen::Index>(r0_ * n_),
                                                        static_cast<Eigen::Index>(r1_))) {}

  cplx& operator()(std::size_t a, std::size_t i, std::size_t b) {
    return data(static_cast<Eigen::Index>(a + r0 * i), static_cast<Eigen::Index>(b));
  }
  const cplx& operator()(std::size_t a, std::size_t i, std::size_t b) const {
    return data(static_cast<Eigen::Index>(a + r0 * i), static_cast<Eigen::Index>(b));
  }
  Eigen::Map<DenseMatrix> right_unfolding() {
    return {data.data(), static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(n * r1)};
  }
  Eigen::Map<const DenseMatrix> right_unfolding() const {
    return {data.data(), static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(n * r1)};
  }
};

class TtTensor {
 public:
  TtTensor() = default;
  explicit TtTensor(std::vector<Carriage> carriages);

  std::size_t order() const { return carriages_.size(); }
  Shape shape() const;
  /// Interior bond ranks (r_1, ..., r_{d-1}).
  RankVector ranks() const;

  const std::vector<Carriage>& carriages() const { return carriages_; }
  std::vector<Carriage>& carriages() { return carriages_; }

 private:
  std::vector<Carriage> carriages_;
};

using LowRankTensor = std::variant<CpTensor, TuckerTensor, TtTensor>;
using AnyTensor = std::variant<FullTensor, CpTensor, TuckerTensor, TtTensor>;

enum class Format { full, cp, tucker, tt };
std::string_view format_name(Format f);
Format parse_format(std::string_view s);

template <class T> struct FormatOf;
template <> struct FormatOf<FullTensor> { static constexpr Format value = Format::full; };
template <> struct FormatOf<CpTensor> { static constexpr Format value = Format::cp; };
template <> struct FormatOf<TuckerTensor> { static constexpr Format value = Format::tucker; };
template <> struct FormatOf<TtTensor> { static constexpr Format value = Format::tt; };

// ---------------------------------------------------------------------------
// Dense size guard for reconstruction and densifying fallbacks.
std::size_t dense_entry_cap();
void set_dense_entry_cap(std::size_t cap);

// ---------------------------------------------------------------------------
// Construction

/// Tensor product of one vector per mode, in the requested format.
template <class T> T rank_one(const std::vector<std::vector<cplx>>& vectors);

/// Error-minimising compression of a full tensor (SVD / HOSVD / TT-SVD).
/// CP requires order 2.
template <class T> T decompose(const FullTensor& t, const TruncationPolicy& policy);

FullTensor reconstruct(const FullTensor& v);
FullTensor reconstruct(const CpTensor& v);
FullTensor reconstruct(const TuckerTensor& v);
FullTensor reconstruct(const TtTensor& v);

cplx entry(const FullTensor& v, std::span<const std::size_t> idx);
cplx entry(const CpTensor& v, std::span<const std::size_t> idx);
cplx entry(const TuckerTensor& v, std::span<const std::size_t> idx);
cplx entry(const TtTensor& v, std::span<const std::size_t> idx);

// ---------------------------------------------------------------------------
// Algebra. Binary operations require equal format and shape.

FullTensor linear_combine(cplx alpha, const FullTensor& v, cplx beta, const FullTensor& w);
CpTensor linear_combine(cplx alpha, const CpTensor& v, cplx beta, const CpTensor& w);
TuckerTensor linear_combine(cplx alpha, const TuckerTensor& v, cplx beta, const TuckerTensor& w);
TtTensor linear_combine(cplx alpha, const TtTensor& v, cplx beta, const TtTensor& w);

FullTensor scaled(cplx alpha, FullTensor v);
CpTensor scaled(cplx alpha, CpTensor v);
TuckerTensor scaled(cplx alpha, TuckerTensor v);
TtTensor scaled(cplx alpha, TtTensor v);

FullTensor hadamard(const FullTensor& v, const FullTensor& w);
CpTensor hadamard(const CpTensor& v, const CpTensor& w);
TuckerTensor hadamard(const TuckerTensor& v, const TuckerTensor& w);
TtTensor hadamard(const TtTensor& v, const TtTensor& w);

FullTensor fft_d(const FullTensor& v, Direction dir);
CpTensor fft_d(const CpTensor& v, Direction dir);
TuckerTensor fft_d(const TuckerTensor& v, Direction dir);
TtTensor fft_d(const TtTensor& v, Direction dir);

FullTensor truncate(const FullTensor& v, const TruncationPolicy& policy);
CpTensor truncate(const CpTensor& v, const TruncationPolicy& policy);
TuckerTensor truncate(const TuckerTensor& v, const TruncationPolicy& policy);
TtTensor truncate(const TtTensor& v, const TruncationPolicy& policy);

/// truncate(hadamard(v, w), policy) without materialising the full product
/// representation where the format allows it.
FullTensor hadamard_truncate(const FullTensor& v, const FullTensor& w, const TruncationPolicy& p);
CpTensor hadamard_truncate(const CpTensor& v, const CpTensor& w, const TruncationPolicy& p);
TuckerTensor hadamard_truncate(const TuckerTensor& v, const TuckerTensor& w, const TruncationPolicy& p);
TtTensor hadamard_truncate(const TtTensor& v, const TtTensor& w, const TruncationPolicy& p);

/// sum conj(v) * w over all entries.
cplx inner(const FullTensor& v, const FullTensor& w);
cplx inner(const CpTensor& v, const CpTensor& w);
cplx inner(const TuckerTensor& v, const TuckerTensor& w);
cplx inner(const TtTensor& v, const TtTensor& w);

struct TuckerNorm {
  double value;
  bool core_shortcut;  // false when a factor was not flagged orthonormal
};
/// Uses the core Frobenius norm when every factor is orthonormal, otherwise
/// the general contraction.
TuckerNorm tucker_norm(const TuckerTensor& v);

double norm(const FullTensor& v);
double norm(const CpTensor& v);
double norm(const TuckerTensor& v);
double norm(const TtTensor& v);

std::size_t param_count(const FullTensor& v);
std::size_t param_count(const CpTensor& v);
std::size_t param_count(const TuckerTensor& v);
std::size_t param_count(const TtTensor& v);

RankVector rank_vector(const FullTensor& v);
RankVector rank_vector(const CpTensor& v);
RankVector rank_vector(const TuckerTensor& v);
RankVector rank_vector(const TtTensor& v);
std::size_t max_rank(const RankVector& r);

Shape shape_of(const FullTensor& v);
Shape shape_of(const CpTensor& v);
Shape shape_of(const TuckerTensor& v);
Shape shape_of(const TtTensor& v);

/// Centered crop or zero-extension of every mode to `n` entries (odd sizes).
/// Ranks are unchanged.
FullTensor resize_centered(const FullTensor& v, std::size_t n);
CpTensor resize_centered(const CpTensor& v, std::size_t n);
TuckerTensor resize_centered(const TuckerTensor& v, std::size_t n);
TtTensor resize_centered(const TtTensor& v, std::size_t n);

/// Makes the entry at `idx` exactly zero with a rank-preserving correction
/// confined to one factor (CP, TT) or to the core (Tucker): the minimal-norm
/// change of that block which annihilates the entry.
FullTensor annihilate_entry(FullTensor v, std::span<const std::size_t> idx);
CpTensor annihilate_entry(CpTensor v, std::span<const std::size_t> idx);
TuckerTensor annihilate_entry(TuckerTensor v, std::span<const std::size_t> idx);
TtTensor annihilate_entry(TtTensor v, std::span<const std::size_t> idx);

// ---------------------------------------------------------------------------
// Truncation diagnostics used by tests and reports.

struct TruncationInfo {
  RankVector ranks_before;
  RankVector ranks_after;
  double error_bound = 0.0;  // from discarded singular values
};
TuckerTensor truncate(const TuckerTensor& v, const TruncationPolicy& policy, TruncationInfo* info);
TtTensor truncate(const TtTensor& v, const TruncationPolicy& policy, TruncationInfo* info);
CpTensor truncate(const CpTensor& v, const TruncationPolicy& policy, TruncationInfo* info);

// Dispatch helpers over the variants.
FullTensor reconstruct(const AnyTensor& v);
std::size_t param_count(const AnyTensor& v);
RankVector rank_vector(const AnyTensor& v);
Format format_of(const AnyTensor& v);

}  // namespace fftlr
