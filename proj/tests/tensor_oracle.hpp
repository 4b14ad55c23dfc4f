#pragma once

// Dense reference implementations of the tensor operations, written with
// plain index loops and direct DFT sums.

#include <Eigen/Dense>
#include <random>

#include "fftlr/tensor/formats.hpp"

namespace tensor_oracle {

using namespace fftlr;

inline std::vector<std::size_t> unflatten(std::size_t flat, const Shape& s) {
  std::vector<std::size_t> idx(s.size());
  for (std::size_t j = s.size(); j-- > 0;) {
    idx[j] = flat % s[j];
    flat /= s[j];
  }
  return idx;
}

inline double diff(const FullTensor& a, const FullTensor& b) {
  require(a.shape() == b.shape(), "oracle: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

inline double fro(const FullTensor& a) {
  double s = 0.0;
  for (const auto& z : a.values()) s += std::norm(z);
  return std::sqrt(s);
}

inline std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {nd(rng), nd(rng)};
  return v;
}

/// Sum of `terms` random rank-one tensors.
template <class T> T random_tensor(const Shape& shape, std::size_t terms, std::mt19937_64& rng) {
  auto make = [&] {
    std::vector<std::vector<cplx>> vs;
    for (auto n : shape) vs.push_back(random_vec(n, rng));
    return rank_one<T>(vs);
  };
  T out = make();
  for (std::size_t i = 1; i < terms; ++i) out = linear_combine(1.0, out, 1.0, make());
  return out;
}

/// Separable centered DFT by direct summation along every mode.
inline FullTensor fft(const FullTensor& v, Direction dir) {
  FullTensor cur = v;
  const Shape& s = v.shape();
  for (std::size_t j = 0; j < s.size(); ++j) {
    FullTensor next(s);
    const long n = static_cast<long>(s[j]), h = (n - 1) / 2;
    const double sign = dir == Direction::forward ? -1.0 : 1.0;
    for (std::size_t f = 0; f < cur.size(); ++f) {
      auto idx = unflatten(f, s);
      const long p = static_cast<long>(idx[j]) - h;
      cplx acc{};
      for (long q = 0; q < n; ++q) {
        idx[j] = static_cast<std::size_t>(q);
        acc += cur.at(idx) * std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(p * (q - h)) / static_cast<double>(n));
      }
      next[f] = dir == Direction::forward ? acc / static_cast<double>(n) : acc;
    }
    cur = next;
  }
  return cur;
}

inline FullTensor resize(const FullTensor& v, std::size_t n) {
  Shape out_shape(v.order(), n);
  FullTensor out(out_shape);
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto idx = unflatten(f, out_shape);
    bool inside = true;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const long k = static_cast<long>(idx[j]) - static_cast<long>(n - 1) / 2;
      const long h = static_cast<long>(v.shape()[j] - 1) / 2;
      if (std::abs(k) > h) inside = false;
      idx[j] = static_cast<std::size_t>(k + h);
    }
    if (inside) out[f] = v.at(idx);
  }
  return out;
}

inline FullTensor combine(cplx a, const FullTensor& x, cplx b, const FullTensor& y) {
  FullTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

inline FullTensor product(const FullTensor& x, const FullTensor& y) {
  FullTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return out;
}

inline cplx dot(const FullTensor& x, const FullTensor& y) {
  cplx s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

/// Singular values of the unfolding with rows indexed by modes [0, split).
inline Eigen::VectorXd unfolding_singular_values(const FullTensor& v, std::size_t split, bool single_mode) {
  const Shape& s = v.shape();
  // single_mode: rows = mode `split`, columns = the rest
  std::size_t rows = 1;
  if (single_mode) rows = s[split];
  else
    for (std::size_t j = 0; j < split; ++j) rows *= s[j];
  const std::size_t cols = v.size() / rows;
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<std::size_t> col_count(rows, 0);
  for (std::size_t f = 0; f < v.size(); ++f) {
    const auto idx = unflatten(f, s);
    std::size_t r = 0, c = 0;
    if (single_mode) {
      r = idx[split];
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != split) c = c * s[j] + idx[j];
    } else {
      for (std::size_t j = 0; j < split; ++j) r = r * s[j] + idx[j];
      for (std::size_t j = split; j < s.size(); ++j) c = c * s[j] + idx[j];
    }
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[f];
  }
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
}

inline double tail2(const Eigen::VectorXd& sv, std::size_t keep) {
  double s = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(keep); i < sv.size(); ++i) s += sv[i] * sv[i];
  return s;
}

/// sqrt(sum over modes of the discarded mode-unfolding singular values^2).
inline double tucker_bound(const FullTensor& v, const RankVector& ranks) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.order(); ++j) s += tail2(unfolding_singular_values(v, j, true), ranks[j]);
  return std::sqrt(s);
}

/// sqrt(sum over bonds of the discarded sequential-unfolding singular values^2).
inline double tt_bound(const FullTensor& v, const RankVector& ranks) {
  double s = 0.0;
  for (std::size_t k = 1; k < v.order(); ++k) s += tail2(unfolding_singular_values(v, k, false), ranks[k - 1]);
  return std::sqrt(s);
}

}  // namespace tensor_oracle
