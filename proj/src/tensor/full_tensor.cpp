#include <algorithm>
#include <atomic>
#include <cmath>

#include "fftlr/simd/kernels.hpp"
#include "fftlr/tensor/formats.hpp"

namespace fftlr {

namespace {
std::atomic<std::size_t> g_dense_cap{std::size_t{1} << 26};

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  require(a == b, std::string(op) + ": shape mismatch");
}
}  // namespace

std::size_t dense_entry_cap() { return g_dense_cap.load(); }
void set_dense_entry_cap(std::size_t cap) { g_dense_cap.store(cap); }

FullTensor::FullTensor(Shape shape) : shape_(std::move(shape)), data_(shape_product(shape_)) {}

FullTensor::FullTensor(Shape shape, std::vector<cplx> data) : shape_(std::move(shape)), data_(std::move(data)) {
  require(data_.size() == shape_product(shape_), "FullTensor: entry count != product of shape");
}

std::size_t FullTensor::offset(std::span<const std::size_t> idx) const {
  require(idx.size() == shape_.size(), "FullTensor: index order mismatch");
  std::size_t off = 0;
  for (std::size_t j = 0; j < idx.size(); ++j) off = off * shape_[j] + idx[j];
  return off;
}

std::size_t FullTensor::stride(std::size_t j) const {
  std::size_t s = 1;
  for (std::size_t k = j + 1; k < shape_.size(); ++k) s *= shape_[k];
  return s;
}

std::string_view format_name(Format f) {
  switch (f) {
    case Format::full:
      return "full";
    case Format::cp:
      return "cp";
    case Format::tucker:
      return "tucker";
    case Format::tt:
      return "tt";
  }
  return "?";
}

Format parse_format(std::string_view s) {
  if (s == "full") return Format::full;
  if (s == "cp") return Format::cp;
  if (s == "tucker") return Format::tucker;
  if (s == "tt") return Format::tt;
  throw Error("unknown tensor format '" + std::string(s) + "'");
}

FullTensor reconstruct(const FullTensor& v) { return v; }

cplx entry(const FullTensor& v, std::span<const std::size_t> idx) { return v.at(idx); }

FullTensor linear_combine(cplx alpha, const FullTensor& v, cplx beta, const FullTensor& w) {
  require_same_shape(v.shape(), w.shape(), "linear_combine");
  FullTensor out(v.shape());
  const auto& k = simd::kernels();
  k.caxpy(alpha, v.data().data(), out.data().data(), out.size());
  k.caxpy(beta, w.data().data(), out.data().data(), out.size());
  return out;
}

FullTensor scaled(cplx alpha, FullTensor v) {
  simd::kernels().cscale(alpha, v.data().data(), v.size());
  return v;
}

FullTensor hadamard(const FullTensor& v, const FullTensor& w) {
  require_same_shape(v.shape(), w.shape(), "hadamard");
  FullTensor out(v.shape());
  simd::kernels().cmul(v.data().data(), w.data().data(), out.data().data(), out.size());
  return out;
}

FullTensor fft_d(const FullTensor& v, Direction dir) {
  FullTensor out = v;
  for (std::size_t j = 0; j < v.order(); ++j) {
    const std::size_t n = v.shape()[j];
    const std::size_t s = v.stride(j);
    const std::size_t outer = v.size() / (n * s);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t i = 0; i < s; ++i) la::fft1d_strided(out.data().data() + o * n * s + i, n, s, dir);
  }
  return out;
}

FullTensor truncate(const FullTensor& v, const TruncationPolicy&) { return v; }

FullTensor hadamard_truncate(const FullTensor& v, const FullTensor& w, const TruncationPolicy&) {
  return hadamard(v, w);
}

cplx inner(const FullTensor& v, const FullTensor& w) {
  require_same_shape(v.shape(), w.shape(), "inner");
  return simd::kernels().cdotc(v.data().data(), w.data().data(), v.size());
}

double norm(const FullTensor& v) { return std::sqrt(std::max(0.0, inner(v, v).real())); }

std::size_t param_count(const FullTensor& v) { return v.size(); }
RankVector rank_vector(const FullTensor&) { return {}; }
Shape shape_of(const FullTensor& v) { return v.shape(); }

std::size_t max_rank(const RankVector& r) {
  std::size_t m = 0;
  for (auto x : r) m = std::max(m, x);
  return m;
}

FullTensor resize_centered(const FullTensor& v, std::size_t n) {
  const std::size_t d = v.order();
  Shape out_shape(d, n);
  FullTensor out(out_shape);
  Shape common(d), off_src(d), off_dst(d);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t m = v.shape()[j];
    require(m % 2 == 1 && n % 2 == 1, "resize_centered: sizes must be odd");
    common[j] = std::min(m, n);
    off_src[j] = (m - common[j]) / 2;
    off_dst[j] = (n - common[j]) / 2;
  }
  const std::size_t total = shape_product(common);
  std::vector<std::size_t> q(d, 0), src(d), dst(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    for (std::size_t j = 0; j < d; ++j) {
      src[j] = q[j] + off_src[j];
      dst[j] = q[j] + off_dst[j];
    }
    out.at(dst) = v.at(src);
    for (std::size_t j = d; j-- > 0;) {
      if (++q[j] < common[j]) break;
      q[j] = 0;
    }
  }
  return out;
}

FullTensor annihilate_entry(FullTensor v, std::span<const std::size_t> idx) {
  v.at(idx) = 0.0;
  return v;
}

FullTensor reconstruct(const AnyTensor& v) {
  return std::visit([](const auto& t) { return reconstruct(t); }, v);
}
std::size_t param_count(const AnyTensor& v) {
  return std::visit([](const auto& t) { return param_count(t); }, v);
}
RankVector rank_vector(const AnyTensor& v) {
  return std::visit([](const auto& t) { return rank_vector(t); }, v);
}
Format format_of(const AnyTensor& v) {
  return std::visit([](const auto& t) { return FormatOf<std::decay_t<decltype(t)>>::value; }, v);
}

template <> FullTensor rank_one<FullTensor>(const std::vector<std::vector<cplx>>& vectors) {
  Shape shape;
  for (const auto& v : vectors) shape.push_back(v.size());
  FullTensor out(shape);
  const std::size_t d = shape.size();
  std::vector<std::size_t> q(d, 0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    cplx p = 1.0;
    for (std::size_t j = 0; j < d; ++j) p *= vectors[j][q[j]];
    out[flat] = p;
    for (std::size_t j = d; j-- > 0;) {
      if (++q[j] < shape[j]) break;
      q[j] = 0;
    }
  }
  return out;
}

template <> FullTensor decompose<FullTensor>(const FullTensor& t, const TruncationPolicy&) { return t; }

}  // namespace fftlr
