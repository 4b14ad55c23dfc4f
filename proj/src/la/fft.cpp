#include "fftlr/la/fft.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "fftlr/simd/kernels.hpp"

namespace fftlr::la {
namespace {

// Prime factors above this go through Bluestein instead of an O(p^2) butterfly.
constexpr std::size_t kMaxDirectPrime = 31;

std::vector<std::size_t> factorize(std::size_t n) {
  std::vector<std::size_t> f;
  for (std::size_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  }
  if (n > 1) f.push_back(n);
  return f;
}

std::vector<cplx> make_roots(std::size_t n) {
  std::vector<cplx> r(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double ang = -2.0 * kPi * static_cast<double>(e) / static_cast<double>(n);
    r[e] = {std::cos(ang), std::sin(ang)};
  }
  return r;
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  require(n >= 1, "fft: empty transform");
  require(n % 2 == 1, "even grid size unsupported");
  factors_ = factorize(n);
  use_bluestein_ = !factors_.empty() && factors_.back() > kMaxDirectPrime;
  if (!use_bluestein_) {
    roots_ = make_roots(n);
    return;
  }
  conv_len_ = 1;
  while (conv_len_ < 2 * n - 1) conv_len_ <<= 1;
  conv_roots_ = make_roots(conv_len_);
  chirp_.resize(n);
  const std::size_t two_n = 2 * n;
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t sq = (m * m) % two_n;  // exact phase reduction
    const double ang = -kPi * static_cast<double>(sq) / static_cast<double>(n);
    chirp_[m] = {std::cos(ang), std::sin(ang)};
  }
  chirp_hat_.assign(conv_len_, cplx{});
  chirp_hat_[0] = std::conj(chirp_[0]);
  for (std::size_t j = 1; j < n; ++j) {
    chirp_hat_[j] = std::conj(chirp_[j]);
    chirp_hat_[conv_len_ - j] = std::conj(chirp_[j]);
  }
  pow2_inplace(chirp_hat_.data(), conv_roots_, conv_len_);
}

std::size_t FftPlan::scratch_size() const {
  if (use_bluestein_) return 2 * conv_len_;
  return n_ + (factors_.empty() ? 1 : factors_.back());
}

void FftPlan::mixed_radix(const cplx* in, std::size_t stride, cplx* out, std::size_t n,
                          std::size_t factor_idx, cplx* work) const {
  const std::size_t p = factors_[factor_idx];
  const std::size_t m = n / p;
  const std::size_t step = n_ / n;
  if (m == 1) {
    for (std::size_t k = 0; k < p; ++k) {
      cplx acc{};
      for (std::size_t j = 0; j < p; ++j) acc += in[j * stride] * roots_[(j * k * step) % n_];
      out[k] = acc;
    }
    return;
  }
  for (std::size_t j = 0; j < p; ++j) mixed_radix(in + j * stride, stride * p, out + j * m, m, factor_idx + 1, work);
  const std::size_t pstep = n_ / p;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < p; ++j) work[j] = out[j * m + k] * roots_[(j * k * step) % n_];
    for (std::size_t q = 0; q < p; ++q) {
      cplx acc = work[0];
      for (std::size_t j = 1; j < p; ++j) acc += work[j] * roots_[(j * q * pstep) % n_];
      out[q * m + k] = acc;
    }
  }
}

void FftPlan::pow2_inplace(cplx* data, const std::vector<cplx>& roots, std::size_t len) const {
  for (std::size_t i = 1, j = 0; i < len; ++i) {
    std::size_t bit = len >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t half = 1; half < len; half <<= 1) {
    const std::size_t step = len / (2 * half);
    for (std::size_t start = 0; start < len; start += 2 * half) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx t = data[start + k + half] * roots[k * step];
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
}

void FftPlan::bluestein(cplx* data, cplx* scratch) const {
  cplx* a = scratch;
  std::fill(a, a + conv_len_, cplx{});
  simd::kernels().cmul(data, chirp_.data(), a, n_);
  pow2_inplace(a, conv_roots_, conv_len_);
  simd::kernels().cmul(a, chirp_hat_.data(), a, conv_len_);
  // inverse via conjugation
  for (std::size_t i = 0; i < conv_len_; ++i) a[i] = std::conj(a[i]);
  pow2_inplace(a, conv_roots_, conv_len_);
  const double inv_len = 1.0 / static_cast<double>(conv_len_);
  for (std::size_t k = 0; k < n_; ++k) data[k] = chirp_[k] * std::conj(a[k]) * inv_len;
}

void FftPlan::transform_natural(cplx* data, cplx* scratch) const {
  if (n_ == 1) return;
  if (use_bluestein_) {
    bluestein(data, scratch);
    return;
  }
  cplx* out = scratch;
  cplx* work = scratch + n_;
  mixed_radix(data, 1, out, n_, 0, work);
  std::copy(out, out + n_, data);
}

void FftPlan::execute(std::span<cplx> data, Direction dir) const {
  require(data.size() == n_, "fft: length mismatch");
  thread_local std::vector<cplx> buf;
  thread_local std::vector<cplx> scratch;
  buf.resize(n_);
  scratch.resize(scratch_size());
  const std::size_t h = (n_ - 1) / 2;
  for (std::size_t i = 0; i < n_; ++i) buf[i] = data[(i + h) % n_];
  const bool inv = dir == Direction::inverse;
  if (inv)
    for (auto& z : buf) z = std::conj(z);
  transform_natural(buf.data(), scratch.data());
  if (inv) {
    for (auto& z : buf) z = std::conj(z);
  } else {
    const double s = 1.0 / static_cast<double>(n_);
    for (auto& z : buf) z *= s;
  }
  for (std::size_t k = 0; k < n_; ++k) data[(k + h) % n_] = buf[k];
}

std::shared_ptr<const FftPlan> plan_for(std::size_t n) {
  require(n % 2 == 1, "even grid size unsupported");
  static std::mutex mu;
  static std::unordered_map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const FftPlan>(n);
  cache.emplace(n, plan);
  return plan;
}

std::vector<cplx> fft1d(std::span<const cplx> v, Direction dir) {
  std::vector<cplx> out(v.begin(), v.end());
  plan_for(v.size())->execute(out, dir);
  return out;
}

void fft1d_strided(cplx* base, std::size_t n, std::size_t stride, Direction dir) {
  if (stride == 1) {
    plan_for(n)->execute(std::span<cplx>(base, n), dir);
    return;
  }
  thread_local std::vector<cplx> fibre;
  fibre.resize(n);
  for (std::size_t i = 0; i < n; ++i) fibre[i] = base[i * stride];
  plan_for(n)->execute(fibre, dir);
  for (std::size_t i = 0; i < n; ++i) base[i * stride] = fibre[i];
}

}  // namespace fftlr::la
