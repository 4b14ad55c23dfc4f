// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher
// after a cpuid check.

#include <immintrin.h>

#include "fftlr/simd/kernels.hpp"

namespace fftlr::simd {
namespace {

// Two complex doubles per register, interleaved (re0, im0, re1, im1).
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d mul2(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline __m256d broadcast(cplx z) { return _mm256_setr_pd(z.real(), z.imag(), z.real(), z.imag()); }

void cmul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store2(out + i, mul2(load2(a + i), load2(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d al = broadcast(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store2(y + i, _mm256_add_pd(load2(y + i), mul2(load2(x + i), al)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void cscale_avx2(cplx alpha, cplx* x, std::size_t n) {
  const __m256d al = broadcast(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store2(x + i, mul2(load2(x + i), al));
  for (; i < n; ++i) x[i] *= alpha;
}

cplx cdotc_avx2(const cplx* x, const cplx* y, std::size_t n) {
  // re += xr*yr + xi*yi ; im += xr*yi - xi*yr
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = load2(x + i);
    const __m256d yv = load2(y + i);
    acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
    acc_im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), acc_im);
  }
  alignas(32) double re[4];
  alignas(32) double im[4];
  _mm256_store_pd(re, acc_re);
  _mm256_store_pd(im, acc_im);
  // im lanes hold (xr*yi, xi*yr) pairs
  double sre = re[0] + re[1] + re[2] + re[3];
  double sim = (im[0] - im[1]) + (im[2] - im[3]);
  for (; i < n; ++i) {
    sre += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    sim += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {sre, sim};
}

void rmul_acc_avx2(const double* a, const cplx* x, cplx* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_setr_pd(a[i], a[i], a[i + 1], a[i + 1]);
    store2(y + i, _mm256_fmadd_pd(av, load2(x + i), load2(y + i)));
  }
  for (; i < n; ++i) y[i] += a[i] * x[i];
}

double wnorm2_avx2(const double* w, const cplx* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d wv = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
    const __m256d xv = load2(x + i);
    acc = _mm256_fmadd_pd(wv, _mm256_mul_pd(xv, xv), acc);
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  double total = (s[0] + s[1]) + (s[2] + s[3]);
  for (; i < n; ++i) total += w[i] * std::norm(x[i]);
  return total;
}

}  // namespace

const KernelSet& avx2_kernels() {
  static const KernelSet set{Isa::avx2,  cmul_avx2,     caxpy_avx2,  cscale_avx2,
                             cdotc_avx2, rmul_acc_avx2, wnorm2_avx2};
  return set;
}

}  // namespace fftlr::simd
