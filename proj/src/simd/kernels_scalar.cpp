#include "fftlr/simd/kernels.hpp"

namespace fftlr::simd {
namespace {

void cmul_ref(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void caxpy_ref(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void cscale_ref(cplx alpha, cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

cplx cdotc_ref(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void rmul_acc_ref(const double* a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * x[i];
}

double wnorm2_ref(const double* w, const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * std::norm(x[i]);
  return s;
}

}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{Isa::scalar, cmul_ref,     caxpy_ref,  cscale_ref,
                             cdotc_ref,   rmul_acc_ref, wnorm2_ref};
  return set;
}

}  // namespace fftlr::simd
