#pragma once

// Data-parallel complex kernels used by the tensor and FFT inner loops.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2+FMA
// variant is compiled into a separate translation unit and selected at
// runtime when the CPU supports it. Setting FFTLR_ISA=scalar in the
// environment forces the reference path.

#include <span>
#include <string_view>
#include <vector>

#include "fftlr/common.hpp"

namespace fftlr::simd {

enum class Isa { scalar, avx2 };

struct KernelSet {
  Isa isa;
  // out[i] = a[i] * b[i]
  void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
  // y[i] += alpha * x[i]
  void (*caxpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // x[i] *= alpha
  void (*cscale)(cplx alpha, cplx* x, std::size_t n);
  // sum_i conj(x[i]) * y[i]
  cplx (*cdotc)(const cplx* x, const cplx* y, std::size_t n);
  // y[i] += a[i] * x[i], a real
  void (*rmul_acc)(const double* a, const cplx* x, cplx* y, std::size_t n);
  // sum_i w[i] * |x[i]|^2, w real
  double (*wnorm2)(const double* w, const cplx* x, std::size_t n);
};

const KernelSet& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelSet& avx2_kernels();
#endif

/// Kernel sets the running CPU can execute, reference first.
std::vector<const KernelSet*> available_kernels();

/// The dispatched set; resolved once per process.
const KernelSet& kernels();

std::string_view isa_name(Isa isa);

// Span conveniences over the dispatched set.
inline void cmul(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out) {
  require(a.size() == b.size() && a.size() == out.size(), "cmul: size mismatch");
  kernels().cmul(a.data(), b.data(), out.data(), a.size());
}
inline void caxpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  require(x.size() == y.size(), "caxpy: size mismatch");
  kernels().caxpy(alpha, x.data(), y.data(), x.size());
}
inline void cscale(cplx alpha, std::span<cplx> x) { kernels().cscale(alpha, x.data(), x.size()); }
inline cplx cdotc(std::span<const cplx> x, std::span<const cplx> y) {
  require(x.size() == y.size(), "cdotc: size mismatch");
  return kernels().cdotc(x.data(), y.data(), x.size());
}
inline void rmul_acc(std::span<const double> a, std::span<const cplx> x, std::span<cplx> y) {
  require(a.size() == x.size() && x.size() == y.size(), "rmul_acc: size mismatch");
  kernels().rmul_acc(a.data(), x.data(), y.data(), x.size());
}
inline double wnorm2(std::span<const double> w, std::span<const cplx> x) {
  require(w.size() == x.size(), "wnorm2: size mismatch");
  return kernels().wnorm2(w.data(), x.data(), x.size());
}

}  // namespace fftlr::simd
