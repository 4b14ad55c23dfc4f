#pragma once

// One-dimensional DFT on the centered frequency set Z_N = {-(N-1)/2..(N-1)/2}.
//
// Conventions, fixed here for the whole library:
//   forward: out[k] = (1/N) * sum_m in[m] * exp(-2*pi*i*m*k/N)
//   inverse: out[m] =         sum_k in[k] * exp(+2*pi*i*m*k/N)
// Both input and output are stored in centered order: position p holds
// index p - (N-1)/2. Only odd N is accepted.

#include <memory>
#include <span>

#include "fftlr/common.hpp"

namespace fftlr::la {

enum class Direction { forward, inverse };

class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  /// Natural-order, unscaled transform with sign -1 (forward kernel).
  /// `data` has length n; `scratch` at least scratch_size().
  void transform_natural(cplx* data, cplx* scratch) const;
  std::size_t scratch_size() const;

  /// Centered, scaled transform in place.
  void execute(std::span<cplx> data, Direction dir) const;

 private:
  void mixed_radix(const cplx* in, std::size_t stride, cplx* out, std::size_t n,
                   std::size_t factor_idx, cplx* work) const;
  void pow2_inplace(cplx* data, const std::vector<cplx>& roots, std::size_t len) const;
  void bluestein(cplx* data, cplx* scratch) const;

  std::size_t n_;
  bool use_bluestein_ = false;
  std::vector<std::size_t> factors_;
  std::vector<cplx> roots_;  // exp(-2 pi i e / n)

  // Bluestein data
  std::size_t conv_len_ = 0;
  std::vector<cplx> chirp_;       // exp(-pi i m^2 / n)
  std::vector<cplx> chirp_hat_;   // FFT of the conjugate chirp filter
  std::vector<cplx> conv_roots_;  // exp(-2 pi i e / conv_len)
};

/// Shared immutable plan for length n (thread-safe cache).
std::shared_ptr<const FftPlan> plan_for(std::size_t n);

/// Centered 1-D DFT; rejects even n.
std::vector<cplx> fft1d(std::span<const cplx> v, Direction dir);

/// In-place variant on a strided fibre of length n.
void fft1d_strided(cplx* base, std::size_t n, std::size_t stride, Direction dir);

}  // namespace fftlr::la
