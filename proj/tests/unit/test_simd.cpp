#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "fftlr/simd/kernels.hpp"

using namespace fftlr;
using simd::KernelSet;

namespace {

std::vector<cplx> random_cplx(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {nd(rng), nd(rng)};
  return v;
}

std::vector<double> random_real(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = ud(rng);
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// lengths cover empty input, the vector tails and several full blocks
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 101, 1000};

}  // namespace

TEST(Simd, ReferenceKernelsMatchDefinitions) {
  const auto& k = simd::scalar_kernels();
  const std::vector<cplx> a{{1, 2}, {3, -1}, {0, 0.5}};
  const std::vector<cplx> b{{2, 0}, {-1, 1}, {4, 4}};
  std::vector<cplx> out(3);
  k.cmul(a.data(), b.data(), out.data(), 3);
  EXPECT_EQ(out[0], cplx(2, 4));
  EXPECT_EQ(out[1], cplx(-2, 4));
  EXPECT_EQ(out[2], cplx(-2, 2));

  std::vector<cplx> y = b;
  k.caxpy({0, 1}, a.data(), y.data(), 3);
  EXPECT_EQ(y[0], cplx(0, 1));

  EXPECT_EQ(k.cdotc(a.data(), b.data(), 3), std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2]);

  const std::vector<double> w{1.0, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(k.wnorm2(w.data(), a.data(), 3), 5.0 + 2.0 * 10.0 + 0.5 * 0.25);

  std::vector<cplx> acc(3, 1.0);
  k.rmul_acc(w.data(), a.data(), acc.data(), 3);
  EXPECT_EQ(acc[1], cplx(7, -2));

  std::vector<cplx> s = a;
  k.cscale(2.0, s.data(), 3);
  EXPECT_EQ(s[0], cplx(2, 4));
}

TEST(Simd, EveryAvailableSetMatchesReference) {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(7);
  for (const KernelSet* ks : simd::available_kernels()) {
    SCOPED_TRACE(std::string(simd::isa_name(ks->isa)));
    for (std::size_t n : kLengths) {
      SCOPED_TRACE(n);
      const auto a = random_cplx(n, rng), b = random_cplx(n, rng);
      const auto w = random_real(n, rng);
      const cplx alpha{0.7, -1.3};

      std::vector<cplx> o1(n), o2(n);
      ref.cmul(a.data(), b.data(), o1.data(), n);
      ks->cmul(a.data(), b.data(), o2.data(), n);
      EXPECT_LE(max_diff(o1, o2), 1e-14);

      o1 = b;
      o2 = b;
      ref.caxpy(alpha, a.data(), o1.data(), n);
      ks->caxpy(alpha, a.data(), o2.data(), n);
      EXPECT_LE(max_diff(o1, o2), 1e-14);

      o1 = a;
      o2 = a;
      ref.cscale(alpha, o1.data(), n);
      ks->cscale(alpha, o2.data(), n);
      EXPECT_LE(max_diff(o1, o2), 1e-14);

      o1 = b;
      o2 = b;
      ref.rmul_acc(w.data(), a.data(), o1.data(), n);
      ks->rmul_acc(w.data(), a.data(), o2.data(), n);
      EXPECT_LE(max_diff(o1, o2), 1e-14);

      const double scale = 1.0 + static_cast<double>(n);
      EXPECT_LE(std::abs(ref.cdotc(a.data(), b.data(), n) - ks->cdotc(a.data(), b.data(), n)), 1e-13 * scale);
      EXPECT_NEAR(ref.wnorm2(w.data(), a.data(), n), ks->wnorm2(w.data(), a.data(), n), 1e-13 * scale);
    }
  }
}

TEST(Simd, UnalignedPointersAreHandled) {
  std::mt19937_64 rng(11);
  const auto a = random_cplx(40, rng), b = random_cplx(40, rng);
  const auto& ref = simd::scalar_kernels();
  for (const KernelSet* ks : simd::available_kernels()) {
    // offsetting by one element breaks 32-byte alignment
    std::vector<cplx> o1(39), o2(39);
    ref.cmul(a.data() + 1, b.data() + 1, o1.data(), 39);
    ks->cmul(a.data() + 1, b.data() + 1, o2.data(), 39);
    EXPECT_LE(max_diff(o1, o2), 1e-14);
  }
}

TEST(Simd, DispatchHonoursEnvironment) {
  const char* env = std::getenv("FFTLR_ISA");
  const auto& k = simd::kernels();
  if (env && std::string(env) == "scalar") {
    EXPECT_EQ(k.isa, simd::Isa::scalar);
  } else {
    // best available set wins
    EXPECT_EQ(k.isa, simd::available_kernels().back()->isa);
  }
}

TEST(Simd, SpanWrappersCheckSizes) {
  std::vector<cplx> a(3), b(4), out(3);
  EXPECT_THROW(simd::cmul(a, b, out), Error);
  EXPECT_THROW(simd::cdotc(a, b), Error);
}
