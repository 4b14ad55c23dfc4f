#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fftlr/tensor/formats.hpp"
#include "fftlr/tensor/serialize.hpp"
#include "tensor_oracle.hpp"

using namespace fftlr;

using namespace tensor_oracle;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 g(2024);
  return g;
}

template <class T> T random_tensor(const Shape& shape, std::size_t terms) {
  return tensor_oracle::random_tensor<T>(shape, terms, rng());
}

FullTensor naive_fft(const FullTensor& v, Direction dir) { return tensor_oracle::fft(v, dir); }
FullTensor naive_resize(const FullTensor& v, std::size_t n) { return tensor_oracle::resize(v, n); }

}  // namespace

template <class T> class FormatOps : public ::testing::Test {};
using LowRankTypes = ::testing::Types<CpTensor, TuckerTensor, TtTensor>;
TYPED_TEST_SUITE(FormatOps, LowRankTypes);

template <class T> std::vector<Shape> shapes_for() {
  if constexpr (std::is_same_v<T, CpTensor>) return {{7, 5}, {9, 9}};
  else return {{7, 5}, {5, 7, 3}, {3, 5, 3, 5}};
}

TYPED_TEST(FormatOps, EntryMatchesReconstruction) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto t = random_tensor<TypeParam>(s, 3);
    const FullTensor f = reconstruct(t);
    for (std::size_t k = 0; k < f.size(); k += 7) {
      const auto idx = unflatten(k, s);
      EXPECT_NEAR(std::abs(entry(t, idx) - f[k]), 0.0, 1e-12);
    }
  }
}

TYPED_TEST(FormatOps, AlgebraMatchesDense) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 2), b = random_tensor<TypeParam>(s, 3);
    const FullTensor fa = reconstruct(a), fb = reconstruct(b);
    const cplx alpha{0.5, -2.0}, beta{1.5, 0.25};

    FullTensor lin(s), had(s);
    cplx ip{};
    for (std::size_t i = 0; i < fa.size(); ++i) {
      lin[i] = alpha * fa[i] + beta * fb[i];
      had[i] = fa[i] * fb[i];
      ip += std::conj(fa[i]) * fb[i];
    }
    EXPECT_LE(diff(reconstruct(linear_combine(alpha, a, beta, b)), lin), 1e-12 * fro(lin));
    EXPECT_LE(diff(reconstruct(hadamard(a, b)), had), 1e-12 * fro(had));
    EXPECT_LE(diff(reconstruct(scaled(alpha, a)), reconstruct(scaled(alpha, fa))), 1e-12 * fro(fa));
    EXPECT_NEAR(std::abs(inner(a, b) - ip), 0.0, 1e-11 * fro(fa) * fro(fb));
    EXPECT_NEAR(norm(a), fro(fa), 1e-11 * fro(fa));
  }
}

TYPED_TEST(FormatOps, FftMatchesNaiveDft) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 2);
    const FullTensor fa = reconstruct(a);
    for (Direction dir : {Direction::forward, Direction::inverse}) {
      const FullTensor ref = naive_fft(fa, dir);
      EXPECT_LE(diff(reconstruct(fft_d(a, dir)), ref), 1e-12 * fro(ref));
    }
    EXPECT_LE(diff(reconstruct(fft_d(fft_d(a, Direction::forward), Direction::inverse)), fa), 1e-12 * fro(fa));
  }
}

TYPED_TEST(FormatOps, ResizeMatchesDense) {
  for (const auto& s : shapes_for<TypeParam>()) {
    if (std::adjacent_find(s.begin(), s.end(), std::not_equal_to<>()) != s.end()) continue;
    const auto a = random_tensor<TypeParam>(s, 2);
    const FullTensor fa = reconstruct(a);
    for (std::size_t n : {s[0] + 4, s[0] > 2 ? s[0] - 2 : s[0]}) {
      const FullTensor ref = naive_resize(fa, n);
      const auto r = resize_centered(a, n);
      EXPECT_LE(diff(reconstruct(r), ref), 1e-13 * (1.0 + fro(ref)));
      EXPECT_EQ(rank_vector(r), rank_vector(a));
    }
  }
}

TYPED_TEST(FormatOps, TruncationRespectsBound) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 6);
    const FullTensor fa = reconstruct(a);
    for (std::size_t r : {1u, 2u, 3u}) {
      TruncationInfo info;
      const auto t = truncate(a, TruncationPolicy::fixed(r), &info);
      EXPECT_LE(max_rank(rank_vector(t)), r);
      EXPECT_LE(diff(reconstruct(t), fa), info.error_bound * (1.0 + 1e-10) + 1e-12 * fro(fa));
    }
    for (double rel : {1e-1, 1e-3}) {
      const double tau = rel * fro(fa);
      const auto t = truncate(a, TruncationPolicy::tolerance(tau));
      EXPECT_LE(diff(reconstruct(t), fa), tau * (1.0 + 1e-10));
    }
  }
}

TYPED_TEST(FormatOps, ExactRankIsRecovered) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 2);
    const FullTensor fa = reconstruct(a);
    // doubling then truncating at zero tolerance returns to the exact rank
    const auto big = linear_combine(1.0, a, 1.0, a);
    const auto t = truncate(big, TruncationPolicy::tolerance(0.0));
    EXPECT_LE(max_rank(rank_vector(t)), 2u);
    EXPECT_LE(diff(reconstruct(t), reconstruct(scaled(2.0, fa))), 1e-11 * fro(fa));
  }
}

TYPED_TEST(FormatOps, HadamardTruncateMatchesTwoStep) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 2), b = random_tensor<TypeParam>(s, 2);
    const auto pol = TruncationPolicy::tolerance(0.0);
    const FullTensor fused = reconstruct(hadamard_truncate(a, b, pol));
    const FullTensor two = reconstruct(hadamard(a, b));
    EXPECT_LE(diff(fused, two), 1e-10 * fro(two));
  }
}

TYPED_TEST(FormatOps, DecomposeOfLowRankIsExact) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const FullTensor fa = reconstruct(random_tensor<TypeParam>(s, 2));
    const auto d = decompose<TypeParam>(fa, TruncationPolicy::tolerance(1e-12 * fro(fa)));
    EXPECT_LE(max_rank(rank_vector(d)), 2u);
    EXPECT_LE(diff(reconstruct(d), fa), 1e-10 * fro(fa));
  }
}

TYPED_TEST(FormatOps, AnnihilateEntryZeroesOneEntryMinimally) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 3);
    std::vector<std::size_t> idx;
    for (auto n : s) idx.push_back((n - 1) / 2);
    const auto z = annihilate_entry(a, idx);
    EXPECT_NEAR(std::abs(entry(z, idx)), 0.0, 1e-12 * norm(a));
    EXPECT_EQ(rank_vector(z), rank_vector(a));
    // the change is at least the removed value and stays of the same order
    const double change = diff(reconstruct(z), reconstruct(a));
    EXPECT_GE(change, std::abs(entry(a, idx)) * (1 - 1e-10));
  }
}

TYPED_TEST(FormatOps, SerializeRoundTripIsBitExact) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 2);
    std::stringstream ss;
    write_tensor(ss, AnyTensor{a});
    const AnyTensor back = read_tensor(ss);
    EXPECT_EQ(format_of(back), FormatOf<TypeParam>::value);
    const FullTensor f1 = reconstruct(a), f2 = reconstruct(back);
    for (std::size_t i = 0; i < f1.size(); ++i) EXPECT_EQ(f1[i], f2[i]);
  }
}

TEST(Formats, ParamCountFormulas) {
  const std::size_t n = 9;
  const auto cp = random_tensor<CpTensor>({n, n}, 4);
  EXPECT_EQ(cp.rank(), 4u);
  EXPECT_EQ(param_count(cp), 2 * n * 4);

  const auto tk = truncate(random_tensor<TuckerTensor>({n, n, n}, 5), TruncationPolicy::fixed(3));
  EXPECT_EQ(rank_vector(tk), (RankVector{3, 3, 3}));
  EXPECT_EQ(param_count(tk), 3 * n * 3 + 27);

  const auto tt = truncate(random_tensor<TtTensor>({n, n, n, n}, 5), TruncationPolicy::fixed(3));
  EXPECT_EQ(rank_vector(tt), (RankVector{3, 3, 3}));
  EXPECT_EQ(param_count(tt), 2 * n * 3 + 2 * n * 9);

  EXPECT_EQ(param_count(FullTensor({n, n, n})), n * n * n);
}

TEST(Formats, TuckerNormShortcutAndFallback) {
  auto tk = truncate(random_tensor<TuckerTensor>({7, 7, 5}, 3), TruncationPolicy::tolerance(0.0));
  const double ref = fro(reconstruct(tk));
  EXPECT_TRUE(tk.verify_orthonormal());
  auto with = tucker_norm(tk);
  EXPECT_TRUE(with.core_shortcut);
  EXPECT_NEAR(with.value, ref, 1e-12 * ref);
  tk.clear_orthonormal();
  auto without = tucker_norm(tk);
  EXPECT_FALSE(without.core_shortcut);
  EXPECT_NEAR(without.value, ref, 1e-12 * ref);
}

TEST(Formats, MismatchedOperandsThrow) {
  const auto a = random_tensor<TtTensor>({5, 5}, 1), b = random_tensor<TtTensor>({5, 7}, 1);
  EXPECT_THROW(linear_combine(1.0, a, 1.0, b), Error);
  EXPECT_THROW(hadamard(a, b), Error);
  EXPECT_THROW(decompose<CpTensor>(FullTensor({3, 3, 3}), TruncationPolicy::fixed(1)), Error);
  EXPECT_THROW(TruncationPolicy::fixed(0).validate(), Error);
}

TEST(Formats, DenseCapGuardsReconstruction) {
  const auto big = random_tensor<TtTensor>({101, 101, 101}, 1);
  const std::size_t old = dense_entry_cap();
  set_dense_entry_cap(1000);
  EXPECT_THROW(reconstruct(big), Error);
  set_dense_entry_cap(old);
}

TEST(Formats, ParseFormatNames) {
  for (Format f : {Format::full, Format::cp, Format::tucker, Format::tt}) EXPECT_EQ(parse_format(format_name(f)), f);
  EXPECT_THROW(parse_format("hss"), Error);
}

TYPED_TEST(FormatOps, FftKeepsRanks) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = truncate(random_tensor<TypeParam>(s, 3), TruncationPolicy::tolerance(0.0));
    EXPECT_EQ(rank_vector(fft_d(a, Direction::forward)), rank_vector(a));
    EXPECT_EQ(rank_vector(fft_d(a, Direction::inverse)), rank_vector(a));
  }
}

TYPED_TEST(FormatOps, HadamardMultipliesRanks) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 2), b = random_tensor<TypeParam>(s, 3);
    const RankVector ra = rank_vector(a), rb = rank_vector(b), rh = rank_vector(hadamard(a, b));
    ASSERT_EQ(rh.size(), ra.size());
    for (std::size_t j = 0; j < rh.size(); ++j) EXPECT_EQ(rh[j], ra[j] * rb[j]);
  }
}

TYPED_TEST(FormatOps, TruncateIsAProjection) {
  for (const auto& s : shapes_for<TypeParam>()) {
    const auto a = random_tensor<TypeParam>(s, 6);
    for (const auto& p : {TruncationPolicy::fixed(2), TruncationPolicy::tolerance(0.1 * norm(a))}) {
      const auto once = truncate(a, p);
      const FullTensor f1 = reconstruct(once), f2 = reconstruct(truncate(once, p));
      EXPECT_LE(diff(f1, f2), 1e-12 * fro(f1));
    }
  }
}
