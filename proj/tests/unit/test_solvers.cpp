#include <gtest/gtest.h>

#include "fftlr/solvers/solvers.hpp"

using namespace fftlr;

namespace {

template <class T> OperatorContext<T> context(Scheme s, std::size_t d, std::size_t n, std::size_t rank = 10,
                                              MaterialSpec spec = {}) {
  return make_context<T>(s, build_grid(d, n), spec, TruncationPolicy::fixed(rank));
}

SolverConfig config(Method m, double tol, std::size_t rank = 10) {
  SolverConfig c;
  c.method = m;
  c.residual_tol = tol;
  c.max_iter = 1000;
  c.policy = TruncationPolicy::fixed(rank);
  return c;
}

double pcg_reference(Scheme s, std::size_t d, std::size_t n, MaterialSpec spec = {}) {
  const auto ctx = context<FullTensor>(s, d, n, 1, spec);
  return pcg_full(ctx, build_rhs(ctx), config(Method::pcg, 1e-11)).a_eff;
}

}  // namespace

TEST(Pcg, ConvergesAndReportsHistory) {
  const auto ctx = context<FullTensor>(Scheme::ga, 2, 15);
  const auto rep = pcg_full(ctx, build_rhs(ctx), config(Method::pcg, 1e-8));
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.stop, StopReason::tolerance);
  EXPECT_LE(rep.iterations.back().residual_norm, 1e-8);
  EXPECT_EQ(rep.iterations.front().index, 0u);
  EXPECT_EQ(rep.matvecs + 1, rep.iterations.size());
  EXPECT_EQ(rep.param_count, 15u * 15u);
  for (std::size_t i = 1; i < rep.iterations.size(); ++i) EXPECT_GE(rep.iterations[i].elapsed_s, rep.iterations[i - 1].elapsed_s);
}

TEST(Pcg, MaxIterStops) {
  const auto ctx = context<FullTensor>(Scheme::ga, 2, 15);
  auto cfg = config(Method::pcg, 1e-14);
  cfg.max_iter = 3;
  const auto rep = pcg_full(ctx, build_rhs(ctx), cfg);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.stop, StopReason::max_iter);
  EXPECT_EQ(rep.iterations.size(), 4u);
}

TEST(Richardson, FullMatchesPcg) {
  for (Scheme s : {Scheme::gani, Scheme::ga}) {
    const auto ctx = context<FullTensor>(s, 2, 9);
    auto cfg = config(Method::richardson, 1e-9);
    cfg.max_iter = 5000;
    const auto rep = richardson(ctx, build_rhs(ctx), cfg);
    EXPECT_TRUE(rep.converged);
    EXPECT_NEAR(rep.a_eff, pcg_reference(s, 2, 9), 1e-8);
    const auto b = spectrum_bounds(ctx);
    EXPECT_DOUBLE_EQ(rep.iterations[1].omega, b.omega());
  }
}

TEST(Richardson, CompressedNeedsExplicitOptIn) {
  const auto ctx = context<TtTensor>(Scheme::ga, 2, 9, 3);
  EXPECT_THROW(richardson(ctx, build_rhs(ctx), config(Method::richardson, 1e-6, 3)), Error);
  auto cfg = config(Method::richardson, 1e-6, 3);
  cfg.allow_lowrank_richardson = true;
  cfg.max_iter = 5;
  EXPECT_NO_THROW(richardson(ctx, build_rhs(ctx), cfg));
}

TEST(Minres, FullMatchesPcg) {
  for (Scheme s : {Scheme::gani, Scheme::ga}) {
    const auto ctx = context<FullTensor>(s, 2, 15);
    const auto rep = minres_truncated(ctx, build_rhs(ctx), config(Method::minres, 1e-10));
    EXPECT_TRUE(rep.converged);
    EXPECT_NEAR(rep.a_eff, pcg_reference(s, 2, 15), 1e-9);
  }
}

template <class T> class MinresFormats : public ::testing::Test {};
using CompressedTypes = ::testing::Types<CpTensor, TuckerTensor, TtTensor>;
TYPED_TEST_SUITE(MinresFormats, CompressedTypes);

TYPED_TEST(MinresFormats, FullRankReproducesFullSolve) {
  // rank 15 on a 15 x 15 grid loses nothing
  for (Scheme s : {Scheme::gani, Scheme::ga}) {
    const auto ctx = context<TypeParam>(s, 2, 15, 15);
    const auto rep = minres_truncated(ctx, build_rhs(ctx), config(Method::minres, 1e-9, 15));
    EXPECT_TRUE(rep.converged) << scheme_name(s);
    EXPECT_NEAR(rep.a_eff, pcg_reference(s, 2, 15), 1e-7) << scheme_name(s);
    EXPECT_LE(max_rank(rep.iterations.back().ranks), 15u);
    EXPECT_FALSE(rep.norm_shortcut_fallback);
  }
}

TYPED_TEST(MinresFormats, LowRankGalerkinErrorIsNonNegative) {
  // a rank-restricted Galerkin solution cannot have lower energy
  const double ref = pcg_reference(Scheme::ga, 2, 15);
  for (std::size_t r : {1u, 3u, 5u}) {
    const auto ctx = context<TypeParam>(Scheme::ga, 2, 15, r);
    auto cfg = config(Method::minres, 1e-10, r);
    cfg.max_iter = 200;
    const auto rep = minres_truncated(ctx, build_rhs(ctx), cfg);
    EXPECT_GE(relative_error(rep.a_eff, ref), -1e-10) << "rank " << r;
    EXPECT_LE(max_rank(rep.iterations.back().ranks), r);
  }
}

TYPED_TEST(MinresFormats, IsDeterministic) {
  const auto ctx = context<TypeParam>(Scheme::gani, 2, 9, 3);
  const auto cfg = config(Method::minres, 1e-8, 3);
  const auto a = minres_truncated(ctx, build_rhs(ctx), cfg);
  const auto b = minres_truncated(ctx, build_rhs(ctx), cfg);
  ASSERT_EQ(a.iterations.size(), b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i)
    EXPECT_EQ(a.iterations[i].residual_norm, b.iterations[i].residual_norm);
  EXPECT_EQ(a.a_eff, b.a_eff);
}

TEST(Minres, ThreeDimensionalFormatsAgree) {
  const double ref = pcg_reference(Scheme::gani, 3, 5);
  for (Format f : {Format::tucker, Format::tt}) {
    double a = 0.0;
    if (f == Format::tucker) {
      const auto ctx = context<TuckerTensor>(Scheme::gani, 3, 5, 25);
      a = minres_truncated(ctx, build_rhs(ctx), config(Method::minres, 1e-9, 25)).a_eff;
    } else {
      const auto ctx = context<TtTensor>(Scheme::gani, 3, 5, 25);
      a = minres_truncated(ctx, build_rhs(ctx), config(Method::minres, 1e-9, 25)).a_eff;
    }
    EXPECT_NEAR(a, ref, 1e-7) << format_name(f);
  }
}

TEST(Minres, StagnationStopsEarly) {
  const auto ctx = context<TtTensor>(Scheme::ga, 2, 15, 1);
  auto cfg = config(Method::minres, 1e-12, 1);
  cfg.max_iter = 500;
  cfg.stagnation_window = 1;
  const auto rep = minres_truncated(ctx, build_rhs(ctx), cfg);
  EXPECT_EQ(rep.stop, StopReason::stagnation);
  EXPECT_LT(rep.iterations.size(), 500u);
}

TEST(Continuation, StopsAtFirstRankMeetingTarget) {
  const auto ctx = context<TtTensor>(Scheme::ga, 2, 15, 1);
  const double ref = pcg_reference(Scheme::ga, 2, 15);
  auto cfg = config(Method::minres, 1e-10, 1);
  cfg.max_iter = 200;
  cfg.rank_schedule = {1, 3, 5, 7, 9, 11, 13, 15};
  const auto rep = rank_continuation(ctx, cfg, {ref, 1e-3});
  ASSERT_TRUE(rep.achieved_rank.has_value());
  EXPECT_TRUE(rep.converged);
  ASSERT_FALSE(rep.stage_errors.empty());
  EXPECT_EQ(rep.stage_errors.back().first, *rep.achieved_rank);
  EXPECT_LE(rep.stage_errors.back().second, 1e-3);
  for (std::size_t i = 0; i + 1 < rep.stage_errors.size(); ++i) {
    EXPECT_LT(rep.stage_errors[i].first, rep.stage_errors[i + 1].first);
    EXPECT_GT(rep.stage_errors[i].second, 1e-3);
  }
  EXPECT_LT(*rep.achieved_rank, 15u);
}

TEST(Continuation, UnreachableTargetRunsWholeSchedule) {
  const auto ctx = context<TtTensor>(Scheme::ga, 2, 9, 1);
  auto cfg = config(Method::minres, 1e-10, 1);
  cfg.max_iter = 50;
  cfg.rank_schedule = {1, 2};
  const auto rep = rank_continuation(ctx, cfg, {pcg_reference(Scheme::ga, 2, 9) * 0.5, 0.0});
  EXPECT_FALSE(rep.achieved_rank.has_value());
  EXPECT_EQ(rep.stage_errors.size(), 2u);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  c.rank_schedule = {3, 3};
  EXPECT_THROW(c.validate(), Error);
  c.rank_schedule = {1, 3};
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(parse_method("gmres"), Error);
  EXPECT_EQ(parse_method(method_name(Method::minres)), Method::minres);
}

TEST(SolverConfig, RelativeErrorSign) {
  EXPECT_NEAR(relative_error(1.1, 1.0), 0.1, 1e-15);
  EXPECT_LT(relative_error(0.9, 1.0), 0.0);
}

TEST(Minres, FullResidualNeverIncreases) {
  for (Scheme s : {Scheme::gani, Scheme::ga}) {
    MaterialSpec sto;
    sto.kind = MaterialSpec::Kind::stochastic;
    for (const auto& spec : {MaterialSpec{}, sto}) {
      const auto ctx = context<FullTensor>(s, 2, 15, 1, spec);
      auto cfg = config(Method::minres, 1e-10);
      cfg.stagnation_window = 1000;
      const auto rep = minres_truncated(ctx, build_rhs(ctx), cfg);
      for (std::size_t i = 1; i < rep.iterations.size(); ++i)
        EXPECT_LE(rep.iterations[i].residual_norm, rep.iterations[i - 1].residual_norm * (1 + 1e-12));
    }
  }
}

TYPED_TEST(MinresFormats, ResidualGrowthIsBoundedByTruncation) {
  // the operator keeps full rank so the iterate truncation is the only perturbation
  const auto ctx = context<TypeParam>(Scheme::ga, 2, 15, 15);
  const double lmax = spectrum_bounds(ctx).lambda_max;
  auto cfg = config(Method::minres, 1e-10, 3);
  cfg.max_iter = 60;
  cfg.stagnation_window = 1000;
  const auto rep = minres_truncated(ctx, build_rhs(ctx), cfg);
  const auto& it = rep.iterations;
  for (std::size_t i = 1; i < it.size(); ++i) {
    // a step perturbed by delta moves the residual by at most |C delta|
    const double slack = lmax * it[i - 1].truncation_bound + 1e-10 * it[0].residual_norm;
    EXPECT_LE(it[i].residual_norm, it[i - 1].residual_norm + slack) << "step " << i;
  }
}

TYPED_TEST(MinresFormats, StagnationReturnsBestIterate) {
  const auto ctx = context<TypeParam>(Scheme::ga, 2, 15, 2);
  auto cfg = config(Method::minres, 1e-12, 2);
  cfg.stagnation_window = 3;
  const TypeParam rhs = build_rhs(ctx);
  const auto rep = minres_truncated(ctx, rhs, cfg);
  ASSERT_EQ(rep.stop, StopReason::stagnation);
  double best = rep.iterations[0].residual_norm;
  for (const auto& r : rep.iterations) best = std::min(best, r.residual_norm);
  const double rn = norm(linear_combine(1.0, rhs, -1.0, apply_operator(ctx, rep.solution)));
  EXPECT_NEAR(rn, best, 1e-6 * best);
  EXPECT_LE(mean_ratio(ctx, rep.solution), 1e-12);
}

TEST(Solvers, SolutionsAreZeroMean) {
  const auto ctx = context<FullTensor>(Scheme::gani, 2, 15);
  const FullTensor rhs = build_rhs(ctx);
  for (Method m : {Method::pcg, Method::richardson, Method::minres}) {
    const auto cfg = config(m, 1e-8);
    const auto rep = m == Method::pcg ? pcg_full(ctx, rhs, cfg)
                     : m == Method::richardson ? richardson(ctx, rhs, cfg)
                                               : minres_truncated(ctx, rhs, cfg);
    EXPECT_LE(std::abs(rep.solution.at(ctx.grid.center())), 1e-12 * norm(rep.solution)) << method_name(m);
  }
}
