#include <cmath>

#include "fftlr/hom/homogenization.hpp"

namespace fftlr {

namespace {

constexpr double kZeroMeanTol = 1e-12;
constexpr double kMeanRoundoff = 1e-13;

template <class T> T sum_terms(std::vector<T> terms) {
  T acc = std::move(terms[0]);
  for (std::size_t i = 1; i < terms.size(); ++i) acc = linear_combine(1.0, acc, 1.0, terms[i]);
  return acc;
}

template <class T> T ones_like(std::size_t d, std::size_t n) {
  return rank_one<T>(std::vector<std::vector<cplx>>(d, std::vector<cplx>(n, 1.0)));
}

// Physical-space gradient components on the material grid.
template <class T> std::vector<T> physical_gradient(const OperatorContext<T>& ctx, const T& u) {
  std::vector<T> e;
  for (auto& g : grad_hat(u, ctx.freq)) {
    T padded = ctx.material_n() == ctx.grid.n ? std::move(g) : zero_pad(g, Pad::inject, ctx.material_n());
    e.push_back(fft_d(padded, Direction::inverse));
  }
  return e;
}

// Row a of the material applied to e, truncated once.
template <class T> T material_row(const OperatorContext<T>& ctx, const std::vector<T>& e, std::size_t a) {
  std::vector<T> terms;
  const auto& row = ctx.material.comp[a];
  std::size_t with_field = 0;
  for (std::size_t b = 0; b < row.size(); ++b) {
    if (row[b].field) {
      terms.push_back(hadamard(*row[b].field, e[b]));
      ++with_field;
    } else if (row[b].constant != 0.0) {
      terms.push_back(scaled(row[b].constant, e[b]));
    }
  }
  if (terms.empty()) return scaled(0.0, e[a]);
  if (terms.size() == 1 && with_field == 1) {
    // fused product truncation on the common single-term path
    for (std::size_t b = 0; b < row.size(); ++b)
      if (row[b].field) return hadamard_truncate(*row[b].field, e[b], ctx.policy);
  }
  if (with_field == 0 && terms.size() == 1) return std::move(terms[0]);
  return truncate(sum_terms(std::move(terms)), ctx.policy);
}

// (1/M^d) sum_ab Re <f_a, A_ab f_b>
template <class T> double energy(const OperatorContext<T>& ctx, const std::vector<T>& f) {
  const std::size_t d = ctx.grid.d;
  double vol = 1.0;
  for (std::size_t j = 0; j < d; ++j) vol *= static_cast<double>(ctx.material_n());
  double acc = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const auto& c = ctx.material.comp[a][b];
      if (c.field)
        acc += inner(f[a], hadamard(*c.field, f[b])).real();
      else if (c.constant != 0.0)
        acc += c.constant * inner(f[a], f[b]).real();
    }
  return acc / vol;
}

}  // namespace

template <class T> std::vector<T> frequency_tensors(const GridSpec& grid, double sign) {
  const auto k = grid.frequencies();
  std::vector<T> out;
  for (std::size_t a = 0; a < grid.d; ++a) {
    std::vector<std::vector<cplx>> v(grid.d, std::vector<cplx>(grid.n, 1.0));
    for (std::size_t p = 0; p < grid.n; ++p) v[a][p] = cplx(0.0, sign * 2.0 * kPi * k[p]);
    out.push_back(rank_one<T>(v));
  }
  return out;
}

template <class T> std::vector<T> grad_hat(const T& u, const std::vector<T>& k) {
  std::vector<T> out;
  for (const auto& ka : k) out.push_back(hadamard(u, ka));
  return out;
}

template <class T> T div_hat(const std::vector<T>& w, const std::vector<T>& k) {
  require(w.size() == k.size() && !w.empty(), "div_hat: component count mismatch");
  std::vector<T> terms;
  for (std::size_t a = 0; a < w.size(); ++a) terms.push_back(hadamard(w[a], k[a]));
  return sum_terms(std::move(terms));
}

template <class T> T zero_pad(const T& v, Pad dir, std::size_t n) {
  const std::size_t have = shape_of(v)[0];
  if (dir == Pad::inject)
    require(n >= have, "zero_pad: inject target smaller than source");
  else
    require(n <= have, "zero_pad: project target larger than source");
  return resize_centered(v, n);
}

template <class T>
OperatorContext<T> make_context(const GridSpec& grid, MaterialField<T> material, const TruncationPolicy& policy) {
  policy.validate();
  require(material.comp.size() == grid.d, "material dimension does not match the grid");
  OperatorContext<T> ctx;
  ctx.scheme = material.scheme;
  ctx.grid = grid;
  require(material.grid_n == material_grid_n(material.scheme, grid), "material grid does not match the scheme");
  ctx.material = std::move(material);
  ctx.freq = frequency_tensors<T>(grid, 1.0);
  ctx.freq_div = frequency_tensors<T>(grid, -1.0);
  ctx.precond = precond_build(grid);
  ctx.policy = policy;
  ctx.pinv = from_full<T>(ctx.precond.pinv, TruncationPolicy::tolerance(ctx.pinv_tolerance * norm(ctx.precond.pinv)));
  return ctx;
}

template <class T>
OperatorContext<T> make_context(Scheme scheme, const GridSpec& grid, const MaterialSpec& spec,
                                const TruncationPolicy& policy) {
  return make_context<T>(grid, material_field<T>(scheme, spec, grid), policy);
}

template <class T> double mean_ratio(const OperatorContext<T>& ctx, const T& u) {
  const auto c = ctx.grid.center();
  const double nu = norm(u);
  const double m = std::abs(entry(u, c));
  return nu > 0.0 ? m / nu : m;
}

template <class T> T enforce_zero_mean(const OperatorContext<T>& ctx, T u) {
  if (mean_ratio(ctx, u) <= kMeanRoundoff) return u;
  const auto c = ctx.grid.center();
  const cplx m = entry(u, c);
  T kept = annihilate_entry(u, c);
  // the rank-preserving correction is cheap but can be badly conditioned
  // when the fibres through k = 0 nearly vanish (symmetric solutions)
  if (norm(linear_combine(1.0, kept, -1.0, u)) <= 1e2 * std::abs(m)) return kept;
  return remove_mean(ctx, u);
}

template <class T> T remove_mean(const OperatorContext<T>& ctx, const T& u) {
  const auto c = ctx.grid.center();
  const cplx m = entry(u, c);
  if (m == cplx{}) return u;
  std::vector<std::vector<cplx>> delta(ctx.grid.d, std::vector<cplx>(ctx.grid.n, 0.0));
  for (std::size_t j = 0; j < ctx.grid.d; ++j) delta[j][c[j]] = 1.0;
  T out = linear_combine(1.0, u, -m, rank_one<T>(delta));
  if constexpr (std::is_same_v<T, FullTensor>) out.at(c) = 0.0;
  return out;
}

template <class T> T apply_operator(const OperatorContext<T>& ctx, const T& u) {
  require(shape_of(u) == ctx.grid.shape(), "apply_operator: input shape does not match the grid");
  require(mean_ratio(ctx, u) <= kZeroMeanTol, "apply_operator: input is not zero-mean");
  const std::size_t d = ctx.grid.d;
  const std::vector<T> e = physical_gradient(ctx, u);
  std::vector<T> back;
  for (std::size_t a = 0; a < d; ++a) {
    T q = fft_d(material_row(ctx, e, a), Direction::forward);
    back.push_back(ctx.material_n() == ctx.grid.n ? std::move(q) : zero_pad(q, Pad::project, ctx.grid.n));
  }
  const T div = truncate(div_hat(back, ctx.freq_div), ctx.policy);
  return enforce_zero_mean(ctx, hadamard_truncate(ctx.pinv, div, ctx.policy));
}

// -P^-1 div project F(A E) with E = e_1. The constant off-diagonal parts of
// A E transform to k = 0 only and drop out of the divergence.
template <class T> T build_rhs(const OperatorContext<T>& ctx) {
  const std::size_t d = ctx.grid.d;
  std::vector<T> terms;
  for (std::size_t a = 0; a < d; ++a) {
    const auto& c = ctx.material.comp[a][0];
    if (!c.field) continue;
    T q = fft_d(*c.field, Direction::forward);
    if (ctx.material_n() != ctx.grid.n) q = zero_pad(q, Pad::project, ctx.grid.n);
    terms.push_back(hadamard(q, ctx.freq_div[a]));
  }
  if (terms.empty()) return scaled(0.0, ones_like<T>(d, ctx.grid.n));
  const T div = truncate(sum_terms(std::move(terms)), ctx.policy);
  return enforce_zero_mean(ctx, scaled(-1.0, hadamard_truncate(ctx.pinv, div, ctx.policy)));
}

template <class T> double effective_coefficient(const OperatorContext<T>& ctx, const T& u) {
  std::vector<T> f = physical_gradient(ctx, u);
  f[0] = linear_combine(1.0, f[0], 1.0, ones_like<T>(ctx.grid.d, ctx.material_n()));
  return energy(ctx, f);
}

template <class T> double energy_norm2(const OperatorContext<T>& ctx, const T& v) {
  return energy(ctx, physical_gradient(ctx, v));
}

template <class T> SpectrumBounds spectrum_bounds(const OperatorContext<T>& ctx) {
  const double s = 4.0 * kPi * kPi;
  return {ctx.material.c_min, ctx.material.c_max, s * ctx.material.c_min, s * ctx.material.c_max};
}

#define FFTLR_INSTANTIATE(T)                                                                                    \
  template std::vector<T> frequency_tensors<T>(const GridSpec&, double);                                        \
  template std::vector<T> grad_hat<T>(const T&, const std::vector<T>&);                                         \
  template T div_hat<T>(const std::vector<T>&, const std::vector<T>&);                                          \
  template T zero_pad<T>(const T&, Pad, std::size_t);                                                           \
  template OperatorContext<T> make_context<T>(const GridSpec&, MaterialField<T>, const TruncationPolicy&);      \
  template OperatorContext<T> make_context<T>(Scheme, const GridSpec&, const MaterialSpec&,                     \
                                              const TruncationPolicy&);                                         \
  template double mean_ratio<T>(const OperatorContext<T>&, const T&);                                           \
  template T enforce_zero_mean<T>(const OperatorContext<T>&, T);                                                \
  template T remove_mean<T>(const OperatorContext<T>&, const T&);                                               \
  template T apply_operator<T>(const OperatorContext<T>&, const T&);                                            \
  template T build_rhs<T>(const OperatorContext<T>&);                                                           \
  template double effective_coefficient<T>(const OperatorContext<T>&, const T&);                                \
  template double energy_norm2<T>(const OperatorContext<T>&, const T&);                                         \
  template SpectrumBounds spectrum_bounds<T>(const OperatorContext<T>&);

FFTLR_INSTANTIATE(FullTensor)
FFTLR_INSTANTIATE(CpTensor)
FFTLR_INSTANTIATE(TuckerTensor)
FFTLR_INSTANTIATE(TtTensor)

}  // namespace fftlr
