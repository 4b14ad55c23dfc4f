#include <algorithm>
#include <cmath>
#include <functional>

#include "fftlr/hom/homogenization.hpp"

namespace fftlr {

namespace {

std::vector<cplx> ones(std::size_t n) { return std::vector<cplx>(n, 1.0); }

// c0 + rho * (x)_j v_j
template <class T> T separable_plus_constant(double c0, double rho, const std::vector<std::vector<cplx>>& v) {
  std::vector<std::vector<cplx>> one;
  for (const auto& x : v) one.push_back(ones(x.size()));
  if (rho == 0.0) return scaled(c0, rank_one<T>(one));
  return linear_combine(c0, rank_one<T>(one), rho, rank_one<T>(v));
}

std::vector<double> eigen_range(const std::vector<std::vector<double>>& b) {
  const auto d = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

std::vector<std::vector<double>> shift_matrix(const MaterialSpec& spec, std::size_t d) {
  if (spec.anisotropic) return anisotropy_matrix(d);
  return std::vector<std::vector<double>>(d, std::vector<double>(d, 0.0));
}

// Exponent g(x) = sum_k c[k] cos(2 pi k.x) on an m^d grid of points p/m.
FullTensor stochastic_exponent(const MaterialSpec& spec, std::size_t d, std::size_t m) {
  const std::size_t count = spec.modes ? spec.modes : (d == 2 ? 20 : 26);
  const auto modes = stochastic_modes(d, count);
  const auto coef = stochastic_coefficients(spec.seed, count);
  const auto pts = GridSpec{d, m}.points();
  Shape shape(d, m);
  require(shape_product(shape) <= dense_entry_cap(), "stochastic material: grid above dense cap");
  FullTensor g(shape);
  for (std::size_t t = 0; t < count; ++t) {
    // exp(2 pi i k.x) as a product of 1-D waves
    std::vector<std::vector<cplx>> waves(d, std::vector<cplx>(m));
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t p = 0; p < m; ++p) waves[j][p] = std::polar(1.0, 2.0 * kPi * modes[t][j] * pts[p]);
    const FullTensor w = rank_one<FullTensor>(waves);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += coef[t] * w[i].real();
  }
  return g;
}

struct Scaling {
  double c, dscale;
};

Scaling stochastic_scaling(const MaterialSpec& spec, const FullTensor& g) {
  double lo = g[0].real(), hi = g[0].real();
  for (auto z : g.data()) {
    lo = std::min(lo, z.real());
    hi = std::max(hi, z.real());
  }
  require(hi > lo, "stochastic material: exponent is constant on the grid");
  const double dscale = std::log(spec.max_value / spec.min_value) / (hi - lo);
  return {std::log(spec.min_value) - dscale * lo, dscale};
}

FullTensor exp_field(const FullTensor& g, Scaling s) {
  FullTensor a(g.shape());
  for (std::size_t i = 0; i < g.size(); ++i) a[i] = std::exp(s.c + s.dscale * g[i].real());
  return a;
}

FullTensor add_constant(FullTensor t, double c) {
  for (auto& z : t.values()) z = cplx(z.real() + c, 0.0);
  return t;
}

template <class T>
MaterialField<T> assemble(Scheme scheme, const MaterialSpec& spec, std::size_t d, std::size_t m,
                          const std::function<T(double)>& diag_field, double a_min, double a_max) {
  MaterialField<T> mf;
  mf.scheme = scheme;
  mf.grid_n = m;
  const auto b = shift_matrix(spec, d);
  const auto er = eigen_range(b);
  mf.c_min = a_min + er[0];
  mf.c_max = a_max + er[1];
  mf.comp.assign(d, std::vector<MaterialComponent<T>>(d));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t c = 0; c < d; ++c) {
      if (a == c)
        mf.comp[a][c].field = diag_field(b[a][a]);
      else
        mf.comp[a][c].constant = b[a][c];
    }
  return mf;
}

template <class T>
MaterialField<T> constant_material(Scheme scheme, const MaterialSpec& spec, std::size_t d, std::size_t m) {
  MaterialField<T> mf;
  mf.scheme = scheme;
  mf.grid_n = m;
  const auto b = shift_matrix(spec, d);
  const auto er = eigen_range(b);
  mf.c_min = spec.value + er[0];
  mf.c_max = spec.value + er[1];
  mf.comp.assign(d, std::vector<MaterialComponent<T>>(d));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t c = 0; c < d; ++c) mf.comp[a][c].constant = b[a][c] + (a == c ? spec.value : 0.0);
  return mf;
}

}  // namespace

template <class T> T from_full(const FullTensor& t, const TruncationPolicy& policy) {
  if constexpr (std::is_same_v<T, FullTensor>) {
    (void)policy;
    return t;
  } else {
    return decompose<T>(t, policy);
  }
}

template <class T> MaterialField<T> material_gani(const MaterialSpec& spec, const GridSpec& grid) {
  spec.validate();
  const std::size_t d = grid.d, n = grid.n;
  switch (spec.kind) {
    case MaterialSpec::Kind::constant:
      return constant_material<T>(Scheme::gani, spec, d, n);
    case MaterialSpec::Kind::square: {
      std::vector<cplx> chi(n);
      const auto x = grid.points();
      for (std::size_t p = 0; p < n; ++p) chi[p] = x[p] < spec.threshold ? 1.0 : 0.0;
      const std::vector<std::vector<cplx>> v(d, chi);
      return assemble<T>(
          Scheme::gani, spec, d, n,
          [&](double shift) { return separable_plus_constant<T>(1.0 + shift, spec.contrast, v); }, 1.0,
          1.0 + spec.contrast);
    }
    case MaterialSpec::Kind::stochastic: {
      const FullTensor g = stochastic_exponent(spec, d, n);
      const FullTensor a = exp_field(g, stochastic_scaling(spec, g));
      const auto policy = TruncationPolicy::fixed(spec.lowrank_rank);
      return assemble<T>(
          Scheme::gani, spec, d, n, [&](double shift) { return from_full<T>(add_constant(a, shift), policy); },
          spec.min_value, spec.max_value);
    }
  }
  throw Error("unreachable material kind");
}

template <class T> MaterialField<T> material_ga(const MaterialSpec& spec, const GridSpec& grid) {
  spec.validate();
  const std::size_t d = grid.d, m = grid.double_n();
  switch (spec.kind) {
    case MaterialSpec::Kind::constant:
      return constant_material<T>(Scheme::ga, spec, d, m);
    case MaterialSpec::Kind::square: {
      // nodal values of the exact coefficients of the 1-D indicator
      std::vector<cplx> h(m);
      const auto k = GridSpec{d, m}.frequencies();
      for (std::size_t p = 0; p < m; ++p) h[p] = indicator_coefficient(static_cast<int>(k[p]), spec.threshold);
      h = la::fft1d(h, Direction::inverse);
      for (auto& z : h) z = z.real();
      const std::vector<std::vector<cplx>> v(d, h);
      return assemble<T>(
          Scheme::ga, spec, d, m,
          [&](double shift) { return separable_plus_constant<T>(1.0 + shift, spec.contrast, v); }, 1.0,
          1.0 + spec.contrast);
    }
    case MaterialSpec::Kind::stochastic: {
      const std::size_t fine = 4 * grid.n - 1;
      std::size_t pts = 1;
      for (std::size_t j = 0; j < d; ++j) pts *= fine;
      require(pts <= spec.quadrature_cap,
              "Ga quadrature grid (4N-1)^d exceeds the cap; use scheme=gani or a smaller N");
      const Scaling s = stochastic_scaling(spec, stochastic_exponent(spec, d, grid.n));
      const FullTensor fine_vals = exp_field(stochastic_exponent(spec, d, fine), s);
      double lo = fine_vals[0].real(), hi = lo;
      for (auto z : fine_vals.data()) {
        lo = std::min(lo, z.real());
        hi = std::max(hi, z.real());
      }
      const FullTensor coeffs = resize_centered(fft_d(fine_vals, Direction::forward), m);
      const FullTensor nodal = add_constant(fft_d(coeffs, Direction::inverse), 0.0);
      const auto policy = TruncationPolicy::fixed(spec.lowrank_rank);
      auto mf = assemble<T>(
          Scheme::ga, spec, d, m, [&](double shift) { return from_full<T>(add_constant(nodal, shift), policy); },
          lo, hi);
      mf.approximate = true;
      return mf;
    }
  }
  throw Error("unreachable material kind");
}

template <class T> MaterialField<T> material_field(Scheme s, const MaterialSpec& spec, const GridSpec& grid) {
  return s == Scheme::ga ? material_ga<T>(spec, grid) : material_gani<T>(spec, grid);
}

#define FFTLR_INSTANTIATE(T)                                                                  \
  template T from_full<T>(const FullTensor&, const TruncationPolicy&);                        \
  template MaterialField<T> material_gani<T>(const MaterialSpec&, const GridSpec&);           \
  template MaterialField<T> material_ga<T>(const MaterialSpec&, const GridSpec&);             \
  template MaterialField<T> material_field<T>(Scheme, const MaterialSpec&, const GridSpec&);

FFTLR_INSTANTIATE(FullTensor)
FFTLR_INSTANTIATE(CpTensor)
FFTLR_INSTANTIATE(TuckerTensor)
FFTLR_INSTANTIATE(TtTensor)

}  // namespace fftlr
