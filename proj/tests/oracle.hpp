#pragma once

// Dense reference solutions of the cell problem, assembled mode by mode
// without FFTs, zero padding or the library's material code. Unknowns are
// the coefficients u_k, k in Z_N^d \ {0}:
//
//   sum_k 4 pi^2 (m.k ahat(m-k) + m^T B k [m = k]) u_k = 2 pi i m_1 ahat(m)
//   A_eff = ahat(0) + B_11 + Re sum_k 2 pi i k_1 u_k ahat(-k)
//
// with ahat the Fourier coefficients of the scalar part a(x) and B a
// constant shift. GaNi takes ahat from grid sums over x = p/N; Ga takes the
// exact integrals (square) or sums over the (4N-1)^d quadrature grid.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Point = std::vector<double>;
using Mode = std::vector<int>;
inline constexpr double pi = 3.14159265358979323846;

/// int_{-1/2}^{t} exp(-2 pi i m x) dx
inline cplx indicator_integral(int m, double t) {
  if (m == 0) return t + 0.5;
  const cplx c(0.0, -2.0 * pi * m);
  return (std::exp(c * t) - std::exp(c * -0.5)) / c;
}

/// Calls f on every centered grid point p/n, p in Z_n^d.
inline void for_each_point(std::size_t d, std::size_t n, const std::function<void(const Point&)>& f) {
  const int h = static_cast<int>(n - 1) / 2;
  std::vector<int> p(d, -h);
  Point x(d);
  while (true) {
    for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(p[j]) / static_cast<double>(n);
    f(x);
    std::size_t j = d;
    while (j-- > 0) {
      if (++p[j] <= h) break;
      p[j] = -h;
    }
    if (j == static_cast<std::size_t>(-1)) return;
  }
}

/// (1/n^d) sum_x a(x) exp(-2 pi i q.x) over the centered grid.
inline cplx grid_coefficient(const std::function<double(const Point&)>& a, std::size_t n, const Mode& q) {
  cplx acc{};
  double count = 0.0;
  for_each_point(q.size(), n, [&](const Point& x) {
    double phase = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) phase += q[j] * x[j];
    acc += a(x) * std::polar(1.0, -2.0 * pi * phase);
    count += 1.0;
  });
  return acc / count;
}

// ---------------------------------------------------------------------------
// Materials

inline double square_value(double contrast, double t, const Point& x) {
  bool in = true;
  for (double xi : x) in = in && xi < t;
  return 1.0 + (in ? contrast : 0.0);
}

/// Exact coefficient of 1 + contrast * prod_j chi(x_j < t).
inline cplx square_exact(double contrast, double t, const Mode& q) {
  cplx p = contrast;
  bool zero = true;
  for (int qi : q) {
    p *= indicator_integral(qi, t);
    zero = zero && qi == 0;
  }
  return p + (zero ? 1.0 : 0.0);
}

/// exp(c + s g(x)), g = sum_t coef_t cos(2 pi k_t.x), with c and s chosen so
/// that the values on the N-grid span [lo, hi].
struct Stochastic {
  std::vector<Mode> modes;
  std::vector<double> coef;
  double c = 0.0, s = 1.0;

  double exponent(const Point& x) const {
    double g = 0.0;
    for (std::size_t t = 0; t < modes.size(); ++t) {
      double ph = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) ph += modes[t][j] * x[j];
      g += coef[t] * std::cos(2.0 * pi * ph);
    }
    return g;
  }
  double value(const Point& x) const { return std::exp(c + s * exponent(x)); }

  void scale_on_grid(std::size_t d, std::size_t n, double lo_v, double hi_v) {
    double lo = 1e300, hi = -1e300;
    for_each_point(d, n, [&](const Point& x) {
      lo = std::min(lo, exponent(x));
      hi = std::max(hi, exponent(x));
    });
    s = std::log(hi_v / lo_v) / (hi - lo);
    c = std::log(lo_v) - s * lo;
  }
};

// ---------------------------------------------------------------------------
// Solve

using Coefficients = std::function<cplx(const Mode&)>;

inline std::vector<Mode> nonzero_modes(std::size_t d, std::size_t n) {
  std::vector<Mode> out;
  const double nn = static_cast<double>(n);
  for_each_point(d, n, [&](const Point& x) {
    Mode k(d);
    bool zero = true;
    for (std::size_t j = 0; j < d; ++j) {
      k[j] = static_cast<int>(std::lround(x[j] * nn));
      zero = zero && k[j] == 0;
    }
    if (!zero) out.push_back(k);
  });
  return out;
}

/// Galerkin matrix G, load and memoised material coefficients on the
/// nonzero modes. `shift` is d x d or empty.
struct System {
  std::size_t d = 0;
  std::vector<Mode> modes;
  Eigen::MatrixXcd g;
  Eigen::VectorXcd rhs;
  Coefficients coeff;
  std::vector<std::vector<double>> shift;
  std::map<Mode, cplx> memo;

  cplx ahat(const Mode& q) {
    auto it = memo.find(q);
    if (it == memo.end()) it = memo.emplace(q, coeff(q)).first;
    return it->second;
  }
};

inline System assemble(std::size_t d, std::size_t n, const Coefficients& coeff,
                       const std::vector<std::vector<double>>& shift = {}) {
  System sys{d, nonzero_modes(d, n), {}, {}, coeff, shift, {}};
  const auto sz = static_cast<Eigen::Index>(sys.modes.size());
  sys.g.resize(sz, sz);
  sys.rhs.resize(sz);
  for (Eigen::Index i = 0; i < sz; ++i) {
    const auto& m = sys.modes[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < sz; ++c) {
      const auto& k = sys.modes[static_cast<std::size_t>(c)];
      double mk = 0.0;
      Mode q(d);
      for (std::size_t j = 0; j < d; ++j) {
        mk += m[j] * k[j];
        q[j] = m[j] - k[j];
      }
      cplx v = mk * sys.ahat(q);
      if (i == c && !shift.empty())
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b) v += m[a] * shift[a][b] * k[b];
      sys.g(i, c) = 4.0 * pi * pi * v;
    }
    sys.rhs(i) = cplx(0.0, 2.0 * pi * m[0]) * sys.ahat(m);
  }
  return sys;
}

/// Effective coefficient for the load e_1.
inline double effective_coefficient(std::size_t d, std::size_t n, const Coefficients& coeff,
                                    const std::vector<std::vector<double>>& shift = {}) {
  System sys = assemble(d, n, coeff, shift);
  const Eigen::VectorXcd u = sys.g.partialPivLu().solve(sys.rhs);
  cplx a = sys.ahat(Mode(d, 0)) + (shift.empty() ? 0.0 : shift[0][0]);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Mode neg = sys.modes[static_cast<std::size_t>(i)];
    for (int& v : neg) v = -v;
    a += cplx(0.0, -2.0 * pi * neg[0]) * u(i) * sys.ahat(neg);
  }
  return a.real();
}

inline Coefficients square_coefficients(std::size_t n, bool galerkin, double contrast = 10.0, double t = 0.3) {
  if (galerkin) return [=](const Mode& q) { return square_exact(contrast, t, q); };
  return [=](const Mode& q) {
    return grid_coefficient([=](const Point& x) { return square_value(contrast, t, x); }, n, q);
  };
}

inline Coefficients stochastic_coefficients(std::size_t n, bool galerkin, const Stochastic& field) {
  const std::size_t quad = galerkin ? 4 * n - 1 : n;
  return [=](const Mode& q) { return grid_coefficient([&](const Point& x) { return field.value(x); }, quad, q); };
}

inline double square(std::size_t d, std::size_t n, bool galerkin, double contrast = 10.0, double t = 0.3,
                     const std::vector<std::vector<double>>& shift = {}) {
  return effective_coefficient(d, n, square_coefficients(n, galerkin, contrast, t), shift);
}

inline double stochastic(std::size_t d, std::size_t n, bool galerkin, const Stochastic& field) {
  return effective_coefficient(d, n, stochastic_coefficients(n, galerkin, field));
}

}  // namespace oracle
