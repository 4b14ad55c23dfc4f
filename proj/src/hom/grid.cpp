#include <algorithm>
#include <cmath>
#include <random>

#include "fftlr/hom/homogenization.hpp"

namespace fftlr {

std::string_view scheme_name(Scheme s) { return s == Scheme::ga ? "ga" : "gani"; }

Scheme parse_scheme(std::string_view s) {
  if (s == "ga") return Scheme::ga;
  if (s == "gani") return Scheme::gani;
  throw Error("unknown scheme '" + std::string(s) + "' (expected ga or gani)");
}

std::vector<double> GridSpec::frequencies() const {
  std::vector<double> k(n);
  const auto h = static_cast<long>((n - 1) / 2);
  for (std::size_t p = 0; p < n; ++p) k[p] = static_cast<double>(static_cast<long>(p) - h);
  return k;
}

std::vector<double> GridSpec::points() const {
  auto k = frequencies();
  for (auto& x : k) x /= static_cast<double>(n);
  return k;
}

GridSpec build_grid(std::size_t d, std::size_t n) {
  require(d == 2 || d == 3, "grid dimension must be 2 or 3");
  require(n >= 1, "grid size must be positive");
  require(n % 2 == 1, "even N introduces Nyquist frequencies");
  return GridSpec{d, n};
}

std::size_t material_grid_n(Scheme s, const GridSpec& g) { return s == Scheme::ga ? g.double_n() : g.n; }

void MaterialSpec::validate() const {
  require(contrast >= 0.0 && std::isfinite(contrast), "material contrast must be >= 0");
  require(threshold > -0.5 && threshold < 0.5, "inclusion threshold must lie in (-1/2, 1/2)");
  require(value > 0.0 && std::isfinite(value), "constant material value must be > 0");
  require(min_value > 0.0 && max_value > min_value, "stochastic scaling targets must satisfy 0 < min < max");
  require(lowrank_rank >= 1, "stochastic low-rank rank must be >= 1");
}

std::string_view material_kind_name(MaterialSpec::Kind k) {
  switch (k) {
    case MaterialSpec::Kind::square:
      return "square";
    case MaterialSpec::Kind::stochastic:
      return "stochastic";
    case MaterialSpec::Kind::constant:
      return "constant";
  }
  return "?";
}

MaterialSpec::Kind parse_material_kind(std::string_view s) {
  if (s == "square") return MaterialSpec::Kind::square;
  if (s == "stochastic") return MaterialSpec::Kind::stochastic;
  if (s == "constant") return MaterialSpec::Kind::constant;
  throw Error("unknown material '" + std::string(s) + "' (expected square, stochastic or constant)");
}

std::vector<std::vector<double>> anisotropy_matrix(std::size_t d) {
  if (d == 2) return {{5.5, -4.5}, {-4.5, 5.5}};
  require(d == 3, "anisotropy defined for d = 2, 3");
  const double s = 1.25 * std::sqrt(2.0);
  return {{4.25, -3.25, -s}, {-3.25, 4.25, s}, {-s, s, 7.5}};
}

std::vector<std::vector<int>> stochastic_modes(std::size_t d, std::size_t count) {
  std::vector<std::vector<int>> all;
  int radius = 1;
  // grow the search box until it surely contains `count` half-space modes
  while (true) {
    all.clear();
    std::vector<int> k(d, -radius);
    while (true) {
      int first = 0;
      for (int x : k)
        if (x != 0) {
          first = x;
          break;
        }
      if (first > 0) all.push_back(k);
      std::size_t j = d;
      while (j-- > 0) {
        if (++k[j] <= radius) break;
        k[j] = -radius;
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
    auto norm2 = [](const std::vector<int>& v) {
      int s = 0;
      for (int x : v) s += x * x;
      return s;
    };
    std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
      const int na = norm2(a), nb = norm2(b);
      return na != nb ? na < nb : a < b;
    });
    if (all.size() >= count && norm2(all[count - 1]) < radius * radius) break;
    ++radius;
  }
  all.resize(count);
  return all;
}

std::vector<double> stochastic_coefficients(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<double> c(count);
  // 53-bit mantissa mapping keeps the draw identical across standard libraries
  for (auto& x : c) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return c;
}

cplx indicator_coefficient(int m, double t) {
  if (m == 0) return t + 0.5;
  const double a = -2.0 * kPi * m;
  const cplx i{0.0, 1.0};
  return (std::exp(i * (a * t)) - std::exp(i * (a * -0.5))) / (i * a);
}

Preconditioner precond_build(const GridSpec& grid) {
  Preconditioner pc{FullTensor(grid.shape()), FullTensor(grid.shape())};
  const auto k = grid.frequencies();
  std::vector<std::size_t> q(grid.d, 0);
  for (std::size_t flat = 0; flat < pc.p.size(); ++flat) {
    double kk = 0.0;
    for (auto i : q) kk += k[i] * k[i];
    pc.p[flat] = kk;
    pc.pinv[flat] = kk == 0.0 ? 0.0 : 1.0 / kk;
    for (std::size_t j = grid.d; j-- > 0;) {
      if (++q[j] < grid.n) break;
      q[j] = 0;
    }
  }
  return pc;
}

}  // namespace fftlr
