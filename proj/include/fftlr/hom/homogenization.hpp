#pragma once

// Periodic scalar cell problem in Fourier space.
//
// Both discretisations are applied through one chain acting on a material
// grid of size M per axis (M = N for GaNi, M = 2N-1 for Ga):
//
//   C u = P^-1 div_N  project_M  F_M ( Abar  iF_M  inject_M  grad_N u )
//
// where Abar holds nodal values on the M-grid. For GaNi these are samples of
// A at x = k/N. For Ga, Abar = iF_M(a_hat) with a_hat[m] = int_Y A exp(-2 pi i
// m.x) dx; then mean_M(Abar e.w) equals int_Y A e.w for trigonometric
// polynomials e, w of degree < N, which is the exact Galerkin form.

#include <array>
#include <cstdint>
#include <optional>

#include "fftlr/tensor/formats.hpp"

namespace fftlr {

enum class Scheme { gani, ga };
std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view s);

struct GridSpec {
  std::size_t d = 2;
  std::size_t n = 5;

  std::size_t double_n() const { return 2 * n - 1; }
  Shape shape() const { return Shape(d, n); }
  /// Centered frequencies -(n-1)/2 .. (n-1)/2.
  std::vector<double> frequencies() const;
  /// Grid points k/n for k in the centered set.
  std::vector<double> points() const;
  /// Multi-index of frequency 0.
  std::vector<std::size_t> center() const { return std::vector<std::size_t>(d, (n - 1) / 2); }
};

GridSpec build_grid(std::size_t d, std::size_t n);

/// Material grid size per axis.
std::size_t material_grid_n(Scheme s, const GridSpec& g);

struct MaterialSpec {
  enum class Kind { square, stochastic, constant };
  Kind kind = Kind::square;
  double contrast = 10.0;   // square
  double threshold = 0.3;   // square
  double value = 1.0;       // constant
  std::uint64_t seed = 1;   // stochastic
  std::size_t modes = 0;    // stochastic; 0 selects 20 (2D) or 26 (3D)
  double min_value = 1.0;   // stochastic scaling targets
  double max_value = 10.0;
  std::size_t lowrank_rank = 10;  // stochastic fields in compressed formats
  bool anisotropic = false;
  // Ga quadrature for stochastic fields runs on (4N-1)^d points; beyond
  // this many points construction is refused.
  std::size_t quadrature_cap = std::size_t{1} << 24;

  void validate() const;
};
std::string_view material_kind_name(MaterialSpec::Kind k);
MaterialSpec::Kind parse_material_kind(std::string_view s);

/// Constant anisotropic shift added to the material (eigenvalues 1,10 in 2D
/// and 1,5,10 in 3D).
std::vector<std::vector<double>> anisotropy_matrix(std::size_t d);

/// Frequencies of the stochastic expansion: the lowest nonzero |k| with one
/// representative of each +-k pair (first nonzero component positive),
/// ties broken lexicographically.
std::vector<std::vector<int>> stochastic_modes(std::size_t d, std::size_t count);
/// Expansion coefficients drawn uniformly from [-0.5, 0.5].
std::vector<double> stochastic_coefficients(std::uint64_t seed, std::size_t count);

template <class T> struct MaterialComponent {
  std::optional<T> field;  // nodal values on the material grid
  double constant = 0.0;   // added everywhere; only used when field is empty
};

template <class T> struct MaterialField {
  Scheme scheme = Scheme::gani;
  std::size_t grid_n = 0;  // M
  std::vector<std::vector<MaterialComponent<T>>> comp;  // d x d, symmetric
  double c_min = 1.0, c_max = 1.0;  // pointwise eigenvalue range
  bool approximate = false;         // Ga coefficients from quadrature
};

/// Samples A at x = k/N.
template <class T> MaterialField<T> material_gani(const MaterialSpec& spec, const GridSpec& grid);
/// Nodal double-grid values of the exact Fourier coefficients.
template <class T> MaterialField<T> material_ga(const MaterialSpec& spec, const GridSpec& grid);
template <class T> MaterialField<T> material_field(Scheme s, const MaterialSpec& spec, const GridSpec& grid);

/// Fourier coefficient int_{-1/2}^{t} exp(-2 pi i m x) dx.
cplx indicator_coefficient(int m, double t);

/// 2 pi i K_alpha as rank-one tensors, one per direction.
template <class T> std::vector<T> frequency_tensors(const GridSpec& grid, double sign = 1.0);

template <class T> std::vector<T> grad_hat(const T& u, const std::vector<T>& k);
template <class T> T div_hat(const std::vector<T>& w, const std::vector<T>& k);

enum class Pad { inject, project };
/// inject: Z_N -> Z_{2N-1}; project: Z_{2N-1} -> Z_N. `n` is the target size.
template <class T> T zero_pad(const T& v, Pad dir, std::size_t n);

struct Preconditioner {
  FullTensor p;     // k.k
  FullTensor pinv;  // 1/(k.k), 0 at k = 0
};
Preconditioner precond_build(const GridSpec& grid);

template <class T> struct OperatorContext {
  Scheme scheme = Scheme::gani;
  GridSpec grid;
  MaterialField<T> material;
  std::vector<T> freq;      // 2 pi i K_alpha
  std::vector<T> freq_div;  // -2 pi i K_alpha
  Preconditioner precond;
  T pinv;                   // format-specific approximant of precond.pinv
  TruncationPolicy policy;
  double pinv_tolerance = 1e-8;

  std::size_t material_n() const { return material.grid_n; }
};

template <class T>
OperatorContext<T> make_context(Scheme scheme, const GridSpec& grid, const MaterialSpec& spec,
                                const TruncationPolicy& policy);
/// Reuses a prepared material field (e.g. shared across ranks).
template <class T>
OperatorContext<T> make_context(const GridSpec& grid, MaterialField<T> material, const TruncationPolicy& policy);

/// Preconditioned system matrix applied to a zero-mean Fourier tensor.
template <class T> T apply_operator(const OperatorContext<T>& ctx, const T& u);
template <class T> T build_rhs(const OperatorContext<T>& ctx);

/// Energy of E + grad u for E = e_1; real part.
template <class T> double effective_coefficient(const OperatorContext<T>& ctx, const T& u);
/// a(grad v, grad v) without the macroscopic load.
template <class T> double energy_norm2(const OperatorContext<T>& ctx, const T& v);

struct SpectrumBounds {
  double c_a, c_cap;         // material eigenvalue range
  double lambda_min, lambda_max;
  double omega() const { return 2.0 / (lambda_min + lambda_max); }
};
template <class T> SpectrumBounds spectrum_bounds(const OperatorContext<T>& ctx);

/// |u[0]| relative to the norm of u.
template <class T> double mean_ratio(const OperatorContext<T>& ctx, const T& u);
/// Zeroes the k = 0 coefficient when it exceeds roundoff relative to the norm.
/// Below that level the rank-preserving correction can be far larger than the
/// entry it removes, so it is skipped.
template <class T> T enforce_zero_mean(const OperatorContext<T>& ctx, T u);
/// Subtracts the k = 0 coefficient exactly; compressed ranks grow by one.
template <class T> T remove_mean(const OperatorContext<T>& ctx, const T& u);

/// Converts between formats through the dense representation.
template <class T> T from_full(const FullTensor& t, const TruncationPolicy& policy);

}  // namespace fftlr
