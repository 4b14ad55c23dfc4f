#include "detail.hpp"

namespace fftlr::detail {

namespace {
struct Split {
  std::size_t outer, n, inner;
};
Split split(const Shape& s, std::size_t j) {
  require(j < s.size(), "mode index out of range");
  Split r{1, s[j], 1};
  for (std::size_t k = 0; k < j; ++k) r.outer *= s[k];
  for (std::size_t k = j + 1; k < s.size(); ++k) r.inner *= s[k];
  return r;
}
}  // namespace

FullTensor mode_product(const FullTensor& t, std::size_t j, const DenseMatrix& m) {
  const Split sp = split(t.shape(), j);
  require(static_cast<std::size_t>(m.cols()) == sp.n, "mode_product: size mismatch");
  Shape out_shape = t.shape();
  out_shape[j] = static_cast<std::size_t>(m.rows());
  FullTensor out(out_shape);
  const auto a = static_cast<std::size_t>(m.rows());
  const DenseMatrix mt = m.transpose();
  for (std::size_t o = 0; o < sp.outer; ++o) {
    ConstColMap x(t.data().data() + o * sp.n * sp.inner, static_cast<Idx>(sp.inner), static_cast<Idx>(sp.n));
    ColMap y(out.data().data() + o * a * sp.inner, static_cast<Idx>(sp.inner), static_cast<Idx>(a));
    y.noalias() = x * mt;
  }
  return out;
}

DenseMatrix unfold(const FullTensor& t, std::size_t j) {
  const Split sp = split(t.shape(), j);
  DenseMatrix u(static_cast<Idx>(sp.n), static_cast<Idx>(sp.outer * sp.inner));
  for (std::size_t o = 0; o < sp.outer; ++o) {
    ConstColMap x(t.data().data() + o * sp.n * sp.inner, static_cast<Idx>(sp.inner), static_cast<Idx>(sp.n));
    u.middleCols(static_cast<Idx>(o * sp.inner), static_cast<Idx>(sp.inner)) = x.transpose();
  }
  return u;
}

DenseMatrix resize_rows_centered(const DenseMatrix& m, std::size_t n) {
  const auto rows = static_cast<std::size_t>(m.rows());
  require(rows % 2 == 1 && n % 2 == 1, "resize_centered: sizes must be odd");
  DenseMatrix out = DenseMatrix::Zero(static_cast<Idx>(n), m.cols());
  const std::size_t common = std::min(rows, n);
  out.middleRows(static_cast<Idx>((n - common) / 2), static_cast<Idx>(common)) =
      m.middleRows(static_cast<Idx>((rows - common) / 2), static_cast<Idx>(common));
  return out;
}

void fft_columns(DenseMatrix& m, Direction dir, double scale) {
  const auto n = static_cast<std::size_t>(m.rows());
  auto plan = la::plan_for(n);
  for (Idx c = 0; c < m.cols(); ++c) plan->execute(std::span<cplx>(m.col(c).data(), n), dir);
  if (scale != 1.0) m *= scale;
}

}  // namespace fftlr::detail
