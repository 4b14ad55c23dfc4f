#include <cmath>

#include "detail.hpp"
#include "fftlr/simd/kernels.hpp"

namespace fftlr {

using detail::Idx;

namespace {

void check_pair(const TtTensor& v, const TtTensor& w, const char* op) {
  require(v.shape() == w.shape(), std::string(op) + ": shape mismatch");
}

// Slice G[:, i, :] as an r0 x r1 block.
auto slice(const Carriage& g, std::size_t i) {
  return g.data.middleRows(static_cast<Idx>(g.r0 * i), static_cast<Idx>(g.r0));
}

Carriage from_right_unfolding(const DenseMatrix& m, std::size_t n) {
  const auto r0 = static_cast<std::size_t>(m.rows());
  require(static_cast<std::size_t>(m.cols()) % n == 0, "carriage: bad unfolding");
  Carriage g(r0, n, static_cast<std::size_t>(m.cols()) / n);
  g.right_unfolding() = m;
  return g;
}

// Right-to-left QR sweep; afterwards carriages 1..d-1 are right-orthogonal.
void orthogonalise_right(std::vector<Carriage>& g) {
  for (std::size_t j = g.size(); j-- > 1;) {
    const DenseMatrix m = g[j].right_unfolding();
    auto qr = la::qr_thin(m.adjoint());
    g[j] = from_right_unfolding(qr.q.adjoint(), g[j].n);
    Carriage& left = g[j - 1];
    Carriage next(left.r0, left.n, static_cast<std::size_t>(qr.r.rows()));
    next.data = left.data * qr.r.adjoint();
    left = std::move(next);
  }
}

}  // namespace

TtTensor::TtTensor(std::vector<Carriage> carriages) : carriages_(std::move(carriages)) {
  require(carriages_.size() >= 2, "TtTensor: order must be >= 2");
  require(carriages_.front().r0 == 1 && carriages_.back().r1 == 1, "TtTensor: boundary ranks must be 1");
  for (std::size_t j = 0; j < carriages_.size(); ++j) {
    const auto& c = carriages_[j];
    require(static_cast<std::size_t>(c.data.rows()) == c.r0 * c.n && static_cast<std::size_t>(c.data.cols()) == c.r1,
            "TtTensor: carriage storage mismatch");
    if (j + 1 < carriages_.size())
      require(c.r1 == carriages_[j + 1].r0, "TtTensor: bond rank mismatch");
  }
}

Shape TtTensor::shape() const {
  Shape s;
  for (const auto& c : carriages_) s.push_back(c.n);
  return s;
}

RankVector TtTensor::ranks() const {
  RankVector r;
  for (std::size_t j = 0; j + 1 < carriages_.size(); ++j) r.push_back(carriages_[j].r1);
  return r;
}

FullTensor reconstruct(const TtTensor& v) {
  const Shape s = v.shape();
  require(shape_product(s) <= dense_entry_cap(), "reconstruct: dense size above configured cap");
  DenseMatrix left = v.carriages()[0].data;
  for (std::size_t j = 1; j < v.order(); ++j) {
    const Carriage& g = v.carriages()[j];
    DenseMatrix next(left.rows() * static_cast<Idx>(g.n), static_cast<Idx>(g.r1));
    const DenseMatrix prod = [&] {
      // rows p*n + i of next = left.row(p) * G_i
      DenseMatrix all(left.rows(), static_cast<Idx>(g.n * g.r1));
      for (std::size_t i = 0; i < g.n; ++i)
        all.middleCols(static_cast<Idx>(i * g.r1), static_cast<Idx>(g.r1)).noalias() = left * slice(g, i);
      return all;
    }();
    for (Idx p = 0; p < left.rows(); ++p)
      for (std::size_t i = 0; i < g.n; ++i)
        next.row(p * static_cast<Idx>(g.n) + static_cast<Idx>(i)) =
            prod.block(p, static_cast<Idx>(i * g.r1), 1, static_cast<Idx>(g.r1));
    left = std::move(next);
  }
  return FullTensor(s, std::vector<cplx>(left.data(), left.data() + left.size()));
}

cplx entry(const TtTensor& v, std::span<const std::size_t> idx) {
  DenseMatrix row = slice(v.carriages()[0], idx[0]);
  for (std::size_t j = 1; j < v.order(); ++j) row = row * slice(v.carriages()[j], idx[j]);
  return row(0, 0);
}

TtTensor linear_combine(cplx alpha, const TtTensor& v, cplx beta, const TtTensor& w) {
  check_pair(v, w, "linear_combine");
  const std::size_t d = v.order();
  std::vector<Carriage> out;
  for (std::size_t j = 0; j < d; ++j) {
    const Carriage& a = v.carriages()[j];
    const Carriage& b = w.carriages()[j];
    const std::size_t r0 = j == 0 ? 1 : a.r0 + b.r0;
    const std::size_t r1 = j + 1 == d ? 1 : a.r1 + b.r1;
    Carriage g(r0, a.n, r1);
    const std::size_t ob0 = j == 0 ? 0 : a.r0;
    const std::size_t ob1 = j + 1 == d ? 0 : a.r1;
    const cplx sa = j == 0 ? alpha : 1.0;
    const cplx sb = j == 0 ? beta : 1.0;
    for (std::size_t i = 0; i < a.n; ++i) {
      for (std::size_t x = 0; x < a.r0; ++x)
        for (std::size_t y = 0; y < a.r1; ++y) g(x, i, y) = sa * a(x, i, y);
      for (std::size_t x = 0; x < b.r0; ++x)
        for (std::size_t y = 0; y < b.r1; ++y) g(x + ob0, i, y + ob1) += sb * b(x, i, y);
    }
    out.push_back(std::move(g));
  }
  return TtTensor(std::move(out));
}

TtTensor scaled(cplx alpha, TtTensor v) {
  v.carriages()[0].data *= alpha;
  return v;
}

TtTensor hadamard(const TtTensor& v, const TtTensor& w) {
  check_pair(v, w, "hadamard");
  std::vector<Carriage> out;
  for (std::size_t j = 0; j < v.order(); ++j) {
    const Carriage& a = v.carriages()[j];
    const Carriage& b = w.carriages()[j];
    Carriage g(a.r0 * b.r0, a.n, a.r1 * b.r1);
    for (std::size_t y = 0; y < a.r1; ++y)
      for (std::size_t y2 = 0; y2 < b.r1; ++y2)
        for (std::size_t i = 0; i < a.n; ++i)
          for (std::size_t x = 0; x < a.r0; ++x)
            for (std::size_t x2 = 0; x2 < b.r0; ++x2) g(x * b.r0 + x2, i, y * b.r1 + y2) = a(x, i, y) * b(x2, i, y2);
    out.push_back(std::move(g));
  }
  return TtTensor(std::move(out));
}

TtTensor fft_d(const TtTensor& v, Direction dir) {
  TtTensor out = v;
  for (auto& g : out.carriages())
    for (std::size_t b = 0; b < g.r1; ++b)
      for (std::size_t a = 0; a < g.r0; ++a) la::fft1d_strided(g.data.col(static_cast<Idx>(b)).data() + a, g.n, g.r0, dir);
  return out;
}

TtTensor truncate(const TtTensor& v, const TruncationPolicy& policy, TruncationInfo* info) {
  policy.validate();
  std::vector<Carriage> g = v.carriages();
  const std::size_t d = g.size();
  orthogonalise_right(g);
  double sq = 0.0;
  for (std::size_t j = 0; j + 1 < d; ++j) {
    const auto svd = la::svd_thin(g[j].data);
    const auto sv = detail::as_span(svd.singular_values);
    const std::size_t k = select_rank(sv, policy, j, d - 1);
    const double disc = la::discarded_norm(sv, k);
    sq += disc * disc;
    const auto ki = static_cast<Idx>(k);
    Carriage cur(g[j].r0, g[j].n, k);
    cur.data = svd.left.leftCols(ki);
    const DenseMatrix carry = svd.singular_values.head(ki).cast<cplx>().asDiagonal() * svd.right_adj.topRows(ki);
    const DenseMatrix next = carry * g[j + 1].right_unfolding();
    g[j] = std::move(cur);
    g[j + 1] = from_right_unfolding(next, g[j + 1].n);
  }
  TtTensor out(std::move(g));
  if (info) {
    info->ranks_before = v.ranks();
    info->ranks_after = out.ranks();
    info->error_bound = std::sqrt(sq);
  }
  return out;
}

TtTensor truncate(const TtTensor& v, const TruncationPolicy& policy) { return truncate(v, policy, nullptr); }

TtTensor hadamard_truncate(const TtTensor& v, const TtTensor& w, const TruncationPolicy& p) {
  return truncate(hadamard(v, w), p);
}

cplx inner(const TtTensor& v, const TtTensor& w) {
  check_pair(v, w, "inner");
  DenseMatrix e = DenseMatrix::Ones(1, 1);
  for (std::size_t j = 0; j < v.order(); ++j) {
    const Carriage& a = v.carriages()[j];
    const Carriage& b = w.carriages()[j];
    DenseMatrix next = DenseMatrix::Zero(static_cast<Idx>(a.r1), static_cast<Idx>(b.r1));
    for (std::size_t i = 0; i < a.n; ++i) next.noalias() += slice(a, i).adjoint() * (e * slice(b, i));
    e = std::move(next);
  }
  return e(0, 0);
}

double norm(const TtTensor& v) { return std::sqrt(std::max(0.0, inner(v, v).real())); }

std::size_t param_count(const TtTensor& v) {
  std::size_t p = 0;
  for (const auto& g : v.carriages()) p += g.r0 * g.n * g.r1;
  return p;
}
RankVector rank_vector(const TtTensor& v) { return v.ranks(); }
Shape shape_of(const TtTensor& v) { return v.shape(); }

TtTensor resize_centered(const TtTensor& v, std::size_t n) {
  std::vector<Carriage> out;
  for (const auto& g : v.carriages()) {
    require(g.n % 2 == 1 && n % 2 == 1, "resize_centered: sizes must be odd");
    Carriage h(g.r0, n, g.r1);
    const std::size_t common = std::min(g.n, n);
    const std::size_t src = (g.n - common) / 2, dst = (n - common) / 2;
    h.data.middleRows(static_cast<Idx>(g.r0 * dst), static_cast<Idx>(g.r0 * common)) =
        g.data.middleRows(static_cast<Idx>(g.r0 * src), static_cast<Idx>(g.r0 * common));
    out.push_back(std::move(h));
  }
  return TtTensor(std::move(out));
}

TtTensor annihilate_entry(TtTensor v, std::span<const std::size_t> idx) {
  const std::size_t d = v.order();
  DenseMatrix w = slice(v.carriages()[0], idx[0]);
  for (std::size_t j = 1; j + 1 < d; ++j) w = w * slice(v.carriages()[j], idx[j]);
  Carriage& last = v.carriages().back();
  auto g = last.data.middleRows(static_cast<Idx>(last.r0 * idx[d - 1]), static_cast<Idx>(last.r0));
  const cplx m = (w * g)(0, 0);
  const double w2 = w.squaredNorm();
  if (m == cplx{} || w2 == 0.0) return v;
  g -= (m / w2) * w.adjoint();
  return v;
}

template <> TtTensor rank_one<TtTensor>(const std::vector<std::vector<cplx>>& vectors) {
  std::vector<Carriage> out;
  for (const auto& vec : vectors) {
    Carriage g(1, vec.size(), 1);
    for (std::size_t i = 0; i < vec.size(); ++i) g(0, i, 0) = vec[i];
    out.push_back(std::move(g));
  }
  return TtTensor(std::move(out));
}

template <> TtTensor decompose<TtTensor>(const FullTensor& t, const TruncationPolicy& policy) {
  policy.validate();
  const std::size_t d = t.order();
  require(d >= 2, "TT decomposition requires order >= 2");
  std::size_t rest = t.size() / t.shape()[0];
  DenseMatrix m(static_cast<Idx>(t.shape()[0]), static_cast<Idx>(rest));
  for (std::size_t i = 0; i < t.shape()[0]; ++i)
    for (std::size_t c = 0; c < rest; ++c) m(static_cast<Idx>(i), static_cast<Idx>(c)) = t[i * rest + c];
  std::vector<Carriage> out;
  std::size_t r0 = 1;
  for (std::size_t j = 0; j + 1 < d; ++j) {
    const std::size_t n = t.shape()[j];
    const auto svd = la::svd_thin(m);
    const auto sv = detail::as_span(svd.singular_values);
    const std::size_t k = select_rank(sv, policy, j, d - 1);
    const auto ki = static_cast<Idx>(k);
    Carriage g(r0, n, k);
    g.data = svd.left.leftCols(ki);
    out.push_back(std::move(g));
    const DenseMatrix carry = svd.singular_values.head(ki).cast<cplx>().asDiagonal() * svd.right_adj.topRows(ki);
    // carry is k x (n_{j+1} * rest'), column c = i * rest' + c'; regroup rows to a + k * i.
    const std::size_t n1 = t.shape()[j + 1];
    const std::size_t rest1 = rest / n1;
    DenseMatrix next(static_cast<Idx>(k * n1), static_cast<Idx>(rest1));
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t a = 0; a < k; ++a)
        next.row(static_cast<Idx>(a + k * i)) = carry.block(static_cast<Idx>(a), static_cast<Idx>(i * rest1), 1, static_cast<Idx>(rest1));
    m = std::move(next);
    rest = rest1;
    r0 = k;
  }
  Carriage g(r0, t.shape()[d - 1], 1);
  g.data = m;
  out.push_back(std::move(g));
  return TtTensor(std::move(out));
}

}  // namespace fftlr
