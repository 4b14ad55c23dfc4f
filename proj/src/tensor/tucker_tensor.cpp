#include <cmath>
#include <functional>

#include "detail.hpp"
#include "fftlr/simd/kernels.hpp"

namespace fftlr {

using detail::Idx;

namespace {

void check_pair(const TuckerTensor& v, const TuckerTensor& w, const char* op) {
  require(v.shape() == w.shape(), std::string(op) + ": shape mismatch");
}

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  return la::svd_thin(m).singular_values(0);
}

struct CoreTruncation {
  FullTensor core;
  std::vector<DenseMatrix> bases;  // W_j, columns orthonormal
  double bound = 0.0;
};

// HOSVD of a core: mode-wise leading left singular vectors of the
// unfoldings, then projection of the core onto them.
CoreTruncation hosvd(const FullTensor& core, const TruncationPolicy& policy) {
  const std::size_t d = core.order();
  CoreTruncation out;
  double sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const auto svd = la::svd_thin(detail::unfold(core, j));
    const auto sv = detail::as_span(svd.singular_values);
    const std::size_t k = select_rank(sv, policy, j, d);
    const double disc = la::discarded_norm(sv, k);
    sq += disc * disc;
    out.bases.push_back(svd.left.leftCols(static_cast<Idx>(k)));
  }
  out.core = core;
  for (std::size_t j = 0; j < d; ++j) out.core = detail::mode_product(out.core, j, out.bases[j].adjoint());
  out.bound = std::sqrt(sq);
  return out;
}

// Removes basis columns whose weight (column norm times core-slice norm) is
// below thr * max weight, mode by mode. Returns an upper bound of the change.
double drop_small_terms(TuckerTensor& v, double thr) {
  const std::size_t d = v.order();
  double dropped = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const DenseMatrix unf = detail::unfold(v.core(), j);
    const auto r = static_cast<std::size_t>(unf.rows());
    std::vector<double> w(r);
    double wmax = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      w[i] = v.factors()[j].col(static_cast<Idx>(i)).norm() * unf.row(static_cast<Idx>(i)).norm();
      wmax = std::max(wmax, w[i]);
    }
    std::vector<Idx> keep;
    double other = 1.0;
    for (std::size_t l = 0; l < d; ++l)
      if (l != j) other *= spectral_norm(v.factors()[l]);
    for (std::size_t i = 0; i < r; ++i) {
      if (w[i] > thr * wmax)
        keep.push_back(static_cast<Idx>(i));
      else
        dropped += w[i] * other;
    }
    if (keep.empty()) keep.push_back(0);
    if (keep.size() == r) continue;
    DenseMatrix sel = DenseMatrix::Zero(static_cast<Idx>(keep.size()), static_cast<Idx>(r));
    for (std::size_t t = 0; t < keep.size(); ++t) sel(static_cast<Idx>(t), keep[t]) = 1.0;
    v.core() = detail::mode_product(v.core(), j, sel);
    v.factors()[j] = v.factors()[j] * sel.transpose();
  }
  return dropped;
}

TuckerTensor finish(const std::vector<DenseMatrix>& q, const CoreTruncation& ct) {
  std::vector<DenseMatrix> f;
  for (std::size_t j = 0; j < q.size(); ++j) f.push_back(q[j] * ct.bases[j]);
  return TuckerTensor(ct.core, std::move(f), std::vector<bool>(q.size(), true));
}

}  // namespace

TuckerTensor::TuckerTensor(FullTensor core, std::vector<DenseMatrix> factors, std::vector<bool> orthonormal)
    : core_(std::move(core)), factors_(std::move(factors)), orthonormal_(std::move(orthonormal)) {
  require(core_.order() == factors_.size(), "TuckerTensor: core order != factor count");
  require(factors_.size() >= 2, "TuckerTensor: order must be >= 2");
  if (orthonormal_.empty()) orthonormal_.assign(factors_.size(), false);
  require(orthonormal_.size() == factors_.size(), "TuckerTensor: orthonormal flag count mismatch");
  for (std::size_t j = 0; j < factors_.size(); ++j)
    require(static_cast<std::size_t>(factors_[j].cols()) == core_.shape()[j],
            "TuckerTensor: factor column count != core size");
}

Shape TuckerTensor::shape() const {
  Shape s;
  for (const auto& f : factors_) s.push_back(static_cast<std::size_t>(f.rows()));
  return s;
}

bool TuckerTensor::all_orthonormal() const {
  for (bool b : orthonormal_)
    if (!b) return false;
  return true;
}

void TuckerTensor::clear_orthonormal() { orthonormal_.assign(factors_.size(), false); }

bool TuckerTensor::verify_orthonormal(double tol) const {
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    if (!orthonormal_[j]) continue;
    const auto& u = factors_[j];
    const DenseMatrix g = u.adjoint() * u - DenseMatrix::Identity(u.cols(), u.cols());
    if (g.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

FullTensor reconstruct(const TuckerTensor& v) {
  require(shape_product(v.shape()) <= dense_entry_cap(), "reconstruct: dense size above configured cap");
  FullTensor t = v.core();
  for (std::size_t j = 0; j < v.order(); ++j) t = detail::mode_product(t, j, v.factors()[j]);
  return t;
}

cplx entry(const TuckerTensor& v, std::span<const std::size_t> idx) {
  FullTensor t = v.core();
  for (std::size_t j = 0; j < v.order(); ++j)
    t = detail::mode_product(t, j, v.factors()[j].row(static_cast<Idx>(idx[j])));
  return t[0];
}

TuckerTensor linear_combine(cplx alpha, const TuckerTensor& v, cplx beta, const TuckerTensor& w) {
  check_pair(v, w, "linear_combine");
  const std::size_t d = v.order();
  const RankVector rv = v.ranks(), rw = w.ranks();
  Shape cs(d);
  std::vector<DenseMatrix> f;
  for (std::size_t j = 0; j < d; ++j) {
    cs[j] = rv[j] + rw[j];
    DenseMatrix m(v.factors()[j].rows(), static_cast<Idx>(cs[j]));
    m.leftCols(static_cast<Idx>(rv[j])) = v.factors()[j];
    m.rightCols(static_cast<Idx>(rw[j])) = w.factors()[j];
    f.push_back(std::move(m));
  }
  FullTensor core(cs);
  std::vector<std::size_t> q(d, 0), dst(d);
  auto place = [&](const FullTensor& src, const RankVector& r, std::size_t shift_mask, cplx s) {
    std::fill(q.begin(), q.end(), 0);
    for (std::size_t flat = 0; flat < src.size(); ++flat) {
      for (std::size_t j = 0; j < d; ++j) dst[j] = q[j] + (shift_mask ? rv[j] : 0);
      core.at(dst) = s * src[flat];
      for (std::size_t j = d; j-- > 0;) {
        if (++q[j] < r[j]) break;
        q[j] = 0;
      }
    }
  };
  place(v.core(), rv, 0, alpha);
  place(w.core(), rw, 1, beta);
  return TuckerTensor(std::move(core), std::move(f), {});
}

TuckerTensor scaled(cplx alpha, TuckerTensor v) {
  simd::kernels().cscale(alpha, v.core().data().data(), v.core().size());
  return v;
}

TuckerTensor hadamard(const TuckerTensor& v, const TuckerTensor& w) {
  check_pair(v, w, "hadamard");
  const std::size_t d = v.order();
  const RankVector rv = v.ranks(), rw = w.ranks();
  const auto& kern = simd::kernels();
  std::vector<DenseMatrix> f;
  Shape cs(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& a = v.factors()[j];
    const auto& b = w.factors()[j];
    cs[j] = rv[j] * rw[j];
    DenseMatrix m(a.rows(), static_cast<Idx>(cs[j]));
    for (std::size_t i = 0; i < rv[j]; ++i)
      for (std::size_t k = 0; k < rw[j]; ++k)
        kern.cmul(a.col(static_cast<Idx>(i)).data(), b.col(static_cast<Idx>(k)).data(),
                  m.col(static_cast<Idx>(i * rw[j] + k)).data(), static_cast<std::size_t>(a.rows()));
    f.push_back(std::move(m));
  }
  FullTensor core(cs);
  std::vector<std::size_t> qi(d, 0), qk(d, 0), l(d);
  for (std::size_t fi = 0; fi < v.core().size(); ++fi) {
    std::fill(qk.begin(), qk.end(), 0);
    for (std::size_t fk = 0; fk < w.core().size(); ++fk) {
      for (std::size_t j = 0; j < d; ++j) l[j] = qi[j] * rw[j] + qk[j];
      core.at(l) = v.core()[fi] * w.core()[fk];
      for (std::size_t j = d; j-- > 0;) {
        if (++qk[j] < rw[j]) break;
        qk[j] = 0;
      }
    }
    for (std::size_t j = d; j-- > 0;) {
      if (++qi[j] < rv[j]) break;
      qi[j] = 0;
    }
  }
  return TuckerTensor(std::move(core), std::move(f), {});
}

// The forward transform is 1/sqrt(N) times a unitary map, so factors are
// rescaled by sqrt(N) (and the core by its inverse) to stay orthonormal.
TuckerTensor fft_d(const TuckerTensor& v, Direction dir) {
  TuckerTensor out = v;
  double core_scale = 1.0;
  for (auto& f : out.factors()) {
    const double s = std::sqrt(static_cast<double>(f.rows()));
    const double fs = dir == Direction::forward ? s : 1.0 / s;
    detail::fft_columns(f, dir, fs);
    core_scale /= fs;
  }
  simd::kernels().cscale(core_scale, out.core().data().data(), out.core().size());
  return out;
}

TuckerTensor truncate(const TuckerTensor& v, const TruncationPolicy& policy, TruncationInfo* info) {
  policy.validate();
  const std::size_t d = v.order();
  TuckerTensor work = v;
  double dropped = 0.0;
  if (policy.drop_small_norm_threshold) dropped = drop_small_terms(work, *policy.drop_small_norm_threshold);
  std::vector<DenseMatrix> q(d);
  FullTensor core = work.core();
  for (std::size_t j = 0; j < d; ++j) {
    if (work.orthonormal()[j]) {
      q[j] = work.factors()[j];
      continue;
    }
    auto qr = la::qr_thin(work.factors()[j]);
    core = detail::mode_product(core, j, qr.r);
    q[j] = std::move(qr.q);
  }
  const CoreTruncation ct = hosvd(core, policy);
  TuckerTensor out = finish(q, ct);
  if (info) {
    info->ranks_before = v.ranks();
    info->ranks_after = out.ranks();
    info->error_bound = ct.bound + dropped;
  }
  return out;
}

TuckerTensor truncate(const TuckerTensor& v, const TruncationPolicy& policy) { return truncate(v, policy, nullptr); }

// Orthogonalises the product factors first and contracts the triangular
// factors against both cores mode by mode, so the r_j*s_j Kronecker core is
// never formed.
TuckerTensor hadamard_truncate(const TuckerTensor& v, const TuckerTensor& w, const TruncationPolicy& p) {
  check_pair(v, w, "hadamard_truncate");
  if (p.drop_small_norm_threshold) return truncate(hadamard(v, w), p);
  p.validate();
  const std::size_t d = v.order();
  const RankVector rv = v.ranks(), rw = w.ranks();
  const auto& kern = simd::kernels();
  std::vector<DenseMatrix> q(d);
  // t[j][k] is the q_j x r_j slice R_j(:, i*s_j + k) over i.
  std::vector<std::vector<DenseMatrix>> t(d);
  Shape qs(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& a = v.factors()[j];
    const auto& b = w.factors()[j];
    DenseMatrix m(a.rows(), static_cast<Idx>(rv[j] * rw[j]));
    for (std::size_t i = 0; i < rv[j]; ++i)
      for (std::size_t k = 0; k < rw[j]; ++k)
        kern.cmul(a.col(static_cast<Idx>(i)).data(), b.col(static_cast<Idx>(k)).data(),
                  m.col(static_cast<Idx>(i * rw[j] + k)).data(), static_cast<std::size_t>(a.rows()));
    auto qr = la::qr_thin(m);
    q[j] = std::move(qr.q);
    qs[j] = static_cast<std::size_t>(qr.r.rows());
    for (std::size_t k = 0; k < rw[j]; ++k) {
      DenseMatrix slice(qr.r.rows(), static_cast<Idx>(rv[j]));
      for (std::size_t i = 0; i < rv[j]; ++i) slice.col(static_cast<Idx>(i)) = qr.r.col(static_cast<Idx>(i * rw[j] + k));
      t[j].push_back(std::move(slice));
    }
  }
  FullTensor core(qs);
  std::vector<std::size_t> kidx(d, 0);
  std::function<void(std::size_t, const FullTensor&)> rec = [&](std::size_t j, const FullTensor& y) {
    if (j + 1 == d) {
      DenseMatrix m = DenseMatrix::Zero(static_cast<Idx>(qs[j]), static_cast<Idx>(rv[j]));
      for (std::size_t k = 0; k < rw[j]; ++k) {
        kidx[j] = k;
        const cplx c = w.core().at(kidx);
        if (c != cplx{}) m += c * t[j][k];
      }
      const FullTensor z = detail::mode_product(y, j, m);
      kern.caxpy(1.0, z.data().data(), core.data().data(), core.size());
      return;
    }
    for (std::size_t k = 0; k < rw[j]; ++k) {
      kidx[j] = k;
      rec(j + 1, detail::mode_product(y, j, t[j][k]));
    }
  };
  rec(0, v.core());
  return finish(q, hosvd(core, p));
}

cplx inner(const TuckerTensor& v, const TuckerTensor& w) {
  check_pair(v, w, "inner");
  FullTensor z = w.core();
  for (std::size_t j = 0; j < v.order(); ++j)
    z = detail::mode_product(z, j, v.factors()[j].adjoint() * w.factors()[j]);
  return simd::kernels().cdotc(v.core().data().data(), z.data().data(), z.size());
}

TuckerNorm tucker_norm(const TuckerTensor& v) {
  if (v.all_orthonormal()) return {norm(v.core()), true};
  return {std::sqrt(std::max(0.0, inner(v, v).real())), false};
}

double norm(const TuckerTensor& v) { return tucker_norm(v).value; }

std::size_t param_count(const TuckerTensor& v) {
  std::size_t p = 0;
  for (const auto& f : v.factors()) p += static_cast<std::size_t>(f.size());
  return p + v.core().size();
}
RankVector rank_vector(const TuckerTensor& v) { return v.ranks(); }
Shape shape_of(const TuckerTensor& v) { return v.shape(); }

// Zero extension keeps orthonormal columns orthonormal; cropping does not.
TuckerTensor resize_centered(const TuckerTensor& v, std::size_t n) {
  std::vector<DenseMatrix> f;
  std::vector<bool> flags = v.orthonormal();
  for (std::size_t j = 0; j < v.order(); ++j) {
    if (n < static_cast<std::size_t>(v.factors()[j].rows())) flags[j] = false;
    f.push_back(detail::resize_rows_centered(v.factors()[j], n));
  }
  return TuckerTensor(v.core(), std::move(f), std::move(flags));
}

TuckerTensor annihilate_entry(TuckerTensor v, std::span<const std::size_t> idx) {
  const std::size_t d = v.order();
  std::vector<std::vector<cplx>> rows(d);
  double scale = 1.0;
  FullTensor t = v.core();
  for (std::size_t j = 0; j < d; ++j) {
    const auto row = v.factors()[j].row(static_cast<Idx>(idx[j]));
    t = detail::mode_product(t, j, row);
    scale *= row.squaredNorm();
    for (Idx i = 0; i < row.size(); ++i) rows[j].push_back(std::conj(row(i)));
  }
  const cplx m = t[0];
  if (m == cplx{} || scale == 0.0) return v;
  const FullTensor corr = rank_one<FullTensor>(rows);
  simd::kernels().caxpy(-m / scale, corr.data().data(), v.core().data().data(), corr.size());
  return v;
}

template <> TuckerTensor rank_one<TuckerTensor>(const std::vector<std::vector<cplx>>& vectors) {
  const std::size_t d = vectors.size();
  std::vector<DenseMatrix> f;
  std::vector<bool> flags(d, false);
  cplx c = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    DenseMatrix m(static_cast<Idx>(vectors[j].size()), 1);
    for (std::size_t i = 0; i < vectors[j].size(); ++i) m(static_cast<Idx>(i), 0) = vectors[j][i];
    const double nrm = m.norm();
    if (nrm > 0.0) {
      m /= nrm;
      c *= nrm;
      flags[j] = true;
    }
    f.push_back(std::move(m));
  }
  FullTensor core(Shape(d, 1));
  core[0] = c;
  return TuckerTensor(std::move(core), std::move(f), std::move(flags));
}

template <> TuckerTensor decompose<TuckerTensor>(const FullTensor& t, const TruncationPolicy& policy) {
  policy.validate();
  require(t.order() >= 2, "Tucker decomposition requires order >= 2");
  std::vector<DenseMatrix> eye;
  for (auto n : t.shape()) eye.push_back(DenseMatrix::Identity(static_cast<Idx>(n), static_cast<Idx>(n)));
  return finish(eye, hosvd(t, policy));
}

}  // namespace fftlr
