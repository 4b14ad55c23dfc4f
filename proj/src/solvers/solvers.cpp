#include "fftlr/solvers/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "fftlr/simd/kernels.hpp"

namespace fftlr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Re sum_k P[k] conj(x[k]) y[k]
double p_inner(const FullTensor& p, const FullTensor& x, const FullTensor& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i].real() * (std::conj(x[i]) * y[i]).real();
  return acc;
}

std::vector<double> real_weights(const FullTensor& p) {
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = p[i].real();
  return w;
}

template <class T> T truncate_with_info(const T& v, const TruncationPolicy& p, TruncationInfo* info) {
  if constexpr (std::is_same_v<T, FullTensor>) {
    info->ranks_before = info->ranks_after = {};
    info->error_bound = 0.0;
    (void)p;
    return v;
  } else {
    return truncate(v, p, info);
  }
}

// Re-orthogonalises a residual without dropping content. Norms of d - C u
// taken from Gram matrices of the raw sum lose about half the digits.
template <class T> T recompress(T r) {
  if constexpr (std::is_same_v<T, FullTensor>)
    return r;
  else
    return truncate(r, TruncationPolicy::tolerance(0.0));
}

template <class T> double residual_norm(const T& r, bool* fallback) {
  if constexpr (std::is_same_v<T, TuckerTensor>) {
    const TuckerNorm n = tucker_norm(r);
    if (!n.core_shortcut) *fallback = true;
    return n.value;
  } else {
    (void)fallback;
    return norm(r);
  }
}

template <class T> T zero_like(const T& rhs, const TruncationPolicy& p) {
  if constexpr (std::is_same_v<T, FullTensor>) {
    (void)p;
    return FullTensor(rhs.shape());
  } else {
    return truncate(scaled(0.0, rhs), TruncationPolicy::fixed(1));
  }
}

template <class T> void finish(const OperatorContext<T>& ctx, SolveReport<T>& rep, Clock::time_point t0) {
  rep.a_eff = effective_coefficient(ctx, rep.solution);
  rep.param_count = param_count(rep.solution);
  rep.wall_s = seconds_since(t0);
}

void require_zero_mean(double ratio, const char* who) {
  require(ratio <= 1e-12, std::string(who) + ": right-hand side is not zero-mean");
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::pcg:
      return "pcg";
    case Method::richardson:
      return "richardson";
    case Method::minres:
      return "minres";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "pcg") return Method::pcg;
  if (s == "richardson") return Method::richardson;
  if (s == "minres") return Method::minres;
  throw Error("unknown solver '" + std::string(s) + "' (expected pcg, richardson or minres)");
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::tolerance:
      return "tolerance";
    case StopReason::stagnation:
      return "stagnation";
    case StopReason::max_iter:
      return "max_iter";
  }
  return "?";
}

void SolverConfig::validate() const {
  require(residual_tol >= 0.0 && std::isfinite(residual_tol), "solver: residual tolerance must be >= 0");
  require(stagnation_window >= 1, "solver: stagnation window must be >= 1");
  policy.validate();
  for (std::size_t i = 1; i < rank_schedule.size(); ++i)
    require(rank_schedule[i] > rank_schedule[i - 1], "solver: rank schedule must be strictly increasing");
  for (auto r : rank_schedule) require(r >= 1, "solver: rank schedule entries must be >= 1");
}

double relative_error(double a_r, double a_ref) { return (a_r - a_ref) / a_ref; }

SolveReport<FullTensor> pcg_full(const OperatorContext<FullTensor>& ctx, const FullTensor& rhs,
                                 const SolverConfig& cfg) {
  cfg.validate();
  require_zero_mean(mean_ratio(ctx, rhs), "pcg");
  const auto t0 = Clock::now();
  const FullTensor& p = ctx.precond.p;
  const std::vector<double> w = real_weights(p);
  const auto& kern = simd::kernels();

  SolveReport<FullTensor> rep;
  FullTensor u(rhs.shape());
  FullTensor z = rhs;
  FullTensor dir = z;
  double rn = norm(z);
  double rho = kern.wnorm2(w.data(), z.data().data(), z.size());
  rep.iterations.push_back({0, rn, 0.0, {}, seconds_since(t0), 0.0});
  std::size_t it = 0;
  while (rn > cfg.residual_tol && it < cfg.max_iter) {
    ++it;
    const FullTensor q = apply_operator(ctx, dir);
    ++rep.matvecs;
    const double curv = p_inner(p, dir, q);
    require(curv > 0.0, "pcg: non-positive curvature, the preconditioned operator is not definite");
    const double alpha = rho / curv;
    kern.caxpy(alpha, dir.data().data(), u.data().data(), u.size());
    kern.caxpy(-alpha, q.data().data(), z.data().data(), z.size());
    rn = norm(z);
    rep.iterations.push_back({it, rn, alpha, {}, seconds_since(t0), 0.0});
    const double rho_next = kern.wnorm2(w.data(), z.data().data(), z.size());
    const double beta = rho_next / rho;
    rho = rho_next;
    kern.cscale(beta, dir.data().data(), dir.size());
    kern.caxpy(1.0, z.data().data(), dir.data().data(), dir.size());
  }
  rep.converged = rn <= cfg.residual_tol;
  rep.stop = rep.converged ? StopReason::tolerance : StopReason::max_iter;
  rep.solution = enforce_zero_mean(ctx, std::move(u));
  finish(ctx, rep, t0);
  return rep;
}

template <class T>
SolveReport<T> richardson(const OperatorContext<T>& ctx, const T& rhs, const SolverConfig& cfg,
                          std::optional<double> omega) {
  cfg.validate();
  if constexpr (!std::is_same_v<T, FullTensor>)
    require(cfg.allow_lowrank_richardson,
            "richardson on compressed tensors may diverge under truncation; enable it explicitly");
  require_zero_mean(mean_ratio(ctx, rhs), "richardson");
  const auto t0 = Clock::now();
  const double om = omega.value_or(spectrum_bounds(ctx).omega());
  SolveReport<T> rep;
  T u = zero_like(rhs, cfg.policy);
  bool zero = true;
  for (std::size_t it = 0;; ++it) {
    T r = zero ? rhs : recompress(linear_combine(1.0, rhs, -1.0, apply_operator(ctx, u)));
    if (!zero) ++rep.matvecs;
    const double rn = residual_norm(r, &rep.norm_shortcut_fallback);
    // after the norm: exact mean removal spoils the orthonormal form
    if (!zero) r = remove_mean(ctx, r);
    rep.iterations.push_back({it, rn, om, rank_vector(u), seconds_since(t0), 0.0});
    if (rn <= cfg.residual_tol) {
      rep.converged = true;
      rep.stop = StopReason::tolerance;
      break;
    }
    if (it == cfg.max_iter) {
      rep.stop = StopReason::max_iter;
      break;
    }
    u = enforce_zero_mean(ctx, truncate(linear_combine(1.0, u, om, r), cfg.policy));
    zero = false;
  }
  rep.solution = std::move(u);
  finish(ctx, rep, t0);
  return rep;
}

template <class T>
SolveReport<T> minres_truncated(const OperatorContext<T>& ctx, const T& rhs, const SolverConfig& cfg,
                                const T* initial) {
  cfg.validate();
  require_zero_mean(mean_ratio(ctx, rhs), "minres");
  const auto t0 = Clock::now();
  SolveReport<T> rep;
  T u = initial ? enforce_zero_mean(ctx, *initial) : zero_like(rhs, cfg.policy);
  bool zero = initial == nullptr;
  T best = u;
  double best_rn = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t it = 0;; ++it) {
    T r = zero ? rhs : recompress(linear_combine(1.0, rhs, -1.0, apply_operator(ctx, u)));
    if (!zero) ++rep.matvecs;
    const double rn = residual_norm(r, &rep.norm_shortcut_fallback);
    // after the norm: exact mean removal spoils the orthonormal form
    if (!zero) r = remove_mean(ctx, r);
    IterationRecord rec{it, rn, 0.0, rank_vector(u), 0.0, 0.0};
    if (rn < best_rn) {
      best_rn = rn;
      best = u;
      since_best = 0;
    } else {
      ++since_best;
    }
    bool stop = true;
    if (rn <= cfg.residual_tol) {
      rep.converged = true;
      rep.stop = StopReason::tolerance;
    } else if (since_best >= cfg.stagnation_window) {
      rep.stop = StopReason::stagnation;
    } else if (it == cfg.max_iter) {
      rep.stop = StopReason::max_iter;
    } else {
      stop = false;
    }
    if (stop) {
      rec.elapsed_s = seconds_since(t0);
      rep.iterations.push_back(rec);
      break;
    }
    const T cr = apply_operator(ctx, r);
    ++rep.matvecs;
    const double den = inner(cr, cr).real();
    require(den > 1e-300, "minres: breakdown, the residual lies in the operator kernel");
    const double omega = inner(cr, r).real() / den;
    TruncationInfo info;
    u = enforce_zero_mean(ctx, truncate_with_info(linear_combine(1.0, u, omega, r), cfg.policy, &info));
    zero = false;
    rec.omega = omega;
    rec.truncation_bound = info.error_bound;
    rec.elapsed_s = seconds_since(t0);
    rep.iterations.push_back(rec);
  }
  rep.solution = rep.stop == StopReason::tolerance ? std::move(u) : std::move(best);
  finish(ctx, rep, t0);
  return rep;
}

template <class T>
SolveReport<T> rank_continuation(const OperatorContext<T>& ctx, const SolverConfig& cfg,
                                 const ContinuationTarget& target) {
  cfg.validate();
  require(!cfg.rank_schedule.empty(), "rank continuation: empty rank schedule");
  const auto t0 = Clock::now();
  SolveReport<T> total;
  std::optional<T> prev;
  for (std::size_t r : cfg.rank_schedule) {
    OperatorContext<T> stage = ctx;
    stage.policy = TruncationPolicy::fixed(r);
    SolverConfig scfg = cfg;
    scfg.policy = stage.policy;
    const T rhs = build_rhs(stage);
    SolveReport<T> rep = minres_truncated(stage, rhs, scfg, prev ? &*prev : nullptr);
    const std::size_t base = total.iterations.size();
    for (auto rec : rep.iterations) {
      rec.index += base;
      total.iterations.push_back(std::move(rec));
    }
    total.matvecs += rep.matvecs;
    total.norm_shortcut_fallback |= rep.norm_shortcut_fallback;
    bool met;
    if (target.a_ref) {
      const double err = relative_error(rep.a_eff, *target.a_ref);
      total.stage_errors.emplace_back(r, err);
      met = err <= target.rel_error;
    } else {
      total.stage_errors.emplace_back(r, std::numeric_limits<double>::quiet_NaN());
      met = rep.converged;
    }
    total.stop = rep.stop;
    total.solution = rep.solution;
    total.a_eff = rep.a_eff;
    total.param_count = rep.param_count;
    prev = std::move(rep.solution);
    if (met) {
      total.converged = true;
      total.achieved_rank = r;
      break;
    }
  }
  total.wall_s = seconds_since(t0);
  return total;
}

#define FFTLR_INSTANTIATE(T)                                                                                    \
  template SolveReport<T> richardson<T>(const OperatorContext<T>&, const T&, const SolverConfig&,               \
                                        std::optional<double>);                                                 \
  template SolveReport<T> minres_truncated<T>(const OperatorContext<T>&, const T&, const SolverConfig&,         \
                                              const T*);                                                        \
  template SolveReport<T> rank_continuation<T>(const OperatorContext<T>&, const SolverConfig&,                  \
                                               const ContinuationTarget&);

FFTLR_INSTANTIATE(FullTensor)
FFTLR_INSTANTIATE(CpTensor)
FFTLR_INSTANTIATE(TuckerTensor)
FFTLR_INSTANTIATE(TtTensor)

}  // namespace fftlr
