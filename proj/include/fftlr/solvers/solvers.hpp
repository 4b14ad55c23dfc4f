#pragma once

#include <optional>

#include "fftlr/hom/homogenization.hpp"

namespace fftlr {

enum class Method { pcg, richardson, minres };
std::string_view method_name(Method m);
Method parse_method(std::string_view s);

enum class StopReason { tolerance, stagnation, max_iter };
std::string_view stop_reason_name(StopReason r);

struct SolverConfig {
  Method method = Method::pcg;
  std::size_t max_iter = 500;
  double residual_tol = 1e-6;
  std::size_t stagnation_window = 1;
  TruncationPolicy policy = TruncationPolicy::fixed(5);
  // Rank continuation: strictly increasing ranks.
  std::vector<std::size_t> rank_schedule;
  // Richardson on compressed tensors is known to diverge under heavy
  // truncation; it has to be requested explicitly.
  bool allow_lowrank_richardson = false;

  void validate() const;
};

struct IterationRecord {
  std::size_t index = 0;
  double residual_norm = 0.0;  // Euclidean norm of d - C u
  double omega = 0.0;
  RankVector ranks;
  double elapsed_s = 0.0;
  double truncation_bound = 0.0;  // ||u + omega r - T(u + omega r)||, minres only
};

template <class T> struct SolveReport {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  StopReason stop = StopReason::max_iter;
  T solution;
  double a_eff = 0.0;
  std::size_t param_count = 0;
  std::size_t matvecs = 0;
  double wall_s = 0.0;
  // Rank continuation only.
  std::optional<std::size_t> achieved_rank;
  std::vector<std::pair<std::size_t, double>> stage_errors;  // (rank, relative error)
  bool norm_shortcut_fallback = false;  // Tucker norms without orthonormal flags
};

/// Conjugate gradients in the P-weighted inner product (full tensors).
SolveReport<FullTensor> pcg_full(const OperatorContext<FullTensor>& ctx, const FullTensor& rhs,
                                 const SolverConfig& cfg);

/// u <- T(u + omega (d - C u)) with omega from the spectrum bounds.
template <class T>
SolveReport<T> richardson(const OperatorContext<T>& ctx, const T& rhs, const SolverConfig& cfg,
                          std::optional<double> omega = std::nullopt);

/// Minimal-residual iteration with a truncation after every update.
template <class T>
SolveReport<T> minres_truncated(const OperatorContext<T>& ctx, const T& rhs, const SolverConfig& cfg,
                                const T* initial = nullptr);

struct ContinuationTarget {
  // Stop at the first rank with (A_r - a_ref) / a_ref <= rel_error; when
  // a_ref is absent the residual tolerance decides.
  std::optional<double> a_ref;
  double rel_error = 0.0;
};

/// Runs minres_truncated over cfg.rank_schedule, warm-starting each stage
/// from the previous solution. The right-hand side is rebuilt per stage at
/// the stage rank.
template <class T>
SolveReport<T> rank_continuation(const OperatorContext<T>& ctx, const SolverConfig& cfg,
                                 const ContinuationTarget& target);

/// (A_r - A_ref) / A_ref; non-negative for Ga solutions.
double relative_error(double a_r, double a_ref);

}  // namespace fftlr
