#pragma once

#include <optional>
#include <span>

#include "fftlr/la/dense.hpp"

namespace fftlr {

struct TruncationPolicy {
  enum class Mode { fixed_rank, tolerance };

  Mode mode = Mode::fixed_rank;
  // One entry applies to every mode/bond; otherwise one entry per mode/bond.
  RankVector ranks{1};
  double tau = 0.0;
  // Rank-1 terms (basis vectors for Tucker) whose weight is below this
  // fraction of the largest weight are removed before orthogonalisation.
  std::optional<double> drop_small_norm_threshold;

  static TruncationPolicy fixed(std::size_t rank) {
    TruncationPolicy p;
    p.ranks = {rank};
    return p;
  }
  static TruncationPolicy fixed(RankVector ranks) {
    TruncationPolicy p;
    p.ranks = std::move(ranks);
    return p;
  }
  static TruncationPolicy tolerance(double tau) {
    TruncationPolicy p;
    p.mode = Mode::tolerance;
    p.tau = tau;
    return p;
  }

  void validate() const;

  /// Rule for mode/bond `j` when the total budget is split over `parts` SVDs.
  la::RankRule rule_for(std::size_t j, std::size_t parts) const;
};

/// Ranks kept at one SVD step. Applies the policy rule, then drops trailing
/// values at round-off level (<= 1e-14 * sigma_max) and keeps at least one.
std::size_t select_rank(std::span<const double> singular_values, const TruncationPolicy& policy,
                        std::size_t j, std::size_t parts);

}  // namespace fftlr
