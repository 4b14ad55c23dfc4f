#include "fftlr/tensor/policy.hpp"

#include <cmath>

namespace fftlr {

namespace {
constexpr double kRoundoffFloor = 1e-14;
}

void TruncationPolicy::validate() const {
  if (mode == Mode::fixed_rank) {
    require(!ranks.empty(), "truncation policy: empty rank vector");
    for (auto r : ranks) require(r >= 1, "truncation policy: requested rank < 1");
  } else {
    require(tau >= 0.0 && std::isfinite(tau), "truncation policy: tolerance must be >= 0");
  }
  if (drop_small_norm_threshold)
    require(*drop_small_norm_threshold >= 0.0 && *drop_small_norm_threshold < 1.0,
            "truncation policy: drop threshold must lie in [0, 1)");
}

la::RankRule TruncationPolicy::rule_for(std::size_t j, std::size_t parts) const {
  if (mode == Mode::fixed_rank) {
    const std::size_t r = ranks.size() == 1 ? ranks[0] : ranks.at(j);
    return la::FixedRank{r};
  }
  const double share = parts > 1 ? tau / std::sqrt(static_cast<double>(parts)) : tau;
  return la::Tolerance{share};
}

std::size_t select_rank(std::span<const double> sv, const TruncationPolicy& policy, std::size_t j,
                        std::size_t parts) {
  if (sv.empty()) return 0;
  std::size_t keep = la::truncation_index(sv, policy.rule_for(j, parts));
  const double floor = kRoundoffFloor * sv[0];
  while (keep > 1 && sv[keep - 1] <= floor) --keep;
  return std::max<std::size_t>(keep, 1);
}

}  // namespace fftlr
