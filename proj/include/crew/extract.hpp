#ifndef CREW_EXTRACT_HPP_
#define CREW_EXTRACT_HPP_

#include <cstdint>

#include "crew/coefficients.hpp"
#include "crew/policy.hpp"

namespace crew {

// Mean over n rollouts with shuffled slot orders of the probability vector
// seen when each slot is scheduled; a rollout that dead-ends before a slot
// contributes 0 for it. Rollout r uses derive_seed(seed, "rollout", r).
CoefficientMatrix extract_montecarlo(const PolicyWeights& w, const ScheduleInstance& inst, int n,
                                     std::uint64_t seed, RolloutMode mode = RolloutMode::kSample);

// Probabilities for each slot read from an empty schedule with that slot
// first in line.
CoefficientMatrix extract_blank_slate(const PolicyWeights& w, const ScheduleInstance& inst);

// n = 0 selects the blank slate.
CoefficientMatrix extract_coefficients(const PolicyWeights& w, const ScheduleInstance& inst, int n,
                                       std::uint64_t seed);

}  // namespace crew

#endif  // CREW_EXTRACT_HPP_
