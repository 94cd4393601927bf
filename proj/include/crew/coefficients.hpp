#ifndef CREW_COEFFICIENTS_HPP_
#define CREW_COEFFICIENTS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "crew/domain.hpp"

namespace crew {

// Per (pilot, slot) objective weights a_is read off a policy network.
struct CoefficientMatrix {
  std::map<std::pair<int, int>, double> values;  // (pilot, slot) -> [0, 1]
  std::string method;                            // "montecarlo" or "blank_slate"
  int n = 0;                                     // rollouts; 0 for blank slate
  std::uint64_t source_hash = 0;                 // hash of the weights used

  double at(int pilot, int slot) const;  // throws std::out_of_range
  friend bool operator==(const CoefficientMatrix&, const CoefficientMatrix&) = default;
};

// Throws std::invalid_argument if a value leaves [0,1], a slot's values sum
// past 1 + 1e-9, or an eligible pair of inst is missing.
void check_coefficients(const ScheduleInstance& inst, const CoefficientMatrix& m);

}  // namespace crew

#endif  // CREW_COEFFICIENTS_HPP_
