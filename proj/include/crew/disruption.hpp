#ifndef CREW_DISRUPTION_HPP_
#define CREW_DISRUPTION_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crew/domain.hpp"

namespace crew {

struct DelayScenario {
  int decision_day = 1;
  double fraction_delayed = 0.5;
  int min_delay = 1;
  int max_delay = 3;
  std::uint64_t seed = 0;
};

void check_scenario(const DelayScenario& scn);

// Delays round-half-up(f * k) of the k flights with start_day >= decision_day,
// each by an independent uniform number of days in [min_delay, max_delay].
// The horizon grows if a delayed flight runs past it.
ScheduleInstance apply_delays(const ScheduleInstance& inst, const DelayScenario& scn);

// Slots whose pilot differs. Throws std::invalid_argument unless both are
// complete over the same slots.
int count_disruptions(const Schedule& original, const Schedule& repaired);

struct RepairOutcome {
  std::optional<Schedule> repaired;  // empty when no repair was found
  bool timed_out = false;
  int disruptions = 0;
};

// Minimum-change repair of a complete schedule on the delayed instance.
RepairOutcome repair_schedule(const ScheduleInstance& delayed, const Schedule& original,
                              int decision_day, std::chrono::duration<double> time_limit);

// Two-tailed p-values. Both throw DegenerateSample when the statistic is
// undefined (zero variance).
class DegenerateSample : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double paired_t_test(const std::vector<double>& a, const std::vector<double>& b);
double welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace crew

#endif  // CREW_DISRUPTION_HPP_
