#ifndef CREW_ENV_HPP_
#define CREW_ENV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "crew/domain.hpp"

namespace crew {

enum class RewardVariant { kBuffer, kMoveup };

std::string to_string(RewardVariant v);
RewardVariant reward_variant_from_string(const std::string& s);

struct RewardConfig {
  RewardVariant variant = RewardVariant::kBuffer;
  int horizon = 7;  // T
  double complete_bonus = 25.0;
  double incomplete_penalty = -10.0;
  int t_move = 2;
  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

void check_reward_config(const RewardConfig& cfg);

// 3P + types + 5 features:
// [availability P][type one-hot][trq 2][assigned to event P]
// [duration, start, end][training fulfillments P]
// Day-valued fields are divided by the horizon T.
int observation_size(int num_pilots, int num_flight_types);

struct Observation {
  std::vector<double> features;
  std::vector<std::uint8_t> mask;  // availability, one per pilot
  int slot = -1;

  bool any_available() const;
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

// Discrete-event scheduler: slots are visited in a fixed order and each step
// assigns one available pilot to the current slot.
class SchedulingEnv {
 public:
  SchedulingEnv(const ScheduleInstance& inst, RewardConfig cfg);
  // order must be a permutation of the slot ids.
  SchedulingEnv(const ScheduleInstance& inst, RewardConfig cfg, std::vector<int> order);

  const Observation& reset();
  // Throws std::logic_error when the pilot is masked or the episode is over.
  StepResult step(int pilot);

  const Observation& observation() const { return obs_; }
  bool done() const { return done_; }
  bool complete() const { return schedule_.complete; }
  const Schedule& schedule() const { return schedule_; }
  int cursor() const { return cursor_; }
  const std::vector<int>& order() const { return order_; }
  double episode_return() const { return return_; }
  const ScheduleInstance& instance() const { return inst_; }

  // True when appending (pilot, slot) keeps the partial schedule valid.
  bool available(int pilot, int slot) const;
  // Reward components of assigning pilot to slot now, before terminal terms.
  double placement_reward(int pilot, int slot) const;

 private:
  void observe();
  int buffer_reward(int pilot, const Flight& f) const;
  int moveup_count(int pilot, const Flight& g) const;

  const ScheduleInstance& inst_;
  RewardConfig cfg_;
  std::vector<int> order_;
  int cursor_ = 0;
  bool done_ = false;
  double return_ = 0.0;
  Schedule schedule_;
  std::vector<std::vector<int>> pilot_flights_;   // flights each pilot flies
  std::vector<std::vector<int>> flight_pilots_;   // pilots on each flight
  Observation obs_;
};

}  // namespace crew

#endif  // CREW_ENV_HPP_
