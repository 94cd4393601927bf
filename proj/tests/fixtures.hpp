#ifndef CREW_TESTS_FIXTURES_HPP_
#define CREW_TESTS_FIXTURES_HPP_

#include <cmath>
#include <vector>

#include "crew/policy.hpp"

namespace crew::testing {

// A network whose output ignores the observation: the actor head has zero
// weights and fixed biases, so logits are log(probs).
inline PolicyWeights constant_policy(const std::vector<double>& probs, int num_types = 1) {
  PolicyWeights w = init_policy(static_cast<int>(probs.size()), num_types, 4, 0);
  w.actor.w.setZero();
  for (size_t i = 0; i < probs.size(); ++i) w.actor.b[i] = std::log(probs[i]);
  return w;
}

// Relabels flights in reverse order, which reverses slot_order. slot_map[s]
// is the new id of old slot s.
inline ScheduleInstance reverse_flights(const ScheduleInstance& inst, std::vector<int>& slot_map) {
  ScheduleInstance out = inst;
  const int F = inst.num_flights();
  out.flights.clear();
  out.slots.clear();
  slot_map.assign(inst.num_slots(), -1);
  for (int k = 0; k < F; ++k) {
    Flight f = inst.flights[F - 1 - k];
    f.id = k;
    std::vector<int> slots;
    for (int s : f.slots) {
      const int id = static_cast<int>(out.slots.size());
      out.slots.push_back({id, k, inst.slots[s].required_qualification});
      slot_map[s] = id;
      slots.push_back(id);
    }
    f.slots = slots;
    out.flights.push_back(f);
  }
  for (int i = 0; i < inst.num_pilots(); ++i) {
    for (int k = 0; k < F; ++k) out.training_matrix[i][k] = inst.training_matrix[i][F - 1 - k];
  }
  for (int k = 0; k < F; ++k) out.trq_flags[k] = inst.trq_flags[F - 1 - k];
  return out;
}

}  // namespace crew::testing

#endif  // CREW_TESTS_FIXTURES_HPP_
