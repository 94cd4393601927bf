#include "crew/coefficients.hpp"

#include <stdexcept>
#include <vector>

namespace crew {

double CoefficientMatrix::at(int pilot, int slot) const {
  auto it = values.find({pilot, slot});
  if (it == values.end()) {
    throw std::out_of_range("no coefficient for pilot " + std::to_string(pilot) + " slot " +
                            std::to_string(slot));
  }
  return it->second;
}

void check_coefficients(const ScheduleInstance& inst, const CoefficientMatrix& m) {
  std::vector<double> slot_sum(inst.slots.size(), 0.0);
  for (const auto& [key, v] : m.values) {
    const auto [pilot, slot] = key;
    if (pilot < 0 || pilot >= inst.num_pilots() || slot < 0 || slot >= inst.num_slots()) {
      throw std::invalid_argument("coefficient for unknown pilot or slot");
    }
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("coefficient outside [0,1] for pilot " +
                                  std::to_string(pilot) + " slot " + std::to_string(slot));
    }
    slot_sum[slot] += v;
  }
  for (int s = 0; s < inst.num_slots(); ++s) {
    if (slot_sum[s] > 1.0 + 1e-9) {
      throw std::invalid_argument("coefficients for slot " + std::to_string(s) + " sum past 1");
    }
    for (int p = 0; p < inst.num_pilots(); ++p) {
      if (inst.eligible(p, s) && !m.values.count({p, s})) {
        throw std::invalid_argument("missing coefficient for eligible pilot " +
                                    std::to_string(p) + " slot " + std::to_string(s));
      }
    }
  }
}

}  // namespace crew
