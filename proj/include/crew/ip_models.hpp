#ifndef CREW_IP_MODELS_HPP_
#define CREW_IP_MODELS_HPP_

#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "crew/coefficients.hpp"
#include "crew/domain.hpp"
#include "crew/milp.hpp"

namespace crew {

// Where each IP variable came from.
struct VariableCatalog {
  std::map<std::pair<int, int>, int> pilot_slot;                // (i, s) -> X
  std::map<std::pair<int, int>, int> pilot_flight;              // (i, f) -> Y
  std::map<std::tuple<int, int, int>, int> buffer_vars;         // (i, f, f') -> B
  std::map<std::tuple<int, int, int, int>, int> moveup_vars;    // (j, g, f, s) -> M
  int num_slots = 0;
};

// Some slot has no eligible pilot, so no model can cover it.
class StructurallyInfeasible : public std::runtime_error {
 public:
  StructurallyInfeasible(int slot, const std::string& what)
      : std::runtime_error(what), slot_(slot) {}
  int slot() const { return slot_; }

 private:
  int slot_;
};

struct BuiltModel {
  IpInstance ip;
  VariableCatalog catalog;
};

// -(t + 1 - b) / (t + 1); throws std::invalid_argument unless 0 <= b <= t.
double penalty(int b, int t_buffer);

// Maximize covered slots subject to coverage, one-slot-per-flight and
// conflict rows. Only eligible (pilot, slot) pairs get a variable.
BuiltModel build_baseline_ip(const ScheduleInstance& inst);

struct RobustOptions {
  // Coverage rows become <= 1 and the objective gains a coverage term
  // weighted to dominate the robustness term.
  bool soft_coverage = false;
};

BuiltModel build_buffer_ip(const ScheduleInstance& inst, int t_buffer,
                           RobustOptions options = {});
BuiltModel build_moveup_ip(const ScheduleInstance& inst, int t_move,
                           RobustOptions options = {});

// Baseline rows with objective sum a_is X_is. Throws std::invalid_argument if
// an eligible pair has no coefficient.
BuiltModel build_nice_ip(const ScheduleInstance& inst, const CoefficientMatrix& coeffs);

// Baseline rows on the delayed instance, flights starting before decision_day
// frozen to their original pilots, objective = pairs kept from original.
BuiltModel build_repair_ip(const ScheduleInstance& delayed, const Schedule& original,
                           int decision_day = 1);

// Assignment from every X_is = 1. Throws std::logic_error when a slot is
// covered twice.
Schedule decode(const VariableCatalog& catalog, const SolveResult& result);

// Static move-up screen for pilot j on flight g standing in for slot s of f:
// everything except the dependence on the rest of j's schedule.
bool moveup_candidate(const ScheduleInstance& inst, int pilot, int g, int slot, int t_move);

}  // namespace crew

#endif  // CREW_IP_MODELS_HPP_
