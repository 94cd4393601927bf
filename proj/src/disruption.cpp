#include "crew/disruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "crew/ip_models.hpp"
#include "crew/milp.hpp"

namespace crew {

void check_scenario(const DelayScenario& scn) {
  if (!(scn.fraction_delayed > 0.0 && scn.fraction_delayed <= 1.0)) {
    throw std::invalid_argument("fraction_delayed must be in (0, 1]");
  }
  if (scn.min_delay < 1 || scn.max_delay < scn.min_delay) {
    throw std::invalid_argument("delay range must be positive and ordered");
  }
}

ScheduleInstance apply_delays(const ScheduleInstance& inst, const DelayScenario& scn) {
  check_scenario(scn);
  ScheduleInstance out = inst;
  std::vector<int> pending;
  for (const Flight& f : inst.flights) {
    if (f.start_day >= scn.decision_day) pending.push_back(f.id);
  }
  const int count =
      static_cast<int>(std::floor(scn.fraction_delayed * static_cast<double>(pending.size()) + 0.5));
  std::mt19937_64 rng(scn.seed);
  std::shuffle(pending.begin(), pending.end(), rng);
  pending.resize(count);
  std::sort(pending.begin(), pending.end());
  std::uniform_int_distribution<int> delay(scn.min_delay, scn.max_delay);
  for (int id : pending) {
    Flight& f = out.flights[id];
    const int d = delay(rng);
    f.start_day += d;
    f.end_day += d;
    out.horizon_days = std::max(out.horizon_days, f.end_day + 1);
  }
  return out;
}

int count_disruptions(const Schedule& original, const Schedule& repaired) {
  if (!original.complete || !repaired.complete) {
    throw std::invalid_argument("disruptions are counted between complete schedules");
  }
  if (original.assignment.size() != repaired.assignment.size()) {
    throw std::invalid_argument("schedules cover different slots");
  }
  int changed = 0;
  for (const auto& [slot, pilot] : original.assignment) {
    auto it = repaired.assignment.find(slot);
    if (it == repaired.assignment.end()) throw std::invalid_argument("schedules cover different slots");
    if (it->second != pilot) ++changed;
  }
  return changed;
}

RepairOutcome repair_schedule(const ScheduleInstance& delayed, const Schedule& original,
                              int decision_day, std::chrono::duration<double> time_limit) {
  RepairOutcome out;
  BuiltModel m;
  try {
    m = build_repair_ip(delayed, original, decision_day);
  } catch (const StructurallyInfeasible&) {
    return out;
  }
  const SolveResult r = solve(m.ip, time_limit);
  out.timed_out = r.status == SolveStatus::kFeasibleIncumbent ||
                  r.status == SolveStatus::kTimeoutNoIncumbent;
  if (r.status != SolveStatus::kOptimal) return out;
  Schedule s = decode(m.catalog, r);
  if (!s.complete) return out;
  out.disruptions = count_disruptions(original, s);
  out.repaired = std::move(s);
  return out;
}

}  // namespace crew
