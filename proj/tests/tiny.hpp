#ifndef CREW_TESTS_TINY_HPP_
#define CREW_TESTS_TINY_HPP_

// Small hand-sized instances and an exhaustive schedule enumerator used as an
// oracle for the IP builders and the environment.

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "crew/domain.hpp"

namespace crew::testing {

struct FlightSpec {
  int start = 0;
  int end = 0;
  std::vector<QualTag> quals{0, 0};
};

inline ScheduleInstance make_instance(const std::vector<std::vector<QualTag>>& pilot_quals,
                                      const std::vector<FlightSpec>& flights, int horizon,
                                      const std::vector<std::vector<DayInterval>>& leave = {}) {
  ScheduleInstance inst;
  for (int i = 0; i < static_cast<int>(pilot_quals.size()); ++i) {
    Pilot p{i, pilot_quals[i], {}};
    if (i < static_cast<int>(leave.size())) p.leave = leave[i];
    inst.pilots.push_back(p);
  }
  for (int f = 0; f < static_cast<int>(flights.size()); ++f) {
    Flight fl;
    fl.id = f;
    fl.start_day = flights[f].start;
    fl.end_day = flights[f].end;
    fl.kind = fl.start_day == fl.end_day ? FlightKind::kSimulator : FlightKind::kMission;
    std::vector<QualTag> quals = flights[f].quals;
    std::sort(quals.begin(), quals.end());
    for (QualTag q : quals) {
      const int s = inst.num_slots();
      inst.slots.push_back({s, f, q});
      fl.slots.push_back(s);
    }
    inst.flights.push_back(fl);
  }
  inst.horizon_days = horizon;
  inst.training_matrix.assign(pilot_quals.size(), std::vector<int>(flights.size(), 0));
  inst.trq_flags.assign(flights.size(), {false, false});
  return inst;
}

// 3-4 pilots over two qualification tags, 3-4 flights of 2 slots in a
// 6-day window; some pilots get a leave day.
inline ScheduleInstance random_tiny_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> np(3, 4), nf(3, 4), day(0, 5), len(0, 2), coin(0, 3);
  std::vector<std::vector<QualTag>> quals;
  std::vector<std::vector<DayInterval>> leave;
  const int pilots = np(rng);
  for (int i = 0; i < pilots; ++i) {
    const int c = coin(rng);
    quals.push_back(c == 0 ? std::vector<QualTag>{0} : c == 1 ? std::vector<QualTag>{1}
                                                            : std::vector<QualTag>{0, 1});
    if (coin(rng) == 0) {
      const int d = day(rng);
      leave.push_back({{d, d}});
    } else {
      leave.emplace_back();
    }
  }
  std::vector<FlightSpec> flights;
  const int n = nf(rng);
  for (int f = 0; f < n; ++f) {
    const int s = day(rng);
    flights.push_back({s, s + len(rng), {coin(rng) == 0 ? 1 : 0, 0}});
  }
  return make_instance(quals, flights, 9, leave);
}

// Calls visit for every complete schedule with zero validator violations.
inline void for_each_valid_schedule(const ScheduleInstance& inst,
                                    const std::function<void(const Schedule&)>& visit) {
  Schedule sched;
  sched.complete = true;
  std::function<void(int)> rec = [&](int s) {
    if (s == inst.num_slots()) {
      if (validate_schedule(inst, sched).empty()) visit(sched);
      return;
    }
    for (int p = 0; p < inst.num_pilots(); ++p) {
      if (!inst.eligible(p, s)) continue;
      sched.assignment[s] = p;
      rec(s + 1);
    }
    sched.assignment.erase(s);
  };
  rec(0);
}

// Flights each pilot flies, sorted by start day.
inline std::vector<std::vector<int>> flights_by_pilot(const ScheduleInstance& inst,
                                                      const Schedule& sched) {
  std::vector<std::vector<int>> out(inst.pilots.size());
  for (const auto& [slot, pilot] : sched.assignment) out[pilot].push_back(inst.slots[slot].flight_id);
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::sort(v.begin(), v.end(), [&](int a, int b) {
      return inst.flights[a].start_day < inst.flights[b].start_day;
    });
  }
  return out;
}

}  // namespace crew::testing

#endif  // CREW_TESTS_TINY_HPP_
