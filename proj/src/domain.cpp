#include "crew/domain.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace crew {

bool Pilot::holds(QualTag tag) const {
  return std::binary_search(qualifications.begin(), qualifications.end(), tag);
}

bool Pilot::on_leave_during(const DayInterval& span) const {
  return std::any_of(leave.begin(), leave.end(),
                     [&](const DayInterval& l) { return l.overlaps(span); });
}

bool ScheduleInstance::eligible(int pilot_id, int slot_id) const {
  const Pilot& p = pilots[pilot_id];
  const Slot& s = slots[slot_id];
  return p.holds(s.required_qualification) &&
         !p.on_leave_during(flights[s.flight_id].span());
}

bool ScheduleInstance::eligible_for_flight(int pilot_id, int flight_id) const {
  for (int s : flights[flight_id].slots) {
    if (eligible(pilot_id, s)) return true;
  }
  return false;
}

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("invalid instance: " + what);
}

}  // namespace

void check_instance(const ScheduleInstance& inst, SlotCountLimits limits) {
  if (inst.horizon_days < 1) fail("horizon_days < 1");
  if (inst.num_flight_types < 1) fail("num_flight_types < 1");
  for (int i = 0; i < inst.num_pilots(); ++i) {
    const Pilot& p = inst.pilots[i];
    if (p.id != i) fail("pilot id " + std::to_string(p.id) + " at index " +
                        std::to_string(i));
    if (!std::is_sorted(p.qualifications.begin(), p.qualifications.end()) ||
        std::adjacent_find(p.qualifications.begin(), p.qualifications.end()) !=
            p.qualifications.end()) {
      fail("pilot " + std::to_string(i) + " qualifications not a sorted set");
    }
    for (const DayInterval& l : p.leave) {
      if (l.start > l.end) fail("pilot " + std::to_string(i) + " leave start > end");
    }
  }
  std::vector<int> owner(inst.slots.size(), -1);
  for (int f = 0; f < inst.num_flights(); ++f) {
    const Flight& fl = inst.flights[f];
    const std::string tag = "flight " + std::to_string(f);
    if (fl.id != f) fail(tag + " id mismatch");
    if (fl.start_day > fl.end_day) fail(tag + " start_day > end_day");
    if (fl.kind == FlightKind::kSimulator && fl.start_day != fl.end_day) {
      fail(tag + " simulator spans more than one day");
    }
    if (fl.start_day < 0 || fl.end_day >= inst.horizon_days) {
      fail(tag + " outside horizon");
    }
    if (fl.flight_type < 0 || fl.flight_type >= inst.num_flight_types) {
      fail(tag + " flight_type out of range");
    }
    const int n = static_cast<int>(fl.slots.size());
    if (n < limits.min_slots || n > limits.max_slots) {
      fail(tag + " has " + std::to_string(n) + " slots");
    }
    for (int s : fl.slots) {
      if (s < 0 || s >= inst.num_slots()) fail(tag + " references unknown slot");
      if (owner[s] != -1) fail("slot " + std::to_string(s) + " listed twice");
      owner[s] = f;
    }
  }
  for (int s = 0; s < inst.num_slots(); ++s) {
    const Slot& sl = inst.slots[s];
    if (sl.id != s) fail("slot id mismatch at " + std::to_string(s));
    if (owner[s] == -1 || owner[s] != sl.flight_id) {
      fail("slot " + std::to_string(s) + " flight_id inconsistent");
    }
  }
  if (!inst.training_matrix.empty()) {
    if (static_cast<int>(inst.training_matrix.size()) != inst.num_pilots()) {
      fail("training_matrix row count");
    }
    for (const auto& row : inst.training_matrix) {
      if (static_cast<int>(row.size()) != inst.num_flights()) {
        fail("training_matrix column count");
      }
      for (int v : row) {
        if (v < 0) fail("negative training count");
      }
    }
  }
  if (!inst.trq_flags.empty() &&
      static_cast<int>(inst.trq_flags.size()) != inst.num_flights()) {
    fail("trq_flags size");
  }
}

bool flights_conflict(const Flight& f, const Flight& g) {
  if (f.id == g.id) return false;
  return f.span().overlaps(g.span());
}

int buffer_days(int earlier_end, int later_start) {
  if (later_start <= earlier_end) {
    throw std::invalid_argument("buffer_days: later_start must follow earlier_end");
  }
  return later_start - earlier_end - 1;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kLeave: return "leave";
    case ViolationKind::kQualification: return "qualification";
    case ViolationKind::kSameFlightDuplicate: return "same-flight-duplicate";
    case ViolationKind::kSlotCoverage: return "slot-coverage";
    case ViolationKind::kFlightConflict: return "flight-conflict";
    case ViolationKind::kUnknownId: return "unknown-id";
  }
  return "unknown";
}

std::vector<Violation> validate_schedule(const ScheduleInstance& inst,
                                         const Schedule& sched) {
  std::vector<Violation> out;
  // pilot -> flights flown (ordered, unique)
  std::map<int, std::set<int>> flown;
  std::map<std::pair<int, int>, int> seats;  // (pilot, flight) -> count

  for (const auto& [slot, pilot] : sched.assignment) {
    if (slot < 0 || slot >= inst.num_slots() || pilot < 0 ||
        pilot >= inst.num_pilots()) {
      out.push_back({ViolationKind::kUnknownId, pilot, slot, -1, -1,
                     "slot or pilot id not in instance"});
      continue;
    }
    const Slot& s = inst.slots[slot];
    const Flight& f = inst.flights[s.flight_id];
    const Pilot& p = inst.pilots[pilot];
    if (!p.holds(s.required_qualification)) {
      out.push_back({ViolationKind::kQualification, pilot, slot, f.id, -1,
                     "pilot lacks qualification " +
                         std::to_string(s.required_qualification)});
    }
    if (p.on_leave_during(f.span())) {
      out.push_back({ViolationKind::kLeave, pilot, slot, f.id, -1,
                     "flight overlaps pilot leave"});
    }
    if (++seats[{pilot, f.id}] == 2) {
      out.push_back({ViolationKind::kSameFlightDuplicate, pilot, slot, f.id, -1,
                     "pilot holds two slots on one flight"});
    }
    flown[pilot].insert(f.id);
  }

  if (sched.complete) {
    for (int s = 0; s < inst.num_slots(); ++s) {
      if (!sched.assignment.contains(s)) {
        out.push_back({ViolationKind::kSlotCoverage, -1, s,
                       inst.slots[s].flight_id, -1,
                       "slot unassigned in a complete schedule"});
      }
    }
  }

  for (const auto& [pilot, fset] : flown) {
    const std::vector<int> fl(fset.begin(), fset.end());
    for (size_t a = 0; a < fl.size(); ++a) {
      for (size_t b = a + 1; b < fl.size(); ++b) {
        if (flights_conflict(inst.flights[fl[a]], inst.flights[fl[b]])) {
          out.push_back({ViolationKind::kFlightConflict, pilot, -1, fl[a], fl[b],
                         "pilot on overlapping flights"});
        }
      }
    }
  }
  return out;
}

std::vector<int> slot_order(const ScheduleInstance& inst) {
  std::vector<int> order(inst.slots.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Slot& sa = inst.slots[a];
    const Slot& sb = inst.slots[b];
    const Flight& fa = inst.flights[sa.flight_id];
    const Flight& fb = inst.flights[sb.flight_id];
    if (fa.start_day != fb.start_day) return fa.start_day < fb.start_day;
    if (fa.id != fb.id) return fa.id < fb.id;
    if (sa.required_qualification != sb.required_qualification) {
      return sa.required_qualification < sb.required_qualification;
    }
    return sa.id < sb.id;
  });
  return order;
}

}  // namespace crew
