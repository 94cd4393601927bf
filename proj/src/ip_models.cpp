#include "crew/ip_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace crew {
namespace {

std::string xname(int i, int s) { return "X_p" + std::to_string(i) + "_s" + std::to_string(s); }
std::string yname(int i, int f) { return "Y_p" + std::to_string(i) + "_f" + std::to_string(f); }

// eligible_slots[i][f]: slots of f that pilot i may fill.
using EligibleSlots = std::vector<std::vector<std::vector<int>>>;

EligibleSlots eligible_slots(const ScheduleInstance& inst) {
  EligibleSlots out(inst.pilots.size(), std::vector<std::vector<int>>(inst.flights.size()));
  for (int i = 0; i < inst.num_pilots(); ++i) {
    for (const Flight& f : inst.flights) {
      for (int s : f.slots) {
        if (inst.eligible(i, s)) out[i][f.id].push_back(s);
      }
    }
  }
  return out;
}

// X variables plus the one-slot-per-flight, coverage and conflict rows.
EligibleSlots add_assignment_core(const ScheduleInstance& inst, bool soft_coverage,
                                  BuiltModel& m) {
  check_instance(inst);
  IpInstance& ip = m.ip;
  VariableCatalog& cat = m.catalog;
  cat.num_slots = inst.num_slots();
  ip.sense = Sense::kMaximize;
  const EligibleSlots el = eligible_slots(inst);

  std::vector<std::vector<Term>> cover(inst.slots.size());
  for (int i = 0; i < inst.num_pilots(); ++i) {
    for (int f = 0; f < inst.num_flights(); ++f) {
      for (int s : el[i][f]) {
        const int v = ip.add_var(xname(i, s));
        cat.pilot_slot[{i, s}] = v;
        cover[s].push_back({v, 1.0});
      }
    }
  }

  for (int i = 0; i < inst.num_pilots(); ++i) {
    for (int f = 0; f < inst.num_flights(); ++f) {
      if (el[i][f].size() < 2) continue;
      std::vector<Term> row;
      for (int s : el[i][f]) row.push_back({cat.pilot_slot.at({i, s}), 1.0});
      ip.add_constraint(std::move(row), Relation::kLessEqual, 1.0,
                        "one_p" + std::to_string(i) + "_f" + std::to_string(f));
    }
  }

  for (int s = 0; s < inst.num_slots(); ++s) {
    if (cover[s].empty()) {
      if (soft_coverage) continue;
      throw StructurallyInfeasible(s, "slot " + std::to_string(s) + " has no eligible pilot");
    }
    ip.add_constraint(std::move(cover[s]), soft_coverage ? Relation::kLessEqual : Relation::kEqual,
                      1.0, "cover_s" + std::to_string(s));
  }

  std::vector<int> by_start(inst.flights.size());
  for (int f = 0; f < inst.num_flights(); ++f) by_start[f] = f;
  std::sort(by_start.begin(), by_start.end(), [&](int a, int b) {
    const Flight& fa = inst.flights[a];
    const Flight& fb = inst.flights[b];
    return std::tie(fa.start_day, fa.id) < std::tie(fb.start_day, fb.id);
  });
  for (int i = 0; i < inst.num_pilots(); ++i) {
    for (size_t a = 0; a < by_start.size(); ++a) {
      const Flight& f = inst.flights[by_start[a]];
      if (el[i][f.id].empty()) continue;
      for (size_t b = a + 1; b < by_start.size(); ++b) {
        const Flight& g = inst.flights[by_start[b]];
        if (g.start_day > f.end_day) break;
        if (el[i][g.id].empty() || !flights_conflict(f, g)) continue;
        std::vector<Term> row;
        for (int s : el[i][f.id]) row.push_back({cat.pilot_slot.at({i, s}), 1.0});
        for (int s : el[i][g.id]) row.push_back({cat.pilot_slot.at({i, s}), 1.0});
        const int lo = std::min(f.id, g.id);
        const int hi = std::max(f.id, g.id);
        ip.add_constraint(std::move(row), Relation::kLessEqual, 1.0,
                          "conf_p" + std::to_string(i) + "_f" + std::to_string(lo) + "_f" +
                              std::to_string(hi));
      }
    }
  }

  // Valid day cliques: a pilot flies at most one flight per day. Pairwise
  // rows give a weak relaxation once three or more flights share a day, and
  // the solver then cannot prove infeasibility of overbooked weeks. Only
  // maximal sets are emitted (not contained in the previous or next day's).
  for (int i = 0; i < inst.num_pilots(); ++i) {
    std::vector<std::vector<int>> on(inst.horizon_days);
    for (const Flight& f : inst.flights) {
      if (el[i][f.id].empty()) continue;
      for (int day = f.start_day; day <= f.end_day && day < inst.horizon_days; ++day) on[day].push_back(f.id);
    }
    for (int day = 0; day < inst.horizon_days; ++day) {
      std::sort(on[day].begin(), on[day].end());
      if (on[day].size() < 3) continue;
      auto within = [&](int other) {
        if (other < 0 || other >= inst.horizon_days || on[other].size() < on[day].size()) return false;
        std::vector<int> o = on[other];
        std::sort(o.begin(), o.end());
        return std::includes(o.begin(), o.end(), on[day].begin(), on[day].end()) &&
               (o.size() > on[day].size() || other < day);
      };
      if (within(day - 1) || within(day + 1)) continue;
      std::vector<Term> row;
      for (int f : on[day]) {
        for (int s : el[i][f]) row.push_back({cat.pilot_slot.at({i, s}), 1.0});
      }
      ip.add_constraint(std::move(row), Relation::kLessEqual, 1.0,
                        "day_p" + std::to_string(i) + "_d" + std::to_string(day));
    }
  }
  return el;
}

// Y_if = sum of X_is over the slots of f, for every pilot-flight pair with an
// eligible slot.
void add_pilot_flight_vars(const ScheduleInstance& inst, const EligibleSlots& el, BuiltModel& m) {
  for (int i = 0; i < inst.num_pilots(); ++i) {
    for (int f = 0; f < inst.num_flights(); ++f) {
      if (el[i][f].empty()) continue;
      const int y = m.ip.add_var(yname(i, f));
      m.catalog.pilot_flight[{i, f}] = y;
      std::vector<Term> row{{y, 1.0}};
      for (int s : el[i][f]) row.push_back({m.catalog.pilot_slot.at({i, s}), -1.0});
      m.ip.add_constraint(std::move(row), Relation::kEqual, 0.0,
                          "link_p" + std::to_string(i) + "_f" + std::to_string(f));
    }
  }
}

// Adds a coverage term heavy enough that no robustness gain can pay for an
// uncovered slot.
void add_coverage_weight(const VariableCatalog& cat, double robustness_span, IpInstance& ip) {
  const double w = robustness_span + 1.0;
  for (const auto& [key, v] : cat.pilot_slot) ip.objective.push_back({v, w});
}

}  // namespace

double penalty(int b, int t_buffer) {
  if (t_buffer < 0 || b < 0 || b > t_buffer) {
    throw std::invalid_argument("penalty needs 0 <= b <= t_buffer, got b=" + std::to_string(b) +
                                " t=" + std::to_string(t_buffer));
  }
  return -static_cast<double>(t_buffer + 1 - b) / static_cast<double>(t_buffer + 1);
}

BuiltModel build_baseline_ip(const ScheduleInstance& inst) {
  BuiltModel m;
  add_assignment_core(inst, false, m);
  for (const auto& [key, v] : m.catalog.pilot_slot) m.ip.objective.push_back({v, 1.0});
  std::sort(m.ip.objective.begin(), m.ip.objective.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  return m;
}

BuiltModel build_buffer_ip(const ScheduleInstance& inst, int t_buffer, RobustOptions options) {
  if (t_buffer < 0) throw std::invalid_argument("t_buffer must be >= 0");
  BuiltModel m;
  const EligibleSlots el = add_assignment_core(inst, options.soft_coverage, m);
  add_pilot_flight_vars(inst, el, m);
  IpInstance& ip = m.ip;
  VariableCatalog& cat = m.catalog;

  double span = 0.0;
  for (int i = 0; i < inst.num_pilots(); ++i) {
    std::vector<int> mine;
    for (int f = 0; f < inst.num_flights(); ++f) {
      if (!el[i][f].empty()) mine.push_back(f);
    }
    for (int f : mine) {
      const Flight& ff = inst.flights[f];
      for (int f2 : mine) {
        const Flight& later = inst.flights[f2];
        if (later.start_day <= ff.end_day) continue;
        const int b = buffer_days(ff.end_day, later.start_day);
        if (b > t_buffer) continue;
        const std::string tag = "_p" + std::to_string(i) + "_f" + std::to_string(f) + "_f" +
                                std::to_string(f2);
        const int bv = ip.add_var("B" + tag);
        cat.buffer_vars[{i, f, f2}] = bv;
        const double pen = penalty(b, t_buffer);
        ip.objective.push_back({bv, pen});
        span += -pen;

        const int yf = cat.pilot_flight.at({i, f});
        const int yf2 = cat.pilot_flight.at({i, f2});
        std::vector<Term> lower{{bv, 1.0}, {yf, -1.0}, {yf2, -1.0}};
        for (int g : mine) {
          const Flight& gg = inst.flights[g];
          if (gg.start_day > ff.end_day && gg.end_day < later.start_day) {
            const int yg = cat.pilot_flight.at({i, g});
            lower.push_back({yg, 1.0});
            ip.add_constraint({{bv, 1.0}, {yg, 1.0}}, Relation::kLessEqual, 1.0,
                              "bgap" + tag + "_g" + std::to_string(g));
          }
        }
        ip.add_constraint(std::move(lower), Relation::kGreaterEqual, -1.0, "bcons" + tag);
        ip.add_constraint({{bv, 1.0}, {yf, -1.0}}, Relation::kLessEqual, 0.0, "bfirst" + tag);
        ip.add_constraint({{bv, 1.0}, {yf2, -1.0}}, Relation::kLessEqual, 0.0, "bsecond" + tag);
      }
    }
  }
  if (options.soft_coverage) add_coverage_weight(cat, span, ip);
  return m;
}

bool moveup_candidate(const ScheduleInstance& inst, int pilot, int g, int slot, int t_move) {
  const Slot& s = inst.slots[slot];
  const Flight& f = inst.flights[s.flight_id];
  const Flight& gg = inst.flights[g];
  const Pilot& j = inst.pilots[pilot];
  return f.id != gg.id && gg.start_day >= f.start_day && gg.start_day <= f.start_day + t_move &&
         gg.end_day >= f.end_day && !j.on_leave_during(f.span()) &&
         j.holds(s.required_qualification) && inst.eligible_for_flight(pilot, g);
}

BuiltModel build_moveup_ip(const ScheduleInstance& inst, int t_move, RobustOptions options) {
  if (t_move < 0) throw std::invalid_argument("t_move must be >= 0");
  BuiltModel m;
  const EligibleSlots el = add_assignment_core(inst, options.soft_coverage, m);
  add_pilot_flight_vars(inst, el, m);
  IpInstance& ip = m.ip;
  VariableCatalog& cat = m.catalog;


  double span = 0.0;
  for (int j = 0; j < inst.num_pilots(); ++j) {
    for (const Flight& g : inst.flights) {
      if (el[j][g.id].empty()) continue;
      const int yg = cat.pilot_flight.at({j, g.id});
      for (const Flight& f : inst.flights) {
        for (int s : f.slots) {
          if (!moveup_candidate(inst, j, g.id, s, t_move)) continue;
          const std::string tag = "_p" + std::to_string(j) + "_g" + std::to_string(g.id) + "_f" +
                                  std::to_string(f.id) + "_s" + std::to_string(s);
          const int mv = ip.add_var("M" + tag);
          cat.moveup_vars[{j, g.id, f.id, s}] = mv;
          ip.objective.push_back({mv, 1.0});
          span += 1.0;
          // f and every flight of j's that starts before f and overlaps it all
          // contain f's start day, so at most one of them is flown by j.
          std::vector<Term> block{{mv, 1.0}, {cat.pilot_flight.at({j, f.id}), 1.0}};
          for (const Flight& h : inst.flights) {
            if (h.start_day < f.start_day && h.span().overlaps(f.span()) && !el[j][h.id].empty()) {
              block.push_back({cat.pilot_flight.at({j, h.id}), 1.0});
            }
          }
          std::vector<Term> lower = block;
          lower.push_back({yg, -1.0});
          ip.add_constraint(std::move(block), Relation::kLessEqual, 1.0, "mblock" + tag);
          ip.add_constraint({{mv, 1.0}, {yg, -1.0}}, Relation::kLessEqual, 0.0, "mon" + tag);
          ip.add_constraint(std::move(lower), Relation::kGreaterEqual, 0.0, "mlow" + tag);
        }
      }
    }
  }
  if (options.soft_coverage) add_coverage_weight(cat, span, ip);
  return m;
}

BuiltModel build_nice_ip(const ScheduleInstance& inst, const CoefficientMatrix& coeffs) {
  BuiltModel m;
  add_assignment_core(inst, false, m);
  for (const auto& [key, v] : m.catalog.pilot_slot) {
    auto it = coeffs.values.find(key);
    if (it == coeffs.values.end()) {
      throw std::invalid_argument("missing coefficient for pilot " + std::to_string(key.first) +
                                  " slot " + std::to_string(key.second));
    }
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
      throw std::invalid_argument("coefficient outside [0,1]");
    }
    if (it->second != 0.0) m.ip.objective.push_back({v, it->second});
  }
  std::sort(m.ip.objective.begin(), m.ip.objective.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  return m;
}

BuiltModel build_repair_ip(const ScheduleInstance& delayed, const Schedule& original,
                           int decision_day) {
  if (!original.complete || static_cast<int>(original.assignment.size()) != delayed.num_slots()) {
    throw std::invalid_argument("repair needs a complete original schedule");
  }
  BuiltModel m;
  add_assignment_core(delayed, false, m);
  for (const auto& [slot, pilot] : original.assignment) {
    auto it = m.catalog.pilot_slot.find({pilot, slot});
    const bool frozen = delayed.flight_of(slot).start_day < decision_day;
    if (it == m.catalog.pilot_slot.end()) {
      if (frozen) {
        throw std::invalid_argument("frozen assignment of slot " + std::to_string(slot) +
                                    " is not eligible");
      }
      continue;
    }
    m.ip.objective.push_back({it->second, 1.0});
    if (frozen) {
      m.ip.add_constraint({{it->second, 1.0}}, Relation::kEqual, 1.0,
                          "freeze_s" + std::to_string(slot));
    }
  }
  std::sort(m.ip.objective.begin(), m.ip.objective.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  return m;
}

Schedule decode(const VariableCatalog& catalog, const SolveResult& result) {
  if (!result.has_solution()) throw std::invalid_argument("decode needs a solution vector");
  Schedule sched;
  for (const auto& [key, v] : catalog.pilot_slot) {
    if (v >= static_cast<int>(result.values.size())) {
      throw std::invalid_argument("solution vector shorter than catalog");
    }
    if (result.values[v] != 1) continue;
    if (!sched.assignment.emplace(key.second, key.first).second) {
      throw std::logic_error("slot " + std::to_string(key.second) + " covered twice");
    }
  }
  sched.complete = static_cast<int>(sched.assignment.size()) == catalog.num_slots;
  return sched;
}

}  // namespace crew
