#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <random>

#include "crew/generator.hpp"
#include "crew/ip_models.hpp"
#include "crew/milp.hpp"
#include "tiny.hpp"

namespace crew {
namespace {

using testing::make_instance;

bool has_kind(const std::vector<Violation>& v, ViolationKind k) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == k; });
}

TEST(BufferDays, WorkedValues) {
  EXPECT_EQ(buffer_days(1, 5), 3);
  EXPECT_EQ(buffer_days(1, 2), 0);
  EXPECT_EQ(buffer_days(1, 7), 5);
  EXPECT_THROW(buffer_days(3, 3), std::invalid_argument);
  EXPECT_THROW(buffer_days(4, 2), std::invalid_argument);
}

TEST(BufferDays, MonotoneInBothArguments) {
  for (int e = -3; e < 10; ++e) {
    EXPECT_EQ(buffer_days(e, e + 1), 0);
    for (int s = e + 1; s < 15; ++s) {
      EXPECT_EQ(buffer_days(e, s + 1), buffer_days(e, s) + 1);
      if (e - 1 < s) EXPECT_EQ(buffer_days(e - 1, s), buffer_days(e, s) + 1);
    }
  }
}

TEST(FlightsConflict, InclusiveOverlap) {
  Flight a{0, FlightKind::kMission, 0, 1, 3, {}};
  Flight b{1, FlightKind::kMission, 0, 3, 5, {}};
  Flight c{2, FlightKind::kSimulator, 0, 1, 1, {}};
  Flight d{3, FlightKind::kSimulator, 0, 2, 2, {}};
  EXPECT_TRUE(flights_conflict(a, b));
  EXPECT_FALSE(flights_conflict(c, d));
  EXPECT_FALSE(flights_conflict(a, a));
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> day(0, 9), len(0, 3);
  for (int k = 0; k < 500; ++k) {
    const int s1 = day(rng), s2 = day(rng);
    Flight f{0, FlightKind::kMission, 0, s1, s1 + len(rng), {}};
    Flight g{1, FlightKind::kMission, 0, s2, s2 + len(rng), {}};
    EXPECT_EQ(flights_conflict(f, g), flights_conflict(g, f));
    bool shared = false;
    for (int t = 0; t < 20; ++t) shared |= f.start_day <= t && t <= f.end_day && g.start_day <= t && t <= g.end_day;
    EXPECT_EQ(flights_conflict(f, g), shared);
  }
}

TEST(Validate, EachViolationClass) {
  const auto inst = make_instance({{0}, {0, 1}, {0}, {0}}, {{0, 1, {0, 1}}, {1, 2}, {4, 4}}, 7,
                                  {{}, {}, {{4, 4}}});
  Schedule ok;
  ok.complete = true;
  ok.assignment = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 0}, {5, 1}};
  ASSERT_TRUE(validate_schedule(inst, ok).empty());

  Schedule conflict = ok;
  conflict.assignment[2] = 1;  // pilot 1 on flights 0 and 1, which share day 1
  auto v = validate_schedule(inst, conflict);
  EXPECT_TRUE(has_kind(v, ViolationKind::kFlightConflict));

  Schedule qual = ok;
  qual.assignment[1] = 0;
  qual.assignment[0] = 1;
  EXPECT_TRUE(has_kind(validate_schedule(inst, qual), ViolationKind::kQualification));

  Schedule leave = ok;
  leave.assignment[4] = 2;
  EXPECT_TRUE(has_kind(validate_schedule(inst, leave), ViolationKind::kLeave));

  Schedule dup = ok;
  dup.assignment[5] = 0;
  EXPECT_TRUE(has_kind(validate_schedule(inst, dup), ViolationKind::kSameFlightDuplicate));

  Schedule gap = ok;
  gap.assignment.erase(5);
  EXPECT_TRUE(has_kind(validate_schedule(inst, gap), ViolationKind::kSlotCoverage));

  Schedule unknown = ok;
  unknown.assignment[4] = 9;
  EXPECT_TRUE(has_kind(validate_schedule(inst, unknown), ViolationKind::kUnknownId));
  Schedule unknown_slot = ok;
  unknown_slot.assignment[42] = 0;
  EXPECT_TRUE(has_kind(validate_schedule(inst, unknown_slot), ViolationKind::kUnknownId));
}

TEST(Validate, IncompleteScheduleMayOmitSlots) {
  const auto inst = make_instance({{0}, {0}}, {{0, 0}}, 7);
  Schedule partial;
  partial.assignment = {{0, 1}};
  EXPECT_TRUE(validate_schedule(inst, partial).empty());
  partial.complete = true;
  EXPECT_FALSE(validate_schedule(inst, partial).empty());
}

// Any single reassignment of a valid desk schedule that breaks a rule must be
// reported; mutations that keep every rule must not be.
TEST(Validate, SingleMutationsAgreeWithRules) {
  using namespace std::chrono_literals;
  const DatasetProfile profile = default_desk_profile();
  std::mt19937_64 rng(17);
  int illegal = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ScheduleInstance inst = generate_instance(profile, {1.0, 1, seed});
    BuiltModel m;
    try {
      m = build_baseline_ip(inst);
    } catch (const StructurallyInfeasible&) {
      continue;
    }
    const SolveResult r = solve(m.ip, 10s);
    if (r.status != SolveStatus::kOptimal) continue;
    const Schedule base = decode(m.catalog, r);
    ASSERT_TRUE(validate_schedule(inst, base).empty());
    for (int k = 0; k < 200; ++k) {
      Schedule s = base;
      const int slot = static_cast<int>(rng() % inst.num_slots());
      const int pilot = static_cast<int>(rng() % inst.num_pilots());
      s.assignment[slot] = pilot;
      const Flight& f = inst.flight_of(slot);
      bool breaks = !inst.eligible(pilot, slot);
      for (const auto& [other, p] : s.assignment) {
        if (other == slot || p != pilot) continue;
        const Flight& g = inst.flight_of(other);
        breaks |= g.id == f.id || flights_conflict(f, g);
      }
      illegal += breaks;
      EXPECT_EQ(!validate_schedule(inst, s).empty(), breaks) << "seed " << seed << " slot " << slot;
    }
  }
  EXPECT_GT(illegal, 100);
}

TEST(SlotOrder, StartDayThenIdThenQualification) {
  const auto inst = make_instance({{0, 1, 2}}, {{2, 2, {2, 1}}, {0, 0, {1, 0}}, {0, 1, {2, 0}}}, 7);
  const std::vector<int> order = slot_order(inst);
  // Flight 1 (day 0) before flight 2 (day 0, higher id) before flight 0 (day 2).
  std::vector<int> flights;
  for (int s : order) flights.push_back(inst.slots[s].flight_id);
  EXPECT_EQ(flights, (std::vector<int>{1, 1, 2, 2, 0, 0}));
  for (size_t k = 0; k + 1 < order.size(); ++k) {
    if (flights[k] == flights[k + 1]) {
      EXPECT_LE(inst.slots[order[k]].required_qualification,
                inst.slots[order[k + 1]].required_qualification);
    }
  }
  EXPECT_EQ(slot_order(inst), order);
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int s = 0; s < inst.num_slots(); ++s) EXPECT_EQ(sorted[s], s);
}

TEST(CheckInstance, RejectsBrokenInvariants) {
  const auto good = make_instance({{0}, {0}}, {{0, 1}}, 7);
  EXPECT_NO_THROW(check_instance(good));
  auto bad = good;
  bad.flights[0].end_day = 7;
  EXPECT_THROW(check_instance(bad), std::invalid_argument);
  bad = good;
  bad.flights[0].kind = FlightKind::kSimulator;
  EXPECT_THROW(check_instance(bad), std::invalid_argument);
  bad = good;
  bad.pilots[1].id = 0;
  EXPECT_THROW(check_instance(bad), std::invalid_argument);
  bad = good;
  bad.pilots[0].leave = {{3, 2}};
  EXPECT_THROW(check_instance(bad), std::invalid_argument);
  bad = good;
  bad.slots[1].flight_id = 3;
  EXPECT_THROW(check_instance(bad), std::invalid_argument);
  const auto single = make_instance({{0}}, {{0, 0, {0}}}, 7);
  EXPECT_THROW(check_instance(single), std::invalid_argument);
  EXPECT_NO_THROW(check_instance(single, {1, 3}));
}

}  // namespace
}  // namespace crew
