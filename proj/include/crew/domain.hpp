#ifndef CREW_DOMAIN_HPP_
#define CREW_DOMAIN_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace crew {

// Days are 0-based integers from the start of the schedule. Intervals are
// inclusive on both ends.
struct DayInterval {
  int start = 0;
  int end = 0;

  bool overlaps(const DayInterval& other) const {
    return start <= other.end && other.start <= end;
  }
  friend bool operator==(const DayInterval&, const DayInterval&) = default;
};

using QualTag = int;

struct Pilot {
  int id = 0;
  std::vector<QualTag> qualifications;  // sorted, unique
  std::vector<DayInterval> leave;

  bool holds(QualTag tag) const;
  bool on_leave_during(const DayInterval& span) const;
  friend bool operator==(const Pilot&, const Pilot&) = default;
};

enum class FlightKind { kMission, kSimulator };

struct Flight {
  int id = 0;
  FlightKind kind = FlightKind::kMission;
  int flight_type = 0;
  int start_day = 0;
  int end_day = 0;
  std::vector<int> slots;

  DayInterval span() const { return {start_day, end_day}; }
  int duration() const { return end_day - start_day; }
  friend bool operator==(const Flight&, const Flight&) = default;
};

struct Slot {
  int id = 0;
  int flight_id = 0;
  QualTag required_qualification = 0;
  friend bool operator==(const Slot&, const Slot&) = default;
};

// Limits on the number of slots a flight may carry. The dataset shape is 2-3.
struct SlotCountLimits {
  int min_slots = 2;
  int max_slots = 3;
};

// The immutable problem input. Pilot, flight and slot ids equal their index in
// the corresponding vector.
struct ScheduleInstance {
  std::vector<Pilot> pilots;
  std::vector<Flight> flights;
  std::vector<Slot> slots;
  int horizon_days = 7;
  int num_flight_types = 1;
  // training_matrix[pilot][flight]
  std::vector<std::vector<int>> training_matrix;
  std::vector<std::array<bool, 2>> trq_flags;

  const Flight& flight_of(int slot_id) const {
    return flights[slots[slot_id].flight_id];
  }
  int num_pilots() const { return static_cast<int>(pilots.size()); }
  int num_flights() const { return static_cast<int>(flights.size()); }
  int num_slots() const { return static_cast<int>(slots.size()); }

  // Pilot holds the slot's qualification and has no leave during its flight.
  bool eligible(int pilot_id, int slot_id) const;
  // Pilot is eligible for at least one slot of the flight.
  bool eligible_for_flight(int pilot_id, int flight_id) const;

  friend bool operator==(const ScheduleInstance&,
                         const ScheduleInstance&) = default;
};

// Throws std::invalid_argument describing the first broken invariant.
void check_instance(const ScheduleInstance& inst,
                    SlotCountLimits limits = SlotCountLimits{});

struct Schedule {
  std::map<int, int> assignment;  // slot id -> pilot id
  bool complete = false;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

bool flights_conflict(const Flight& f, const Flight& g);

// Full days strictly between the end of one flight and the start of a later
// one. Throws std::invalid_argument unless later_start > earlier_end.
int buffer_days(int earlier_end, int later_start);

enum class ViolationKind {
  kLeave,
  kQualification,
  kSameFlightDuplicate,
  kSlotCoverage,
  kFlightConflict,
  kUnknownId,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int pilot = -1;
  int slot = -1;
  int flight = -1;
  int other_flight = -1;
  std::string detail;
};

std::vector<Violation> validate_schedule(const ScheduleInstance& inst,
                                         const Schedule& sched);

// Slots by (flight start day, flight id, required qualification, slot id).
std::vector<int> slot_order(const ScheduleInstance& inst);

}  // namespace crew

#endif  // CREW_DOMAIN_HPP_
