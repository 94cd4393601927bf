#ifndef CREW_GENERATOR_HPP_
#define CREW_GENERATOR_HPP_

#include <cstdint>
#include <vector>

#include "crew/domain.hpp"

namespace crew {

// Everything the generator knows about one flight type.
struct FlightTypeSpec {
  FlightKind kind = FlightKind::kMission;
  int frequency = 1;                   // occurrences in the source data
  std::vector<int> duration_samples;   // end_day - start_day; {0} for simulators
  std::vector<QualTag> slot_quals;     // required tag per slot, ascending
  friend bool operator==(const FlightTypeSpec&, const FlightTypeSpec&) = default;
};

// Statistical summary of a squadron's historical schedule.
struct DatasetProfile {
  double weekly_mission_mean = 0.0;
  double weekly_mission_stddev = 0.0;
  double weekly_simulator_mean = 0.0;
  double weekly_simulator_stddev = 0.0;
  int num_qualifications = 1;
  std::vector<FlightTypeSpec> flight_types;  // index is the flight_type tag
  std::vector<Pilot> pilot_roster;
  // training_template[pilot][flight_type]
  std::vector<std::vector<int>> training_template;

  int num_flight_types() const { return static_cast<int>(flight_types.size()); }
  friend bool operator==(const DatasetProfile&, const DatasetProfile&) = default;
};

// Throws std::invalid_argument on a broken profile invariant.
void check_profile(const DatasetProfile& profile);

struct GeneratorConfig {
  double density = 1.0;
  int weeks = 1;
  std::uint64_t seed = 0;
};

// Per week: Normal draws for the mission and simulator counts, scaled by the
// density, clamped at zero and rounded half-to-even; each flight gets a type
// drawn proportionally to its frequency, a uniform start day within the week
// and a duration sampled from that type's history. Deterministic per seed.
ScheduleInstance generate_instance(const DatasetProfile& profile, const GeneratorConfig& cfg);

// Scaled synthetic stand-in for a squadron export: 20 pilots, 8 qualification
// tags, 7 mission and 9 simulator types, 2-3 slots per flight.
DatasetProfile default_desk_profile();

}  // namespace crew

#endif  // CREW_GENERATOR_HPP_
