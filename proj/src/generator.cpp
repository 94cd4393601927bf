#include "crew/generator.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <random>
#include <stdexcept>

namespace crew {

void check_profile(const DatasetProfile& p) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid profile: " + what);
  };
  if (p.weekly_mission_stddev < 0 || p.weekly_simulator_stddev < 0) fail("negative stddev");
  if (p.weekly_mission_mean < 0 || p.weekly_simulator_mean < 0) fail("negative mean");
  if (p.num_qualifications < 1) fail("no qualification tags");
  bool mission = false;
  bool simulator = false;
  for (size_t t = 0; t < p.flight_types.size(); ++t) {
    const FlightTypeSpec& ft = p.flight_types[t];
    const std::string tag = "flight type " + std::to_string(t);
    if (ft.frequency < 0) fail(tag + " negative frequency");
    if (ft.duration_samples.empty()) fail(tag + " has no duration samples");
    for (int d : ft.duration_samples) {
      if (d < 0) fail(tag + " negative duration");
      if (ft.kind == FlightKind::kSimulator && d != 0) fail(tag + " simulator with duration");
    }
    if (ft.slot_quals.empty()) fail(tag + " has no slots");
    if (!std::is_sorted(ft.slot_quals.begin(), ft.slot_quals.end())) {
      fail(tag + " slot qualifications not ascending");
    }
    for (QualTag q : ft.slot_quals) {
      if (q < 0 || q >= p.num_qualifications) fail(tag + " unknown qualification");
    }
    if (ft.frequency > 0) (ft.kind == FlightKind::kMission ? mission : simulator) = true;
  }
  if (!mission) fail("no mission type with positive frequency");
  if (!simulator) fail("no simulator type with positive frequency");
  for (size_t i = 0; i < p.pilot_roster.size(); ++i) {
    const Pilot& pilot = p.pilot_roster[i];
    if (pilot.id != static_cast<int>(i)) fail("roster ids must be 0..P-1");
    for (QualTag q : pilot.qualifications) {
      if (q < 0 || q >= p.num_qualifications) fail("pilot holds unknown qualification");
    }
    for (const DayInterval& l : pilot.leave) {
      if (l.start > l.end) fail("leave start > end");
    }
  }
  if (!p.training_template.empty()) {
    if (p.training_template.size() != p.pilot_roster.size()) fail("training template rows");
    for (const auto& row : p.training_template) {
      if (static_cast<int>(row.size()) != p.num_flight_types()) fail("training template columns");
      for (int v : row) {
        if (v < 0) fail("negative training count");
      }
    }
  }
}

namespace {

int draw_count(std::mt19937_64& rng, double mean, double stddev, double density) {
  double v = mean;
  if (stddev > 0.0) v = std::normal_distribution<double>(mean, stddev)(rng);
  v = std::max(0.0, v * density);
  const int old_mode = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(v);
  std::fesetround(old_mode);
  return static_cast<int>(r);
}

}  // namespace

ScheduleInstance generate_instance(const DatasetProfile& profile, const GeneratorConfig& cfg) {
  check_profile(profile);
  if (!(cfg.density > 0.0)) throw std::invalid_argument("density must be positive");
  if (cfg.weeks < 1) throw std::invalid_argument("weeks must be >= 1");

  std::mt19937_64 rng(cfg.seed);
  std::vector<double> mission_w(profile.flight_types.size(), 0.0);
  std::vector<double> sim_w(profile.flight_types.size(), 0.0);
  for (size_t t = 0; t < profile.flight_types.size(); ++t) {
    const auto& ft = profile.flight_types[t];
    (ft.kind == FlightKind::kMission ? mission_w : sim_w)[t] = ft.frequency;
  }
  std::discrete_distribution<int> mission_type(mission_w.begin(), mission_w.end());
  std::discrete_distribution<int> sim_type(sim_w.begin(), sim_w.end());
  std::uniform_int_distribution<int> weekday(0, 6);
  std::bernoulli_distribution coin(0.5);

  ScheduleInstance inst;
  inst.pilots = profile.pilot_roster;
  inst.num_flight_types = profile.num_flight_types();
  int last_day = 7 * cfg.weeks - 1;

  auto add_flight = [&](int week, int type) {
    const FlightTypeSpec& ft = profile.flight_types[type];
    Flight f;
    f.id = inst.num_flights();
    f.kind = ft.kind;
    f.flight_type = type;
    f.start_day = 7 * week + weekday(rng);
    int duration = 0;
    if (ft.kind == FlightKind::kMission) {
      std::uniform_int_distribution<size_t> pick(0, ft.duration_samples.size() - 1);
      duration = ft.duration_samples[pick(rng)];
    }
    f.end_day = f.start_day + duration;
    last_day = std::max(last_day, f.end_day);
    for (QualTag q : ft.slot_quals) {
      Slot s;
      s.id = inst.num_slots();
      s.flight_id = f.id;
      s.required_qualification = q;
      f.slots.push_back(s.id);
      inst.slots.push_back(s);
    }
    inst.trq_flags.push_back({coin(rng), coin(rng)});
    inst.flights.push_back(std::move(f));
  };

  for (int week = 0; week < cfg.weeks; ++week) {
    const int missions = draw_count(rng, profile.weekly_mission_mean,
                                    profile.weekly_mission_stddev, cfg.density);
    const int sims = draw_count(rng, profile.weekly_simulator_mean,
                                profile.weekly_simulator_stddev, cfg.density);
    for (int k = 0; k < missions; ++k) add_flight(week, mission_type(rng));
    for (int k = 0; k < sims; ++k) add_flight(week, sim_type(rng));
  }
  inst.horizon_days = last_day + 1;

  inst.training_matrix.assign(inst.pilots.size(), std::vector<int>(inst.flights.size(), 0));
  if (!profile.training_template.empty()) {
    for (size_t p = 0; p < inst.pilots.size(); ++p) {
      for (const Flight& f : inst.flights) {
        inst.training_matrix[p][f.id] = profile.training_template[p][f.flight_type];
      }
    }
  }
  return inst;
}

DatasetProfile default_desk_profile() {
  // Qualification tags, ascending seniority first, then mission specialties:
  // 0 basic, 1 first pilot, 2 aircraft commander, 3 instructor, 4 evaluator,
  // 5 night vision, 6 air refueling, 7 low level.
  DatasetProfile p;
  p.num_qualifications = 8;
  // 801 flights over 26 weeks for 87 pilots, scaled to a 20-pilot roster.
  p.weekly_mission_mean = 3.2;
  p.weekly_mission_stddev = 1.3;
  p.weekly_simulator_mean = 3.9;
  p.weekly_simulator_stddev = 1.5;

  using K = FlightKind;
  p.flight_types = {
      {K::kMission, 30, {0, 1, 1, 2}, {1, 2}},
      {K::kMission, 25, {0, 0, 1}, {0, 2}},
      {K::kMission, 15, {1, 2, 3}, {0, 1, 2}},
      {K::kMission, 12, {0, 1}, {0, 3}},
      {K::kMission, 8, {1, 2, 4}, {2, 6}},
      {K::kMission, 6, {0, 1, 2}, {0, 2, 5}},
      {K::kMission, 4, {0, 1}, {2, 4}},
      {K::kSimulator, 20, {0}, {0, 0}},
      {K::kSimulator, 18, {0}, {0, 1}},
      {K::kSimulator, 15, {0}, {1, 2}},
      {K::kSimulator, 10, {0}, {0, 3}},
      {K::kSimulator, 8, {0}, {0, 0, 0}},
      {K::kSimulator, 8, {0}, {0, 2}},
      {K::kSimulator, 6, {0}, {0, 5}},
      {K::kSimulator, 5, {0}, {1, 7}},
      {K::kSimulator, 4, {0}, {0, 1, 3}},
  };

  // Seniority ladder: 6 basic, 6 first pilots, 5 commanders, 1 instructor,
  // 2 evaluators.
  const std::vector<std::vector<QualTag>> ladder = {
      {0}, {0}, {0}, {0}, {0}, {0},
      {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1},
      {0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2}, {0, 1, 2},
      {0, 1, 2, 3}, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4},
  };
  const std::vector<int> night = {3, 7, 9, 11, 13, 15, 17, 19};
  const std::vector<int> refuel = {12, 14, 15, 16, 18, 19};
  const std::vector<int> low_level = {5, 8, 10, 16, 18};

  std::mt19937_64 rng(0x5eed'deadULL);
  std::bernoulli_distribution on_leave(0.05);
  std::uniform_int_distribution<int> training(0, 3);
  constexpr int kProfileDays = 26 * 7;
  for (int i = 0; i < static_cast<int>(ladder.size()); ++i) {
    Pilot pilot;
    pilot.id = i;
    pilot.qualifications = ladder[i];
    auto grant = [&](const std::vector<int>& who, QualTag tag) {
      if (std::find(who.begin(), who.end(), i) != who.end()) pilot.qualifications.push_back(tag);
    };
    grant(night, 5);
    grant(refuel, 6);
    grant(low_level, 7);
    std::sort(pilot.qualifications.begin(), pilot.qualifications.end());
    // Independent daily leave, merged into maximal intervals.
    int open = -1;
    for (int day = 0; day <= kProfileDays; ++day) {
      const bool away = day < kProfileDays && on_leave(rng);
      if (away && open < 0) open = day;
      if (!away && open >= 0) {
        pilot.leave.push_back({open, day - 1});
        open = -1;
      }
    }
    p.pilot_roster.push_back(std::move(pilot));
  }
  p.training_template.assign(p.pilot_roster.size(),
                             std::vector<int>(p.flight_types.size(), 0));
  for (auto& row : p.training_template) {
    for (int& v : row) v = training(rng);
  }
  return p;
}

}  // namespace crew
