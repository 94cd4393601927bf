#include "crew/env.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "crew/ip_models.hpp"

namespace crew {

std::string to_string(RewardVariant v) {
  return v == RewardVariant::kBuffer ? "buffer" : "moveup";
}

RewardVariant reward_variant_from_string(const std::string& s) {
  if (s == "buffer") return RewardVariant::kBuffer;
  if (s == "moveup") return RewardVariant::kMoveup;
  throw std::invalid_argument("unknown reward variant '" + s + "'");
}

void check_reward_config(const RewardConfig& cfg) {
  if (cfg.horizon < 1) throw std::invalid_argument("reward horizon must be >= 1");
  if (cfg.t_move < 0) throw std::invalid_argument("t_move must be >= 0");
}

int observation_size(int num_pilots, int num_flight_types) {
  return 3 * num_pilots + num_flight_types + 5;
}

bool Observation::any_available() const {
  return std::any_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; });
}

SchedulingEnv::SchedulingEnv(const ScheduleInstance& inst, RewardConfig cfg)
    : SchedulingEnv(inst, cfg, slot_order(inst)) {}

SchedulingEnv::SchedulingEnv(const ScheduleInstance& inst, RewardConfig cfg,
                             std::vector<int> order)
    : inst_(inst), cfg_(cfg), order_(std::move(order)) {
  check_reward_config(cfg_);
  std::vector<int> sorted = order_;
  std::sort(sorted.begin(), sorted.end());
  bool permutation = sorted.size() == inst.slots.size();
  for (size_t k = 0; permutation && k < sorted.size(); ++k) {
    permutation = sorted[k] == static_cast<int>(k);
  }
  if (!permutation) throw std::invalid_argument("slot order is not a permutation of the slot ids");
  reset();
}

const Observation& SchedulingEnv::reset() {
  cursor_ = 0;
  return_ = 0.0;
  schedule_ = Schedule{};
  pilot_flights_.assign(inst_.pilots.size(), {});
  flight_pilots_.assign(inst_.flights.size(), {});
  done_ = order_.empty();
  schedule_.complete = done_;
  observe();
  if (!done_ && !obs_.any_available()) {
    // Dead end before the first placement.
    done_ = true;
    return_ = cfg_.incomplete_penalty;
  }
  return obs_;
}

bool SchedulingEnv::available(int pilot, int slot) const {
  if (!inst_.eligible(pilot, slot)) return false;
  const Flight& f = inst_.flight_of(slot);
  for (int g : pilot_flights_[pilot]) {
    if (g == f.id || flights_conflict(f, inst_.flights[g])) return false;
  }
  return true;
}

int SchedulingEnv::buffer_reward(int pilot, const Flight& f) const {
  // Gap to the pilot's nearest assigned event; in chronological slot order
  // that is the most recent one.
  int best = std::numeric_limits<int>::max();
  for (int g : pilot_flights_[pilot]) {
    const Flight& other = inst_.flights[g];
    const int gap = other.end_day < f.start_day ? buffer_days(other.end_day, f.start_day)
                                                : buffer_days(f.end_day, other.start_day);
    best = std::min(best, gap);
  }
  if (best == std::numeric_limits<int>::max()) return cfg_.horizon - 1;
  return best + 1;
}

int SchedulingEnv::moveup_count(int pilot, const Flight& g) const {
  int m = 0;
  for (const Flight& f : inst_.flights) {
    if (f.id == g.id) continue;
    bool blocked = false;
    for (int h : pilot_flights_[pilot]) {
      const Flight& hh = inst_.flights[h];
      if (h == f.id || (hh.start_day < f.start_day && hh.span().overlaps(f.span()))) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    for (int s : f.slots) {
      if (schedule_.assignment.count(s) && moveup_candidate(inst_, pilot, g.id, s, cfg_.t_move)) {
        ++m;
      }
    }
  }
  return m;
}

double SchedulingEnv::placement_reward(int pilot, int slot) const {
  const Flight& f = inst_.flight_of(slot);
  if (cfg_.variant == RewardVariant::kBuffer) return buffer_reward(pilot, f);
  return moveup_count(pilot, f) + 1;
}

StepResult SchedulingEnv::step(int pilot) {
  if (done_) throw std::logic_error("step on a finished episode");
  const int slot = order_[cursor_];
  if (pilot < 0 || pilot >= inst_.num_pilots() || !obs_.mask[pilot]) {
    throw std::logic_error("pilot " + std::to_string(pilot) + " is masked for slot " +
                           std::to_string(slot));
  }
  const Flight& f = inst_.flight_of(slot);
  double reward = placement_reward(pilot, slot);
  schedule_.assignment[slot] = pilot;
  pilot_flights_[pilot].push_back(f.id);
  flight_pilots_[f.id].push_back(pilot);
  ++cursor_;

  StepResult r;
  if (cursor_ == static_cast<int>(order_.size())) {
    reward += cfg_.complete_bonus;
    schedule_.complete = true;
    done_ = true;
  } else {
    observe();
    if (!obs_.any_available()) {
      reward += cfg_.incomplete_penalty;
      done_ = true;
    }
  }
  return_ += reward;
  r.reward = reward;
  r.done = done_;
  return r;
}

void SchedulingEnv::observe() {
  const int P = inst_.num_pilots();
  const int types = inst_.num_flight_types;
  obs_.features.assign(observation_size(P, types), 0.0);
  obs_.mask.assign(P, 0);
  if (cursor_ >= static_cast<int>(order_.size())) {
    obs_.slot = -1;
    return;
  }
  const int slot = order_[cursor_];
  obs_.slot = slot;
  const Flight& f = inst_.flight_of(slot);
  const double scale = 1.0 / cfg_.horizon;
  double* x = obs_.features.data();
  for (int i = 0; i < P; ++i) {
    obs_.mask[i] = available(i, slot) ? 1 : 0;
    x[i] = obs_.mask[i];
  }
  x += P;
  x[f.flight_type] = 1.0;
  x += types;
  x[0] = inst_.trq_flags[f.id][0];
  x[1] = inst_.trq_flags[f.id][1];
  x += 2;
  for (int i : flight_pilots_[f.id]) x[i] = 1.0;
  x += P;
  x[0] = f.duration() * scale;
  x[1] = f.start_day * scale;
  x[2] = f.end_day * scale;
  x += 3;
  for (int i = 0; i < P; ++i) x[i] = inst_.training_matrix[i][f.id] * scale;
}

}  // namespace crew
