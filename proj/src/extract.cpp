#include "crew/extract.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "crew/seeds.hpp"

namespace crew {
namespace {

CoefficientMatrix zero_matrix(const ScheduleInstance& inst) {
  CoefficientMatrix m;
  for (int i = 0; i < inst.num_pilots(); ++i) {
    for (int s = 0; s < inst.num_slots(); ++s) {
      if (inst.eligible(i, s)) m.values[{i, s}] = 0.0;
    }
  }
  return m;
}

void record(CoefficientMatrix& m, int slot, const Eigen::VectorXd& probs, double weight) {
  for (int i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0.0) continue;
    m.values.at({i, slot}) += weight * probs[i];
  }
}

}  // namespace

CoefficientMatrix extract_montecarlo(const PolicyWeights& w, const ScheduleInstance& inst, int n,
                                     std::uint64_t seed, RolloutMode mode) {
  if (n < 1) throw std::invalid_argument("Monte Carlo extraction needs n >= 1");
  check_compatible(w, inst);
  CoefficientMatrix m = zero_matrix(inst);
  m.method = "montecarlo";
  m.n = n;
  m.source_hash = weights_hash(w);
  // Per-rollout sums are kept apart so the merge order is fixed.
  for (int r = 0; r < n; ++r) {
    std::mt19937_64 rng(derive_seed(seed, "rollout", r));
    std::vector<int> order(inst.slots.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    SchedulingEnv env(inst, w.reward, order);
    while (!env.done()) {
      const Observation& obs = env.observation();
      const PolicyOutput out = policy_forward(w, obs);
      record(m, obs.slot, out.probs, 1.0);
      env.step(mode == RolloutMode::kGreedy ? greedy_action(out.probs)
                                            : sample_action(out.probs, rng));
    }
  }
  for (auto& [key, v] : m.values) v = std::min(1.0, v / n);
  return m;
}

CoefficientMatrix extract_blank_slate(const PolicyWeights& w, const ScheduleInstance& inst) {
  check_compatible(w, inst);
  CoefficientMatrix m = zero_matrix(inst);
  m.method = "blank_slate";
  m.n = 0;
  m.source_hash = weights_hash(w);
  const std::vector<int> base = slot_order(inst);
  for (int s = 0; s < inst.num_slots(); ++s) {
    std::vector<int> order{s};
    for (int t : base) {
      if (t != s) order.push_back(t);
    }
    SchedulingEnv env(inst, w.reward, std::move(order));
    const PolicyOutput out = policy_forward(w, env.observation());
    record(m, s, out.probs, 1.0);
  }
  return m;
}

CoefficientMatrix extract_coefficients(const PolicyWeights& w, const ScheduleInstance& inst, int n,
                                       std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  return n == 0 ? extract_blank_slate(w, inst) : extract_montecarlo(w, inst, n, seed);
}

}  // namespace crew
