#ifndef CREW_PPO_HPP_
#define CREW_PPO_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crew/generator.hpp"
#include "crew/policy.hpp"

namespace crew {

struct TrainConfig {
  double density = 1.0;
  int weeks = 1;
  std::uint64_t seed = 0;
  std::int64_t total_steps = 200000;
  int hidden = 128;
  double clip = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double learning_rate = 3e-4;
  int epochs = 4;
  int batch_steps = 2048;
  int minibatch = 64;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  // Learner-side multiplier on rewards; keeps value targets near unit scale.
  double reward_scale = 0.05;
  RewardConfig reward;  // reward.horizon defaults to one week
};

void check_train_config(const TrainConfig& cfg);

struct TrainLogRow {
  std::int64_t steps = 0;
  std::int64_t episodes = 0;
  double mean_return = 0.0;
  double completion_rate = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyWeights weights;
  std::vector<TrainLogRow> log;  // one row per batch
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PPO with clipped surrogate, GAE and Adam on freshly generated instances.
TrainResult train_ppo(const DatasetProfile& profile, const TrainConfig& cfg,
                      const std::function<void(const TrainLogRow&)>& on_batch = {});

std::string train_log_csv(const std::vector<TrainLogRow>& log);

// Per-sample clipped surrogate loss -min(r A, clip(r, 1-eps, 1+eps) A).
double ppo_policy_loss(double ratio, double advantage, double clip);

// Generalised advantage estimates for one finished episode.
std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double gamma,
                                   double lambda);

struct EvalStats {
  double mean_return = 0.0;
  double completion_rate = 0.0;
};

// Episodes on instances drawn from seed's "eval" stream.
EvalStats evaluate_policy(const PolicyWeights& w, const DatasetProfile& profile, double density,
                          int weeks, int episodes, std::uint64_t seed, RolloutMode mode);

}  // namespace crew

#endif  // CREW_PPO_HPP_
