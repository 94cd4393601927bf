#ifndef CREW_POLICY_HPP_
#define CREW_POLICY_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "crew/domain.hpp"
#include "crew/env.hpp"

namespace crew {

struct DenseLayer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;
  friend bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.w.rows() == b.w.rows() && a.w.cols() == b.w.cols() && a.b.size() == b.b.size() &&
           a.w == b.w && a.b == b.b;
  }
};

// Two tanh layers shared by a softmax actor head (one logit per pilot) and a
// scalar critic head.
struct PolicyWeights {
  int num_pilots = 0;
  int num_flight_types = 0;
  int hidden = 128;
  DenseLayer trunk1, trunk2, actor, critic;
  // Environment settings the network was trained under; reward.horizon is
  // also the divisor applied to day-valued observation fields.
  RewardConfig reward;
  double train_density = 1.0;
  std::uint64_t seed = 0;

  int input_size() const { return observation_size(num_pilots, num_flight_types); }
  std::vector<DenseLayer*> layers() { return {&trunk1, &trunk2, &actor, &critic}; }
  std::vector<const DenseLayer*> layers() const { return {&trunk1, &trunk2, &actor, &critic}; }
  friend bool operator==(const PolicyWeights&, const PolicyWeights&) = default;
};

PolicyWeights init_policy(int num_pilots, int num_flight_types, int hidden, std::uint64_t seed,
                          RewardConfig reward = {});

// Throws std::invalid_argument on inconsistent shapes or non-finite values.
void check_weights(const PolicyWeights& w);
// Throws std::invalid_argument unless the network fits the instance's pilot
// roster and flight-type universe.
void check_compatible(const PolicyWeights& w, const ScheduleInstance& inst);
std::uint64_t weights_hash(const PolicyWeights& w);

struct PolicyOutput {
  Eigen::VectorXd probs;  // zero for masked pilots
  Eigen::VectorXd logits;
  double value = 0.0;
  bool empty = false;  // every pilot masked
};

PolicyOutput policy_forward(const PolicyWeights& w, const Observation& obs);

// Batched passes used by training and gradient checks. Columns are samples.
struct BatchForward {
  Eigen::MatrixXd x, h1, h2, probs;
  Eigen::MatrixXd mask;  // 1 available, 0 masked
  Eigen::VectorXd values;
};

BatchForward forward_batch(const PolicyWeights& w, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& mask);

struct PolicyGradients {
  DenseLayer trunk1, trunk2, actor, critic;

  static PolicyGradients zeros_like(const PolicyWeights& w);
  std::vector<DenseLayer*> layers() { return {&trunk1, &trunk2, &actor, &critic}; }
  std::vector<const DenseLayer*> layers() const { return {&trunk1, &trunk2, &actor, &critic}; }
  double norm() const;
  void scale(double s);
};

// Accumulates dL/dtheta given dL/dlogits (P x B, ignored where masked) and
// dL/dvalue (B).
void backward_batch(const PolicyWeights& w, const BatchForward& fwd,
                    const Eigen::MatrixXd& dlogits, const Eigen::VectorXd& dvalues,
                    PolicyGradients& grads);

// Masked-softmax helpers shared by training and tests.
double log_prob(const BatchForward& fwd, int col, int action);
double entropy(const BatchForward& fwd, int col);

// Draws from a probability vector with one uniform variate.
int sample_action(const Eigen::VectorXd& probs, std::mt19937_64& rng);
// Argmax, lowest index on ties.
int greedy_action(const Eigen::VectorXd& probs);

enum class RolloutMode { kGreedy, kSample };

// Rolls the environment to termination under the policy.
Schedule rl_schedule(const PolicyWeights& w, const ScheduleInstance& inst, RolloutMode mode,
                     std::uint64_t seed = 0);

}  // namespace crew

#endif  // CREW_POLICY_HPP_
