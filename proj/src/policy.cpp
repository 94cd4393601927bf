#include "crew/policy.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "crew/seeds.hpp"

namespace crew {
namespace {

DenseLayer make_layer(int out, int in, double gain, std::mt19937_64& rng) {
  // Scaled Gaussian (Glorot-style) initialisation.
  std::normal_distribution<double> n(0.0, gain * std::sqrt(2.0 / (in + out)));
  DenseLayer l;
  l.w.resize(out, in);
  for (int r = 0; r < out; ++r) {
    for (int c = 0; c < in; ++c) l.w(r, c) = n(rng);
  }
  l.b = Eigen::VectorXd::Zero(out);
  return l;
}

void check_layer(const DenseLayer& l, int out, int in, const char* name) {
  if (l.w.rows() != out || l.w.cols() != in || l.b.size() != out) {
    throw std::invalid_argument(std::string("layer ") + name + " has the wrong shape");
  }
  if (!l.w.allFinite() || !l.b.allFinite()) {
    throw std::invalid_argument(std::string("layer ") + name + " has non-finite values");
  }
}

// Masked softmax of one column.
void masked_softmax(const Eigen::Ref<const Eigen::VectorXd>& logits,
                    const Eigen::Ref<const Eigen::VectorXd>& mask, Eigen::Ref<Eigen::VectorXd> out) {
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < logits.size(); ++k) {
    if (mask[k] != 0.0) top = std::max(top, logits[k]);
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < logits.size(); ++k) {
    out[k] = mask[k] != 0.0 ? std::exp(logits[k] - top) : 0.0;
    sum += out[k];
  }
  if (sum > 0.0) out /= sum;
}

}  // namespace

PolicyWeights init_policy(int num_pilots, int num_flight_types, int hidden, std::uint64_t seed,
                          RewardConfig reward) {
  if (num_pilots < 1 || num_flight_types < 1 || hidden < 1) {
    throw std::invalid_argument("policy dimensions must be positive");
  }
  check_reward_config(reward);
  PolicyWeights w;
  w.num_pilots = num_pilots;
  w.num_flight_types = num_flight_types;
  w.hidden = hidden;
  w.reward = reward;
  w.seed = seed;
  std::mt19937_64 rng(derive_seed(seed, "policy-init"));
  w.trunk1 = make_layer(hidden, w.input_size(), 1.0, rng);
  w.trunk2 = make_layer(hidden, hidden, 1.0, rng);
  w.actor = make_layer(num_pilots, hidden, 0.01, rng);
  w.critic = make_layer(1, hidden, 1.0, rng);
  return w;
}

void check_weights(const PolicyWeights& w) {
  if (w.num_pilots < 1 || w.num_flight_types < 1 || w.hidden < 1) {
    throw std::invalid_argument("policy dimensions must be positive");
  }
  check_layer(w.trunk1, w.hidden, w.input_size(), "trunk1");
  check_layer(w.trunk2, w.hidden, w.hidden, "trunk2");
  check_layer(w.actor, w.num_pilots, w.hidden, "actor");
  check_layer(w.critic, 1, w.hidden, "critic");
  check_reward_config(w.reward);
}

void check_compatible(const PolicyWeights& w, const ScheduleInstance& inst) {
  if (w.num_pilots != inst.num_pilots()) {
    throw std::invalid_argument("network was trained for " + std::to_string(w.num_pilots) +
                                " pilots, instance has " + std::to_string(inst.num_pilots()));
  }
  if (w.num_flight_types != inst.num_flight_types) {
    throw std::invalid_argument("network was trained for " + std::to_string(w.num_flight_types) +
                                " flight types, instance has " +
                                std::to_string(inst.num_flight_types));
  }
}

std::uint64_t weights_hash(const PolicyWeights& w) {
  std::string bytes;
  for (const DenseLayer* l : w.layers()) {
    bytes.append(reinterpret_cast<const char*>(l->w.data()), l->w.size() * sizeof(double));
    bytes.append(reinterpret_cast<const char*>(l->b.data()), l->b.size() * sizeof(double));
  }
  return fnv1a64(bytes);
}

BatchForward forward_batch(const PolicyWeights& w, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& mask) {
  BatchForward f;
  f.x = x;
  f.mask = mask;
  f.h1 = ((w.trunk1.w * x).colwise() + w.trunk1.b).array().tanh().matrix();
  f.h2 = ((w.trunk2.w * f.h1).colwise() + w.trunk2.b).array().tanh().matrix();
  const Eigen::MatrixXd logits = (w.actor.w * f.h2).colwise() + w.actor.b;
  f.probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    masked_softmax(logits.col(c), mask.col(c), f.probs.col(c));
  }
  f.values = ((w.critic.w * f.h2).colwise() + w.critic.b).row(0).transpose();
  return f;
}

PolicyOutput policy_forward(const PolicyWeights& w, const Observation& obs) {
  if (static_cast<int>(obs.features.size()) != w.input_size() ||
      static_cast<int>(obs.mask.size()) != w.num_pilots) {
    throw std::invalid_argument("observation does not match the network input");
  }
  const Eigen::Map<const Eigen::VectorXd> x(obs.features.data(), obs.features.size());
  Eigen::VectorXd mask(w.num_pilots);
  for (int i = 0; i < w.num_pilots; ++i) mask[i] = obs.mask[i];
  const Eigen::VectorXd h1 = (w.trunk1.w * x + w.trunk1.b).array().tanh().matrix();
  const Eigen::VectorXd h2 = (w.trunk2.w * h1 + w.trunk2.b).array().tanh().matrix();
  PolicyOutput out;
  out.logits = w.actor.w * h2 + w.actor.b;
  out.value = (w.critic.w * h2 + w.critic.b)[0];
  out.probs.resize(w.num_pilots);
  out.empty = mask.sum() == 0.0;
  if (out.empty) {
    out.probs.setZero();
  } else {
    masked_softmax(out.logits, mask, out.probs);
  }
  return out;
}

PolicyGradients PolicyGradients::zeros_like(const PolicyWeights& w) {
  PolicyGradients g;
  auto dst = g.layers();
  auto src = w.layers();
  for (size_t k = 0; k < dst.size(); ++k) {
    dst[k]->w = Eigen::MatrixXd::Zero(src[k]->w.rows(), src[k]->w.cols());
    dst[k]->b = Eigen::VectorXd::Zero(src[k]->b.size());
  }
  return g;
}

double PolicyGradients::norm() const {
  double s = 0.0;
  for (const DenseLayer* l : layers()) s += l->w.squaredNorm() + l->b.squaredNorm();
  return std::sqrt(s);
}

void PolicyGradients::scale(double s) {
  for (DenseLayer* l : layers()) {
    l->w *= s;
    l->b *= s;
  }
}

void backward_batch(const PolicyWeights& w, const BatchForward& fwd,
                    const Eigen::MatrixXd& dlogits, const Eigen::VectorXd& dvalues,
                    PolicyGradients& g) {
  const Eigen::MatrixXd dz = dlogits.cwiseProduct(fwd.mask);
  g.actor.w.noalias() += dz * fwd.h2.transpose();
  g.actor.b += dz.rowwise().sum();
  const Eigen::RowVectorXd dv = dvalues.transpose();
  g.critic.w.noalias() += dv * fwd.h2.transpose();
  g.critic.b[0] += dv.sum();

  Eigen::MatrixXd dh2 = w.actor.w.transpose() * dz + w.critic.w.transpose() * dv;
  dh2.array() *= 1.0 - fwd.h2.array().square();
  g.trunk2.w.noalias() += dh2 * fwd.h1.transpose();
  g.trunk2.b += dh2.rowwise().sum();
  Eigen::MatrixXd dh1 = w.trunk2.w.transpose() * dh2;
  dh1.array() *= 1.0 - fwd.h1.array().square();
  g.trunk1.w.noalias() += dh1 * fwd.x.transpose();
  g.trunk1.b += dh1.rowwise().sum();
}

double log_prob(const BatchForward& fwd, int col, int action) {
  return std::log(fwd.probs(action, col));
}

double entropy(const BatchForward& fwd, int col) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < fwd.probs.rows(); ++k) {
    const double p = fwd.probs(k, col);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

int sample_action(const Eigen::VectorXd& probs, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int last = -1;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    acc += probs[k];
    last = static_cast<int>(k);
    if (u < acc) return last;
  }
  return last;  // rounding left u past the final cumulative sum
}

int greedy_action(const Eigen::VectorXd& probs) {
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return static_cast<int>(best);
}

Schedule rl_schedule(const PolicyWeights& w, const ScheduleInstance& inst, RolloutMode mode,
                     std::uint64_t seed) {
  check_compatible(w, inst);
  SchedulingEnv env(inst, w.reward);
  std::mt19937_64 rng(seed);
  while (!env.done()) {
    const PolicyOutput out = policy_forward(w, env.observation());
    const int a = mode == RolloutMode::kGreedy ? greedy_action(out.probs)
                                               : sample_action(out.probs, rng);
    env.step(a);
  }
  return env.schedule();
}

}  // namespace crew
