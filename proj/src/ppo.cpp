#include "crew/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "crew/seeds.hpp"

namespace crew {
namespace {

struct Sample {
  std::vector<double> features;
  std::vector<std::uint8_t> mask;
  int action = 0;
  double log_prob = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

class Adam {
 public:
  Adam(const PolicyWeights& w, double lr)
      : lr_(lr), m_(PolicyGradients::zeros_like(w)), v_(PolicyGradients::zeros_like(w)) {}

  void step(PolicyWeights& w, const PolicyGradients& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    auto params = w.layers();
    auto grads = g.layers();
    auto ms = m_.layers();
    auto vs = v_.layers();
    for (size_t k = 0; k < params.size(); ++k) {
      update(params[k]->w, grads[k]->w, ms[k]->w, vs[k]->w, c1, c2);
      update(params[k]->b, grads[k]->b, ms[k]->b, vs[k]->b, c1, c2);
    }
  }

 private:
  template <typename T>
  void update(T& p, const T& g, T& m, T& v, double c1, double c2) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
  }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-5;
  double lr_;
  int t_ = 0;
  PolicyGradients m_, v_;
};

}  // namespace

void check_train_config(const TrainConfig& c) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("invalid train config: " + m); };
  if (!(c.density > 0.0)) fail("density must be positive");
  if (c.weeks < 1) fail("weeks must be >= 1");
  if (c.total_steps < 1) fail("total_steps must be >= 1");
  if (c.hidden < 1) fail("hidden must be >= 1");
  if (!(c.clip > 0.0)) fail("clip must be positive");
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) fail("gamma must be in (0, 1]");
  if (!(c.gae_lambda >= 0.0 && c.gae_lambda <= 1.0)) fail("lambda must be in [0, 1]");
  if (!(c.learning_rate > 0.0)) fail("learning rate must be positive");
  if (c.epochs < 1 || c.batch_steps < 1 || c.minibatch < 1) fail("epochs and batch sizes must be >= 1");
  if (!(c.reward_scale > 0.0)) fail("reward_scale must be positive");
  if (c.entropy_coef < 0.0 || c.value_coef < 0.0 || !(c.max_grad_norm > 0.0)) {
    fail("coefficients must be non-negative");
  }
  check_reward_config(c.reward);
}

double ppo_policy_loss(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return -std::min(ratio * advantage, clipped * advantage);
}

std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double gamma,
                                   double lambda) {
  if (rewards.size() != values.size()) throw std::invalid_argument("rewards/values size mismatch");
  std::vector<double> adv(rewards.size());
  double running = 0.0;
  for (size_t k = rewards.size(); k-- > 0;) {
    const double next = k + 1 < values.size() ? values[k + 1] : 0.0;
    const double delta = rewards[k] + gamma * next - values[k];
    running = delta + gamma * lambda * running;
    adv[k] = running;
  }
  return adv;
}

TrainResult train_ppo(const DatasetProfile& profile, const TrainConfig& cfg,
                      const std::function<void(const TrainLogRow&)>& on_batch) {
  check_profile(profile);
  check_train_config(cfg);
  const int P = static_cast<int>(profile.pilot_roster.size());
  TrainResult result;
  result.weights = init_policy(P, profile.num_flight_types(), cfg.hidden, cfg.seed, cfg.reward);
  result.weights.train_density = cfg.density;
  PolicyWeights& w = result.weights;
  const int I = w.input_size();
  Adam adam(w, cfg.learning_rate);
  std::mt19937_64 action_rng(derive_seed(cfg.seed, "train-actions"));
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, "train-minibatch"));

  std::int64_t steps = 0;
  std::int64_t episodes = 0;
  while (steps < cfg.total_steps) {
    // Collect whole episodes until the batch is full.
    std::vector<Sample> batch;
    int batch_episodes = 0;
    int batch_complete = 0;
    double batch_return = 0.0;
    while (static_cast<int>(batch.size()) < cfg.batch_steps) {
      const ScheduleInstance inst = generate_instance(
          profile, {cfg.density, cfg.weeks, derive_seed(cfg.seed, "train-instance", episodes)});
      ++episodes;
      SchedulingEnv env(inst, cfg.reward);
      std::vector<double> rewards, values;
      const size_t first = batch.size();
      while (!env.done()) {
        const Observation& obs = env.observation();
        const PolicyOutput out = policy_forward(w, obs);
        const int a = sample_action(out.probs, action_rng);
        Sample s;
        s.features = obs.features;
        s.mask = obs.mask;
        s.action = a;
        s.log_prob = std::log(out.probs[a]);
        batch.push_back(std::move(s));
        values.push_back(out.value);
        rewards.push_back(cfg.reward_scale * env.step(a).reward);
      }
      const std::vector<double> adv = gae_advantages(rewards, values, cfg.gamma, cfg.gae_lambda);
      for (size_t k = 0; k < adv.size(); ++k) {
        batch[first + k].advantage = adv[k];
        batch[first + k].ret = adv[k] + values[k];
      }
      ++batch_episodes;
      batch_complete += env.complete() ? 1 : 0;
      batch_return += env.episode_return();
    }
    steps += static_cast<std::int64_t>(batch.size());

    double mean = 0.0, sq = 0.0;
    for (const Sample& s : batch) mean += s.advantage;
    mean /= batch.size();
    for (const Sample& s : batch) sq += (s.advantage - mean) * (s.advantage - mean);
    const double sd = std::sqrt(sq / batch.size()) + 1e-8;

    TrainLogRow row;
    row.steps = steps;
    row.episodes = episodes;
    row.mean_return = batch_return / batch_episodes;
    row.completion_rate = static_cast<double>(batch_complete) / batch_episodes;
    int updates = 0;

    std::vector<int> idx(batch.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(idx.begin(), idx.end(), shuffle_rng);
      for (size_t start = 0; start < idx.size(); start += cfg.minibatch) {
        const int B = static_cast<int>(std::min<size_t>(cfg.minibatch, idx.size() - start));
        Eigen::MatrixXd x(I, B), mask(P, B);
        for (int c = 0; c < B; ++c) {
          const Sample& s = batch[idx[start + c]];
          x.col(c) = Eigen::Map<const Eigen::VectorXd>(s.features.data(), I);
          for (int i = 0; i < P; ++i) mask(i, c) = s.mask[i];
        }
        const BatchForward fwd = forward_batch(w, x, mask);
        Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(P, B);
        Eigen::VectorXd dvalues(B);
        double pl = 0.0, vl = 0.0, ent = 0.0;
        for (int c = 0; c < B; ++c) {
          const Sample& s = batch[idx[start + c]];
          const double adv = (s.advantage - mean) / sd;
          const double lp = log_prob(fwd, c, s.action);
          const double ratio = std::exp(lp - s.log_prob);
          pl += ppo_policy_loss(ratio, adv, cfg.clip);
          const double h = entropy(fwd, c);
          ent += h;
          // d(-min(rA, clip(r)A))/dlogp is -rA while the unclipped term is the
          // active one, zero otherwise.
          const bool clipped = (adv > 0.0 && ratio > 1.0 + cfg.clip) ||
                               (adv < 0.0 && ratio < 1.0 - cfg.clip);
          const double dlogp = clipped ? 0.0 : -ratio * adv / B;
          for (int k = 0; k < P; ++k) {
            const double p = fwd.probs(k, c);
            if (mask(k, c) == 0.0) continue;
            double g = dlogp * ((k == s.action ? 1.0 : 0.0) - p);
            if (p > 0.0) g += cfg.entropy_coef * p * (std::log(p) + h) / B;
            dlogits(k, c) = g;
          }
          const double err = fwd.values[c] - s.ret;
          vl += err * err;
          dvalues[c] = cfg.value_coef * 2.0 * err / B;
        }
        if (!std::isfinite(pl) || !std::isfinite(vl) || !std::isfinite(ent)) {
          throw TrainingDiverged("non-finite loss after " + std::to_string(steps) + " steps");
        }
        PolicyGradients g = PolicyGradients::zeros_like(w);
        backward_batch(w, fwd, dlogits, dvalues, g);
        const double norm = g.norm();
        if (!std::isfinite(norm)) {
          throw TrainingDiverged("non-finite gradient after " + std::to_string(steps) + " steps");
        }
        if (norm > cfg.max_grad_norm) g.scale(cfg.max_grad_norm / norm);
        adam.step(w, g);
        row.policy_loss += pl / B;
        row.value_loss += vl / B;
        row.entropy += ent / B;
        ++updates;
      }
    }
    row.policy_loss /= updates;
    row.value_loss /= updates;
    row.entropy /= updates;
    result.log.push_back(row);
    if (on_batch) on_batch(row);
  }
  return result;
}

std::string train_log_csv(const std::vector<TrainLogRow>& log) {
  std::ostringstream os;
  os.precision(10);
  os << "steps,episodes,mean_return,completion_rate,policy_loss,value_loss,entropy\n";
  for (const TrainLogRow& r : log) {
    os << r.steps << ',' << r.episodes << ',' << r.mean_return << ',' << r.completion_rate << ','
       << r.policy_loss << ',' << r.value_loss << ',' << r.entropy << '\n';
  }
  return os.str();
}

EvalStats evaluate_policy(const PolicyWeights& w, const DatasetProfile& profile, double density,
                          int weeks, int episodes, std::uint64_t seed, RolloutMode mode) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  EvalStats stats;
  std::mt19937_64 rng(derive_seed(seed, "eval-actions"));
  for (int e = 0; e < episodes; ++e) {
    const ScheduleInstance inst =
        generate_instance(profile, {density, weeks, derive_seed(seed, "eval", e)});
    check_compatible(w, inst);
    SchedulingEnv env(inst, w.reward);
    while (!env.done()) {
      const PolicyOutput out = policy_forward(w, env.observation());
      env.step(mode == RolloutMode::kGreedy ? greedy_action(out.probs)
                                            : sample_action(out.probs, rng));
    }
    stats.mean_return += env.episode_return();
    stats.completion_rate += env.complete() ? 1.0 : 0.0;
  }
  stats.mean_return /= episodes;
  stats.completion_rate /= episodes;
  return stats;
}

}  // namespace crew
