#include "crew/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "crew/domain.hpp"
#include "crew/env.hpp"
#include "crew/generator.hpp"
#include "crew/ip_models.hpp"
#include "crew/milp.hpp"
#include "crew/oracle.hpp"
#include "crew/policy.hpp"
#include "crew/seeds.hpp"

namespace crew {
namespace {

// Two-slot flights over a shared qualification; spans are (start, end).
ScheduleInstance tiny_instance(int pilots, const std::vector<std::pair<int, int>>& spans,
                               int horizon) {
  ScheduleInstance inst;
  for (int i = 0; i < pilots; ++i) inst.pilots.push_back({i, {0}, {}});
  for (int f = 0; f < static_cast<int>(spans.size()); ++f) {
    Flight fl;
    fl.id = f;
    fl.start_day = spans[f].first;
    fl.end_day = spans[f].second;
    for (int k = 0; k < 2; ++k) {
      const int s = static_cast<int>(inst.slots.size());
      inst.slots.push_back({s, f, 0});
      fl.slots.push_back(s);
    }
    inst.flights.push_back(fl);
  }
  inst.horizon_days = horizon;
  inst.training_matrix.assign(pilots, std::vector<int>(spans.size(), 0));
  inst.trq_flags.assign(spans.size(), {false, false});
  return inst;
}

struct Failures {
  std::ostringstream os;
  int count = 0;
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (count++) os << "; ";
    os << what;
  }
};

double rel_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
  return std::abs(analytic - numeric) / scale;
}

}  // namespace

CheckResult check_solver_oracle(int instances, std::uint64_t seed) {
  CheckResult out{"solver matches enumeration", true, ""};
  std::mt19937_64 rng(seed);
  int mismatches = 0, infeasible = 0;
  for (int k = 0; k < instances; ++k) {
    const IpInstance ip = random_ip(rng);
    const BruteForce truth = brute_force(ip);
    const SolveResult r = solve(ip, std::chrono::duration<double>(10.0));
    bool ok;
    if (!truth.feasible) {
      ++infeasible;
      ok = r.status == SolveStatus::kInfeasible;
    } else {
      ok = r.status == SolveStatus::kOptimal && r.objective_value == truth.best &&
           satisfies_all(ip, r.values);
    }
    if (!ok) ++mismatches;
  }
  out.pass = mismatches == 0;
  out.detail = std::to_string(instances) + " programs, " + std::to_string(infeasible) +
               " infeasible, " + std::to_string(mismatches) + " mismatches";
  return out;
}

CheckResult check_unit_values() {
  Failures f;
  f.expect(buffer_days(1, 5) == 3, "buffer_days(1,5) != 3");
  f.expect(buffer_days(1, 7) == 5, "buffer_days(1,7) != 5");
  f.expect(penalty(0, 4) == -1.0, "penalty(0,4) != -1");
  f.expect(std::abs(penalty(4, 4) + 0.2) <= 1e-12, "penalty(4,4) != -0.2");

  RewardConfig cfg;  // T = 7
  {
    // Flight 0 on days 0-1, flight 1 on day 7: the second leg of either pilot
    // sits five clear days after the first and earns 5 + 1.
    const ScheduleInstance inst = tiny_instance(2, {{0, 1}, {7, 7}}, 8);
    SchedulingEnv env(inst, cfg);
    const double first = env.step(0).reward;
    f.expect(first == 6.0, "first-ever assignment reward != T-1");
    env.step(1);
    f.expect(env.placement_reward(0, env.observation().slot) == 6.0,
             "day-1/day-7 placement reward != 6");
    env.step(0);
    const StepResult last = env.step(1);
    f.expect(last.done && env.complete(), "episode not complete after the last slot");
    f.expect(last.reward == 6.0 + 25.0, "final step reward != 6 + 25");
  }
  {
    // Overlapping flights with two pilots: the second flight has nobody left.
    const ScheduleInstance inst = tiny_instance(2, {{0, 1}, {1, 2}}, 7);
    SchedulingEnv env(inst, cfg);
    env.step(0);
    const StepResult r = env.step(1);
    f.expect(r.done && !env.complete(), "dead end did not terminate");
    f.expect(r.reward == 6.0 - 10.0, "dead-end step reward != 6 - 10");
  }
  return {"unit values", f.count == 0, f.count ? f.os.str() : "all exact"};
}

GradientCheckResult check_gradients(const GradientCheckOptions& opts) {
  GradientCheckResult out;
  out.result.name = "gradients match finite differences";
  const DatasetProfile profile = default_desk_profile();
  PolicyWeights w = init_policy(static_cast<int>(profile.pilot_roster.size()),
                                profile.num_flight_types(), opts.hidden,
                                derive_seed(opts.seed, "gradcheck-init"));
  // The default actor head is near zero; widen it so the softmax is not flat.
  w.actor.w *= 100.0;
  std::mt19937_64 rng(derive_seed(opts.seed, "gradcheck"));
  std::normal_distribution<double> bias(0.0, 1.0);
  for (Eigen::Index k = 0; k < w.actor.b.size(); ++k) w.actor.b[k] = bias(rng);
  std::vector<Observation> observations;
  for (int k = 0; static_cast<int>(observations.size()) < opts.observations; ++k) {
    const ScheduleInstance inst =
        generate_instance(profile, {1.0, 1, derive_seed(opts.seed, "gradcheck-instance", k)});
    SchedulingEnv env(inst, w.reward);
    std::uniform_int_distribution<int> stop(0, std::max(0, inst.num_slots() - 1));
    const int steps = stop(rng);
    for (int s = 0; s < steps && !env.done(); ++s) {
      const auto& mask = env.observation().mask;
      std::vector<int> avail;
      for (int i = 0; i < static_cast<int>(mask.size()); ++i) {
        if (mask[i]) avail.push_back(i);
      }
      env.step(avail[rng() % avail.size()]);
    }
    if (!env.done() && env.observation().any_available()) observations.push_back(env.observation());
  }

  const double h = 1e-6;
  for (const Observation& obs : observations) {
    Eigen::MatrixXd x(w.input_size(), 1), mask(w.num_pilots, 1);
    for (int k = 0; k < w.input_size(); ++k) x(k, 0) = obs.features[k];
    std::vector<int> avail;
    for (int i = 0; i < w.num_pilots; ++i) {
      mask(i, 0) = obs.mask[i];
      if (obs.mask[i]) avail.push_back(i);
    }
    const int action = avail[rng() % avail.size()];
    const BatchForward fwd = forward_batch(w, x, mask);

    PolicyGradients actor = PolicyGradients::zeros_like(w);
    Eigen::MatrixXd dlogits = -fwd.probs;
    dlogits(action, 0) += 1.0;
    backward_batch(w, fwd, dlogits, Eigen::VectorXd::Zero(1), actor);
    PolicyGradients critic = PolicyGradients::zeros_like(w);
    backward_batch(w, fwd, Eigen::MatrixXd::Zero(w.num_pilots, 1), Eigen::VectorXd::Ones(1),
                   critic);

    auto objective = [&](bool value) {
      const PolicyOutput o = policy_forward(w, obs);
      return value ? o.value : std::log(o.probs[action]);
    };
    auto probe = [&](double& param, double g_actor, double g_critic) {
      const double saved = param;
      param = saved + h;
      const double la = objective(false), va = objective(true);
      param = saved - h;
      const double lb = objective(false), vb = objective(true);
      param = saved;
      out.worst_actor = std::max(out.worst_actor, rel_error(g_actor, (la - lb) / (2 * h)));
      out.worst_critic = std::max(out.worst_critic, rel_error(g_critic, (va - vb) / (2 * h)));
      ++out.probes;
    };

    auto layers = w.layers();
    auto ga = actor.layers();
    auto gc = critic.layers();
    for (size_t l = 0; l < layers.size(); ++l) {
      DenseLayer& L = *layers[l];
      if (opts.sample_per_layer <= 0) {
        for (Eigen::Index r = 0; r < L.w.rows(); ++r) {
          for (Eigen::Index c = 0; c < L.w.cols(); ++c) probe(L.w(r, c), ga[l]->w(r, c), gc[l]->w(r, c));
        }
        for (Eigen::Index r = 0; r < L.b.size(); ++r) probe(L.b[r], ga[l]->b[r], gc[l]->b[r]);
      } else {
        for (int k = 0; k < opts.sample_per_layer; ++k) {
          const Eigen::Index r = static_cast<Eigen::Index>(rng() % L.w.rows());
          const Eigen::Index c = static_cast<Eigen::Index>(rng() % L.w.cols());
          probe(L.w(r, c), ga[l]->w(r, c), gc[l]->w(r, c));
          const Eigen::Index rb = static_cast<Eigen::Index>(rng() % L.b.size());
          probe(L.b[rb], ga[l]->b[rb], gc[l]->b[rb]);
        }
      }
    }
  }
  out.result.pass = out.worst_actor <= opts.tolerance && out.worst_critic <= opts.tolerance;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu observations, %ld probes, worst rel err actor %.2e critic %.2e",
                observations.size(), out.probes, out.worst_actor, out.worst_critic);
  out.result.detail = buf;
  return out;
}

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(check_solver_oracle(200, derive_seed(seed, "selftest-oracle")));
  out.push_back(check_unit_values());
  GradientCheckOptions g;
  g.seed = seed;
  out.push_back(check_gradients(g).result);
  return out;
}

}  // namespace crew
