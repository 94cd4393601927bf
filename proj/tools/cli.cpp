#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <optional>

#include "crew/disruption.hpp"
#include "crew/experiment.hpp"
#include "crew/extract.hpp"
#include "crew/generator.hpp"
#include "crew/ip_models.hpp"
#include "crew/ppo.hpp"
#include "crew/seeds.hpp"
#include "crew/selftest.hpp"
#include "crew/serialization.hpp"

namespace crew {
namespace {

// Raised for bad flag combinations found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string options_hash(const Json& options) { return hex64(fnv1a64(options.dump())); }

DatasetProfile load_profile(const std::string& path) {
  if (path.empty()) return default_desk_profile();
  return profile_from_json(artifact_body(read_json_file(path), "profile"));
}

ScheduleInstance load_instance(const std::string& path) {
  return instance_from_json(artifact_body(read_json_file(path), "instance"));
}

PolicyWeights load_weights(const std::string& path) {
  return weights_from_json(artifact_body(read_json_file(path), "weights"));
}

RolloutMode parse_mode(const std::string& s) {
  return s == "greedy" ? RolloutMode::kGreedy : RolloutMode::kSample;
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) {
    try {
      out.push_back(method_from_string(n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

struct GenArgs {
  std::string profile;
  double density = 1.0;
  int weeks = 1;
  std::uint64_t seed = 0;
  bool emit_profile = false;
  std::string out;
};

int run_gen(const GenArgs& a, std::ostream& out) {
  require(a.out, "--out");
  Json opts{{"profile", a.profile}, {"density", a.density}, {"weeks", a.weeks}, {"seed", a.seed}};
  const DatasetProfile profile = load_profile(a.profile);
  if (a.emit_profile) {
    write_json_file(a.out, make_artifact("profile", to_json(profile), options_hash(opts)));
    out << "wrote profile with " << profile.pilot_roster.size() << " pilots to " << a.out << "\n";
    return kExitOk;
  }
  const ScheduleInstance inst = generate_instance(profile, {a.density, a.weeks, a.seed});
  write_json_file(a.out, make_artifact("instance", to_json(inst), options_hash(opts)));
  out << "wrote " << inst.num_flights() << " flights, " << inst.num_slots() << " slots to "
      << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string profile;
  TrainConfig cfg;
  std::string reward = "buffer";
  std::string log;
  std::string out;
};

int run_train(TrainArgs a, std::ostream& out, std::ostream& err) {
  require(a.out, "--out");
  try {
    a.cfg.reward.variant = reward_variant_from_string(a.reward);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const DatasetProfile profile = load_profile(a.profile);
  Json opts{{"profile", a.profile},
            {"density", a.cfg.density},
            {"seed", a.cfg.seed},
            {"steps", a.cfg.total_steps},
            {"hidden", a.cfg.hidden},
            {"reward", a.reward},
            {"t_move", a.cfg.reward.t_move}};
  std::int64_t next_report = 0;
  const TrainResult r = train_ppo(profile, a.cfg, [&](const TrainLogRow& row) {
    if (row.steps < next_report) return;
    next_report = row.steps + a.cfg.total_steps / 20;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "steps %lld  return %.2f  complete %.2f\n",
                  static_cast<long long>(row.steps), row.mean_return, row.completion_rate);
    err << buf;
  });
  write_json_file(a.out, make_artifact("weights", to_json(r.weights), options_hash(opts)));
  if (!a.log.empty()) write_text_file(a.log, train_log_csv(r.log));
  out << "wrote weights " << hex64(weights_hash(r.weights)) << " to " << a.out << "\n";
  return kExitOk;
}

struct ExtractArgs {
  std::string weights, instance, out;
  int n = 2;
  std::uint64_t seed = 0;
  std::string mode = "sample";
};

int run_extract(const ExtractArgs& a, std::ostream& out) {
  require(a.weights, "--weights");
  require(a.instance, "--instance");
  require(a.out, "--out");
  const PolicyWeights w = load_weights(a.weights);
  const ScheduleInstance inst = load_instance(a.instance);
  const CoefficientMatrix m = a.n == 0 ? extract_blank_slate(w, inst)
                                       : extract_montecarlo(w, inst, a.n, a.seed, parse_mode(a.mode));
  Json opts{{"n", a.n}, {"seed", a.seed}, {"mode", a.mode},
            {"weights", hex64(weights_hash(w))}};
  write_json_file(a.out, make_artifact("coefficients", to_json(m), options_hash(opts)));
  out << "wrote " << m.values.size() << " coefficients (" << m.method << ") to " << a.out << "\n";
  return kExitOk;
}

struct ScheduleArgs {
  std::string instance, weights, method = "baseline", out, lp;
  int n = 2;
  int t_buffer = 4;
  int t_move = 2;
  std::uint64_t seed = 0;
  double time_limit = 60.0;
};

int run_schedule(const ScheduleArgs& a, std::ostream& out, std::ostream& err) {
  require(a.instance, "--instance");
  require(a.out, "--out");
  const Method method = parse_methods({a.method}).front();
  const ScheduleInstance inst = load_instance(a.instance);
  std::optional<PolicyWeights> w;
  if (method == Method::kNice || method == Method::kRl) {
    require(a.weights, "--weights");
    w = load_weights(a.weights);
  }
  MethodContext ctx;
  ctx.weights = w ? &*w : nullptr;
  ctx.n = a.n;
  ctx.t_buffer = a.t_buffer;
  ctx.t_move = a.t_move;
  ctx.seed = a.seed;
  ctx.time_limit = std::chrono::duration<double>(a.time_limit);
  if (!a.lp.empty()) {
    if (!is_ip_method(method)) throw UsageError("--lp needs an IP method");
    BuiltModel m;
    switch (method) {
      case Method::kBaseline: m = build_baseline_ip(inst); break;
      case Method::kBuffer: m = build_buffer_ip(inst, a.t_buffer); break;
      case Method::kMoveup: m = build_moveup_ip(inst, a.t_move); break;
      default: {
        const CoefficientMatrix c = a.n == 0 ? extract_blank_slate(*w, inst)
                                             : extract_montecarlo(*w, inst, a.n, a.seed);
        m = build_nice_ip(inst, c);
      }
    }
    write_text_file(a.lp, export_lp_text(m.ip));
  }
  const BuiltSchedule b = build_schedule(method, inst, ctx);
  if (b.infeasible) {
    err << "instance is infeasible: no schedule covers every slot\n";
    return kExitDomainError;
  }
  if (!b.schedule) {
    err << "no schedule found within " << a.time_limit << " s\n";
    return kExitDomainError;
  }
  const auto violations = validate_schedule(inst, *b.schedule);
  Json opts{{"method", a.method}, {"n", a.n}, {"t_buffer", a.t_buffer},
            {"t_move", a.t_move}, {"seed", a.seed}};
  Json body = to_json(*b.schedule);
  write_json_file(a.out, make_artifact("schedule", body, options_hash(opts)));
  out << a.method << ": " << b.schedule->assignment.size() << "/" << inst.num_slots()
      << " slots, " << violations.size() << " violations, " << b.build_seconds << " s";
  if (b.timed_out) out << " (time limit hit, best incumbent written)";
  out << "\n";
  return b.schedule->complete ? kExitOk : kExitDomainError;
}

struct DisruptArgs {
  std::string instance, schedule, out;
  double fraction = 0.5;
  int decision_day = 1;
  std::uint64_t seed = 0;
  double time_limit = 60.0;
};

int run_disrupt(const DisruptArgs& a, std::ostream& out, std::ostream& err) {
  require(a.instance, "--instance");
  require(a.schedule, "--schedule");
  const ScheduleInstance inst = load_instance(a.instance);
  const Schedule sched = schedule_from_json(artifact_body(read_json_file(a.schedule), "schedule"));
  DelayScenario scn;
  scn.fraction_delayed = a.fraction;
  scn.decision_day = a.decision_day;
  scn.seed = a.seed;
  const ScheduleInstance delayed = apply_delays(inst, scn);
  const RepairOutcome r =
      repair_schedule(delayed, sched, a.decision_day, std::chrono::duration<double>(a.time_limit));
  Json body;
  body["fraction_delayed"] = a.fraction;
  body["decision_day"] = a.decision_day;
  Json moved = Json::array();
  for (int f = 0; f < inst.num_flights(); ++f) {
    if (delayed.flights[f].start_day != inst.flights[f].start_day) {
      moved.push_back({{"flight", f}, {"delay", delayed.flights[f].start_day - inst.flights[f].start_day}});
    }
  }
  body["delayed_flights"] = moved;
  body["timed_out"] = r.timed_out;
  body["disruptions"] = r.repaired ? Json(r.disruptions) : Json(nullptr);
  if (r.repaired) body["repaired"] = to_json(*r.repaired);
  Json opts{{"fraction", a.fraction}, {"decision_day", a.decision_day}, {"seed", a.seed}};
  if (!a.out.empty()) write_json_file(a.out, make_artifact("disruption", body, options_hash(opts)));
  if (!r.repaired) {
    err << (r.timed_out ? "repair timed out\n" : "no repair exists for the delayed instance\n");
    return kExitDomainError;
  }
  out << moved.size() << " flights delayed, " << r.disruptions << " disruptions\n";
  return kExitOk;
}

int run_experiment_cmd(ExperimentConfig cfg, std::ostream& out, std::ostream& err) {
  check_experiment_config(cfg);
  const DatasetProfile profile = load_profile(cfg.profile_path);
  std::optional<PolicyWeights> w;
  for (Method m : cfg.methods) {
    if ((m == Method::kNice || m == Method::kRl) && !w) {
      require(cfg.weights_path, "--weights");
      w = load_weights(cfg.weights_path);
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  int done = 0;
  const ExperimentOutput res = run_experiment(cfg, profile, w ? &*w : nullptr, [&](int) {
    ++done;
    if (done % 10 == 0 || done == cfg.trials) {
      err << "trial " << done << "/" << cfg.trials << " ("
          << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
          << " s)\n";
    }
  });
  write_experiment(cfg, res, w ? &*w : nullptr);
  out << format_report_table(res.reports, cfg.density);
  out << "results in " << cfg.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust pilot scheduling: generators, IP models, PPO policies and disruption trials"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate an instance from a profile");
  g->add_option("--profile", gen.profile, "Profile file (default: built-in desk profile)");
  g->add_option("--density", gen.density)->check(CLI::PositiveNumber);
  g->add_option("--weeks", gen.weeks)->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed);
  g->add_flag("--emit-profile", gen.emit_profile, "Write the profile itself instead");
  g->add_option("--out", gen.out)->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a policy with PPO");
  t->add_option("--profile", train.profile);
  t->add_option("--density", train.cfg.density)->check(CLI::PositiveNumber);
  t->add_option("--seed", train.cfg.seed);
  t->add_option("--steps", train.cfg.total_steps)->check(CLI::PositiveNumber);
  t->add_option("--hidden", train.cfg.hidden)->check(CLI::PositiveNumber);
  t->add_option("--reward", train.reward)->check(CLI::IsMember({"buffer", "moveup"}));
  t->add_option("--t-move", train.cfg.reward.t_move);
  t->add_option("--log", train.log, "Training log CSV");
  t->add_option("--out", train.out)->required();

  ExtractArgs ex;
  auto* e = app.add_subcommand("extract", "Extract NICE coefficients from a policy");
  e->add_option("--weights", ex.weights)->required();
  e->add_option("--instance", ex.instance)->required();
  e->add_option("--n", ex.n, "Rollouts; 0 = blank slate")->check(CLI::NonNegativeNumber);
  e->add_option("--seed", ex.seed);
  e->add_option("--extraction", ex.mode)->check(CLI::IsMember({"sample", "greedy"}));
  e->add_option("--out", ex.out)->required();

  ScheduleArgs sc;
  auto* s = app.add_subcommand("schedule", "Build a schedule with one method");
  s->add_option("--instance", sc.instance)->required();
  s->add_option("--method", sc.method)->check(CLI::IsMember({"baseline", "buffer", "moveup", "nice", "rl"}));
  s->add_option("--weights", sc.weights);
  s->add_option("--n", sc.n)->check(CLI::NonNegativeNumber);
  s->add_option("--t-buffer", sc.t_buffer)->check(CLI::NonNegativeNumber);
  s->add_option("--t-move", sc.t_move)->check(CLI::NonNegativeNumber);
  s->add_option("--seed", sc.seed);
  s->add_option("--time-limit-secs", sc.time_limit)->check(CLI::PositiveNumber);
  s->add_option("--lp", sc.lp, "Also write the IP in LP format");
  s->add_option("--out", sc.out)->required();

  DisruptArgs di;
  auto* d = app.add_subcommand("disrupt", "Delay flights and repair a schedule");
  d->add_option("--instance", di.instance)->required();
  d->add_option("--schedule", di.schedule)->required();
  d->add_option("--fraction-delayed", di.fraction)->check(CLI::Range(0.0, 1.0));
  d->add_option("--decision-day", di.decision_day);
  d->add_option("--seed", di.seed);
  d->add_option("--time-limit-secs", di.time_limit)->check(CLI::PositiveNumber);
  d->add_option("--out", di.out);

  ExperimentConfig xc;
  std::string config_path;
  std::vector<std::string> xmethods;
  auto* x = app.add_subcommand("experiment", "Run disruption trials and write the report");
  x->add_option("--config", config_path, "JSON config or manifest; flags override it");
  auto* o_profile = x->add_option("--profile", xc.profile_path);
  auto* o_weights = x->add_option("--weights", xc.weights_path);
  auto* o_density = x->add_option("--density", xc.density)->check(CLI::PositiveNumber);
  auto* o_weeks = x->add_option("--weeks", xc.weeks)->check(CLI::PositiveNumber);
  auto* o_trials = x->add_option("--trials", xc.trials);
  auto* o_method = x->add_option("--method", xmethods)->delimiter(',');
  auto* o_frac = x->add_option("--fraction-delayed", xc.fractions)->delimiter(',');
  auto* o_tl = x->add_option("--time-limit-secs", xc.time_limit_secs);
  auto* o_n = x->add_option("--n", xc.n);
  auto* o_tb = x->add_option("--t-buffer", xc.t_buffer);
  auto* o_tm = x->add_option("--t-move", xc.t_move);
  auto* o_seed = x->add_option("--seed", xc.seed);
  auto* o_jobs = x->add_option("--jobs", xc.jobs);
  auto* o_out = x->add_option("--out", xc.out_dir);

  std::uint64_t selftest_seed = 0;
  auto* st = app.add_subcommand("selftest", "Solver oracle, exact reward values, gradient checks");
  st->add_option("--seed", selftest_seed);

  std::vector<std::string> argv_store = {"crew"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*g) return run_gen(gen, out);
    if (*t) return run_train(train, out, err);
    if (*e) return run_extract(ex, out);
    if (*s) return run_schedule(sc, out, err);
    if (*d) return run_disrupt(di, out, err);
    if (*x) {
      ExperimentConfig cfg = xc;
      if (!config_path.empty()) {
        Json j = read_json_file(config_path);
        // A manifest carries the config it was produced from.
        if (j.contains("kind")) j = artifact_body(j, "manifest").at("config");
        cfg = experiment_config_from_json(j);
        if (o_profile->count()) cfg.profile_path = xc.profile_path;
        if (o_weights->count()) cfg.weights_path = xc.weights_path;
        if (o_density->count()) cfg.density = xc.density;
        if (o_weeks->count()) cfg.weeks = xc.weeks;
        if (o_trials->count()) cfg.trials = xc.trials;
        if (o_frac->count()) cfg.fractions = xc.fractions;
        if (o_tl->count()) cfg.time_limit_secs = xc.time_limit_secs;
        if (o_n->count()) cfg.n = xc.n;
        if (o_tb->count()) cfg.t_buffer = xc.t_buffer;
        if (o_tm->count()) cfg.t_move = xc.t_move;
        if (o_seed->count()) cfg.seed = xc.seed;
        if (o_jobs->count()) cfg.jobs = xc.jobs;
        if (o_out->count()) cfg.out_dir = xc.out_dir;
      }
      if (o_method->count()) cfg.methods = parse_methods(xmethods);
      try {
        check_experiment_config(cfg);
      } catch (const std::invalid_argument& ex_) {
        throw UsageError(ex_.what());
      }
      return run_experiment_cmd(cfg, out, err);
    }
    if (*st) {
      bool ok = true;
      for (const CheckResult& r : run_selftest(selftest_seed)) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        ok &= r.pass;
      }
      return ok ? kExitOk : kExitDomainError;
    }
  } catch (const UsageError& ex_) {
    err << "usage error: " << ex_.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& ex_) {
    err << "error: " << ex_.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace crew
