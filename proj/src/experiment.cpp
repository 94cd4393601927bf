#include "crew/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "crew/extract.hpp"
#include "crew/ip_models.hpp"
#include "crew/milp.hpp"
#include "crew/seeds.hpp"

namespace crew {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

BuiltModel build_ip(Method m, const ScheduleInstance& inst, const MethodContext& ctx) {
  switch (m) {
    case Method::kBaseline:
      return build_baseline_ip(inst);
    case Method::kBuffer:
      return build_buffer_ip(inst, ctx.t_buffer);
    case Method::kMoveup:
      return build_moveup_ip(inst, ctx.t_move);
    case Method::kNice: {
      const CoefficientMatrix a =
          ctx.n == 0 ? extract_blank_slate(*ctx.weights, inst)
                     : extract_montecarlo(*ctx.weights, inst, ctx.n, ctx.seed, ctx.extraction_mode);
      return build_nice_ip(inst, a);
    }
    case Method::kRl:
      break;
  }
  throw std::logic_error("rl has no IP");
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string column_label(Method m) {
  switch (m) {
    case Method::kBaseline: return "Baseline IP";
    case Method::kBuffer: return "Buffer IP";
    case Method::kMoveup: return "Move-up IP";
    case Method::kNice: return "NICE";
    case Method::kRl: return "RL";
  }
  return "?";
}

std::string short_label(Method m) {
  switch (m) {
    case Method::kBaseline: return "Baseline";
    case Method::kBuffer: return "Buffer";
    case Method::kMoveup: return "Move-up";
    case Method::kNice: return "NICE";
    case Method::kRl: return "RL";
  }
  return "?";
}

std::string format_p(const Comparison& c) {
  if (!c.p_value) return "n/a";
  if (*c.p_value < 0.01) return "<0.01";
  return fmt("%.2f", *c.p_value);
}

std::string join_row(const std::vector<std::string>& cells, const std::vector<size_t>& widths) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += " | ";
    out += cells[i];
    if (i + 1 < cells.size()) out += std::string(widths[i] - cells[i].size(), ' ');
  }
  return out + "\n";
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::kBaseline: return "baseline";
    case Method::kBuffer: return "buffer";
    case Method::kMoveup: return "moveup";
    case Method::kNice: return "nice";
    case Method::kRl: return "rl";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  for (Method m : all_methods()) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown method '" + s + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> kAll = {Method::kBaseline, Method::kBuffer, Method::kMoveup,
                                           Method::kNice, Method::kRl};
  return kAll;
}

bool is_ip_method(Method m) { return m != Method::kRl; }

BuiltSchedule build_schedule(Method m, const ScheduleInstance& inst, const MethodContext& ctx) {
  if ((m == Method::kNice || m == Method::kRl) && ctx.weights == nullptr) {
    throw std::invalid_argument(to_string(m) + " needs policy weights");
  }
  BuiltSchedule out;
  const auto t0 = Clock::now();
  if (m == Method::kRl) {
    out.schedule = rl_schedule(*ctx.weights, inst, RolloutMode::kGreedy);
    out.build_seconds = seconds_since(t0);
    return out;
  }
  BuiltModel model;
  try {
    model = build_ip(m, inst, ctx);
  } catch (const StructurallyInfeasible&) {
    out.infeasible = true;
    out.build_seconds = seconds_since(t0);
    return out;
  }
  out.ip_vars = model.ip.num_vars;
  out.ip_rows = static_cast<int>(model.ip.constraints.size());
  const std::chrono::duration<double> left = ctx.time_limit - (Clock::now() - t0);
  const auto remaining = std::max(left, std::chrono::duration<double>(1e-3));
  const SolveResult r = solve(model.ip, remaining);
  out.build_seconds = seconds_since(t0);
  out.infeasible = r.status == SolveStatus::kInfeasible;
  out.timed_out = r.status == SolveStatus::kFeasibleIncumbent ||
                  r.status == SolveStatus::kTimeoutNoIncumbent;
  if (r.has_solution()) out.schedule = decode(model.catalog, r);
  return out;
}

TrialSchedules build_trial_schedules(const std::vector<Method>& methods,
                                     const ScheduleInstance& inst, const MethodContext& ctx) {
  TrialSchedules ts;
  ts.methods = methods;
  for (Method m : methods) {
    BuiltSchedule b = build_schedule(m, inst, ctx);
    if (is_ip_method(m) && b.infeasible) ts.instance_infeasible = true;
    ts.built.emplace(m, std::move(b));
    // Once one IP proves infeasibility the others would only burn time.
    if (ts.instance_infeasible) break;
  }
  for (Method m : methods) {
    auto it = ts.built.find(m);
    if (ts.instance_infeasible) {
      ts.skip_reason[m] = "infeasible";
    } else if (it->second.timed_out) {
      ts.skip_reason[m] = "build_timeout";
    } else if (!it->second.schedule || !it->second.schedule->complete) {
      ts.skip_reason[m] = m == Method::kRl ? "rl_incomplete" : "no_schedule";
    }
  }
  return ts;
}

std::vector<TrialResult> evaluate_trial(const TrialSchedules& schedules,
                                        const ScheduleInstance& inst, const DelayScenario& scn,
                                        const MethodContext& ctx, int trial) {
  const ScheduleInstance delayed = apply_delays(inst, scn);
  std::vector<TrialResult> out;
  for (Method m : schedules.methods) {
    TrialResult r;
    r.method = m;
    r.trial = trial;
    r.fraction = scn.fraction_delayed;
    auto it = schedules.built.find(m);
    if (it != schedules.built.end()) {
      r.build_seconds = it->second.build_seconds;
      r.timed_out = it->second.timed_out;
    }
    auto skip = schedules.skip_reason.find(m);
    if (skip != schedules.skip_reason.end()) {
      r.skipped = true;
      r.reason = skip->second;
      out.push_back(r);
      continue;
    }
    const RepairOutcome rep =
        repair_schedule(delayed, *it->second.schedule, scn.decision_day, ctx.time_limit);
    if (!rep.repaired) {
      r.skipped = true;
      r.timed_out = rep.timed_out;
      r.reason = rep.timed_out ? "repair_timeout" : "repair_infeasible";
    } else {
      r.disruptions = rep.disruptions;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<TrialResult> run_trial(const std::vector<Method>& methods,
                                   const ScheduleInstance& inst, const DelayScenario& scn,
                                   const MethodContext& ctx, int trial) {
  return evaluate_trial(build_trial_schedules(methods, inst, ctx), inst, scn, ctx, trial);
}

const MethodSummary* DisruptionReport::find(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return &s;
  }
  return nullptr;
}

const Comparison* DisruptionReport::find(Method a, Method b) const {
  for (const auto& c : comparisons) {
    if (c.a == a && c.b == b) return &c;
  }
  return nullptr;
}

DisruptionReport summarize(const std::vector<TrialResult>& results,
                           const std::vector<Method>& methods, double fraction, int trials) {
  DisruptionReport rep;
  rep.fraction = fraction;
  rep.trials = trials;
  std::map<Method, std::map<int, double>> by_trial;
  for (Method m : methods) {
    MethodSummary s;
    s.method = m;
    std::vector<double> d, build;
    for (const TrialResult& r : results) {
      if (r.method != m || r.fraction != fraction) continue;
      if (r.timed_out) ++s.timeouts;
      if (r.reason != "infeasible") build.push_back(r.build_seconds);
      if (r.skipped) {
        ++s.skipped;
        continue;
      }
      d.push_back(r.disruptions);
      by_trial[m][r.trial] = r.disruptions;
    }
    s.count = static_cast<int>(d.size());
    s.mean = mean_of(d);
    s.sd = sd_of(d);
    s.mean_build_seconds = mean_of(build);
    s.median_build_seconds = median_of(build);
    rep.methods.push_back(s);
  }

  if (std::find(methods.begin(), methods.end(), Method::kNice) == methods.end()) return rep;
  const auto& nice = by_trial[Method::kNice];
  for (Method other : methods) {
    if (other == Method::kNice) continue;
    Comparison c;
    c.a = Method::kNice;
    c.b = other;
    c.paired = other == Method::kBaseline;
    std::vector<double> a, b;
    const auto& theirs = by_trial[other];
    if (c.paired) {
      for (const auto& [t, v] : nice) {
        auto it = theirs.find(t);
        if (it == theirs.end()) continue;
        a.push_back(v);
        b.push_back(it->second);
      }
    } else {
      for (const auto& [t, v] : nice) a.push_back(v);
      for (const auto& [t, v] : theirs) b.push_back(v);
    }
    c.count_a = static_cast<int>(a.size());
    c.count_b = static_cast<int>(b.size());
    if (a.size() < 2 || b.size() < 2) {
      c.note = "too few samples";
    } else {
      try {
        c.p_value = c.paired ? paired_t_test(a, b) : welch_t_test(a, b);
      } catch (const DegenerateSample&) {
        c.note = "zero variance";
      }
    }
    rep.comparisons.push_back(c);
  }
  return rep;
}

std::optional<double> disruption_ratio(const std::vector<TrialResult>& results) {
  std::map<int, double> nice, base;
  for (const TrialResult& r : results) {
    if (r.skipped) continue;
    if (r.method == Method::kNice) nice[r.trial] = r.disruptions;
    if (r.method == Method::kBaseline) base[r.trial] = r.disruptions;
  }
  double sn = 0.0, sb = 0.0;
  int k = 0;
  for (const auto& [t, v] : nice) {
    auto it = base.find(t);
    if (it == base.end()) continue;
    sn += v;
    sb += it->second;
    ++k;
  }
  if (k == 0 || sb == 0.0) return std::nullopt;
  return sn / sb;
}

Selection select_model(const std::vector<ModelCandidate>& candidates,
                       const DatasetProfile& profile, const SelectionConfig& cfg) {
  if (candidates.empty()) throw std::invalid_argument("select_model needs candidates");
  for (const auto& c : candidates) {
    if (c.weights == nullptr) throw std::invalid_argument("candidate without weights");
  }
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");

  std::vector<std::vector<TrialResult>> per_candidate(candidates.size());
  for (int t = 0; t < cfg.trials; ++t) {
    const ScheduleInstance inst =
        generate_instance(profile, {cfg.density, cfg.weeks, derive_seed(cfg.seed, "instance", t)});
    DelayScenario scn;
    scn.fraction_delayed = cfg.fraction;
    scn.seed = derive_seed(cfg.seed, "delays", t);
    MethodContext ctx;
    ctx.time_limit = cfg.time_limit;
    ctx.seed = derive_seed(cfg.seed, "rollouts", t);
    // The baseline does not depend on the candidate; build and repair it once.
    const TrialSchedules base = build_trial_schedules({Method::kBaseline}, inst, ctx);
    const TrialResult base_result = evaluate_trial(base, inst, scn, ctx, t).front();
    for (size_t c = 0; c < candidates.size(); ++c) {
      ctx.weights = candidates[c].weights;
      ctx.n = candidates[c].n;
      TrialSchedules ts = base;
      ts.methods = {Method::kBaseline, Method::kNice};
      if (!base.instance_infeasible) {
        BuiltSchedule b = build_schedule(Method::kNice, inst, ctx);
        if (b.infeasible) {
          ts.instance_infeasible = true;
        } else if (b.timed_out) {
          ts.skip_reason[Method::kNice] = "build_timeout";
        } else if (!b.schedule || !b.schedule->complete) {
          ts.skip_reason[Method::kNice] = "no_schedule";
        }
        ts.built.emplace(Method::kNice, std::move(b));
      }
      if (ts.instance_infeasible) {
        ts.skip_reason[Method::kBaseline] = "infeasible";
        ts.skip_reason[Method::kNice] = "infeasible";
      }
      TrialSchedules nice_only = ts;
      nice_only.methods = {Method::kNice};
      TrialResult nice_result = evaluate_trial(nice_only, inst, scn, ctx, t).front();
      TrialResult b = base_result;
      if (ts.instance_infeasible) {
        b.skipped = true;
        b.reason = "infeasible";
      }
      per_candidate[c].push_back(b);
      per_candidate[c].push_back(nice_result);
    }
  }

  Selection sel;
  std::vector<std::pair<double, int>> groups;  // (training density, n) in first-seen order
  std::vector<std::vector<int>> members;
  for (size_t c = 0; c < candidates.size(); ++c) {
    CandidateScore s;
    s.index = static_cast<int>(c);
    s.density = candidates[c].weights->train_density;
    s.n = candidates[c].n;
    s.r = disruption_ratio(per_candidate[c]);
    if (!s.r) {
      sel.warnings.push_back("candidate " + std::to_string(c) + " excluded: ratio undefined");
    } else {
      auto key = std::make_pair(s.density, s.n);
      auto it = std::find(groups.begin(), groups.end(), key);
      if (it == groups.end()) {
        groups.push_back(key);
        members.emplace_back();
        it = groups.end() - 1;
      }
      members[it - groups.begin()].push_back(s.index);
    }
    sel.scores.push_back(s);
  }
  if (groups.empty()) throw std::invalid_argument("no candidate has a defined disruption ratio");

  double best = std::numeric_limits<double>::infinity();
  int best_group = -1;
  for (size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> rs;
    for (int c : members[g]) rs.push_back(*sel.scores[c].r);
    const double med = median_of(rs);
    if (med < best) {
      best = med;
      best_group = static_cast<int>(g);
    }
  }
  double closest = std::numeric_limits<double>::infinity();
  for (int c : members[best_group]) {
    const double dist = std::abs(*sel.scores[c].r - best);
    if (dist < closest) {
      closest = dist;
      sel.index = c;
    }
  }
  sel.density = groups[best_group].first;
  sel.n = groups[best_group].second;
  sel.median_r = best;
  return sel;
}

void check_experiment_config(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(cfg.density > 0.0)) throw std::invalid_argument("density must be positive");
  if (cfg.weeks < 1) throw std::invalid_argument("weeks must be >= 1");
  if (cfg.fractions.empty()) throw std::invalid_argument("at least one delay fraction is needed");
  for (double f : cfg.fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("delay fractions must be in (0, 1]");
  }
  if (cfg.methods.empty()) throw std::invalid_argument("at least one method is needed");
  for (size_t i = 0; i < cfg.methods.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (cfg.methods[i] == cfg.methods[j]) throw std::invalid_argument("duplicate method");
    }
  }
  if (cfg.t_buffer < 0 || cfg.t_move < 0) throw std::invalid_argument("T must be >= 0");
  if (cfg.n < 0) throw std::invalid_argument("n must be >= 0");
  if (!(cfg.time_limit_secs > 0.0)) throw std::invalid_argument("time limit must be positive");
  if (cfg.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["profile"] = cfg.profile_path;
  j["weights"] = cfg.weights_path;
  j["density"] = cfg.density;
  j["weeks"] = cfg.weeks;
  j["fraction_delayed"] = cfg.fractions;
  j["trials"] = cfg.trials;
  Json methods = Json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  j["method"] = methods;
  j["t_buffer"] = cfg.t_buffer;
  j["t_move"] = cfg.t_move;
  j["n"] = cfg.n;
  j["extraction"] = cfg.extraction_mode == RolloutMode::kGreedy ? "greedy" : "sample";
  j["time_limit_secs"] = cfg.time_limit_secs;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["out"] = cfg.out_dir;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("experiment config must be an object");
  ExperimentConfig cfg;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "profile") cfg.profile_path = v.get<std::string>();
      else if (key == "weights") cfg.weights_path = v.get<std::string>();
      else if (key == "density") cfg.density = v.get<double>();
      else if (key == "weeks") cfg.weeks = v.get<int>();
      else if (key == "fraction_delayed") cfg.fractions = v.get<std::vector<double>>();
      else if (key == "trials") cfg.trials = v.get<int>();
      else if (key == "method") {
        cfg.methods.clear();
        for (const auto& m : v) cfg.methods.push_back(method_from_string(m.get<std::string>()));
      } else if (key == "t_buffer") cfg.t_buffer = v.get<int>();
      else if (key == "t_move") cfg.t_move = v.get<int>();
      else if (key == "n") cfg.n = v.get<int>();
      else if (key == "extraction") {
        const auto s = v.get<std::string>();
        if (s != "greedy" && s != "sample") throw FormatError("extraction must be greedy or sample");
        cfg.extraction_mode = s == "greedy" ? RolloutMode::kGreedy : RolloutMode::kSample;
      } else if (key == "time_limit_secs") cfg.time_limit_secs = v.get<double>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "jobs") cfg.jobs = v.get<int>();
      else if (key == "out") cfg.out_dir = v.get<std::string>();
      else throw FormatError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad experiment config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  try {
    check_experiment_config(cfg);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("profile");
  j.erase("weights");
  j.erase("jobs");
  j.erase("out");
  return hex64(fnv1a64(j.dump()));
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const DatasetProfile& profile,
                                const PolicyWeights* weights,
                                const std::function<void(int)>& on_trial) {
  check_experiment_config(cfg);
  for (Method m : cfg.methods) {
    if ((m == Method::kNice || m == Method::kRl) && weights == nullptr) {
      throw std::invalid_argument(to_string(m) + " needs policy weights");
    }
  }
  const int nf = static_cast<int>(cfg.fractions.size());
  std::vector<std::vector<std::vector<TrialResult>>> per_trial(
      cfg.trials, std::vector<std::vector<TrialResult>>(nf));

  auto run_one = [&](int t) {
    const ScheduleInstance inst = generate_instance(
        profile, {cfg.density, cfg.weeks, derive_seed(cfg.seed, "instance", t)});
    MethodContext ctx;
    ctx.weights = weights;
    ctx.n = cfg.n;
    ctx.extraction_mode = cfg.extraction_mode;
    ctx.t_buffer = cfg.t_buffer;
    ctx.t_move = cfg.t_move;
    ctx.time_limit = std::chrono::duration<double>(cfg.time_limit_secs);
    ctx.seed = derive_seed(cfg.seed, "rollouts", t);
    const TrialSchedules ts = build_trial_schedules(cfg.methods, inst, ctx);
    for (int k = 0; k < nf; ++k) {
      DelayScenario scn;
      scn.fraction_delayed = cfg.fractions[k];
      scn.seed = derive_seed(cfg.seed, "delays", t);
      per_trial[t][k] = evaluate_trial(ts, inst, scn, ctx, t);
    }
  };

  std::mutex progress_mu;
  auto report = [&](int t) {
    if (!on_trial) return;
    std::lock_guard<std::mutex> lock(progress_mu);
    on_trial(t);
  };
  if (cfg.jobs == 1) {
    for (int t = 0; t < cfg.trials; ++t) {
      run_one(t);
      report(t);
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (int j = 0; j < std::min(cfg.jobs, cfg.trials); ++j) {
      pool.emplace_back([&] {
        for (int t = next++; t < cfg.trials; t = next++) {
          try {
            run_one(t);
            report(t);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
            next = cfg.trials;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  ExperimentOutput out;
  for (int k = 0; k < nf; ++k) {
    std::vector<TrialResult> slice;
    for (int t = 0; t < cfg.trials; ++t) {
      slice.insert(slice.end(), per_trial[t][k].begin(), per_trial[t][k].end());
    }
    out.reports.push_back(summarize(slice, cfg.methods, cfg.fractions[k], cfg.trials));
    out.results.insert(out.results.end(), slice.begin(), slice.end());
  }
  return out;
}

std::string trials_csv(const std::vector<TrialResult>& results) {
  std::ostringstream os;
  os << "trial,fraction,method,disruptions,build_time_ms,skipped,timed_out,reason\n";
  for (const TrialResult& r : results) {
    os << r.trial << ',' << fmt("%g", r.fraction) << ',' << to_string(r.method) << ',';
    if (!r.skipped) os << r.disruptions;
    os << ',' << fmt("%.3f", r.build_seconds * 1000.0) << ',' << (r.skipped ? 1 : 0) << ','
       << (r.timed_out ? 1 : 0) << ',' << r.reason << '\n';
  }
  return os.str();
}

std::string format_report_table(const std::vector<DisruptionReport>& reports, double density) {
  if (reports.empty()) return "";
  // Column order follows the published tables: NICE first, then the others.
  std::vector<Method> shown;
  for (Method m : {Method::kNice, Method::kBaseline, Method::kRl, Method::kBuffer,
                   Method::kMoveup}) {
    bool ran = false;
    for (const auto& rep : reports) {
      const MethodSummary* s = rep.find(m);
      ran |= s != nullptr && s->count > 0;
    }
    if (ran) shown.push_back(m);
  }
  std::vector<std::string> header = {"Delayed %"};
  for (Method m : shown) header.push_back(column_label(m));
  std::vector<Method> versus;
  if (std::find(shown.begin(), shown.end(), Method::kNice) != shown.end()) {
    for (Method m : shown) {
      if (m != Method::kNice) {
        versus.push_back(m);
        header.push_back("p NICE-" + short_label(m));
      }
    }
  }
  std::vector<std::vector<std::string>> rows = {header};
  for (const auto& rep : reports) {
    std::vector<std::string> row = {fmt("%g", rep.fraction * 100.0)};
    for (Method m : shown) {
      const MethodSummary* s = rep.find(m);
      row.push_back(s && s->count > 0 ? fmt("%.2f", s->mean) + " +- " + fmt("%.2f", s->sd) : "-");
    }
    for (Method m : versus) {
      const Comparison* c = rep.find(Method::kNice, m);
      row.push_back(c ? format_p(*c) : "n/a");
    }
    rows.push_back(row);
  }
  std::vector<size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::ostringstream os;
  os << "Disruptions (mean +- sd), density " << fmt("%g", density) << ", " << reports[0].trials
     << " trials per row\n";
  for (const auto& row : rows) os << join_row(row, widths);
  os << "\nTrials used / skipped (timeouts), median build time:\n";
  for (const auto& s : reports[0].methods) {
    os << "  " << column_label(s.method) << ": " << s.count << " / " << s.skipped << " ("
       << s.timeouts << "), " << fmt("%.3f", s.median_build_seconds) << " s\n";
  }
  for (const auto& rep : reports) {
    for (const auto& s : rep.methods) {
      if (s.count == 0 && s.skipped > 0) {
        os << "  " << column_label(s.method) << " produced no usable schedule at "
           << fmt("%g", rep.fraction * 100.0) << "%\n";
      }
    }
  }
  return os.str();
}

Json to_json(const DisruptionReport& report) {
  Json j;
  j["fraction_delayed"] = report.fraction;
  j["trials"] = report.trials;
  Json methods = Json::array();
  for (const auto& s : report.methods) {
    Json m;
    m["method"] = to_string(s.method);
    m["count"] = s.count;
    m["skipped"] = s.skipped;
    m["timeouts"] = s.timeouts;
    m["mean"] = s.mean;
    m["sd"] = s.sd;
    m["mean_build_seconds"] = s.mean_build_seconds;
    m["median_build_seconds"] = s.median_build_seconds;
    methods.push_back(m);
  }
  j["methods"] = methods;
  Json comps = Json::array();
  for (const auto& c : report.comparisons) {
    Json k;
    k["a"] = to_string(c.a);
    k["b"] = to_string(c.b);
    k["test"] = c.paired ? "paired" : "welch";
    k["count_a"] = c.count_a;
    k["count_b"] = c.count_b;
    k["p_value"] = c.p_value ? Json(*c.p_value) : Json(nullptr);
    if (!c.note.empty()) k["note"] = c.note;
    comps.push_back(k);
  }
  j["comparisons"] = comps;
  return j;
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentOutput& out,
                      const PolicyWeights* weights) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string hash = config_hash(cfg);
  const std::string stamp =
      "# format_version=" + std::to_string(kFormatVersion) + " config_hash=" + hash + "\n";
  write_text_file((fs::path(cfg.out_dir) / "trials.csv").string(), stamp + trials_csv(out.results));
  write_text_file((fs::path(cfg.out_dir) / "report.txt").string(),
                  stamp + format_report_table(out.reports, cfg.density));

  Json reports = Json::array();
  for (const auto& r : out.reports) reports.push_back(to_json(r));
  write_json_file((fs::path(cfg.out_dir) / "report.json").string(),
                  make_artifact("report", reports, hash));

  Json manifest;
  manifest["config"] = to_json(cfg);
  Json seeds;
  seeds["master"] = cfg.seed;
  Json instances = Json::array();
  for (int t = 0; t < cfg.trials; ++t) instances.push_back(hex64(derive_seed(cfg.seed, "instance", t)));
  seeds["instance"] = instances;
  manifest["seeds"] = seeds;
  manifest["weights_hash"] = weights ? Json(hex64(weights_hash(*weights))) : Json(nullptr);
  manifest["version"] = "crew 0.1.0";
  write_json_file((fs::path(cfg.out_dir) / "manifest.json").string(),
                  make_artifact("manifest", manifest, hash));
}

}  // namespace crew
