#ifndef CREW_EXPERIMENT_HPP_
#define CREW_EXPERIMENT_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crew/disruption.hpp"
#include "crew/generator.hpp"
#include "crew/policy.hpp"
#include "crew/serialization.hpp"

namespace crew {

enum class Method { kBaseline, kBuffer, kMoveup, kNice, kRl };

std::string to_string(Method m);
Method method_from_string(const std::string& s);  // throws std::invalid_argument
const std::vector<Method>& all_methods();
bool is_ip_method(Method m);  // everything but rl

struct MethodContext {
  const PolicyWeights* weights = nullptr;  // required by nice and rl
  int n = 2;                               // extraction rollouts, 0 = blank slate
  RolloutMode extraction_mode = RolloutMode::kSample;
  int t_buffer = 4;
  int t_move = 2;
  std::chrono::duration<double> time_limit{60.0};
  std::uint64_t seed = 0;  // extraction rollouts
};

struct BuiltSchedule {
  std::optional<Schedule> schedule;  // incumbent kept even when timed out
  double build_seconds = 0.0;
  bool timed_out = false;
  bool infeasible = false;  // proven: no schedule satisfies the constraints
  int ip_vars = 0;
  int ip_rows = 0;
};

// Builds the method's schedule on the undelayed instance. Extraction time is
// part of nice's build time.
BuiltSchedule build_schedule(Method m, const ScheduleInstance& inst, const MethodContext& ctx);

struct TrialResult {
  Method method = Method::kBaseline;
  int trial = 0;
  double fraction = 0.0;
  int disruptions = 0;  // meaningful only when !skipped
  double build_seconds = 0.0;
  bool skipped = false;
  bool timed_out = false;
  std::string reason;  // why skipped
};

// Schedules for every method on one instance, skip rules applied: a proven
// infeasibility in any IP method skips all methods; an incomplete rl
// schedule skips only rl; a timeout skips only that method.
struct TrialSchedules {
  std::vector<Method> methods;
  std::map<Method, BuiltSchedule> built;
  std::map<Method, std::string> skip_reason;
  bool instance_infeasible = false;
};

TrialSchedules build_trial_schedules(const std::vector<Method>& methods,
                                     const ScheduleInstance& inst, const MethodContext& ctx);

// One delay realization shared by all methods; each usable schedule is
// repaired under the same time limit.
std::vector<TrialResult> evaluate_trial(const TrialSchedules& schedules,
                                        const ScheduleInstance& inst, const DelayScenario& scn,
                                        const MethodContext& ctx, int trial);

std::vector<TrialResult> run_trial(const std::vector<Method>& methods,
                                   const ScheduleInstance& inst, const DelayScenario& scn,
                                   const MethodContext& ctx, int trial = 0);

struct MethodSummary {
  Method method = Method::kBaseline;
  int count = 0;  // non-skipped trials
  int skipped = 0;
  int timeouts = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 when count < 2
  double mean_build_seconds = 0.0;
  double median_build_seconds = 0.0;
};

struct Comparison {
  Method a = Method::kNice;
  Method b = Method::kBaseline;
  bool paired = false;  // paired t-test, otherwise Welch
  int count_a = 0;
  int count_b = 0;
  std::optional<double> p_value;
  std::string note;  // set when p_value is absent
};

struct DisruptionReport {
  double fraction = 0.0;
  int trials = 0;
  std::vector<MethodSummary> methods;
  // nice against each other method: paired against baseline (trials where
  // both ran), Welch otherwise.
  std::vector<Comparison> comparisons;

  const MethodSummary* find(Method m) const;
  const Comparison* find(Method a, Method b) const;
};

DisruptionReport summarize(const std::vector<TrialResult>& results,
                           const std::vector<Method>& methods, double fraction, int trials);

// Ratio of mean nice disruptions to mean baseline disruptions; empty when the
// baseline mean is 0 or either method never ran.
std::optional<double> disruption_ratio(const std::vector<TrialResult>& results);

struct ModelCandidate {
  const PolicyWeights* weights = nullptr;
  int n = 2;
};

struct CandidateScore {
  int index = 0;
  double density = 0.0;  // training density of the weights
  int n = 0;
  std::optional<double> r;
};

struct Selection {
  int index = -1;  // chosen candidate
  double density = 0.0;
  int n = 0;
  double median_r = 0.0;
  std::vector<CandidateScore> scores;
  std::vector<std::string> warnings;
};

struct SelectionConfig {
  double density = 1.0;  // instance density
  int weeks = 1;
  int trials = 20;
  double fraction = 0.5;
  std::chrono::duration<double> time_limit{60.0};
  std::uint64_t seed = 0;
};

// Scores every candidate with r over the same trials, takes the median r per
// (training density, n) group, picks the group with the lowest median (first
// group on ties) and within it the first candidate whose r is closest to the
// median. Candidates with undefined r are excluded with a warning. Throws
// std::invalid_argument if no candidate has a defined r.
Selection select_model(const std::vector<ModelCandidate>& candidates,
                       const DatasetProfile& profile, const SelectionConfig& cfg);

struct ExperimentConfig {
  std::string profile_path;  // empty: built-in desk profile
  std::string weights_path;  // needed for nice and rl
  double density = 1.0;
  int weeks = 1;
  std::vector<double> fractions{0.25, 0.5, 0.75, 1.0};
  int trials = 100;
  std::vector<Method> methods = all_methods();
  int t_buffer = 4;
  int t_move = 2;
  int n = 2;
  RolloutMode extraction_mode = RolloutMode::kSample;
  double time_limit_secs = 60.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = "out";
};

void check_experiment_config(const ExperimentConfig& cfg);
Json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j);
// Hash over everything that affects results (paths and jobs excluded).
std::string config_hash(const ExperimentConfig& cfg);

struct ExperimentOutput {
  std::vector<TrialResult> results;  // ordered by (fraction, trial, method)
  std::vector<DisruptionReport> reports;  // one per fraction
};

// Instance t comes from the "instance" stream at index t and is shared by all
// fractions; delays for trial t come from the "delays" stream at index t, so
// the delayed flight set grows with the fraction. With jobs > 1 trials run
// concurrently; results are folded in trial order.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, const DatasetProfile& profile,
                                const PolicyWeights* weights,
                                const std::function<void(int trial)>& on_trial = {});

// trial,fraction,method,disruptions,build_time_ms,skipped,timed_out,reason
std::string trials_csv(const std::vector<TrialResult>& results);
// Mean +- sd per method and p-values of nice against the others, one row per
// fraction. Methods that ran nowhere are left out.
std::string format_report_table(const std::vector<DisruptionReport>& reports, double density);
Json to_json(const DisruptionReport& report);

// Writes trials.csv, report.txt, report.json and manifest.json into
// cfg.out_dir.
void write_experiment(const ExperimentConfig& cfg, const ExperimentOutput& out,
                      const PolicyWeights* weights);

}  // namespace crew

#endif  // CREW_EXPERIMENT_HPP_
