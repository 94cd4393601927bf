#ifndef CREW_MILP_HPP_
#define CREW_MILP_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crew {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class Sense { kMaximize, kMinimize };

struct Term {
  int var = 0;
  double coef = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  std::string name;  // optional
  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

// A pure 0/1 linear program.
struct IpInstance {
  int num_vars = 0;
  std::vector<Term> objective;
  Sense sense = Sense::kMaximize;
  std::vector<LinearConstraint> constraints;
  std::vector<std::string> var_names;  // empty, or one per variable

  int add_var(std::string name = {});
  void add_constraint(std::vector<Term> terms, Relation rel, double rhs,
                      std::string name = {});
  std::string var_name(int v) const;
  int num_nonzeros() const;
};

// Throws std::invalid_argument on out-of-range or duplicate indices, empty
// rows or non-finite coefficients.
void check_ip(const IpInstance& ip);

// Equality of num_vars, sense, objective and constraint rows (ignores names).
bool structurally_equal(const IpInstance& a, const IpInstance& b);

// Activity check with tolerance; values must be 0/1.
bool satisfies_all(const IpInstance& ip, const std::vector<std::int8_t>& values,
                   double tol = 1e-9);
double objective_value(const IpInstance& ip, const std::vector<std::int8_t>& values);

enum class SolveStatus { kOptimal, kFeasibleIncumbent, kInfeasible, kTimeoutNoIncumbent };

std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<std::int8_t> values;  // empty unless optimal or incumbent
  double objective_value = 0.0;
  std::int64_t nodes_explored = 0;
  std::int64_t lp_iterations = 0;
  std::chrono::duration<double> wall_time{0.0};

  bool has_solution() const {
    return status == SolveStatus::kOptimal ||
           status == SolveStatus::kFeasibleIncumbent;
  }
  // "status=optimal objective=3 nodes=17 time=0.004s"
  std::string summary() const;
};

struct SolveOptions {
  std::chrono::duration<double> time_limit{60.0};
  // Set from another thread to stop the search early.
  const std::atomic<bool>* cancel = nullptr;
  // Bytes of warm-start bases kept in the open-node list before new nodes fall
  // back to cold LP solves.
  std::size_t basis_memory_budget = std::size_t{512} << 20;
};

// Best-bound branch-and-bound over LP relaxations with depth-first plunging
// until the first incumbent.
SolveResult solve(const IpInstance& ip, const SolveOptions& options = {});
SolveResult solve(const IpInstance& ip, std::chrono::duration<double> time_limit);

struct LpRelaxation {
  bool feasible = false;
  double bound = 0.0;
  std::vector<double> values;
};

// Continuous relaxation with 0 <= x <= 1.
LpRelaxation lp_relax_solve(const IpInstance& ip);

// CPLEX-style LP text: objective section, constraint rows, binaries.
std::string export_lp_text(const IpInstance& ip);

class LpParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

IpInstance parse_lp_text(const std::string& text);

}  // namespace crew

#endif  // CREW_MILP_HPP_
