#include "crew/milp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "crew/simplex.hpp"

namespace crew {

int IpInstance::add_var(std::string name) {
  if (!name.empty() || !var_names.empty()) {
    var_names.resize(num_vars);
    var_names.push_back(std::move(name));
  }
  return num_vars++;
}

void IpInstance::add_constraint(std::vector<Term> terms, Relation rel, double rhs,
                                std::string name) {
  constraints.push_back({std::move(terms), rel, rhs, std::move(name)});
}

std::string IpInstance::var_name(int v) const {
  if (v < static_cast<int>(var_names.size()) && !var_names[v].empty()) return var_names[v];
  return "x" + std::to_string(v);
}

int IpInstance::num_nonzeros() const {
  int nnz = 0;
  for (const auto& c : constraints) nnz += static_cast<int>(c.terms.size());
  return nnz;
}

namespace {

void check_terms(const std::vector<Term>& terms, int num_vars, const std::string& where) {
  std::unordered_set<int> seen;
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_vars) {
      throw std::invalid_argument(where + ": variable index " + std::to_string(t.var) +
                                  " out of range");
    }
    if (!seen.insert(t.var).second) {
      throw std::invalid_argument(where + ": duplicate variable " + std::to_string(t.var));
    }
    if (!std::isfinite(t.coef)) throw std::invalid_argument(where + ": non-finite coefficient");
  }
}

}  // namespace

void check_ip(const IpInstance& ip) {
  if (ip.num_vars < 0) throw std::invalid_argument("negative num_vars");
  if (!ip.var_names.empty() && static_cast<int>(ip.var_names.size()) != ip.num_vars) {
    throw std::invalid_argument("var_names length mismatch");
  }
  check_terms(ip.objective, ip.num_vars, "objective");
  for (size_t i = 0; i < ip.constraints.size(); ++i) {
    const auto& c = ip.constraints[i];
    const std::string where = "constraint " + std::to_string(i);
    if (c.terms.empty()) throw std::invalid_argument(where + ": no terms");
    if (!std::isfinite(c.rhs)) throw std::invalid_argument(where + ": non-finite rhs");
    check_terms(c.terms, ip.num_vars, where);
  }
}

bool structurally_equal(const IpInstance& a, const IpInstance& b) {
  if (a.num_vars != b.num_vars || a.sense != b.sense || a.objective != b.objective ||
      a.constraints.size() != b.constraints.size()) {
    return false;
  }
  for (size_t i = 0; i < a.constraints.size(); ++i) {
    const auto& x = a.constraints[i];
    const auto& y = b.constraints[i];
    if (x.terms != y.terms || x.relation != y.relation || x.rhs != y.rhs) return false;
  }
  return true;
}

bool satisfies_all(const IpInstance& ip, const std::vector<std::int8_t>& values, double tol) {
  if (static_cast<int>(values.size()) != ip.num_vars) return false;
  for (auto v : values) {
    if (v != 0 && v != 1) return false;
  }
  for (const auto& c : ip.constraints) {
    double act = 0.0;
    for (const Term& t : c.terms) act += t.coef * values[t.var];
    switch (c.relation) {
      case Relation::kLessEqual:
        if (act > c.rhs + tol) return false;
        break;
      case Relation::kGreaterEqual:
        if (act < c.rhs - tol) return false;
        break;
      case Relation::kEqual:
        if (std::abs(act - c.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

double objective_value(const IpInstance& ip, const std::vector<std::int8_t>& values) {
  double s = 0.0;
  for (const Term& t : ip.objective) s += t.coef * values[t.var];
  return s;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleIncumbent: return "feasible-incumbent";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeoutNoIncumbent: return "timeout-no-incumbent";
  }
  return "unknown";
}

std::string SolveResult::summary() const {
  std::ostringstream os;
  os << "status=" << to_string(status);
  if (has_solution()) os << " objective=" << objective_value;
  os << " nodes=" << nodes_explored << " lp_iters=" << lp_iterations
     << " time=" << wall_time.count() << "s";
  return os.str();
}

namespace {

using VarState = BoundedSimplex::VarState;

struct Fix {
  int var;
  std::int8_t value;
};

// Warm-start basis shared by sibling nodes; tracks live bytes for the budget.
struct BasisSnapshot {
  std::vector<VarState> states;
  std::size_t* live_bytes;
  BasisSnapshot(std::vector<VarState> s, std::size_t* live)
      : states(std::move(s)), live_bytes(live) {
    *live_bytes += states.size();
  }
  ~BasisSnapshot() { *live_bytes -= states.size(); }
  BasisSnapshot(const BasisSnapshot&) = delete;
  BasisSnapshot& operator=(const BasisSnapshot&) = delete;
};

struct OpenNode {
  double bound;  // parent LP value in maximize form
  std::int64_t seq;
  std::vector<Fix> fixes;
  std::shared_ptr<const BasisSnapshot> basis;
};

struct NodeOrder {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;
  }
};

constexpr double kIntTol = 1e-6;
constexpr double kObjTol = 1e-9;
constexpr std::int64_t kDiveEvery = 32;

// Smallest K <= 1000 such that every objective coefficient times K is an
// integer, or 0 when there is none.
int objective_grid(const std::vector<Term>& objective) {
  for (int k = 1; k <= 1000; ++k) {
    const bool fits = std::all_of(objective.begin(), objective.end(), [k](const Term& t) {
      const double v = t.coef * k;
      return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v));
    });
    if (fits) return k;
  }
  return 0;
}

class BranchAndBound {
 public:
  BranchAndBound(const IpInstance& ip, const SolveOptions& options)
      : ip_(ip),
        options_(options),
        lp_(ip),
        lower_(ip.num_vars, 0.0),
        upper_(ip.num_vars, 1.0) {
    max_sign_ = ip.sense == Sense::kMaximize ? 1.0 : -1.0;
    objective_scale_ = objective_grid(ip.objective);
  }

  SolveResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    deadline_.at = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            options_.time_limit);
    deadline_.cancel = options_.cancel;

    bool timed_out = false;
    std::priority_queue<OpenNode, std::vector<OpenNode>, NodeOrder> open;
    std::optional<OpenNode> next = OpenNode{std::numeric_limits<double>::infinity(), seq_++, {}, nullptr};

    for (;;) {
      if (!next) {
        while (!open.empty() && prunable(open.top().bound)) open.pop();
        if (open.empty()) break;
        next = open.top();
        open.pop();
      }
      if (deadline_.expired()) {
        timed_out = true;
        break;
      }
      OpenNode node = std::move(*next);
      next.reset();
      if (prunable(node.bound)) continue;

      const auto status = solve_node(node);
      ++nodes_;
      if (status == BoundedSimplex::Status::kTimeLimit) {
        timed_out = true;
        break;
      }
      if (status == BoundedSimplex::Status::kIterationLimit) {
        unresolved_ = true;  // cannot prune this subtree honestly
        continue;
      }
      if (status != BoundedSimplex::Status::kOptimal) continue;  // infeasible

      const double value = max_sign_ * lp_.objective();
      if (prunable(value)) continue;
      const std::vector<double> x = lp_.structural_values();
      const int branch_var = pick_branch_variable(x);
      if (branch_var < 0) {
        consider_incumbent(x);
        continue;
      }

      std::shared_ptr<const BasisSnapshot> snap;
      if (live_basis_bytes_ < options_.basis_memory_budget) {
        snap = std::make_shared<BasisSnapshot>(lp_.basis(), &live_basis_bytes_);
        current_basis_ = snap.get();
      }
      if (nodes_ == 1 || (has_incumbent_ && nodes_ % kDiveEvery == 0)) {
        dive(node.fixes, x);
        current_basis_ = nullptr;
      }
      const bool up_first = x[branch_var] >= 0.5;
      OpenNode first{value, seq_++, node.fixes, snap};
      first.fixes.push_back({branch_var, static_cast<std::int8_t>(up_first ? 1 : 0)});
      OpenNode second{value, seq_++, std::move(node.fixes), snap};
      second.fixes.push_back({branch_var, static_cast<std::int8_t>(up_first ? 0 : 1)});
      if (!has_incumbent_) {
        // Plunge until the first incumbent.
        open.push(std::move(second));
        next = std::move(first);
      } else {
        open.push(std::move(first));
        open.push(std::move(second));
      }
    }

    SolveResult result;
    result.nodes_explored = nodes_;
    result.lp_iterations = lp_.iterations();
    if (has_incumbent_) {
      result.status = timed_out || unresolved_ ? SolveStatus::kFeasibleIncumbent
                                               : SolveStatus::kOptimal;
      result.values = incumbent_;
      result.objective_value = objective_value(ip_, incumbent_);
    } else {
      // An unresolved subtree means infeasibility was not proven.
      result.status = timed_out || unresolved_ ? SolveStatus::kTimeoutNoIncumbent
                                               : SolveStatus::kInfeasible;
    }
    result.wall_time = std::chrono::steady_clock::now() - t0;
    return result;
  }

 private:
  bool prunable(double bound) const {
    if (!has_incumbent_) return false;
    if (objective_scale_ > 0) {
      // Every objective value is a multiple of 1/scale.
      const double k = objective_scale_;
      return std::floor(bound * k + kIntTol) <= std::round(best_ * k) + kObjTol;
    }
    return bound <= best_ + kObjTol;
  }

  BoundedSimplex::Status solve_node(const OpenNode& node) {
    std::fill(lower_.begin(), lower_.end(), 0.0);
    std::fill(upper_.begin(), upper_.end(), 1.0);
    for (const Fix& f : node.fixes) lower_[f.var] = upper_[f.var] = f.value;
    lp_.set_structural_bounds(lower_, upper_);
    if (!node.basis) {
      current_basis_ = nullptr;
      return lp_.solve_cold(deadline_);
    }
    if (node.basis.get() != current_basis_) lp_.load_basis(node.basis->states);
    current_basis_ = nullptr;
    return lp_.solve_warm(deadline_);
  }

  // Most fractional variable, lowest index on ties; -1 when integral.
  static int pick_branch_variable(const std::vector<double>& x) {
    int best = -1;
    double best_dist = 0.5;
    for (size_t j = 0; j < x.size(); ++j) {
      const double frac = x[j] - std::floor(x[j]);
      if (frac < kIntTol || frac > 1.0 - kIntTol) continue;
      const double dist = std::abs(frac - 0.5);
      if (best < 0 || dist < best_dist - 1e-12) {
        best = static_cast<int>(j);
        best_dist = dist;
      }
    }
    return best;
  }

  // Fractional diving from the current node: repeatedly fix the fractional
  // variable nearest to integrality at its rounded value and re-solve, until
  // the LP is integral, infeasible or no better than the incumbent.
  void dive(const std::vector<Fix>& fixes, std::vector<double> x) {
    std::fill(lower_.begin(), lower_.end(), 0.0);
    std::fill(upper_.begin(), upper_.end(), 1.0);
    for (const Fix& f : fixes) lower_[f.var] = upper_[f.var] = f.value;
    for (;;) {
      int pick = -1;
      double pick_dist = 1.0;
      for (size_t j = 0; j < x.size(); ++j) {
        if (lower_[j] == upper_[j]) continue;
        const double frac = x[j] - std::floor(x[j]);
        if (frac < kIntTol || frac > 1.0 - kIntTol) continue;
        const double dist = std::min(frac, 1.0 - frac);
        if (dist < pick_dist - 1e-12) {
          pick = static_cast<int>(j);
          pick_dist = dist;
        }
      }
      if (pick < 0) {
        consider_incumbent(x);
        return;
      }
      lower_[pick] = upper_[pick] = x[pick] >= 0.5 ? 1.0 : 0.0;
      lp_.set_structural_bounds(lower_, upper_);
      if (lp_.solve_warm(deadline_) != BoundedSimplex::Status::kOptimal) return;
      if (prunable(max_sign_ * lp_.objective())) return;
      x = lp_.structural_values();
    }
  }

  void consider_incumbent(const std::vector<double>& x) {
    std::vector<std::int8_t> v(x.size());
    for (size_t j = 0; j < x.size(); ++j) v[j] = x[j] > 0.5 ? 1 : 0;
    if (!satisfies_all(ip_, v)) return;
    const double value = max_sign_ * objective_value(ip_, v);
    if (!has_incumbent_ || value > best_ + kObjTol) {
      has_incumbent_ = true;
      incumbent_ = std::move(v);
      best_ = value;
    }
  }

  const IpInstance& ip_;
  SolveOptions options_;
  BoundedSimplex lp_;
  Deadline deadline_;
  std::vector<double> lower_, upper_;
  double max_sign_ = 1.0;
  int objective_scale_ = 0;
  std::vector<std::int8_t> incumbent_;
  bool has_incumbent_ = false;
  bool unresolved_ = false;
  double best_ = 0.0;
  std::int64_t nodes_ = 0;
  std::int64_t seq_ = 0;
  std::size_t live_basis_bytes_ = 0;
  const BasisSnapshot* current_basis_ = nullptr;
};

}  // namespace

SolveResult solve(const IpInstance& ip, const SolveOptions& options) {
  check_ip(ip);
  if (options.time_limit.count() <= 0.0) throw std::invalid_argument("time limit must be positive");
  BranchAndBound bb(ip, options);
  return bb.run();
}

SolveResult solve(const IpInstance& ip, std::chrono::duration<double> time_limit) {
  SolveOptions options;
  options.time_limit = time_limit;
  return solve(ip, options);
}

LpRelaxation lp_relax_solve(const IpInstance& ip) {
  check_ip(ip);
  BoundedSimplex lp(ip);
  LpRelaxation out;
  const auto st = lp.solve_cold(Deadline{});
  if (st != BoundedSimplex::Status::kOptimal) {
    if (st != BoundedSimplex::Status::kInfeasible) {
      throw std::runtime_error("lp relaxation did not converge");
    }
    return out;
  }
  out.feasible = true;
  out.bound = lp.objective();
  out.values = lp.structural_values();
  return out;
}

}  // namespace crew
