#include "crew/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace crew {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr int kBlandAfterDegenerate = 50;

}  // namespace

BoundedSimplex::BoundedSimplex(const IpInstance& ip)
    : m_(static_cast<int>(ip.constraints.size())), n_(ip.num_vars) {
  obj_sign_ = ip.sense == Sense::kMinimize ? 1.0 : -1.0;

  std::vector<int> count(n_, 0);
  for (const auto& row : ip.constraints) {
    for (const Term& t : row.terms) ++count[t.var];
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
  col_row_.resize(col_start_[n_]);
  col_val_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : ip.constraints[i].terms) {
      col_row_[fill[t.var]] = i;
      col_val_[fill[t.var]] = t.coef;
      ++fill[t.var];
    }
  }

  const int total = n_ + m_;
  cost_.assign(total, 0.0);
  for (const Term& t : ip.objective) cost_[t.var] += obj_sign_ * t.coef;
  lb_.assign(total, 0.0);
  ub_.assign(total, 1.0);
  for (int i = 0; i < m_; ++i) {
    const auto& row = ip.constraints[i];
    const int j = n_ + i;
    switch (row.relation) {
      case Relation::kLessEqual:
        lb_[j] = -row.rhs;
        ub_[j] = kInf;
        break;
      case Relation::kGreaterEqual:
        lb_[j] = -kInf;
        ub_[j] = -row.rhs;
        break;
      case Relation::kEqual:
        lb_[j] = ub_[j] = -row.rhs;
        break;
    }
  }
  x_.assign(total, 0.0);
  head_.resize(m_);
  pos_.assign(total, -1);
  state_.assign(total, VarState::kAtLower);
  for (int i = 0; i < m_; ++i) state_[n_ + i] = VarState::kBasic;
  iteration_cap_ = 50LL * (n_ + m_) + 10000;
}

void BoundedSimplex::set_structural_bounds(std::span<const double> lower,
                                           std::span<const double> upper) {
  for (int j = 0; j < n_; ++j) {
    lb_[j] = lower[j];
    ub_[j] = upper[j];
    if (state_[j] != VarState::kBasic) place_nonbasic(j);
  }
}

void BoundedSimplex::place_nonbasic(int j) {
  if (state_[j] == VarState::kAtLower && !std::isfinite(lb_[j])) {
    state_[j] = VarState::kAtUpper;
  } else if (state_[j] == VarState::kAtUpper && !std::isfinite(ub_[j])) {
    state_[j] = VarState::kAtLower;
  }
  x_[j] = state_[j] == VarState::kAtLower ? lb_[j] : ub_[j];
}

void BoundedSimplex::column(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (j >= n_) {
    out[j - n_] = 1.0;
    return;
  }
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) out[col_row_[k]] = col_val_[k];
}

double BoundedSimplex::dot_column(int j, const std::vector<double>& y) const {
  if (j >= n_) return y[j - n_];
  double s = 0.0;
  for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) s += col_val_[k] * y[col_row_[k]];
  return s;
}

void BoundedSimplex::ftran(std::vector<double>& v) const {
  for (const Eta& e : etas_) {
    double t = v[e.row];
    if (t == 0.0) continue;
    t /= e.pivot;
    v[e.row] = t;
    for (size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * t;
  }
}

void BoundedSimplex::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const Eta& e = *it;
    double s = v[e.row];
    for (size_t k = 0; k < e.idx.size(); ++k) s -= e.val[k] * v[e.idx[k]];
    v[e.row] = s / e.pivot;
  }
}

void BoundedSimplex::push_eta(int row, const std::vector<double>& alpha) {
  Eta e;
  e.row = row;
  e.pivot = alpha[row];
  for (int i = 0; i < m_; ++i) {
    if (i != row && std::abs(alpha[i]) > kDropTol) {
      e.idx.push_back(i);
      e.val.push_back(alpha[i]);
    }
  }
  etas_.push_back(std::move(e));
}

void BoundedSimplex::refactor() {
  etas_.clear();
  std::vector<int> held(m_);
  for (int r = 0; r < m_; ++r) held[r] = n_ + r;
  std::vector<char> keep_logical(m_, 0);
  for (int r = 0; r < m_; ++r) keep_logical[r] = state_[n_ + r] == VarState::kBasic;

  std::vector<int> structurals;
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::kBasic) structurals.push_back(j);
  }
  std::stable_sort(structurals.begin(), structurals.end(), [&](int a, int b) {
    return col_start_[a + 1] - col_start_[a] < col_start_[b + 1] - col_start_[b];
  });

  std::vector<double> alpha(m_);
  int placed = 0;
  const int wanted = m_ - static_cast<int>(std::count(keep_logical.begin(), keep_logical.end(), 1));
  for (int j : structurals) {
    if (placed >= wanted) {
      state_[j] = VarState::kAtLower;
      place_nonbasic(j);
      continue;
    }
    column(j, alpha);
    ftran(alpha);
    int best = -1;
    double best_abs = kPivotTol;
    for (int r = 0; r < m_; ++r) {
      if (keep_logical[r] || held[r] < n_) continue;
      if (std::abs(alpha[r]) > best_abs) {
        best_abs = std::abs(alpha[r]);
        best = r;
      }
    }
    if (best < 0) {
      // Dependent column: drop it and let a logical take its place.
      state_[j] = VarState::kAtLower;
      place_nonbasic(j);
      continue;
    }
    push_eta(best, alpha);
    held[best] = j;
    ++placed;
  }
  // Logicals that were not in the basis but are needed to fill it.
  for (int r = 0; r < m_; ++r) {
    if (held[r] >= n_ && !keep_logical[r]) state_[n_ + r] = VarState::kBasic;
  }
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int r = 0; r < m_; ++r) {
    head_[r] = held[r];
    pos_[held[r]] = r;
    state_[held[r]] = VarState::kBasic;
  }
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] != VarState::kBasic) place_nonbasic(j);
  }
  pivots_since_refactor_ = 0;
  needs_refactor_ = false;
}

void BoundedSimplex::compute_basic_values() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
      rhs[col_row_[k]] -= col_val_[k] * x_[j];
    }
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    if (state_[j] != VarState::kBasic) rhs[i] -= x_[j];
  }
  ftran(rhs);
  for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
}

double BoundedSimplex::max_primal_infeasibility() const {
  double worst = 0.0;
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    worst = std::max({worst, lb_[j] - x_[j], x_[j] - ub_[j]});
  }
  return worst;
}

void BoundedSimplex::compute_duals(std::vector<double>& y, bool phase_one) const {
  y.assign(m_, 0.0);
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    if (phase_one) {
      if (x_[j] < lb_[j] - kFeasTol) {
        y[r] = -1.0;
      } else if (x_[j] > ub_[j] + kFeasTol) {
        y[r] = 1.0;
      }
    } else {
      y[r] = cost_[j];
    }
  }
  btran(y);
}

double BoundedSimplex::reduced_cost(int j, const std::vector<double>& y) const {
  return cost_[j] - dot_column(j, y);
}

bool BoundedSimplex::dual_feasible(const std::vector<double>& y) const {
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::kBasic || is_fixed(j)) continue;
    const double d = reduced_cost(j, y);
    if (state_[j] == VarState::kAtLower && d < -kOptTol) return false;
    if (state_[j] == VarState::kAtUpper && d > kOptTol) return false;
  }
  return true;
}

void BoundedSimplex::pivot(int row, int entering, const std::vector<double>& alpha) {
  push_eta(row, alpha);
  const int leaving = head_[row];
  pos_[leaving] = -1;
  head_[row] = entering;
  pos_[entering] = row;
  state_[entering] = VarState::kBasic;
  if (++pivots_since_refactor_ >= kRefactorInterval) needs_refactor_ = true;
}

BoundedSimplex::Status BoundedSimplex::primal_loop(const Deadline& deadline) {
  std::vector<double> y, alpha(m_);
  int degenerate = 0;
  bool verified = false;
  const std::int64_t start = iterations_;
  for (;;) {
    if (deadline.expired()) return Status::kTimeLimit;
    if (iterations_ - start > iteration_cap_) return Status::kIterationLimit;
    if (needs_refactor_) {
      refactor();
      compute_basic_values();
    }
    const bool phase_one = max_primal_infeasibility() > kFeasTol;
    compute_duals(y, phase_one);

    const bool bland = degenerate > kBlandAfterDegenerate;
    int entering = -1;
    double best_score = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::kBasic || is_fixed(j)) continue;
      const double d = (phase_one ? 0.0 : cost_[j]) - dot_column(j, y);
      double score = 0.0;
      if (state_[j] == VarState::kAtLower && d < -kOptTol) score = -d;
      if (state_[j] == VarState::kAtUpper && d > kOptTol) score = d;
      if (score <= 0.0) continue;
      if (bland) {
        entering = j;
        break;
      }
      if (score > best_score) {
        best_score = score;
        entering = j;
      }
    }

    if (entering < 0) {
      // Confirm on a fresh factorization before declaring a result.
      if (!verified && pivots_since_refactor_ > 0) {
        needs_refactor_ = true;
        verified = true;
        continue;
      }
      return phase_one ? Status::kInfeasible : Status::kOptimal;
    }
    verified = false;
    ++iterations_;

    const double dir = state_[entering] == VarState::kAtLower ? 1.0 : -1.0;
    column(entering, alpha);
    ftran(alpha);

    double step = ub_[entering] - lb_[entering];
    int leave_row = -1;
    double leave_target = 0.0;
    double leave_abs = 0.0;
    for (int r = 0; r < m_; ++r) {
      const double a = alpha[r];
      if (std::abs(a) < kPivotTol) continue;
      const int j = head_[r];
      const double rate = -dir * a;
      const double xv = x_[j];
      double limit;
      double target;
      if (rate < 0.0) {
        if (xv > ub_[j] + kFeasTol) {
          limit = (xv - ub_[j]) / -rate;
          target = ub_[j];
        } else if (xv >= lb_[j] - kFeasTol && std::isfinite(lb_[j])) {
          limit = std::max(0.0, xv - lb_[j]) / -rate;
          target = lb_[j];
        } else {
          continue;
        }
      } else {
        if (xv < lb_[j] - kFeasTol) {
          limit = (lb_[j] - xv) / rate;
          target = lb_[j];
        } else if (xv <= ub_[j] + kFeasTol && std::isfinite(ub_[j])) {
          limit = std::max(0.0, ub_[j] - xv) / rate;
          target = ub_[j];
        } else {
          continue;
        }
      }
      bool take = false;
      if (limit < step - 1e-12) {
        take = true;
      } else if (limit <= step + 1e-12 && leave_row >= 0) {
        take = bland ? j < head_[leave_row] : std::abs(a) > leave_abs;
      } else if (limit <= step + 1e-12 && leave_row < 0 && !std::isfinite(step)) {
        take = true;
      }
      if (take) {
        step = limit;
        leave_row = r;
        leave_target = target;
        leave_abs = std::abs(a);
      }
    }
    if (!std::isfinite(step)) {
      throw std::logic_error("simplex: unbounded ray in a bounded relaxation");
    }

    degenerate = step < 1e-12 ? degenerate + 1 : 0;
    for (int r = 0; r < m_; ++r) {
      if (alpha[r] != 0.0) x_[head_[r]] -= dir * step * alpha[r];
    }
    x_[entering] += dir * step;
    if (leave_row < 0) {
      state_[entering] = dir > 0 ? VarState::kAtUpper : VarState::kAtLower;
      place_nonbasic(entering);
      continue;
    }
    const int leaving = head_[leave_row];
    pivot(leave_row, entering, alpha);
    state_[leaving] = leave_target == lb_[leaving] ? VarState::kAtLower : VarState::kAtUpper;
    x_[leaving] = leave_target;
  }
}

BoundedSimplex::Status BoundedSimplex::dual_loop(const Deadline& deadline) {
  std::vector<double> y, rho(m_), alpha(m_);
  const std::int64_t start = iterations_;
  const std::int64_t cap = 10LL * (n_ + m_) + 1000;
  for (;;) {
    if (deadline.expired()) return Status::kTimeLimit;
    if (iterations_ - start > cap) return Status::kIterationLimit;
    if (needs_refactor_) {
      refactor();
      compute_basic_values();
    }
    int r = -1;
    double worst = kFeasTol;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      const double v = std::max(lb_[j] - x_[j], x_[j] - ub_[j]);
      if (v > worst) {
        worst = v;
        r = i;
      }
    }
    if (r < 0) return Status::kOptimal;  // primal feasible; caller confirms
    ++iterations_;

    const int out = head_[r];
    const bool below = x_[out] < lb_[out];
    const double target = below ? lb_[out] : ub_[out];
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[r] = 1.0;
    btran(rho);
    compute_duals(y, false);

    int entering = -1;
    double best_ratio = kInf;
    double best_abs = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] == VarState::kBasic || is_fixed(j)) continue;
      const double a = dot_column(j, rho);
      if (std::abs(a) < kPivotTol) continue;
      const bool at_lower = state_[j] == VarState::kAtLower;
      const bool ok = below ? (at_lower ? a < 0.0 : a > 0.0) : (at_lower ? a > 0.0 : a < 0.0);
      if (!ok) continue;
      const double d = reduced_cost(j, y);
      const double slack = at_lower ? std::max(d, 0.0) : std::max(-d, 0.0);
      const double ratio = slack / std::abs(a);
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && std::abs(a) > best_abs)) {
        best_ratio = ratio;
        best_abs = std::abs(a);
        entering = j;
      }
    }
    if (entering < 0) return Status::kInfeasible;

    column(entering, alpha);
    ftran(alpha);
    if (std::abs(alpha[r]) < kPivotTol) {
      needs_refactor_ = true;
      continue;
    }
    const double delta = (x_[out] - target) / alpha[r];
    for (int i = 0; i < m_; ++i) {
      if (alpha[i] != 0.0) x_[head_[i]] -= alpha[i] * delta;
    }
    x_[entering] += delta;
    pivot(r, entering, alpha);
    state_[out] = below ? VarState::kAtLower : VarState::kAtUpper;
    x_[out] = target;
  }
}

BoundedSimplex::Status BoundedSimplex::solve_cold(const Deadline& deadline) {
  for (int j = 0; j < n_; ++j) state_[j] = VarState::kAtLower;
  for (int i = 0; i < m_; ++i) state_[n_ + i] = VarState::kBasic;
  needs_refactor_ = true;
  return primal_loop(deadline);
}

BoundedSimplex::Status BoundedSimplex::solve_warm(const Deadline& deadline) {
  if (needs_refactor_) {
    refactor();
  } else {
    for (int j = 0; j < n_ + m_; ++j) {
      if (state_[j] != VarState::kBasic) place_nonbasic(j);
    }
  }
  compute_basic_values();
  std::vector<double> y;
  compute_duals(y, false);
  if (dual_feasible(y)) {
    const Status st = dual_loop(deadline);
    if (st == Status::kInfeasible || st == Status::kTimeLimit) return st;
    if (st == Status::kIterationLimit) return solve_cold(deadline);
  }
  const Status st = primal_loop(deadline);
  if (st == Status::kIterationLimit) return solve_cold(deadline);
  return st;
}

void BoundedSimplex::load_basis(const std::vector<VarState>& snapshot) {
  state_ = snapshot;
  needs_refactor_ = true;
}

double BoundedSimplex::objective() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
  return obj_sign_ * s;
}

std::vector<double> BoundedSimplex::structural_values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

}  // namespace crew
