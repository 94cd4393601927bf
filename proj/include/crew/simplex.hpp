#ifndef CREW_SIMPLEX_HPP_
#define CREW_SIMPLEX_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "crew/milp.hpp"

namespace crew {

struct Deadline {
  std::chrono::steady_clock::time_point at = std::chrono::steady_clock::time_point::max();
  const std::atomic<bool>* cancel = nullptr;

  bool expired() const {
    if (cancel != nullptr && cancel->load(std::memory_order_relaxed)) return true;
    return std::chrono::steady_clock::now() >= at;
  }
};

// Revised simplex over the relaxation of an IpInstance with per-variable
// bounds. Rows are written as A x + s = 0 where the logical s carries the
// negated row bounds, so the all-logical basis is the identity. The basis
// inverse is kept in product form and rebuilt every kRefactorInterval pivots.
class BoundedSimplex {
 public:
  enum class Status { kOptimal, kInfeasible, kTimeLimit, kIterationLimit };
  enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper };

  explicit BoundedSimplex(const IpInstance& ip);

  int num_rows() const { return m_; }
  int num_structurals() const { return n_; }

  // Structural bounds; both vectors of length num_structurals().
  void set_structural_bounds(std::span<const double> lower,
                             std::span<const double> upper);

  // Starts from the all-logical basis.
  Status solve_cold(const Deadline& deadline);
  // Starts from the current basis (dual simplex when dual feasible) and falls
  // back to a cold start if that stalls.
  Status solve_warm(const Deadline& deadline);

  // Objective in the instance's own sense (maximize stays maximize).
  double objective() const;
  std::vector<double> structural_values() const;

  std::vector<VarState> basis() const { return state_; }
  // Installs a basis snapshot; takes effect at the next solve_warm.
  void load_basis(const std::vector<VarState>& snapshot);

  std::int64_t iterations() const { return iterations_; }

 private:
  struct Eta {
    int row;
    double pivot;
    std::vector<int> idx;
    std::vector<double> val;
  };

  static constexpr int kRefactorInterval = 64;

  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void column(int j, std::vector<double>& out) const;  // dense A_j
  double dot_column(int j, const std::vector<double>& y) const;
  void refactor();
  void compute_basic_values();
  void push_eta(int row, const std::vector<double>& alpha);
  void place_nonbasic(int j);
  bool is_fixed(int j) const { return ub_[j] - lb_[j] <= 1e-12; }
  void compute_duals(std::vector<double>& y, bool phase_one) const;
  bool dual_feasible(const std::vector<double>& y) const;
  double reduced_cost(int j, const std::vector<double>& y) const;
  void pivot(int row, int entering, const std::vector<double>& alpha);

  Status primal_loop(const Deadline& deadline);
  Status dual_loop(const Deadline& deadline);
  double max_primal_infeasibility() const;

  int m_ = 0;
  int n_ = 0;
  double obj_sign_ = 1.0;  // +1 minimize, -1 maximize
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_;  // min-form, length n+m
  std::vector<double> lb_, ub_;
  std::vector<double> x_;
  std::vector<int> head_;  // row position -> basic var
  std::vector<int> pos_;   // var -> row position or -1
  std::vector<VarState> state_;
  std::vector<Eta> etas_;
  int pivots_since_refactor_ = 0;
  bool needs_refactor_ = true;
  std::int64_t iterations_ = 0;
  std::int64_t iteration_cap_ = 0;
};

}  // namespace crew

#endif  // CREW_SIMPLEX_HPP_
