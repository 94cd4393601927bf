#include <gtest/gtest.h>

#include <random>

#include "crew/milp.hpp"
#include "crew/simplex.hpp"
#include "crew/oracle.hpp"

namespace crew {
namespace {

using namespace std::chrono_literals;

IpInstance two_var_example() {
  IpInstance ip;
  ip.num_vars = 2;
  ip.objective = {{0, 1.0}, {1, 2.0}};
  ip.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::kLessEqual, 1.0);
  return ip;
}

TEST(Solve, DominantCoefficientWins) {
  const SolveResult r = solve(two_var_example(), 10s);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_DOUBLE_EQ(r.objective_value, 2.0);
  EXPECT_EQ(r.values, (std::vector<std::int8_t>{0, 1}));
}

TEST(Solve, ContradictionIsInfeasible) {
  IpInstance ip;
  ip.num_vars = 1;
  ip.objective = {{0, 1.0}};
  ip.add_constraint({{0, 1.0}}, Relation::kEqual, 1.0);
  ip.add_constraint({{0, 1.0}}, Relation::kEqual, 0.0);
  EXPECT_EQ(solve(ip, 10s).status, SolveStatus::kInfeasible);
}

TEST(Solve, KnapsackMatchesEnumeration) {
  // 12 binaries, one knapsack row: 4096 assignments enumerated by the oracle.
  IpInstance ip;
  ip.num_vars = 12;
  const int value[12] = {7, 3, 9, 4, 6, 8, 2, 5, 10, 1, 6, 4};
  const int weight[12] = {5, 2, 7, 3, 4, 6, 1, 4, 8, 1, 5, 3};
  std::vector<Term> row;
  for (int j = 0; j < 12; ++j) {
    ip.objective.push_back({j, static_cast<double>(value[j])});
    row.push_back({j, static_cast<double>(weight[j])});
  }
  ip.add_constraint(row, Relation::kLessEqual, 20.0);
  const auto oracle = brute_force(ip);
  const SolveResult r = solve(ip, 10s);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.objective_value, oracle.best);
  EXPECT_TRUE(satisfies_all(ip, r.values));
}

TEST(Solve, RejectsInvalidInput) {
  IpInstance ip = two_var_example();
  ip.constraints[0].terms.push_back({0, 3.0});
  EXPECT_THROW(solve(ip, 1s), std::invalid_argument);
  IpInstance empty_row = two_var_example();
  empty_row.constraints[0].terms.clear();
  EXPECT_THROW(solve(empty_row, 1s), std::invalid_argument);
  EXPECT_THROW(solve(two_var_example(), 0s), std::invalid_argument);
}

TEST(Solve, RandomInstancesMatchBruteForce) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const IpInstance ip = random_ip(rng);
    const auto oracle = brute_force(ip);
    const SolveResult r = solve(ip, 10s);
    if (!oracle.feasible) {
      EXPECT_EQ(r.status, SolveStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << "trial " << trial;
    EXPECT_EQ(r.objective_value, oracle.best) << "trial " << trial;
    EXPECT_TRUE(satisfies_all(ip, r.values));
    EXPECT_NEAR(objective_value(ip, r.values), r.objective_value, 1e-9);
  }
}

TEST(Solve, ZeroVariablesAndNoRows) {
  IpInstance ip;
  const SolveResult r = solve(ip, 1s);
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_TRUE(r.values.empty());
}

TEST(Solve, LongerTimeLimitNeverWorse) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const IpInstance ip = random_ip(rng, 14, 10);
    const SolveResult a = solve(ip, 1ms);
    const SolveResult b = solve(ip, 5s);
    if (!a.has_solution()) continue;
    ASSERT_TRUE(b.has_solution());
    if (ip.sense == Sense::kMaximize) {
      EXPECT_GE(b.objective_value, a.objective_value - 1e-9);
    } else {
      EXPECT_LE(b.objective_value, a.objective_value + 1e-9);
    }
  }
}

TEST(Solve, CancellationFlagStopsSearch) {
  std::atomic<bool> cancel{true};
  SolveOptions options;
  options.cancel = &cancel;
  const SolveResult r = solve(two_var_example(), options);
  EXPECT_EQ(r.status, SolveStatus::kTimeoutNoIncumbent);
}

TEST(LpRelax, SingleVariableHalf) {
  IpInstance ip;
  ip.num_vars = 1;
  ip.objective = {{0, 1.0}};
  ip.add_constraint({{0, 2.0}}, Relation::kLessEqual, 1.0);
  const LpRelaxation lp = lp_relax_solve(ip);
  ASSERT_TRUE(lp.feasible);
  EXPECT_NEAR(lp.bound, 0.5, 1e-12);
  EXPECT_NEAR(lp.values[0], 0.5, 1e-12);
}

TEST(LpRelax, UpperBoundBindsWithoutRows) {
  IpInstance ip;
  ip.num_vars = 1;
  ip.objective = {{0, 1.0}};
  const LpRelaxation lp = lp_relax_solve(ip);
  ASSERT_TRUE(lp.feasible);
  EXPECT_NEAR(lp.bound, 1.0, 1e-12);
}

TEST(LpRelax, EmptyRelaxationSignalled) {
  IpInstance ip;
  ip.num_vars = 2;
  ip.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::kGreaterEqual, 3.0);
  EXPECT_FALSE(lp_relax_solve(ip).feasible);
}

TEST(LpRelax, BoundDominatesIntegerOptimum) {
  std::mt19937_64 rng(77);
  int integral_optima = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const IpInstance ip = random_ip(rng, 12, 8);
    const auto oracle = brute_force(ip);
    const LpRelaxation lp = lp_relax_solve(ip);
    if (!oracle.feasible) continue;
    ASSERT_TRUE(lp.feasible);
    if (ip.sense == Sense::kMaximize) {
      EXPECT_GE(lp.bound, oracle.best - 1e-7);
    } else {
      EXPECT_LE(lp.bound, oracle.best + 1e-7);
    }
    // Whenever the relaxation optimum is already integral it must equal the
    // branch-and-bound optimum.
    bool integral = true;
    for (double v : lp.values) integral &= std::abs(v - std::round(v)) < 1e-9;
    if (integral && integral_optima < 50) {
      ++integral_optima;
      EXPECT_NEAR(lp.bound, solve(ip, 10s).objective_value, 1e-9);
    }
  }
  EXPECT_GT(integral_optima, 10);
}

TEST(Simplex, WarmStartMatchesColdAfterBoundChange) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const IpInstance ip = random_ip(rng, 14, 10);
    BoundedSimplex warm(ip);
    if (warm.solve_cold(Deadline{}) != BoundedSimplex::Status::kOptimal) continue;
    std::vector<double> lo(ip.num_vars, 0.0), hi(ip.num_vars, 1.0);
    const int j = static_cast<int>(rng() % ip.num_vars);
    const double v = static_cast<double>(rng() & 1U);
    lo[j] = hi[j] = v;
    warm.set_structural_bounds(lo, hi);
    const auto ws = warm.solve_warm(Deadline{});
    BoundedSimplex cold(ip);
    cold.set_structural_bounds(lo, hi);
    const auto cs = cold.solve_cold(Deadline{});
    ASSERT_EQ(ws, cs) << "trial " << trial;
    if (cs == BoundedSimplex::Status::kOptimal) {
      EXPECT_NEAR(warm.objective(), cold.objective(), 1e-7) << "trial " << trial;
    }
  }
}

TEST(LpText, RoundTripIsStructurallyIdentical) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    IpInstance ip = random_ip(rng);
    ip.objective.push_back({0, 0.1});  // non-integral coefficient survives
    if (ip.objective.size() > 1 && ip.objective[0].var == 0) ip.objective.erase(ip.objective.begin());
    const IpInstance back = parse_lp_text(export_lp_text(ip));
    EXPECT_TRUE(structurally_equal(ip, back)) << export_lp_text(ip);
    EXPECT_TRUE(back.var_names.empty());
  }
}

TEST(LpText, OneObjectiveLineAndAllRows) {
  const std::string text = export_lp_text(two_var_example());
  int objective_lines = 0;
  int rows = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(" obj:", 0) == 0) ++objective_lines;
    if (line.rfind(" c", 0) == 0) ++rows;
  }
  EXPECT_EQ(objective_lines, 1);
  EXPECT_EQ(rows, 1);
  EXPECT_NE(text.find(" x0 x1"), std::string::npos);  // synthetic names
}

TEST(LpText, NamedVariablesSurvive) {
  IpInstance ip = two_var_example();
  ip.var_names = {"X_p0_s0", "X_p1_s0"};
  const IpInstance back = parse_lp_text(export_lp_text(ip));
  EXPECT_EQ(back.var_names, ip.var_names);
  EXPECT_TRUE(structurally_equal(ip, back));
}

TEST(LpText, MalformedInputRejected) {
  EXPECT_THROW(parse_lp_text("Subject To\n c0: x0 <= 1\nEnd\n"), LpParseError);
  EXPECT_THROW(parse_lp_text("Maximize\n obj: x0\nSubject To\n c0: x0 <=\nBinaries\n x0\nEnd\n"),
               LpParseError);
  EXPECT_THROW(parse_lp_text("Maximize\n obj: y\nSubject To\nBinaries\n x0\nEnd\n"), LpParseError);
}

}  // namespace
}  // namespace crew
