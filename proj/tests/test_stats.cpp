#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "crew/disruption.hpp"
#include "crew/generator.hpp"
#include "ks.hpp"

namespace crew {
namespace {

// Cushny and Peebles hypnotic drug data (extra hours of sleep, two drugs on
// the same ten patients).
const std::vector<double> kSleep1{0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0};
const std::vector<double> kSleep2{1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4};

TEST(TTest, PairedSleepData) {
  EXPECT_NEAR(paired_t_test(kSleep1, kSleep2), 0.00283289019738427, 1e-6);
  EXPECT_NEAR(paired_t_test(kSleep2, kSleep1), 0.00283289019738427, 1e-6);
}

TEST(TTest, WelchSleepData) {
  EXPECT_NEAR(welch_t_test(kSleep1, kSleep2), 0.07939414018735823, 1e-6);
}

// Two textbook Welch examples with unequal variances and sample sizes.
TEST(TTest, WelchTextbookExamples) {
  const std::vector<double> a1{27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1,
                               21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4};
  const std::vector<double> b1{27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0,
                               24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4};
  EXPECT_NEAR(welch_t_test(a1, b1), 0.021378001462866985, 1e-6);
  const std::vector<double> a2{17.2, 20.9, 22.6, 18.1, 21.7, 21.4, 23.5, 24.2, 14.7, 21.8};
  const std::vector<double> b2{21.5, 22.8, 21.0, 23.0, 21.6, 23.6, 22.5, 20.7, 23.4, 21.8,
                               20.7, 21.7, 21.5, 22.5, 23.6, 21.5, 22.5, 23.5, 21.5, 21.8};
  EXPECT_NEAR(welch_t_test(a2, b2), 0.14884169660532834, 1e-6);
  EXPECT_NEAR(welch_t_test(b2, a2), 0.14884169660532834, 1e-6);
}

TEST(TTest, DegenerateInputs) {
  EXPECT_THROW(paired_t_test({1, 2, 3}, {0, 1, 2}), DegenerateSample);
  EXPECT_THROW(paired_t_test({1, 2}, {1}), std::invalid_argument);
  EXPECT_THROW(paired_t_test({1}, {2}), std::invalid_argument);
  EXPECT_THROW(welch_t_test({3, 3, 3}, {3, 3}), DegenerateSample);
  EXPECT_THROW(welch_t_test({1}, {1, 2}), std::invalid_argument);
  // Both constant but different: the groups are perfectly separated.
  EXPECT_EQ(welch_t_test({0, 0, 0}, {4, 4, 4}), 0.0);
  // One constant group still has a finite statistic.
  const double p = welch_t_test({0, 0, 0, 0}, {1, 2, 3, 2});
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 0.05);
}

TEST(TTest, IdenticalMeansGiveOne) {
  EXPECT_NEAR(welch_t_test({1, 2, 3}, {0, 2, 4}), 1.0, 1e-12);
  EXPECT_NEAR(paired_t_test({1, 2, 3, 4}, {2, 1, 4, 3}), 1.0, 1e-12);
}

TEST(TTest, DisjointSamplesAreHighlySignificant) {
  std::vector<double> a, b;
  for (int k = 0; k < 50; ++k) {
    a.push_back(k % 5);
    b.push_back(100 + k % 7);
  }
  EXPECT_LT(welch_t_test(a, b), 1e-10);
}

TEST(TTest, WelchPValuesUniformUnderNull) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> x(5.0, 1.0), y(5.0, 3.0);
  std::vector<double> ps;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> a(12), b(20);
    for (double& v : a) v = x(rng);
    for (double& v : b) v = y(rng);
    ps.push_back(welch_t_test(a, b));
  }
  const double d = testing::ks_uniform_distance(ps);
  EXPECT_LT(d, testing::ks_critical_01(ps.size())) << "KS distance " << d;
}

TEST(KsHelper, DetectsNonUniformSample) {
  std::vector<double> skewed;
  for (int k = 0; k < 1000; ++k) skewed.push_back(std::pow((k + 0.5) / 1000.0, 2));
  EXPECT_GT(testing::ks_uniform_distance(skewed), testing::ks_critical_01(1000));
  std::vector<double> grid;
  for (int k = 0; k < 1000; ++k) grid.push_back((k + 0.5) / 1000.0);
  EXPECT_NEAR(testing::ks_uniform_distance(grid), 0.0005, 1e-12);
}

TEST(Delays, CountRoundsHalfUpAndOnlyFutureFlightsMove) {
  const ScheduleInstance inst = generate_instance(default_desk_profile(), {2.0, 1, 4});
  int eligible = 0;
  for (const Flight& f : inst.flights) eligible += f.start_day >= 1;
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    DelayScenario scn;
    scn.fraction_delayed = frac;
    scn.seed = 77;
    const ScheduleInstance d = apply_delays(inst, scn);
    int moved = 0;
    for (int f = 0; f < inst.num_flights(); ++f) {
      const Flight& a = inst.flights[f];
      const Flight& b = d.flights[f];
      const int shift = b.start_day - a.start_day;
      EXPECT_EQ(b.end_day - a.end_day, shift);
      EXPECT_GE(shift, 0);
      EXPECT_LE(shift, 3);
      if (shift > 0) {
        ++moved;
        EXPECT_GE(a.start_day, 1);
        EXPECT_LT(b.end_day, d.horizon_days);
      }
    }
    EXPECT_EQ(moved, static_cast<int>(std::floor(frac * eligible + 0.5)));
    EXPECT_EQ(d, apply_delays(inst, scn));
    EXPECT_EQ(d.slots, inst.slots);
    EXPECT_EQ(d.pilots, inst.pilots);
  }
}

TEST(Delays, DelayedSetGrowsWithFraction) {
  const ScheduleInstance inst = generate_instance(default_desk_profile(), {2.0, 1, 8});
  std::vector<int> previous;
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    DelayScenario scn;
    scn.fraction_delayed = frac;
    scn.seed = 5;
    const ScheduleInstance d = apply_delays(inst, scn);
    std::vector<int> moved;
    for (int f = 0; f < inst.num_flights(); ++f) {
      if (d.flights[f].start_day != inst.flights[f].start_day) moved.push_back(f);
    }
    EXPECT_TRUE(std::includes(moved.begin(), moved.end(), previous.begin(), previous.end()));
    previous = moved;
  }
}

TEST(Delays, RejectsBadScenario) {
  const ScheduleInstance inst = generate_instance(default_desk_profile(), {1.0, 1, 0});
  DelayScenario scn;
  scn.fraction_delayed = 0.0;
  EXPECT_THROW(apply_delays(inst, scn), std::invalid_argument);
  scn.fraction_delayed = 0.5;
  scn.min_delay = 0;
  EXPECT_THROW(apply_delays(inst, scn), std::invalid_argument);
}

TEST(Disruptions, CountsChangedSlots) {
  Schedule a, b;
  a.complete = b.complete = true;
  a.assignment = {{0, 1}, {1, 2}, {2, 3}};
  b.assignment = {{0, 1}, {1, 3}, {2, 2}};
  EXPECT_EQ(count_disruptions(a, b), 2);
  EXPECT_EQ(count_disruptions(a, a), 0);
  Schedule c = b;
  c.complete = false;
  EXPECT_THROW(count_disruptions(a, c), std::invalid_argument);
  c = b;
  c.assignment.erase(2);
  c.assignment[5] = 2;
  EXPECT_THROW(count_disruptions(a, c), std::invalid_argument);
}

}  // namespace
}  // namespace crew
