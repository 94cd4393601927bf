#ifndef CREW_ORACLE_HPP_
#define CREW_ORACLE_HPP_

// Brute-force and random-instance helpers for checking the 0/1 solver.

#include <random>

#include "crew/milp.hpp"

namespace crew {

struct BruteForce {
  bool feasible = false;
  double best = 0.0;
};

// Enumerates every 0/1 vector. Only for num_vars <= ~20.
BruteForce brute_force(const IpInstance& ip);

// Integer coefficients in [-10, 10]; rhs chosen so that most instances are
// feasible but not trivially so.
IpInstance random_ip(std::mt19937_64& rng, int max_vars = 14, int max_rows = 10);

}  // namespace crew

#endif  // CREW_ORACLE_HPP_
