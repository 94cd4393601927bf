#include "crew/oracle.hpp"

#include <algorithm>
#include <cstdint>

namespace crew {

BruteForce brute_force(const IpInstance& ip) {
  BruteForce out;
  const std::uint32_t n = static_cast<std::uint32_t>(ip.num_vars);
  std::vector<std::int8_t> v(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::uint32_t j = 0; j < n; ++j) v[j] = (mask >> j) & 1U;
    if (!satisfies_all(ip, v)) continue;
    const double obj = objective_value(ip, v);
    const bool better = ip.sense == Sense::kMaximize ? obj > out.best : obj < out.best;
    if (!out.feasible || better) {
      out.best = obj;
      out.feasible = true;
    }
  }
  return out;
}

IpInstance random_ip(std::mt19937_64& rng, int max_vars, int max_rows) {
  std::uniform_int_distribution<int> nv(1, max_vars);
  std::uniform_int_distribution<int> nr(0, max_rows);
  std::uniform_int_distribution<int> coef(-10, 10);
  std::uniform_int_distribution<int> rel(0, 5);
  IpInstance ip;
  ip.num_vars = nv(rng);
  ip.sense = (rng() & 1U) ? Sense::kMaximize : Sense::kMinimize;
  for (int j = 0; j < ip.num_vars; ++j) {
    const int c = coef(rng);
    if (c != 0) ip.objective.push_back({j, static_cast<double>(c)});
  }
  const int rows = nr(rng);
  for (int i = 0; i < rows; ++i) {
    LinearConstraint row;
    int pos_sum = 0;
    int neg_sum = 0;
    for (int j = 0; j < ip.num_vars; ++j) {
      if (rng() % 3 == 0) continue;
      const int c = coef(rng);
      if (c == 0) continue;
      row.terms.push_back({j, static_cast<double>(c)});
      (c > 0 ? pos_sum : neg_sum) += c;
    }
    if (row.terms.empty()) row.terms.push_back({static_cast<int>(rng() % ip.num_vars), 1.0});
    const int r = rel(rng);
    // rhs somewhere inside the achievable activity range
    std::uniform_int_distribution<int> rhs(neg_sum, std::max(neg_sum, pos_sum));
    row.rhs = rhs(rng);
    row.relation = r < 3 ? Relation::kLessEqual : r < 5 ? Relation::kGreaterEqual : Relation::kEqual;
    ip.constraints.push_back(std::move(row));
  }
  return ip;
}

}  // namespace crew
