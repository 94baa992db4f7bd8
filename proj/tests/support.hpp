#pragma once

// Independent oracles and random generators for the test suites. Nothing
// here calls into the solvers; oracles work in long double and use the
// plainest algorithm that answers the question.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace testing {

struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }
  std::vector<double> costs(std::size_t n, double lo, double hi) {
    std::vector<double> c(n);
    for (double& v : c) v = log_uniform(lo, hi);
    return c;
  }
};

// X(c) = sum max(1 - c_i / c, 0), in long double.
inline long double threshold_sum(const std::vector<double>& costs, long double c) {
  long double x = 0;
  for (double ci : costs) x += std::max<long double>(1 - ci / c, 0);
  return x;
}

// Plain bisection on X over a generous bracket.
inline long double oracle_threshold(const std::vector<double>& costs) {
  long double lo = *std::min_element(costs.begin(), costs.end());
  long double hi = 2.0L * costs.size() * *std::max_element(costs.begin(), costs.end());
  for (int k = 0; k < 400; ++k) {
    const long double mid = (lo + hi) / 2;
    (threshold_sum(costs, mid) < 1 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

inline std::vector<long double> oracle_shares(const std::vector<double>& q, double alpha) {
  std::vector<long double> w(q.size());
  long double total = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    w[i] = q[i] > 0 ? std::pow(static_cast<long double>(q[i]), static_cast<long double>(alpha))
                    : 0.0L;
    total += w[i];
  }
  for (long double& v : w) v = total > 0 ? v / total : 0;
  return w;
}

inline long double oracle_utility(long double q, double c, double alpha, double opposition,
                                  double prize = 1.0) {
  if (q <= 0) return 0;
  const long double p = std::pow(q, static_cast<long double>(alpha));
  return prize * p / (p + opposition) - c * q;
}

struct OracleResponse {
  long double q = 0;
  long double utility = 0;
};

// Coarse scan of [0, V/c] followed by golden-section refinement around the
// best cell. Finds the global maximizer of the single-peaked-after-zero utility.
inline OracleResponse oracle_best_response(double c, double alpha, double opposition,
                                           double prize = 1.0) {
  const long double top = prize / c;
  const int cells = 20000;
  long double best_q = 0;
  long double best_u = 0;
  for (int k = 1; k <= cells; ++k) {
    const long double q = top * k / cells;
    const long double u = oracle_utility(q, c, alpha, opposition, prize);
    if (u > best_u) {
      best_u = u;
      best_q = q;
    }
  }
  if (best_q == 0) return {0, 0};
  long double a = std::max<long double>(best_q - top / cells, 0);
  long double b = std::min<long double>(best_q + top / cells, top);
  const long double phi = (std::sqrt(5.0L) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const long double m1 = b - phi * (b - a);
    const long double m2 = a + phi * (b - a);
    if (oracle_utility(m1, c, alpha, opposition, prize) <
        oracle_utility(m2, c, alpha, opposition, prize)) {
      a = m1;
    } else {
      b = m2;
    }
  }
  const long double q = (a + b) / 2;
  const long double u = oracle_utility(q, c, alpha, opposition, prize);
  if (u <= 0) return {0, 0};
  return {q, u};
}

// Share formula for costs c_i = 1 - 2^{-i-k}, i = 1..n.
inline long double prefix_family_share(int i, int k, int n) {
  const long double a = std::ldexp(1.0L, -k);
  const long double b = std::ldexp(1.0L, -k - n);
  return (1 - a + b + (n - 1) * std::ldexp(1.0L, -i - k)) / (n - a + b);
}

inline std::vector<double> harmonic_costs() {
  std::vector<double> c;
  for (int i = 1; i <= 10; ++i) c.push_back(static_cast<double>(i) / (i + 1));
  return c;
}

}  // namespace testing
