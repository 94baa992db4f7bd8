#include "contest/proportional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace contest::proportional {

namespace {

constexpr double kThresholdTolerance = 1e-12;
constexpr int kMaxBisection = 200;

void check_costs(std::span<const double> costs) {
  if (costs.size() < 2) {
    throw InvalidSpec("threshold needs at least 2 miners");
  }
  for (double c : costs) {
    if (!std::isfinite(c) || c <= 0.0) throw InvalidSpec("costs must be positive");
  }
}

std::vector<double> sorted_copy(std::span<const double> costs) {
  std::vector<double> sorted(costs.begin(), costs.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

}  // namespace

double threshold_function(std::span<const double> costs, double c) {
  if (!(c > 0.0)) throw DomainError("threshold argument must be positive");
  double x = 0.0;
  for (double ci : costs) x += std::max(1.0 - ci / c, 0.0);
  return x;
}

ThresholdSolution solve_threshold_bisection(std::span<const double> costs) {
  check_costs(costs);
  const std::vector<double> sorted = sorted_copy(costs);
  const double c_max = sorted.back();
  double lo = sorted[1];
  double hi = c_max * static_cast<double>(sorted.size());
  const double width = 1e-14 * c_max;

  ThresholdSolution out;
  out.method = ThresholdMethod::bisection;
  for (int it = 0; it < kMaxBisection && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++out.iterations;
    if (threshold_function(sorted, mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Pick whichever bracket end lands closer to X = 1.
  const double x_lo = threshold_function(sorted, lo);
  const double x_hi = threshold_function(sorted, hi);
  out.c_star = std::abs(x_lo - 1.0) <= std::abs(x_hi - 1.0) ? lo : hi;
  return out;
}

ThresholdSolution solve_threshold_detailed(std::span<const double> costs) {
  check_costs(costs);
  const std::vector<double> sorted = sorted_copy(costs);
  const std::size_t n = sorted.size();

  std::size_t valid = 0;
  double candidate = 0.0;
  double prefix = sorted[0];
  for (std::size_t k = 2; k <= n; ++k) {
    prefix += sorted[k - 1];
    const double c = prefix / static_cast<double>(k - 1);
    const double next = k < n ? sorted[k] : std::numeric_limits<double>::infinity();
    if (sorted[k - 1] < c && c <= next) {
      ++valid;
      candidate = c;
    }
  }

  if (valid == 1 &&
      std::abs(threshold_function(sorted, candidate) - 1.0) <= kThresholdTolerance) {
    return ThresholdSolution{candidate, ThresholdMethod::prefix_scan, 0};
  }
  return solve_threshold_bisection(costs);
}

double solve_threshold(std::span<const double> costs) {
  return solve_threshold_detailed(costs).c_star;
}

ProportionalEquilibrium solve_equilibrium(const ContestSpec& spec) {
  if (!spec.proportional()) {
    throw DomainError("closed-form solver requires alpha = 1; use the eos solver");
  }
  const double prize = spec.prize();
  std::vector<double> scaled(spec.costs().begin(), spec.costs().end());
  for (double& c : scaled) c /= prize;

  ProportionalEquilibrium eq;
  eq.threshold = solve_threshold_detailed(scaled);
  const double c_star = eq.threshold.c_star;
  eq.c_star = c_star * prize;
  eq.total_investment = 1.0 / c_star;

  const std::size_t n = spec.size();
  eq.shares.resize(n);
  eq.investments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::max(1.0 - scaled[i] / c_star, 0.0);
    eq.shares[i] = x;
    eq.investments[i] = x / c_star;
    if (x > 0.0) eq.participants.push_back(i);
  }
  return eq;
}

std::vector<double> foc_residual(const ContestSpec& spec,
                                 const InvestmentProfile& profile) {
  if (!spec.proportional()) {
    throw DomainError("proportional first-order conditions require alpha = 1");
  }
  validate_profile(spec, profile);
  const double total = std::accumulate(profile.investments.begin(),
                                       profile.investments.end(), 0.0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (total - profile[i] <= 0.0) {
      throw InvalidProfile("miner " + std::to_string(i) +
                           " faces zero opposition; first-order conditions undefined");
    }
  }
  const MarketShares s = shares(spec, profile);
  std::vector<double> residual(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double predicted = std::max(1.0 - spec.cost(i) / spec.prize() * total, 0.0);
    residual[i] = s.shares[i] - predicted;
  }
  return residual;
}

}  // namespace contest::proportional
