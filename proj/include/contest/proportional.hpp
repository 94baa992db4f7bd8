#pragma once

// Closed-form equilibrium of the proportional (alpha = 1) contest.
//
// With X(c) = sum_i max(1 - c_i / c, 0), the unique equilibrium has
// threshold c* solving X(c*) = 1, shares x_i = max(1 - c_i / c*, 0) and
// investments q_i = x_i / c* (times the prize).

#include <cstddef>
#include <span>
#include <vector>

#include "contest/core.hpp"

namespace contest::proportional {

double threshold_function(std::span<const double> costs, double c);

enum class ThresholdMethod { prefix_scan, bisection };

struct ThresholdSolution {
  double c_star = 0.0;
  ThresholdMethod method = ThresholdMethod::prefix_scan;
  int iterations = 0;  // bisection steps; 0 for the prefix scan
};

/// Prefix scan over sorted costs: for the k cheapest miners the candidate
/// threshold is (c_1 + ... + c_k) / (k - 1), valid iff c_k < c* <= c_{k+1}.
/// Falls back to bisection when the scan is ambiguous in floating point.
ThresholdSolution solve_threshold_detailed(std::span<const double> costs);

double solve_threshold(std::span<const double> costs);

/// Bisection on X over [c_2, n * c_max]; the independent cross-check for the
/// prefix scan.
ThresholdSolution solve_threshold_bisection(std::span<const double> costs);

struct ProportionalEquilibrium {
  double c_star = 0.0;  // in the caller's cost units
  std::vector<double> investments;
  std::vector<double> shares;
  std::vector<std::size_t> participants;
  double total_investment = 0.0;
  ThresholdSolution threshold;  // solved on costs / prize
};

/// Throws DomainError unless spec.alpha() == 1.
ProportionalEquilibrium solve_equilibrium(const ContestSpec& spec);

/// x_i(q) - max(1 - (c_i / V) sum_j q_j, 0) per miner; all zero exactly at
/// an equilibrium. Throws InvalidProfile if some miner faces no opposition.
std::vector<double> foc_residual(const ContestSpec& spec,
                                 const InvestmentProfile& profile);

}  // namespace contest::proportional
