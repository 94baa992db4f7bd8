#pragma once

// Best-response oracles for a single miner facing a fixed opposition.
//
// The opposition enters only through A = sum_{j != i} q_j^alpha, so a miner
// with cost c earns U(q) = V q^alpha / (q^alpha + A) - c q.

#include <optional>
#include <stdexcept>
#include <vector>

#include "contest/core.hpp"

namespace contest::response {

/// Thrown when the opposition is zero: every positive investment is beaten
/// by a smaller one, and zero is beaten by any small positive investment.
class NoBestResponse : public DomainError {
 public:
  using DomainError::DomainError;
};

struct BestResponseResult {
  std::vector<double> maximizers;  // ascending; two entries when 0 ties an interior optimum
  double utility = 0.0;
  std::optional<double> interior_candidate;
};

inline constexpr double kTieTolerance = 1e-12;

double response_utility(double q, double cost, double alpha, double opposition,
                        double prize = 1.0);

/// dU/dq; for alpha > 1 written as V alpha q^(alpha-1) A / (q^alpha + A)^2 - c.
double marginal_utility(double q, double cost, double alpha, double opposition,
                        double prize = 1.0);

/// max{0, sqrt(V R / c) - R} for opposition R > 0.
BestResponseResult best_response_proportional(double cost, double opposition,
                                              double prize = 1.0);

/// Bisection for the first-order root inside the concave region (share at
/// least (alpha - 1) / (2 alpha)), compared against abstaining.
BestResponseResult best_response_eos(double cost, double alpha, double opposition_power,
                                     double prize = 1.0);

/// Dispatches on alpha.
BestResponseResult best_response(double cost, double alpha, double opposition_power,
                                 double prize = 1.0);

/// Default grid step: 1e-6 of the search domain [0, V / c].
double default_grid_step(double cost, double prize = 1.0);

/// Exhaustive scan of U on {0, h, 2h, ...} capped at V / c. Test and
/// cross-check oracle only.
BestResponseResult grid_oracle(double cost, double alpha, double opposition_power,
                               double grid_step, double prize = 1.0,
                               Execution execution = Execution::parallel);

/// Share at which U switches from convex to concave in q, located by the
/// sign change of the second difference of U.
double convexity_profile(double cost, double alpha, double opposition_power,
                         double prize = 1.0);

}  // namespace contest::response
