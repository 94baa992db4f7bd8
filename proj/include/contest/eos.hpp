#pragma once

// Equilibria of the economies-of-scale contest (alpha > 1).
//
// At an equilibrium every participant satisfies c_i q_i = V alpha x_i (1 - x_i).
// Writing s = (sum_j q_j^alpha)^(1/alpha) and q_i = x_i^(1/alpha) s turns this
// into c_i s / (V alpha) = f(x_i) with f(x) = x^(1 - 1/alpha) (1 - x). On
// [1 - 1/alpha, 1) f is strictly decreasing, so each participant's share is a
// decreasing function of s and a candidate set S is solved by bisection on s
// for sum_{i in S} x_i(s) = 1.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "contest/core.hpp"

namespace contest::eos {

inline constexpr double kCertificationTolerance = 1e-9;

double share_weight(double x, double alpha);

/// Unique x in [1 - 1/alpha, 1) with f(x) = target, or nullopt when target
/// exceeds the branch maximum f(1 - 1/alpha).
std::optional<double> invert_share_weight(double target, double alpha);

/// floor(1 + 1 / (alpha - 1)), admitting the integer boundary exactly.
std::size_t participant_cap(double alpha);

struct MinerVerdict {
  double utility = 0.0;       // at the profile
  double best_utility = 0.0;  // supremum over own deviations
  std::vector<double> best_responses;
  double slack = 0.0;         // utility - best_utility
  bool has_best_response = true;  // false when the miner faces no opposition
  bool marginal = false;      // an alternative action is within tolerance
  std::optional<double> oracle_utility;  // grid-oracle cross-check, if requested
};

struct Certificate {
  std::vector<MinerVerdict> miners;
  double tolerance = kCertificationTolerance;
  bool certified = false;
  bool marginal = false;
};

struct VerifyOptions {
  double tolerance = kCertificationTolerance;
  bool grid_oracle = false;
  double grid_step = 0.0;  // 0 selects the default step per miner
  Execution execution = Execution::parallel;
};

/// Checks each miner against its exact best response; valid for alpha >= 1.
Certificate verify_equilibrium(const ContestSpec& spec, const InvestmentProfile& profile,
                               const VerifyOptions& options = {});

struct EosEquilibrium {
  std::vector<std::size_t> participants;  // ascending miner indices
  std::vector<double> investments;
  std::vector<double> shares;
  double power_scale = 0.0;  // (sum_j q_j^alpha)^(1/alpha)
  Certificate certificate;
  int iterations = 0;         // outer bisection steps
  double sum_residual = 0.0;  // sum_{i in S} x_i(s) - 1 at the solution
  double max_foc_residual = 0.0;
};

/// sum_{i in S} x_i(s), or nullopt when some participant cannot reach the
/// branch at this scale.
std::optional<double> share_sum(const ContestSpec& spec, std::span<const std::size_t> set,
                                double power_scale);

/// Largest power scale at which every member of S still has a branch share.
double max_power_scale(const ContestSpec& spec, std::span<const std::size_t> set);

/// Solves the first-order system restricted to S and certifies the result.
/// Returns nullopt when S admits no solution with non-negative utilities.
std::optional<EosEquilibrium> solve_for_set(const ContestSpec& spec,
                                            std::span<const std::size_t> set,
                                            const VerifyOptions& verify = {});

struct EnumerationOptions {
  std::size_t max_miners = 30;
  VerifyOptions verify;
  Execution execution = Execution::parallel;
  // Equilibria that differ only by relabelling miners of equal cost are
  // listed individually up to this many in total; beyond it (or when
  // representatives_only is set) one representative per cost multiset is
  // listed instead.
  std::size_t max_listed = 100000;
  bool representatives_only = false;
};

struct EnumerationStats {
  std::size_t candidate_sets = 0;  // distinct cost multisets solved
  std::size_t feasible_sets = 0;
  std::size_t certified = 0;       // all certified equilibria, relabellings included
  bool representatives_only = false;
};

/// All certified pure equilibria with at least 2 participants, in
/// lexicographic order of their participant sets. See
/// EnumerationOptions::max_listed for large symmetric blocks.
std::vector<EosEquilibrium> enumerate_equilibria(const ContestSpec& spec,
                                                 const EnumerationOptions& options = {},
                                                 EnumerationStats* stats = nullptr);

struct PairwiseBound {
  std::size_t i = 0;
  std::size_t j = 0;
  double bound = 0.0;   // 1 - (1/alpha) (c_i / c_j)
  double actual = 0.0;  // x_i
  bool holds = true;
};

/// Every ordered participant pair, including i == j.
std::vector<PairwiseBound> pairwise_bounds(const ContestSpec& spec,
                                           const EosEquilibrium& eq,
                                           double tolerance = kCertificationTolerance);

/// Only the pairs that violate the bound.
std::vector<PairwiseBound> pairwise_bound_check(const ContestSpec& spec,
                                                const EosEquilibrium& eq,
                                                double tolerance = kCertificationTolerance);

}  // namespace contest::eos
