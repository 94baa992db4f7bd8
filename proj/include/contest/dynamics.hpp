#pragma once

// Sequential (round-robin) best-response dynamics.

#include <cstddef>
#include <string_view>
#include <vector>

#include "contest/core.hpp"
#include "contest/eos.hpp"

namespace contest::dynamics {

struct DynamicsConfig {
  InvestmentProfile initial_profile;
  std::size_t max_rounds = 10000;
  double convergence_tol = 1e-10;  // max per-miner change over a round
  double damping = 1.0;            // in (0, 1]; 1 is a pure best response
  double certification_tol = eos::kCertificationTolerance;
};

enum class Status { converged, max_rounds_exhausted, cycle_detected };

std::string_view to_string(Status status);

/// One miner's update within a round.
struct Step {
  std::size_t round = 0;  // 1-based
  std::size_t miner = 0;
  double before = 0.0;
  double after = 0.0;
  double utility_before = 0.0;
  double utility_after = 0.0;
  bool had_best_response = true;  // false when the miner faced zero opposition
};

struct Trajectory {
  std::vector<InvestmentProfile> rounds;  // profile at the end of each round
  std::vector<Step> steps;
  Status status = Status::max_rounds_exhausted;
  std::size_t rounds_used = 0;
  std::size_t cycle_start = 0;  // round first visited, when a cycle is detected
};

/// Throws InvalidProfile for an all-zero or malformed start and
/// std::invalid_argument for a bad configuration.
Trajectory run_dynamics(const ContestSpec& spec, const DynamicsConfig& config);

struct TrajectoryRow {
  std::size_t round = 0;
  std::size_t miner = 0;
  double investment = 0.0;
};

/// (round, miner, investment) rows, one per miner per round.
std::vector<TrajectoryRow> trajectory_rows(const Trajectory& trajectory);

}  // namespace contest::dynamics
