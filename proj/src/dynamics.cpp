#include "contest/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "contest/response.hpp"

namespace contest::dynamics {

namespace {

constexpr double kCycleQuantum = 1e-9;
// A revisit only counts as a cycle while the profile is still moving by
// clearly more than the quantum; slowly converging orbits would otherwise
// land in an earlier cell.
constexpr double kCycleMinChange = 1e-7;

std::vector<long long> quantize(const InvestmentProfile& p) {
  std::vector<long long> key(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    key[i] = std::llround(p[i] / kCycleQuantum);
  }
  return key;
}

double pick_toward(const std::vector<double>& maximizers, double incumbent) {
  double best = maximizers.front();
  for (double m : maximizers) {
    if (std::abs(m - incumbent) < std::abs(best - incumbent)) best = m;
  }
  return best;
}

}  // namespace

std::string_view to_string(Status status) {
  switch (status) {
    case Status::converged:
      return "converged";
    case Status::max_rounds_exhausted:
      return "max_rounds_exhausted";
    case Status::cycle_detected:
      return "cycle_detected";
  }
  return "unknown";
}

Trajectory run_dynamics(const ContestSpec& spec, const DynamicsConfig& config) {
  if (config.max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
  if (!(config.convergence_tol > 0.0)) {
    throw std::invalid_argument("convergence_tol must be positive");
  }
  if (!(config.damping > 0.0 && config.damping <= 1.0)) {
    throw std::invalid_argument("damping must lie in (0, 1]");
  }
  validate_profile(spec, config.initial_profile);
  const auto& start = config.initial_profile.investments;
  if (std::all_of(start.begin(), start.end(), [](double q) { return q == 0.0; })) {
    throw InvalidProfile("dynamics need at least one positive initial investment");
  }

  const double alpha = spec.alpha();
  const double prize = spec.prize();
  InvestmentProfile profile = config.initial_profile;
  Trajectory traj;
  std::map<std::vector<long long>, std::size_t> seen;
  seen.emplace(quantize(profile), 0);

  for (std::size_t round = 1; round <= config.max_rounds; ++round) {
    const InvestmentProfile previous = profile;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      Step step;
      step.round = round;
      step.miner = i;
      step.before = profile[i];
      const double c = spec.cost(i);
      const double opposition = opposition_power(spec, profile, i);
      step.utility_before =
          response::response_utility(step.before, c, alpha, opposition, prize);

      double target;
      if (opposition == 0.0) {
        // No best response exists; halving is a strict improvement.
        step.had_best_response = false;
        target = 0.5 * step.before;
      } else {
        const auto br = response::best_response(c, alpha, opposition, prize);
        target = pick_toward(br.maximizers, step.before);
      }
      step.after = step.had_best_response
                       ? (1.0 - config.damping) * step.before + config.damping * target
                       : target;
      profile.investments[i] = step.after;
      step.utility_after = response::response_utility(step.after, c, alpha, opposition, prize);
      traj.steps.push_back(step);
    }
    traj.rounds.push_back(profile);

    double change = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      change = std::max(change, std::abs(profile[i] - previous[i]));
    }
    if (change <= config.convergence_tol) {
      eos::VerifyOptions verify;
      verify.tolerance = config.certification_tol;
      if (eos::verify_equilibrium(spec, profile, verify).certified) {
        traj.status = Status::converged;
        break;
      }
    }
    auto key = quantize(profile);
    const auto hit = seen.find(key);
    if (hit != seen.end() && hit->second + 2 <= round && change > kCycleMinChange) {
      traj.status = Status::cycle_detected;
      traj.cycle_start = hit->second;
      break;
    }
    seen.emplace(std::move(key), round);
  }
  traj.rounds_used = traj.rounds.size();
  return traj;
}

std::vector<TrajectoryRow> trajectory_rows(const Trajectory& trajectory) {
  std::vector<TrajectoryRow> rows;
  for (std::size_t r = 0; r < trajectory.rounds.size(); ++r) {
    const InvestmentProfile& p = trajectory.rounds[r];
    for (std::size_t i = 0; i < p.size(); ++i) rows.push_back({r + 1, i, p[i]});
  }
  return rows;
}

}  // namespace contest::dynamics
