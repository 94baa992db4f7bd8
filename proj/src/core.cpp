#include "contest/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace contest {

ContestSpec::ContestSpec(std::vector<double> costs, double alpha, double prize)
    : costs_(std::move(costs)), alpha_(alpha), prize_(prize) {
  if (costs_.size() < 2) {
    throw InvalidSpec("a contest needs at least 2 miners, got " +
                      std::to_string(costs_.size()));
  }
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    if (!std::isfinite(costs_[i]) || costs_[i] <= 0.0) {
      throw InvalidSpec("cost of miner " + std::to_string(i) +
                        " must be positive and finite");
    }
  }
  if (!std::isfinite(alpha_) || alpha_ < 1.0) {
    throw InvalidSpec("alpha must be finite and >= 1");
  }
  if (!std::isfinite(prize_) || prize_ <= 0.0) {
    throw InvalidSpec("prize must be positive and finite");
  }
  order_.resize(costs_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
    return costs_[a] < costs_[b];
  });
}

void validate_profile(const ContestSpec& spec, const InvestmentProfile& profile) {
  if (profile.size() != spec.size()) {
    throw InvalidProfile("profile has " + std::to_string(profile.size()) +
                         " investments but the contest has " +
                         std::to_string(spec.size()) + " miners");
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double q = profile[i];
    if (!std::isfinite(q) || q < 0.0) {
      throw InvalidProfile("investment of miner " + std::to_string(i) +
                           " must be finite and non-negative");
    }
  }
}

namespace {

void check_index(const ContestSpec& spec, std::size_t miner) {
  if (miner >= spec.size()) {
    throw std::out_of_range("miner index " + std::to_string(miner) +
                            " out of range for " + std::to_string(spec.size()) +
                            " miners");
  }
}

// Powers relative to the largest investment so that large alpha does not
// underflow small but positive investments.
struct ScaledPowers {
  std::vector<double> weights;
  double reference = 0.0;  // max_j q_j
  double sum = 0.0;
};

ScaledPowers scaled_powers(const InvestmentProfile& profile, double alpha) {
  ScaledPowers out;
  out.weights.assign(profile.size(), 0.0);
  out.reference = *std::max_element(profile.investments.begin(),
                                    profile.investments.end());
  if (out.reference == 0.0) return out;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double r = profile[i] / out.reference;
    out.weights[i] = alpha == 1.0 ? r : std::pow(r, alpha);
    out.sum += out.weights[i];
  }
  return out;
}

}  // namespace

MarketShares shares(const ContestSpec& spec, const InvestmentProfile& profile) {
  validate_profile(spec, profile);
  MarketShares out;
  out.shares.assign(spec.size(), 0.0);
  out.total_investment = std::accumulate(profile.investments.begin(),
                                         profile.investments.end(), 0.0);
  const ScaledPowers p = scaled_powers(profile, spec.alpha());
  if (p.reference == 0.0) return out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out.shares[i] = p.weights[i] / p.sum;
  }
  out.total_power = p.sum * std::pow(p.reference, spec.alpha());
  return out;
}

double utility(const ContestSpec& spec, const InvestmentProfile& profile,
               std::size_t miner) {
  check_index(spec, miner);
  const MarketShares s = shares(spec, profile);
  return spec.prize() * s.shares[miner] - spec.cost(miner) * profile[miner];
}

double opposition_power(const ContestSpec& spec, const InvestmentProfile& profile,
                        std::size_t miner) {
  check_index(spec, miner);
  validate_profile(spec, profile);
  double sum = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    if (j == miner) continue;
    sum += spec.alpha() == 1.0 ? profile[j] : std::pow(profile[j], spec.alpha());
  }
  return sum;
}

double marginal_share(const ContestSpec& spec, const InvestmentProfile& profile,
                      std::size_t miner) {
  check_index(spec, miner);
  validate_profile(spec, profile);
  const double q = profile[miner];
  const double alpha = spec.alpha();

  if (alpha == 1.0) {
    const double total = std::accumulate(profile.investments.begin(),
                                         profile.investments.end(), 0.0);
    const double others = total - q;
    if (q == 0.0 && others == 0.0) {
      throw DomainError("marginal share undefined when nobody invests");
    }
    // (1 - x) / T with 1 - x = others / T.
    return others / (total * total);
  }

  if (q == 0.0) {
    throw DomainError("marginal share formula is degenerate at q = 0 for alpha > 1");
  }
  const ScaledPowers p = scaled_powers(profile, alpha);
  const double own = p.weights[miner];
  const double rest = p.sum - own;
  const double x = own / p.sum;
  const double one_minus_x = rest / p.sum;
  return alpha * x * one_minus_x / q;
}

ConcentrationReport concentration(const ContestSpec& spec,
                                  const InvestmentProfile& profile) {
  const MarketShares s = shares(spec, profile);
  ConcentrationReport report;
  double spend = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (profile[i] > 0.0) ++report.participant_count;
    report.hhi += s.shares[i] * s.shares[i];
    spend += spec.cost(i) * profile[i];
  }
  report.rent_dissipation = spend / spec.prize();

  std::vector<double> sorted = s.shares;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  report.top_k_shares.resize(sorted.size());
  double running = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    report.top_k_shares[k] = running;
  }
  // Rounding must not break monotonicity or the top-n total.
  if (report.participant_count > 0) {
    for (double& v : report.top_k_shares) v = std::min(v, 1.0);
    report.top_k_shares.back() = 1.0;
  }
  return report;
}

double reduce_exponents(double alpha_reward, double beta_cost) {
  if (!(std::isfinite(alpha_reward) && std::isfinite(beta_cost)) ||
      alpha_reward < 1.0 || beta_cost > 1.0 || beta_cost <= 0.0) {
    throw DomainError("exponent reduction needs alpha_reward >= 1 >= beta_cost > 0");
  }
  return alpha_reward / beta_cost;
}

}  // namespace contest
