#pragma once

// Domain types and payoff evaluation for fixed-prize investment contests.
//
// Miner i invests q_i >= 0 at per-unit cost c_i and receives the share
// x_i = q_i^alpha / sum_j q_j^alpha of a prize V. Its utility is
// V * x_i - c_i * q_i. All evaluation here is pure and thread-safe.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace contest {

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidProfile : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric argument outside an operation's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// How data-parallel kernels run. Serial paths are the reference used by
/// tests and benchmarks; both produce identical results.
enum class Execution { serial, parallel };

/// A contest instance. Construction validates every invariant; an existing
/// ContestSpec is always well formed.
class ContestSpec {
 public:
  explicit ContestSpec(std::vector<double> costs, double alpha = 1.0,
                       double prize = 1.0);

  std::size_t size() const { return costs_.size(); }
  std::span<const double> costs() const { return costs_; }
  double cost(std::size_t i) const { return costs_.at(i); }
  double alpha() const { return alpha_; }
  double prize() const { return prize_; }
  bool proportional() const { return alpha_ == 1.0; }

  /// Indices ordered by ascending cost (stable for ties).
  std::span<const std::size_t> ascending_order() const { return order_; }

 private:
  std::vector<double> costs_;
  double alpha_;
  double prize_;
  std::vector<std::size_t> order_;
};

struct InvestmentProfile {
  std::vector<double> investments;

  std::size_t size() const { return investments.size(); }
  double operator[](std::size_t i) const { return investments[i]; }
};

struct MarketShares {
  std::vector<double> shares;
  double total_investment = 0.0;
  double total_power = 0.0;  // sum_j q_j^alpha
};

struct ConcentrationReport {
  std::size_t participant_count = 0;
  double hhi = 0.0;
  std::vector<double> top_k_shares;  // cumulative, k = 1..n
  double rent_dissipation = 0.0;     // sum_i c_i q_i / prize
};

/// Throws InvalidProfile on a length mismatch or a negative/non-finite entry.
void validate_profile(const ContestSpec& spec, const InvestmentProfile& profile);

MarketShares shares(const ContestSpec& spec, const InvestmentProfile& profile);

double utility(const ContestSpec& spec, const InvestmentProfile& profile,
               std::size_t miner);

/// Partial derivative of miner's share with respect to its own investment,
/// alpha * x (1 - x) / q. For alpha == 1 this is (1 - x) / sum_j q_j, which
/// stays finite at q = 0. Throws DomainError at q = 0 when alpha > 1.
double marginal_share(const ContestSpec& spec, const InvestmentProfile& profile,
                      std::size_t miner);

ConcentrationReport concentration(const ContestSpec& spec,
                                  const InvestmentProfile& profile);

/// A game with reward q^a' / sum q^a' and cost c q^b is equivalent to this
/// model with alpha = a' / b. Requires a' >= 1 >= b > 0.
double reduce_exponents(double alpha_reward, double beta_cost);

/// Sum over j != miner of q_j^alpha.
double opposition_power(const ContestSpec& spec, const InvestmentProfile& profile,
                        std::size_t miner);

}  // namespace contest
