#include "contest/response.hpp"

#include <algorithm>
#include <cmath>

#include "contest/kernels.hpp"

namespace contest::response {

namespace {

void check_common(double cost, double alpha, double prize) {
  if (!(cost > 0.0) || !std::isfinite(cost)) throw DomainError("cost must be positive");
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw DomainError("alpha must be >= 1");
  if (!(prize > 0.0) || !std::isfinite(prize)) throw DomainError("prize must be positive");
}

BestResponseResult abstain() {
  return BestResponseResult{{0.0}, 0.0, std::nullopt};
}

}  // namespace

double response_utility(double q, double cost, double alpha, double opposition,
                        double prize) {
  if (q <= 0.0) return 0.0;
  const double own = alpha == 1.0 ? q : std::pow(q, alpha);
  return prize * own / (own + opposition) - cost * q;
}

double marginal_utility(double q, double cost, double alpha, double opposition,
                        double prize) {
  if (alpha == 1.0) {
    const double t = q + opposition;
    return prize * opposition / (t * t) - cost;
  }
  const double own = std::pow(q, alpha);
  const double t = own + opposition;
  return prize * alpha * (own / q) * opposition / (t * t) - cost;
}

BestResponseResult best_response_proportional(double cost, double opposition,
                                              double prize) {
  check_common(cost, 1.0, prize);
  if (!(opposition > 0.0)) {
    throw NoBestResponse("no best response exists against zero opposition");
  }
  const double interior = std::sqrt(prize * opposition / cost) - opposition;
  if (interior <= 0.0) return abstain();
  return BestResponseResult{{interior},
                            response_utility(interior, cost, 1.0, opposition, prize),
                            interior};
}

BestResponseResult best_response_eos(double cost, double alpha, double opposition_power,
                                     double prize) {
  check_common(cost, alpha, prize);
  if (alpha <= 1.0) throw DomainError("use the proportional best response for alpha = 1");
  if (!(opposition_power > 0.0)) {
    throw NoBestResponse("no best response exists against zero opposition");
  }
  const double A = opposition_power;
  // Concave region starts where the share reaches (alpha - 1) / (2 alpha):
  // q^alpha / (q^alpha + A) = r  <=>  q = (A r / (1 - r))^(1/alpha).
  const double lo_start = std::pow(A * (alpha - 1.0) / (alpha + 1.0), 1.0 / alpha);
  const double hi_start = prize / cost;
  if (lo_start >= hi_start) return abstain();

  auto g = [&](double q) { return marginal_utility(q, cost, alpha, A, prize); };
  if (g(lo_start) <= 0.0 || g(hi_start) >= 0.0) return abstain();

  double lo = lo_start;
  double hi = hi_start;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double u_lo = response_utility(lo, cost, alpha, A, prize);
  const double u_hi = response_utility(hi, cost, alpha, A, prize);
  const double q_star = u_hi > u_lo ? hi : lo;
  const double u_star = std::max(u_lo, u_hi);

  BestResponseResult r;
  r.interior_candidate = q_star;
  if (std::abs(u_star) <= kTieTolerance) {
    r.maximizers = {0.0, q_star};
    r.utility = std::max(u_star, 0.0);
  } else if (u_star > 0.0) {
    r.maximizers = {q_star};
    r.utility = u_star;
  } else {
    r.maximizers = {0.0};
    r.utility = 0.0;
  }
  return r;
}

BestResponseResult best_response(double cost, double alpha, double opposition_power,
                                 double prize) {
  if (alpha == 1.0) return best_response_proportional(cost, opposition_power, prize);
  return best_response_eos(cost, alpha, opposition_power, prize);
}

double default_grid_step(double cost, double prize) { return 1e-6 * prize / cost; }

BestResponseResult grid_oracle(double cost, double alpha, double opposition_power,
                               double grid_step, double prize, Execution execution) {
  check_common(cost, alpha, prize);
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
  const double domain = prize / cost;
  const auto steps = static_cast<std::size_t>(std::ceil(domain / grid_step));
  auto value_at = [&](std::size_t k) {
    const double q = std::min(static_cast<double>(k) * grid_step, domain);
    return response_utility(q, cost, alpha, opposition_power, prize);
  };
  const kernels::ArgMax best = kernels::argmax(steps + 1, value_at, execution);
  const double q = std::min(static_cast<double>(best.index) * grid_step, domain);
  return BestResponseResult{{q}, best.value, std::nullopt};
}

double convexity_profile(double cost, double alpha, double opposition_power,
                         double prize) {
  check_common(cost, alpha, prize);
  if (alpha <= 1.0) throw DomainError("convexity profile needs alpha > 1");
  if (!(opposition_power > 0.0)) throw DomainError("opposition must be positive");
  const double A = opposition_power;

  // The cost term is linear in q, so U and the share curve bend together;
  // differencing the share alone keeps the cancellation error small.
  auto share = [&](double q) {
    const double own = std::pow(q, alpha);
    return own / (own + A);
  };
  auto second_difference = [&](double q) {
    const double h = 1e-3 * q;
    return share(q + h) - 2.0 * share(q) + share(q - h);
  };

  // Geometric scan around the opposition's equivalent investment A^(1/alpha)
  // for the first convex -> concave sign change.
  const double scale = std::pow(A, 1.0 / alpha);
  const double start = scale * 1e-6;
  const double ratio = std::pow(1e12, 1.0 / 4000.0);
  double prev = start;
  double q = start;
  bool found = false;
  if (second_difference(start) <= 0.0) {
    throw DomainError("utility is not convex at the start of the scan");
  }
  for (int k = 1; k <= 4000; ++k) {
    q = start * std::pow(ratio, k);
    if (second_difference(q) <= 0.0) {
      found = true;
      break;
    }
    prev = q;
  }
  if (!found) throw DomainError("no convex-to-concave transition found");

  double lo = prev;
  double hi = q;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (second_difference(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double q_cross = 0.5 * (lo + hi);
  const double own = std::pow(q_cross, alpha);
  return own / (own + A);
}

}  // namespace contest::response
