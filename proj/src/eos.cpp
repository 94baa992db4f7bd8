#include "contest/eos.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "contest/kernels.hpp"
#include "contest/response.hpp"

namespace contest::eos {

namespace {

constexpr double kSumTolerance = 1e-13;
constexpr int kMaxBisection = 200;

double weight(double x, double alpha) {
  return std::pow(x, 1.0 - 1.0 / alpha) * (1.0 - x);
}

void require_eos(double alpha) {
  if (!(alpha > 1.0)) {
    throw DomainError("economies-of-scale solver needs alpha > 1; use the proportional solver");
  }
}

}  // namespace

double share_weight(double x, double alpha) {
  require_eos(alpha);
  if (!(x > 0.0 && x < 1.0)) throw DomainError("share must lie in (0, 1)");
  return weight(x, alpha);
}

std::optional<double> invert_share_weight(double target, double alpha) {
  require_eos(alpha);
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw DomainError("share weight target must be positive");
  }
  double lo = 1.0 - 1.0 / alpha;
  const double peak = weight(lo, alpha);
  // A few ulps of slack so the exact branch endpoint survives rounding.
  if (target > peak * (1.0 + 1e-14)) return std::nullopt;
  if (target >= peak) return lo;

  double hi = 1.0;
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (weight(mid, alpha) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double below_one = std::nextafter(1.0, 0.0);
  hi = std::min(hi, below_one);
  return std::abs(weight(lo, alpha) - target) <= std::abs(weight(hi, alpha) - target) ? lo
                                                                                      : hi;
}

std::size_t participant_cap(double alpha) {
  require_eos(alpha);
  const double m = 1.0 + 1.0 / (alpha - 1.0);
  const double nearest = std::round(m);
  if (std::abs(m - nearest) <= 1e-9 * std::max(1.0, m)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::floor(m));
}

Certificate verify_equilibrium(const ContestSpec& spec, const InvestmentProfile& profile,
                               const VerifyOptions& options) {
  validate_profile(spec, profile);
  const double alpha = spec.alpha();
  const double prize = spec.prize();
  const double tol = options.tolerance;

  Certificate cert;
  cert.tolerance = tol;
  cert.miners.resize(spec.size());
  cert.certified = true;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    MinerVerdict& v = cert.miners[i];
    const double c = spec.cost(i);
    const double q = profile[i];
    const double opposition = opposition_power(spec, profile, i);
    v.utility = response::response_utility(q, c, alpha, opposition, prize);

    if (opposition == 0.0) {
      // Utility approaches the whole prize as q -> 0+, but no action attains it.
      v.has_best_response = false;
      v.best_utility = prize;
    } else {
      const response::BestResponseResult br =
          response::best_response(c, alpha, opposition, prize);
      v.best_responses = br.maximizers;
      v.best_utility = br.utility;
      if (q == 0.0) {
        v.marginal = br.interior_candidate &&
                     response::response_utility(*br.interior_candidate, c, alpha,
                                                opposition, prize) >= -tol;
      } else {
        v.marginal = v.utility <= tol;
      }
      if (options.grid_oracle) {
        const double step =
            options.grid_step > 0.0 ? options.grid_step : response::default_grid_step(c, prize);
        const response::BestResponseResult grid =
            response::grid_oracle(c, alpha, opposition, step, prize, options.execution);
        v.oracle_utility = grid.utility;
        v.best_utility = std::max(v.best_utility, grid.utility);
      }
    }
    v.slack = v.utility - v.best_utility;
    if (v.slack < -response::kTieTolerance && v.slack >= -tol) v.marginal = true;
    if (v.slack < -tol) cert.certified = false;
    if (v.marginal) cert.marginal = true;
  }
  return cert;
}

std::optional<double> share_sum(const ContestSpec& spec, std::span<const std::size_t> set,
                                double power_scale) {
  const double alpha = spec.alpha();
  const double denom = spec.prize() * alpha;
  double sum = 0.0;
  for (std::size_t i : set) {
    const std::optional<double> x =
        invert_share_weight(spec.cost(i) * power_scale / denom, alpha);
    if (!x) return std::nullopt;
    sum += *x;
  }
  return sum;
}

double max_power_scale(const ContestSpec& spec, std::span<const std::size_t> set) {
  const double alpha = spec.alpha();
  double c_max = 0.0;
  for (std::size_t i : set) c_max = std::max(c_max, spec.cost(i));
  return spec.prize() * alpha * weight(1.0 - 1.0 / alpha, alpha) / c_max;
}

namespace {

void check_set(const ContestSpec& spec, std::span<const std::size_t> set) {
  require_eos(spec.alpha());
  if (set.size() < 2) throw DomainError("a participant set needs at least 2 miners");
  const std::size_t cap = participant_cap(spec.alpha());
  if (set.size() > cap) {
    throw DomainError("participant set of size " + std::to_string(set.size()) +
                      " exceeds the cap " + std::to_string(cap) + " for this alpha");
  }
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k] >= spec.size()) throw std::out_of_range("participant index out of range");
    if (k > 0 && set[k] <= set[k - 1]) {
      throw DomainError("participant set must be strictly ascending");
    }
  }
}

// True when S, and therefore every superset of S, has no solution: at the
// largest admissible scale the shares already sum past 1, and adding members
// only adds shares and lowers that scale.
bool edge_infeasible(const ContestSpec& spec, std::span<const std::size_t> set) {
  const std::optional<double> g = share_sum(spec, set, max_power_scale(spec, set));
  return !g || *g > 1.0 + kSumTolerance;
}

}  // namespace

std::optional<EosEquilibrium> solve_for_set(const ContestSpec& spec,
                                            std::span<const std::size_t> set,
                                            const VerifyOptions& verify) {
  check_set(spec, set);
  const double alpha = spec.alpha();
  const double prize = spec.prize();

  const double s_edge = max_power_scale(spec, set);
  const std::optional<double> g_edge = share_sum(spec, set, s_edge);
  if (!g_edge || *g_edge > 1.0 + kSumTolerance) return std::nullopt;

  EosEquilibrium eq;
  double s = s_edge;
  double residual = *g_edge - 1.0;
  if (residual < -kSumTolerance) {
    // sum_i x_i(s) falls from |S| at s = 0 to below 1 at the edge.
    double lo = 0.0;
    double hi = s_edge;
    double hi_residual = residual;
    bool done = false;
    for (int it = 0; it < kMaxBisection; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ++eq.iterations;
      const double r = *share_sum(spec, set, mid) - 1.0;
      if (std::abs(r) <= kSumTolerance) {
        s = mid;
        residual = r;
        done = true;
        break;
      }
      if (r > 0.0) {
        lo = mid;
      } else {
        hi = mid;
        hi_residual = r;
      }
    }
    if (!done) {
      const double lo_residual = lo > 0.0 ? *share_sum(spec, set, lo) - 1.0
                                          : static_cast<double>(set.size()) - 1.0;
      if (std::abs(lo_residual) < std::abs(hi_residual)) {
        s = lo;
        residual = lo_residual;
      } else {
        s = hi;
        residual = hi_residual;
      }
    }
  }
  eq.sum_residual = residual;

  InvestmentProfile profile;
  profile.investments.assign(spec.size(), 0.0);
  const double denom = prize * alpha;
  for (std::size_t i : set) {
    const double x = *invert_share_weight(spec.cost(i) * s / denom, alpha);
    profile.investments[i] = std::pow(x, 1.0 / alpha) * s;
  }

  const MarketShares ms = shares(spec, profile);
  for (std::size_t i : set) {
    const double u = prize * ms.shares[i] - spec.cost(i) * profile[i];
    if (u < -1e-12 * prize) return std::nullopt;
    const double foc = spec.cost(i) * profile[i] -
                       prize * alpha * ms.shares[i] * (1.0 - ms.shares[i]);
    eq.max_foc_residual = std::max(eq.max_foc_residual, std::abs(foc));
  }

  eq.participants.assign(set.begin(), set.end());
  eq.shares = ms.shares;
  eq.power_scale = std::pow(ms.total_power, 1.0 / alpha);
  eq.certificate = verify_equilibrium(spec, profile, verify);
  eq.investments = std::move(profile.investments);
  return eq;
}

namespace {

// Miners with identical costs are interchangeable, so a candidate is a count
// per cost block; one representative subset is solved per candidate.
struct Candidate {
  std::vector<std::size_t> counts;          // per block
  std::vector<std::size_t> representative;  // ascending miner indices
};

std::vector<std::vector<std::size_t>> cost_blocks(const ContestSpec& spec) {
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i : spec.ascending_order()) {
    if (blocks.empty() || spec.cost(blocks.back().front()) != spec.cost(i)) {
      blocks.push_back({i});
    } else {
      blocks.back().push_back(i);
    }
  }
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  return blocks;
}

std::vector<Candidate> collect_candidates(const ContestSpec& spec,
                                          const std::vector<std::vector<std::size_t>>& blocks,
                                          std::size_t cap) {
  std::vector<Candidate> out;
  std::vector<std::size_t> counts(blocks.size(), 0);
  std::vector<std::size_t> members;

  std::function<void(std::size_t)> visit = [&](std::size_t b) {
    if (b == blocks.size()) {
      if (members.size() >= 2) {
        std::vector<std::size_t> rep = members;
        std::sort(rep.begin(), rep.end());
        out.push_back(Candidate{counts, std::move(rep)});
      }
      return;
    }
    visit(b + 1);  // take none from this block
    const std::size_t before = members.size();
    for (std::size_t k = 1; k <= blocks[b].size() && before + k <= cap; ++k) {
      members.push_back(blocks[b][k - 1]);
      std::vector<std::size_t> sorted = members;
      std::sort(sorted.begin(), sorted.end());
      if (edge_infeasible(spec, sorted)) break;
      counts[b] = k;
      visit(b + 1);
    }
    counts[b] = 0;
    members.resize(before);
  };
  visit(0);
  return out;
}

void combinations(const std::vector<std::size_t>& pool, std::size_t k,
                  std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> pick(k);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == k) {
      out.push_back(pick);
      return;
    }
    for (std::size_t t = start; t + (k - depth) <= pool.size(); ++t) {
      pick[depth] = pool[t];
      rec(t + 1, depth + 1);
    }
  };
  rec(0, 0);
}

// Number of ways to pick the candidate's counts out of each cost block.
std::size_t relabellings(const Candidate& cand,
                         const std::vector<std::vector<std::size_t>>& blocks) {
  std::size_t total = 1;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    std::size_t ways = 1;
    for (std::size_t t = 0; t < cand.counts[b]; ++t) {
      ways = ways * (blocks[b].size() - t) / (t + 1);
    }
    total *= ways;
  }
  return total;
}

// Every relabelling of a solved representative within its cost blocks.
void expand(const EosEquilibrium& rep, const Candidate& cand,
            const std::vector<std::vector<std::size_t>>& blocks,
            std::vector<EosEquilibrium>& out) {
  std::vector<std::vector<std::vector<std::size_t>>> choices(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    combinations(blocks[b], cand.counts[b], choices[b]);
  }
  std::vector<std::size_t> pick(blocks.size(), 0);
  const std::size_t n = rep.investments.size();
  while (true) {
    std::vector<std::size_t> target(n);  // representative index -> new index
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const std::vector<std::size_t>& chosen = choices[b][pick[b]];
      std::vector<std::size_t> rest;
      std::set_difference(blocks[b].begin(), blocks[b].end(), chosen.begin(), chosen.end(),
                          std::back_inserter(rest));
      const std::size_t k = cand.counts[b];
      for (std::size_t t = 0; t < blocks[b].size(); ++t) {
        target[blocks[b][t]] = t < k ? chosen[t] : rest[t - k];
      }
    }
    EosEquilibrium eq = rep;
    for (std::size_t i = 0; i < n; ++i) {
      eq.investments[target[i]] = rep.investments[i];
      eq.shares[target[i]] = rep.shares[i];
      eq.certificate.miners[target[i]] = rep.certificate.miners[i];
    }
    for (std::size_t& p : eq.participants) p = target[p];
    std::sort(eq.participants.begin(), eq.participants.end());
    out.push_back(std::move(eq));

    std::size_t b = 0;
    while (b < blocks.size() && ++pick[b] == choices[b].size()) {
      pick[b] = 0;
      ++b;
    }
    if (b == blocks.size()) break;
  }
}

}  // namespace

std::vector<EosEquilibrium> enumerate_equilibria(const ContestSpec& spec,
                                                 const EnumerationOptions& options,
                                                 EnumerationStats* stats) {
  require_eos(spec.alpha());
  if (spec.size() > options.max_miners) {
    throw DomainError("enumeration is capped at " + std::to_string(options.max_miners) +
                      " miners, got " + std::to_string(spec.size()));
  }
  EnumerationStats local;
  std::vector<EosEquilibrium> result;
  const std::size_t cap = participant_cap(spec.alpha());
  if (cap >= 2) {
    const auto blocks = cost_blocks(spec);
    const std::vector<Candidate> candidates = collect_candidates(spec, blocks, cap);
    local.candidate_sets = candidates.size();

    VerifyOptions verify = options.verify;
    if (options.execution == Execution::parallel) verify.execution = Execution::serial;
    const auto solved = kernels::map_indexed<std::optional<EosEquilibrium>>(
        candidates.size(),
        [&](std::size_t k) { return solve_for_set(spec, candidates[k].representative, verify); },
        options.execution);

    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (!solved[k]) continue;
      ++local.feasible_sets;
      if (solved[k]->certificate.certified) {
        local.certified += relabellings(candidates[k], blocks);
      }
    }
    local.representatives_only =
        options.representatives_only || local.certified > options.max_listed;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (!solved[k] || !solved[k]->certificate.certified) continue;
      if (local.representatives_only) {
        result.push_back(*solved[k]);
      } else {
        expand(*solved[k], candidates[k], blocks, result);
      }
    }
    std::sort(result.begin(), result.end(),
              [](const EosEquilibrium& a, const EosEquilibrium& b) {
                return a.participants < b.participants;
              });
  }
  if (stats) *stats = local;
  return result;
}

std::vector<PairwiseBound> pairwise_bounds(const ContestSpec& spec, const EosEquilibrium& eq,
                                           double tolerance) {
  std::vector<PairwiseBound> out;
  for (std::size_t i : eq.participants) {
    for (std::size_t j : eq.participants) {
      PairwiseBound pb;
      pb.i = i;
      pb.j = j;
      pb.bound = 1.0 - spec.cost(i) / (spec.alpha() * spec.cost(j));
      pb.actual = eq.shares[i];
      pb.holds = pb.actual >= pb.bound - tolerance;
      out.push_back(pb);
    }
  }
  return out;
}

std::vector<PairwiseBound> pairwise_bound_check(const ContestSpec& spec,
                                                const EosEquilibrium& eq, double tolerance) {
  std::vector<PairwiseBound> all = pairwise_bounds(spec, eq, tolerance);
  std::erase_if(all, [](const PairwiseBound& pb) { return pb.holds; });
  return all;
}

}  // namespace contest::eos
