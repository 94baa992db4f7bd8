#include <doctest.h>

#include <cmath>

#include "contest/core.hpp"
#include "support.hpp"

using namespace contest;

TEST_CASE("spec construction enforces invariants") {
  CHECK_THROWS_AS(ContestSpec({1.0}), InvalidSpec);
  CHECK_THROWS_AS(ContestSpec({1.0, 0.0}), InvalidSpec);
  CHECK_THROWS_AS(ContestSpec({1.0, -2.0}), InvalidSpec);
  CHECK_THROWS_AS(ContestSpec({1.0, NAN}), InvalidSpec);
  CHECK_THROWS_AS(ContestSpec({1.0, 2.0}, 0.9), InvalidSpec);
  CHECK_THROWS_AS(ContestSpec({1.0, 2.0}, 1.0, 0.0), InvalidSpec);

  const ContestSpec spec({3.0, 1.0, 2.0, 1.0});
  const auto order = spec.ascending_order();
  CHECK(std::vector<std::size_t>(order.begin(), order.end()) ==
        std::vector<std::size_t>{1, 3, 2, 0});
  CHECK(spec.cost(0) == 3.0);
}

TEST_CASE("profile validation") {
  const ContestSpec spec({1.0, 1.0});
  CHECK_THROWS_AS(validate_profile(spec, {{1.0}}), InvalidProfile);
  CHECK_THROWS_AS(validate_profile(spec, {{1.0, -1.0}}), InvalidProfile);
  CHECK_THROWS_AS(validate_profile(spec, {{1.0, INFINITY}}), InvalidProfile);
  CHECK_NOTHROW(validate_profile(spec, {{0.0, 0.0}}));
  CHECK_THROWS_AS(shares(spec, {{1.0, 2.0, 3.0}}), InvalidProfile);
}

TEST_CASE("shares") {
  const auto x = shares(ContestSpec({1, 1, 1, 1}), {{1, 1, 1, 1}}).shares;
  for (double v : x) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  for (double alpha : {1.0, 1.5, 2.0}) {
    const auto zero = shares(ContestSpec({1, 2, 3}, alpha), {{0, 0, 0}});
    for (double v : zero.shares) CHECK(v == 0.0);
    CHECK(zero.total_investment == 0.0);
  }

  const auto half = shares(ContestSpec({1, 1, 1}, 2.0), {{0.5, 0.5, 0}});
  CHECK(half.shares[0] == doctest::Approx(0.5));
  CHECK(half.shares[1] == doctest::Approx(0.5));
  CHECK(half.shares[2] == 0.0);
  CHECK(half.total_power == doctest::Approx(0.5));
}

TEST_CASE("shares match the long double oracle and sum to one") {
  testing::Gen gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = gen.index(2, 12);
    const double alpha = gen.uniform(1.0, 3.0);
    std::vector<double> q(n);
    for (double& v : q) v = gen.index(0, 4) == 0 ? 0.0 : gen.log_uniform(1e-4, 1e3);
    q[gen.index(0, n - 1)] = gen.log_uniform(1e-3, 10);
    const auto x = shares(ContestSpec(std::vector<double>(n, 1.0), alpha), {q}).shares;
    const auto expect = testing::oracle_shares(q, alpha);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(x[i] - static_cast<double>(expect[i])) <= 1e-13);
      sum += x[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("utility") {
  CHECK(utility(ContestSpec({1, 1}, 2.0), {{0.5, 0.5}}, 0) == doctest::Approx(0.0));
  CHECK(utility(ContestSpec({1, 3}, 1.5), {{0, 0}}, 1) == 0.0);
  const double q = 3.0 / 16;
  CHECK(utility(ContestSpec({1, 1, 1, 1}), {{q, q, q, q}}, 0) ==
        doctest::Approx(1.0 / 16).epsilon(1e-14));
  CHECK_THROWS(utility(ContestSpec({1, 1}), {{1, 1}}, 2));
}

TEST_CASE("prize scaling matches scaled costs") {
  testing::Gen gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen.index(2, 8);
    const double alpha = gen.uniform(1.0, 2.0);
    const double prize = gen.log_uniform(0.01, 100);
    const auto costs = gen.costs(n, 0.1, 10);
    std::vector<double> scaled = costs;
    for (double& c : scaled) c /= prize;
    std::vector<double> q(n);
    for (double& v : q) v = gen.log_uniform(1e-3, 10);
    const ContestSpec with_prize(costs, alpha, prize);
    const ContestSpec unit(scaled, alpha);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = utility(with_prize, {q}, i);
      const double b = prize * utility(unit, {q}, i);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("marginal share closed form") {
  CHECK(marginal_share(ContestSpec({1, 1}), {{1, 1}}, 0) == doctest::Approx(0.25));
  CHECK(marginal_share(ContestSpec({1, 1}, 2.0), {{0.5, 0.5}}, 0) == doctest::Approx(1.0));
  const double t = 1.0 / 3;
  CHECK(marginal_share(ContestSpec({1, 1, 1}, 1.5), {{t, t, t}}, 0) == doctest::Approx(1.0));
  // alpha = 1 stays finite at q_i = 0: (1 - 0) / sum q.
  CHECK(marginal_share(ContestSpec({1, 1}), {{0, 2}}, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(marginal_share(ContestSpec({1, 1}, 1.5), {{0, 1}}, 0), DomainError);
  CHECK_THROWS_AS(marginal_share(ContestSpec({1, 1}), {{0, 0}}, 0), DomainError);
}

TEST_CASE("marginal share agrees with central differences of the oracle shares") {
  testing::Gen gen(13);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = gen.index(2, 6);
    const double alpha = gen.uniform(1.0, 2.0);
    std::vector<double> q(n);
    for (double& v : q) v = gen.uniform(1e-3, 10);
    const std::size_t i = gen.index(0, n - 1);
    const double h = 1e-6 * std::max(q[i], 1.0);
    auto up = q;
    auto down = q;
    up[i] += h;
    down[i] -= h;
    const long double fd =
        (testing::oracle_shares(up, alpha)[i] - testing::oracle_shares(down, alpha)[i]) /
        (2.0L * h);
    const double got = marginal_share(ContestSpec(std::vector<double>(n, 1.0), alpha), {q}, i);
    CHECK(std::abs(got - static_cast<double>(fd)) <= 1e-4 * std::abs(static_cast<double>(fd)));
  }
}

TEST_CASE("concentration report") {
  const auto flat = concentration(ContestSpec({1, 1, 1, 1}), {{1, 1, 1, 1}});
  CHECK(flat.hhi == doctest::Approx(0.25));
  CHECK(flat.participant_count == 4);
  CHECK(flat.top_k_shares.back() == 1.0);

  const auto pair = concentration(ContestSpec({1, 1, 1}, 2.0), {{0.5, 0.5, 0}});
  CHECK(pair.participant_count == 2);
  CHECK(pair.top_k_shares[0] == doctest::Approx(0.5));
  CHECK(pair.rent_dissipation == doctest::Approx(1.0));

  testing::Gen gen(14);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen.index(2, 10);
    std::vector<double> q(n);
    for (double& v : q) v = gen.index(0, 3) == 0 ? 0.0 : gen.log_uniform(1e-3, 10);
    q[0] = 1.0;
    const auto rep = concentration(ContestSpec(gen.costs(n, 0.5, 2), gen.uniform(1, 2)), {q});
    CHECK(rep.hhi >= 1.0 / n - 1e-15);
    CHECK(rep.hhi <= 1.0 + 1e-15);
    CHECK(std::is_sorted(rep.top_k_shares.begin(), rep.top_k_shares.end()));
    CHECK(rep.top_k_shares.back() == 1.0);
  }
}

TEST_CASE("exponent reduction") {
  CHECK(reduce_exponents(1, 1) == 1.0);
  CHECK(reduce_exponents(1.1, 1) == doctest::Approx(1.1));
  CHECK(reduce_exponents(1.2, 0.8) == doctest::Approx(1.5));
  CHECK_THROWS_AS(reduce_exponents(0.9, 0.5), DomainError);
  CHECK_THROWS_AS(reduce_exponents(1.5, 1.2), DomainError);
  CHECK_THROWS_AS(reduce_exponents(1.5, 0.0), DomainError);
}

TEST_CASE("opposition power") {
  const ContestSpec spec({1, 1, 1}, 2.0);
  CHECK(opposition_power(spec, {{0.5, 0.5, 1.0}}, 2) == doctest::Approx(0.5));
  CHECK(opposition_power(spec, {{0.0, 0.0, 1.0}}, 2) == 0.0);
}
