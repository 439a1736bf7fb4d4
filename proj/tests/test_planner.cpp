#include <doctest.h>

#include <cmath>
#include <vector>

#include "pubgood/planner.hpp"
#include "test_util.hpp"

using namespace pubgood;

namespace {

std::vector<AgentResponse> make_responses(std::initializer_list<std::pair<double, double>> xt) {
  std::vector<AgentResponse> out;
  for (const auto& [x, t] : xt) {
    AgentResponse r;
    r.x_bar = x;
    r.t_bar = t;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("init_duals zeroes lambda and defaults mu") {
  const DualState s = init_duals(3);
  CHECK(s.lambda == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(s.mu == std::vector<double>{0.0, 0.0, 0.0});

  const DualState one = init_duals(1);
  CHECK(one.mu.empty());

  const DualState seeded = init_duals(3, std::vector<double>{0.1, -0.2, 0.3});
  CHECK(seeded.mu[1] == doctest::Approx(-0.2));

  CHECK_THROWS_AS(init_duals(3, std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(init_duals(0), Error);
}

TEST_CASE("aggregate_dual_value sums the replies") {
  std::vector<AgentResponse> r(2);
  r[0].g = 1.0;
  r[1].g = 2.5;
  CHECK(aggregate_dual_value(r) == doctest::Approx(3.5));
  r.resize(1);
  CHECK(aggregate_dual_value(r) == doctest::Approx(1.0));
  r[0].g = 0.0;
  CHECK(aggregate_dual_value(r) == doctest::Approx(0.0));
}

TEST_CASE("update_best records first, ties, and ignores worse values") {
  BestTracker tr;
  const DualState s0 = init_duals(2);
  std::vector<AgentResponse> resp(2);

  update_best(tr, 5.0, 0, s0, resp);
  CHECK(tr.g_min == doctest::Approx(5.0));
  CHECK(tr.k_min == 0);

  DualState s1 = s0;
  s1.lambda[0] = 1.0;
  update_best(tr, 3.0, 1, s1, resp);
  CHECK(tr.k_min == 1);

  DualState s2 = s0;
  s2.lambda[0] = 2.0;
  update_best(tr, 3.0, 2, s2, resp);  // tie replaces
  CHECK(tr.k_min == 2);
  CHECK(tr.state_min.lambda[0] == doctest::Approx(2.0));

  update_best(tr, 4.0, 3, s0, resp);  // worse: unchanged
  CHECK(tr.k_min == 2);
  CHECK(tr.g_min == doctest::Approx(3.0));
}

TEST_CASE("update_lambda: plain step, projection, fixed point") {
  // sum t = 2; agent subgradient s_i = 2 - x_i
  auto resp = make_responses({{1.0, 1.5}, {3.0, 0.5}});

  std::vector<double> lambda = {0.5, 0.05};
  update_lambda(lambda, resp, 0.1);
  CHECK(lambda[0] == doctest::Approx(0.4));   // 0.5 - 0.1*(2-1)
  CHECK(lambda[1] == doctest::Approx(0.15));  // 0.05 - 0.1*(-1)

  lambda = {0.05, 0.0};
  auto resp2 = make_responses({{1.0, 1.5}, {1.0, 1.5}});  // sum t = 3, s = 2
  update_lambda(lambda, resp2, 0.1);
  CHECK(lambda[0] == doctest::Approx(0.0));  // projection active

  auto balanced = make_responses({{2.0, 1.0}, {2.0, 1.0}});  // s_i = 0
  lambda = {0.7, 0.3};
  update_lambda(lambda, balanced, 0.1);
  CHECK(lambda[0] == doctest::Approx(0.7));
  CHECK(lambda[1] == doctest::Approx(0.3));
}

TEST_CASE("lambda stays nonnegative under random updates") {
  testutil::Rng rng(5);
  std::vector<double> lambda(4, 0.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<AgentResponse> resp(4);
    for (auto& r : resp) {
      r.x_bar = rng.uniform(0.0, 3.0);
      r.t_bar = rng.uniform(-2.0, 1.0);
    }
    update_lambda(lambda, resp, 1.0 / (k + 1));
    for (double l : lambda) CHECK(l >= 0.0);
  }
}

TEST_CASE("update_mu: plain step, consensus fixed point, empty case") {
  auto resp = make_responses({{1.0, 0.0}, {1.5, 0.0}});
  std::vector<double> mu = {0.2};
  update_mu(mu, resp, 0.1);
  CHECK(mu[0] == doctest::Approx(0.15));  // 0.2 - 0.1*(1.5-1.0)

  auto agreed = make_responses({{1.2, 0.0}, {1.2, 0.0}});
  update_mu(mu, agreed, 0.1);
  CHECK(mu[0] == doctest::Approx(0.15));  // unchanged at consensus

  std::vector<double> empty;
  auto single = make_responses({{1.0, 1.0}});
  update_mu(empty, single, 0.1);  // no-op
  CHECK(empty.empty());
}

TEST_CASE("planner step is a fixed point at a consensus, balanced reply set") {
  // all x equal, sum t = x, lambda interior
  auto resp = make_responses({{1.0, 0.6}, {1.0, 0.4}});
  std::vector<double> lambda = {0.3, 0.2};
  std::vector<double> mu = {0.1};
  update_lambda(lambda, resp, 0.25);
  update_mu(mu, resp, 0.25);
  CHECK(lambda[0] == doctest::Approx(0.3));
  CHECK(lambda[1] == doctest::Approx(0.2));
  CHECK(mu[0] == doctest::Approx(0.1));
}

TEST_CASE("compute_charges hand example and cancellation") {
  DualState duals;
  duals.lambda = {0.3, 0.2};
  duals.mu = {0.1};
  const std::vector<double> x = {1.0, 1.0};
  const std::vector<double> t = {0.6, 0.4};
  const std::vector<double> gamma = compute_charges(duals, x, t);
  CHECK(gamma[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(gamma[1] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(gamma[0] + gamma[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("compute_charges vanishes with zero duals and balances for one agent") {
  DualState zero;
  zero.lambda = {0.0, 0.0};
  zero.mu = {0.0};
  const std::vector<double> x = {0.7, 0.9};
  const std::vector<double> t = {0.1, 0.2};
  for (double g : compute_charges(zero, x, t)) CHECK(g == doctest::Approx(0.0));

  DualState one;
  one.lambda = {0.5};
  const std::vector<double> x1 = {1.0};
  const std::vector<double> t1 = {1.0};
  CHECK(compute_charges(one, x1, t1)[0] == doctest::Approx(0.0));
}

TEST_CASE("g_min sequence emitted by update_best is non-increasing") {
  testutil::Rng rng(31);
  BestTracker tr;
  const DualState s = init_duals(2);
  std::vector<AgentResponse> resp(2);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 500; ++k) {
    update_best(tr, rng.uniform(-5.0, 5.0), k, s, resp);
    CHECK(tr.g_min <= prev);
    prev = tr.g_min;
  }
}
