#include <doctest.h>

#include <chrono>

#include "oracles.hpp"
#include "seedrl/environments.hpp"
#include "seedrl/errors.hpp"
#include "seedrl/planner.hpp"

using namespace seedrl;

TEST_CASE("parallel chains pick the best sampled chain") {
  Rng rng = make_rng(1);
  const auto env = make_parallel_chains(5, 3, 0.0, 1.0, 1.0, rng);
  const std::vector<double> theta{0.2, -1.0, 3.5, 3.4, 0.0};
  const auto r = plan(env.topology(), theta, 0, 3);
  CHECK(r.action == 2);
  CHECK(r.value == 3.5);
}

TEST_CASE("bipolar optimistic model goes right") {
  Rng rng = make_rng(2);
  const auto env = make_bipolar_chain(4, rng);
  const std::vector<double> theta{-4.0, 4.0};
  const auto r = plan(env.topology(), theta, 2, 6);
  CHECK(r.action == 1);
  CHECK(r.value == 4.0);
}

TEST_CASE("errors") {
  Rng rng = make_rng(3);
  const auto env = make_bipolar_chain(4, rng);
  const std::vector<double> theta{4.0, -4.0};
  CHECK_THROWS_AS(plan(env.topology(), theta, 0, 3), NoAction);
  CHECK_THROWS_AS(plan(env.topology(), theta, 2, 0), NoAction);
}

TEST_CASE("random graphs match enumeration") {
  Rng rng = make_rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto env = make_max_reward_path(6, 0.5, 0.0, 4.0, 0.01, 3, rng);
    const auto p = plan(env.topology(), env.truth().theta, 0, 3);
    const auto e = oracle::enumerate_walks(env.topology(), env.truth().theta, 0, 3);
    CHECK(p.action == e.action);
    CHECK(p.value == e.value);
  }
}

TEST_CASE("value monotone in rewards and shift invariant") {
  Rng rng = make_rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const auto env = make_max_reward_path(7, 0.5, 0.0, 1.0, 0.01, 4, rng);
    std::vector<double> theta = env.truth().theta;
    const auto base = plan(env.topology(), theta, 0, 4);
    auto raised = theta;
    raised[i % raised.size()] += 1.0;
    CHECK(plan(env.topology(), raised, 0, 4).value >= base.value);
    auto shifted = theta;
    for (auto& t : shifted) t += 0.5;
    const auto s = plan(env.topology(), shifted, 0, 4);
    CHECK(s.action == base.action);
    CHECK(s.value == doctest::Approx(base.value + 4 * 0.5));
  }
}

TEST_CASE("expected planning") {
  // One-hot rows reproduce the deterministic planner on a 3-state chain.
  TabularModel det{3, 2, {}, {0.0, 1.0, 2.0, 0.5, 0.0, 3.0}};
  det.transitions = {0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0};
  std::vector<std::vector<Arc>> arcs(3);
  for (StateId s = 0; s < 3; ++s)
    for (ActionId a = 0; a < 2; ++a) {
      StateId next = 0;
      for (StateId t = 0; t < 3; ++t)
        if (det.row(s, a)[t] == 1.0) next = t;
      arcs[s].push_back({next, std::nullopt, det.reward(s, a)});
    }
  const Topology g(arcs);
  for (StateId s = 0; s < 3; ++s)
    for (int h = 1; h <= 4; ++h) {
      const auto e = plan_expected(det, s, h);
      const auto d = plan(g, std::vector<double>{}, s, h);
      CHECK(e.action == d.action);
      CHECK(e.value == doctest::Approx(d.value));
    }

  // Two states, two actions, two steps expanded by hand.
  TabularModel m{2, 2, {0.7, 0.3, 0.2, 0.8, 0.4, 0.6, 0.9, 0.1}, {1.0, 0.0, 0.0, 2.0}};
  const double v1_0 = 1.0, v1_1 = 2.0;
  const double q0 = 1.0 + 0.7 * v1_0 + 0.3 * v1_1;
  const double q1 = 0.0 + 0.2 * v1_0 + 0.8 * v1_1;
  const auto r = plan_expected(m, 0, 2);
  CHECK(r.value == doctest::Approx(std::max(q0, q1)));
  CHECK(r.action == (q1 > q0 ? 1u : 0u));

  TabularModel flat{3, 2, std::vector<double>(18, 1.0 / 3.0), std::vector<double>(6, 0.5)};
  const auto f = plan_expected(flat, 1, 4);
  CHECK(f.action == 0);
  CHECK(f.value == doctest::Approx(2.0));

  TabularModel bad = flat;
  bad.transitions[0] += 1e-6;
  CHECK_THROWS_AS(plan_expected(bad, 0, 2), InvalidModel);
}

TEST_CASE("planning cost at N=100, H=10") {
  Rng rng = make_rng(6);
  const auto env = make_max_reward_path(100, 2.0 * std::log(100.0) / 100.0, 0.0, 4.0, 0.01, 10, rng);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) plan(env.topology(), env.truth().theta, 0, 10);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / 100;
  CHECK(ms < 10.0);
}
