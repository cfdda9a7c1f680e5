#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "seedrl/engine.hpp"
#include "seedrl/errors.hpp"

using namespace seedrl;

TEST_CASE("event queue order") {
  EventQueue q;
  q.push({2.0, 0, 1});
  q.push({1.0, 3, 2});
  q.push({1.0, 1, 5});
  q.push({1.0, 1, 4});
  std::vector<std::tuple<double, std::size_t, int>> got;
  while (!q.empty()) {
    const auto e = q.pop();
    got.emplace_back(e.time, e.agent, e.step);
  }
  CHECK(got == std::vector<std::tuple<double, std::size_t, int>>{{1.0, 1, 4}, {1.0, 1, 5}, {1.0, 3, 2}, {2.0, 0, 1}});
}

TEST_CASE("arrivals") {
  const auto a = generate_arrivals(1000, 1000, 17);
  double total = 0.0;
  for (const auto& times : a) {
    for (std::size_t m = 1; m < times.size(); ++m) REQUIRE(times[m] > times[m - 1]);
    REQUIRE(times[0] > 0.0);
    total += times.back();
  }
  const double mean_gap = total / 1e6;
  CHECK(std::abs(mean_gap - 1.0) < 3.0 / std::sqrt(1e6));
  CHECK(generate_arrivals(5, 4, 3) == generate_arrivals(5, 4, 3));
  const auto more = generate_arrivals(6, 4, 3);
  const auto fewer = generate_arrivals(5, 4, 3);
  for (std::size_t k = 0; k < 5; ++k) CHECK(more[k] == fewer[k]);
  CHECK_THROWS_AS(generate_arrivals(0, 3, 1), InvalidInput);
}

TEST_CASE("hand simulated two agent transcript") {
  Rng model_rng = make_rng(21);
  const auto env = make_parallel_chains(2, 2, 0.0, 0.0, 1.0, model_rng);
  const Arrivals arrivals{{0.5, 1.0}, {2.0, 2.5}};
  SeedSampling strategy(StrategyKind::seed_standard_gaussian);
  strategy.pin_seed(0, GaussianSeed{{1.0, 0.0}});
  strategy.pin_seed(1, GaussianSeed{{0.0, 0.0}});

  std::vector<std::pair<Event, SampledModel>> decisions;
  std::vector<Eigen::VectorXd> means;
  EpisodeOptions options;
  options.seed = 1234;
  options.keep_log = true;
  options.arrivals = &arrivals;
  options.on_decision = [&](const Event& e, const Belief& b, const SampledModel& m) {
    decisions.emplace_back(e, m);
    means.push_back(std::get<GaussianVectorBelief>(b).mean());
  };
  const auto result = run_episode(env, strategy, 2, options);

  REQUIRE(result.log.size() == 4);
  REQUIRE(decisions.size() == 4);
  const auto& log = result.log;
  // Agent 0: prior sample (1, 0) picks chain 0, then walks its final edge.
  CHECK(decisions[0].second.theta == std::vector<double>{1.0, 0.0});
  CHECK(log[0].agent == 0);
  CHECK(log[0].time == 0.5);
  CHECK(log[0].state == 0);
  CHECK(log[0].action == 0);
  CHECK(log[0].next_state == 1);
  CHECK(log[0].reward == 0.0);
  CHECK(log[1].agent == 0);
  CHECK(log[1].step == 2);
  CHECK(log[1].state == 1);
  CHECK(log[1].next_state == 2);
  const double r0 = log[1].reward;
  CHECK(r0 != 0.0);
  // Agent 1 arrives after the chain-0 reward: posterior mean r0 / 2, variance 1 / 2.
  CHECK(means[2][0] == doctest::Approx(r0 / 2.0));
  CHECK(means[2][1] == 0.0);
  CHECK(decisions[2].second.theta == std::vector<double>{means[2][0], 0.0});
  const ActionId expected = r0 / 2.0 >= 0.0 ? 0 : 1;
  CHECK(log[2].agent == 1);
  CHECK(log[2].time == 2.0);
  CHECK(log[2].action == expected);
  CHECK(log[3].step == 2);
  CHECK(log[3].next_state == (expected == 0 ? 2u : 4u));

  const double r_star = std::max(env.truth().theta[0], env.truth().theta[1]);
  CHECK(result.optimal_reward == r_star);
  CHECK(result.agents[0].regret == r_star - r0);
  CHECK(result.agents[1].regret == r_star - log[3].reward);
  CHECK(result.agents[0].activation_time == 0.5);
  CHECK(result.agents[1].steps == 2);
}

TEST_CASE("optimal agent has zero regret") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng model_rng = make_rng(s);
    const auto env = make_bipolar_chain(10, model_rng);
    SeedSampling strategy(StrategyKind::seed_finite_scenario);
    strategy.pin_seed(0, UniformSeed{*env.truth().scenario == 0 ? 0.1 : 0.9});
    EpisodeOptions options;
    options.seed = s;
    const auto r = run_episode(env, strategy, 1, options);
    CHECK(r.agents[0].regret == 0.0);
  }
}

TEST_CASE("single chain leaves no choice") {
  Rng model_rng = make_rng(3);
  const auto env = make_parallel_chains(1, 3, 0.0, 4.0, 1e-12, model_rng);
  for (auto kind : {StrategyKind::seed_standard_gaussian, StrategyKind::thompson_resampling, StrategyKind::concurrent_ucrl}) {
    const auto r = run_episode(env, kind, 3, 8);
    for (const auto& a : r.agents) CHECK(std::abs(a.regret) < 1e-4);
  }
}

TEST_CASE("bipolar revelation steers everyone") {
  Rng model_rng = make_rng(4);
  const auto env = make_bipolar_chain(10, model_rng);
  const std::size_t truth = *env.truth().scenario;
  auto strategy = make_strategy(StrategyKind::seed_finite_scenario);
  EpisodeOptions options;
  options.seed = 77;
  options.keep_log = true;
  std::size_t after = 0;
  bool ok = true;
  options.on_decision = [&](const Event&, const Belief& b, const SampledModel& m) {
    const auto& p = std::get<FiniteScenarioBelief>(b).probabilities();
    if (p[0] == 1.0 || p[1] == 1.0) {
      ++after;
      ok = ok && *m.scenario == truth;
    }
  };
  const auto r = run_episode(env, *strategy, 200, options);
  CHECK(after > 0);
  CHECK(ok);
  double reveal = std::numeric_limits<double>::infinity();
  for (const auto& o : r.log)
    if (env.observed_param(o.state, o.action)) {
      reveal = o.time;
      break;
    }
  const ActionId toward = truth == 0 ? 0 : 1;
  for (const auto& o : r.log)
    if (o.time > reveal) CHECK(o.action == toward);
}

TEST_CASE("no lookahead and replay determinism") {
  Rng model_rng = make_rng(5);
  const auto env = make_max_reward_path(10, 0.5, 0.0, 4.0, 0.01, 4, model_rng);
  for (auto kind : {StrategyKind::seed_martingalean_gaussian, StrategyKind::thompson_resampling}) {
    std::vector<std::pair<double, GaussianVectorBelief>> snapshots;
    auto strategy = make_strategy(kind);
    EpisodeOptions options;
    options.seed = 99;
    options.keep_log = true;
    options.on_decision = [&](const Event& e, const Belief& b, const SampledModel&) {
      snapshots.emplace_back(e.time, std::get<GaussianVectorBelief>(b));
    };
    const auto r = run_episode(env, *strategy, 20, options);
    for (const auto& [t, b] : snapshots) {
      const auto replay = std::get<GaussianVectorBelief>(belief_from_log(env, r.log, t));
      REQUIRE(replay.mean() == b.mean());
      REQUIRE(replay.variances() == b.variances());
    }
    for (std::size_t i = 1; i < r.log.size(); ++i) CHECK(r.log[i].time >= r.log[i - 1].time);

    auto again = make_strategy(kind);
    options.on_decision = nullptr;
    const auto r2 = run_episode(env, *again, 20, options);
    std::ostringstream a, b;
    write_observation_log(a, r.log);
    write_observation_log(b, r2.log);
    CHECK(a.str() == b.str());
    for (std::size_t k = 0; k < 20; ++k) CHECK(r.agents[k].total_reward == r2.agents[k].total_reward);
  }
}

TEST_CASE("adding an agent keeps earlier agents' arrivals") {
  Rng model_rng = make_rng(6);
  const auto env = make_parallel_chains(3, 2, 0.0, 1.0, 1.0, model_rng);
  const auto a = run_episode(env, StrategyKind::seed_standard_gaussian, 4, 10);
  const auto b = run_episode(env, StrategyKind::seed_standard_gaussian, 5, 10);
  for (std::size_t k = 0; k < 4; ++k) CHECK(a.agents[k].activation_time == b.agents[k].activation_time);
}

TEST_CASE("bayes regret") {
  EpisodeResult all_good;
  all_good.optimal_reward = 5.0;
  all_good.agents = {{0.1, 1, 5.0, 0.0}, {0.2, 1, 5.0, 0.0}};
  CHECK(bayes_regret(std::vector<EpisodeResult>{all_good}).mean == 0.0);

  EpisodeResult pair;
  pair.optimal_reward = 7.0;
  pair.agents = {{0.1, 1, 7.0, 0.0}, {0.2, 1, 4.0, 3.0}};
  CHECK(bayes_regret(std::vector<EpisodeResult>{pair}).mean == 1.5);
  CHECK_THROWS_AS(bayes_regret(std::vector<EpisodeResult>{}), InvalidInput);

  Rng model_rng = make_rng(7);
  const auto env = make_parallel_chains(4, 3, 0.0, 10.0, 1.0, model_rng);
  std::vector<EpisodeResult> reps;
  std::vector<double> replay;
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto strategy = make_strategy(StrategyKind::thompson_resampling);
    EpisodeOptions options;
    options.seed = s;
    options.keep_log = true;
    reps.push_back(run_episode(env, *strategy, 12, options));
    replay.push_back(oracle::regret_from_log(reps.back(), 12));
  }
  const double expect = std::accumulate(replay.begin(), replay.end(), 0.0) / 5.0;
  const auto est = bayes_regret(reps);
  CHECK(est.mean == doctest::Approx(expect).epsilon(1e-12));
  CHECK(est.std_error > 0.0);
}

TEST_CASE("cumulative regret by activation") {
  Rng model_rng = make_rng(8);
  const auto env = make_bipolar_chain(10, model_rng);
  const auto r = run_episode(env, StrategyKind::thompson_resampling, 30, 4);
  const auto series = cumulative_regret_by_activation(r);
  REQUIRE(series.size() == 30);
  std::vector<std::size_t> order(30);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return r.agents[a].activation_time < r.agents[b].activation_time; });
  double run = 0.0;
  for (std::size_t i = 0; i < 30; ++i) {
    run += r.agents[order[i]].regret;
    CHECK(series[i] == run);
    if (i) CHECK(series[i] >= series[i - 1]);
  }
  CHECK(series.back() == doctest::Approx(30 * bayes_regret(std::vector<EpisodeResult>{r}).mean));
}

TEST_CASE("observation log format") {
  std::vector<Observation> log{{1, 2, 0.25, 3, 0, 4, -1.0}};
  std::ostringstream os;
  write_observation_log(os, log);
  CHECK(os.str() == "0.250000000 1 2 3 0 4 -1.000000000\n");
}

TEST_CASE("dirichlet testbed episode") {
  Rng model_rng = make_rng(9);
  const auto env = make_dirichlet_testbed(5, 10, 1.0, model_rng);
  for (auto kind : {StrategyKind::seed_exponential_dirichlet, StrategyKind::thompson_resampling, StrategyKind::greedy}) {
    auto strategy = make_strategy(kind);
    EpisodeOptions options;
    options.seed = 3;
    options.keep_log = true;
    const auto r = run_episode(env, *strategy, 5, options);
    CHECK(r.log.size() == 50);
    const auto b = std::get<DirichletBelief>(belief_from_log(env, r.log, 1e9));
    double total = 0.0;
    for (StateId s = 0; s < 5; ++s)
      for (ActionId a = 0; a < 2; ++a)
        for (double x : b.row(s, a)) total += x;
    CHECK(total == 50.0 + 50.0);
  }
}
