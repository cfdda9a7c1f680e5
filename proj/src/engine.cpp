#include "seedrl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "seedrl/errors.hpp"
#include "seedrl/planner.hpp"

namespace seedrl {

namespace {

// Folds one transition into the shared posterior. Returns the revealed parameter, if any.
std::optional<std::size_t> absorb_observation(const Environment& env, Belief& belief, const Observation& obs) {
  std::optional<std::size_t> param;
  std::visit(
      [&](auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, DirichletBelief>) {
          b.increment(obs.state, obs.action, obs.next_state);
        } else {
          param = env.observed_param(obs.state, obs.action);
          if (!param) return;
          if constexpr (std::is_same_v<B, GaussianVectorBelief>)
            b = update_gaussian(std::move(b), *param, obs.reward);
          else
            b = update_finite_scenario(std::move(b), param, obs.reward);
        }
      },
      belief);
  return param;
}

}  // namespace

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

Arrivals generate_arrivals(std::size_t agents, int horizon, std::uint64_t seed_root, double rate) {
  if (agents < 1 || horizon < 1) throw InvalidInput("arrivals need K >= 1 and H >= 1");
  if (!(rate > 0.0)) throw InvalidInput("arrival rate must be positive");
  Arrivals arrivals(agents);
  for (std::size_t k = 0; k < agents; ++k) {
    Rng rng = make_rng(derive_seed(seed_root, Stream::arrivals, k));
    std::exponential_distribution<double> gap(rate);
    auto& times = arrivals[k];
    times.resize(static_cast<std::size_t>(horizon));
    double t = 0.0;
    for (auto& x : times) {
      double g = gap(rng);
      while (!(g > 0.0)) g = gap(rng);
      t += g;
      x = t;
    }
  }
  return arrivals;
}

ActionId choose_action(const Environment& env, const SampledModel& model, StateId state, int steps_remaining) {
  if (env.stochastic_transitions()) {
    const auto& known = env.tabular();
    TabularModel sampled{known.states, known.actions, model.transitions, known.rewards};
    return plan_expected(sampled, state, steps_remaining).action;
  }
  return plan(env.topology(), model.theta, state, steps_remaining).action;
}

EpisodeResult run_episode(const Environment& env, Strategy& strategy, std::size_t agents,
                          const EpisodeOptions& options) {
  const int horizon = env.spec().horizon;
  const Arrivals arrivals =
      options.arrivals ? *options.arrivals : generate_arrivals(agents, horizon, options.seed, options.arrival_rate);
  if (arrivals.size() != agents) throw InvalidInput("arrival lists do not match the agent count");
  for (const auto& a : arrivals)
    if (a.size() < static_cast<std::size_t>(horizon)) throw InvalidInput("arrival list shorter than the horizon");

  strategy.begin_episode(env, agents, options.seed);

  EpisodeResult result;
  result.seed = options.seed;
  result.config_hash = options.config_hash;
  result.optimal_reward = optimal_reward(env);
  result.agents.resize(agents);

  Belief belief = env.prior();
  std::vector<RewardObservation> reward_history;
  std::vector<StateId> states(agents, env.spec().start);
  std::size_t observation_count = 0;

  EventQueue queue;
  for (std::size_t k = 0; k < agents; ++k) {
    result.agents[k].activation_time = arrivals[k][0];
    queue.push({arrivals[k][0], k, 1});
  }

  while (!queue.empty()) {
    const Event ev = queue.pop();
    const std::size_t k = ev.agent;
    const StateId state = states[k];
    const int steps_remaining = horizon - ev.step + 1;

    const ProposalContext ctx{k, belief, reward_history, env, state, steps_remaining};
    const SampledModel model = strategy.propose(ctx);
    if (options.on_decision) options.on_decision(ev, belief, model);
    const ActionId action = choose_action(env, model, state, steps_remaining);

    Rng noise = make_rng(hash_combine(derive_seed(options.seed, Stream::noise, k), static_cast<std::uint64_t>(ev.step)));
    const StepOutcome out = step(env, state, action, ev.step, noise);

    const Observation obs{k, ev.step, ev.time, state, action, out.next_state, out.reward};
    const std::size_t index = observation_count++;
    if (const auto param = absorb_observation(env, belief, obs);
        param && std::holds_alternative<GaussianVectorBelief>(belief))
      reward_history.push_back({index, *param, out.reward});
    if (options.keep_log) result.log.push_back(obs);

    auto& agent = result.agents[k];
    agent.total_reward += out.reward;
    agent.steps = ev.step;
    states[k] = out.next_state;
    if (!out.terminal) queue.push({arrivals[k][static_cast<std::size_t>(ev.step)], k, ev.step + 1});
  }

  for (auto& a : result.agents) a.regret = result.optimal_reward - a.total_reward;
  return result;
}

EpisodeResult run_episode(const Environment& env, StrategyKind kind, std::size_t agents, std::uint64_t seed,
                          double beta) {
  auto strategy = make_strategy(kind, beta);
  EpisodeOptions options;
  options.seed = seed;
  return run_episode(env, *strategy, agents, options);
}

Belief belief_from_log(const Environment& env, std::span<const Observation> log, double before) {
  std::vector<Observation> earlier;
  for (const auto& o : log)
    if (o.time < before) earlier.push_back(o);
  std::stable_sort(earlier.begin(), earlier.end(),
                   [](const Observation& a, const Observation& b) { return a.time < b.time; });
  Belief belief = env.prior();
  for (const auto& o : earlier) absorb_observation(env, belief, o);
  return belief;
}

RegretEstimate bayes_regret(std::span<const EpisodeResult> results) {
  if (results.empty()) throw InvalidInput("bayes_regret needs at least one replication");
  std::vector<double> per_replication;
  per_replication.reserve(results.size());
  for (const auto& r : results) {
    if (r.agents.empty()) throw InvalidInput("replication without agents");
    double total = 0.0;
    for (const auto& a : r.agents) total += a.regret;
    per_replication.push_back(total / static_cast<double>(r.agents.size()));
  }
  const double n = static_cast<double>(per_replication.size());
  const double mean = std::accumulate(per_replication.begin(), per_replication.end(), 0.0) / n;
  double se = 0.0;
  if (per_replication.size() > 1) {
    double ss = 0.0;
    for (double x : per_replication) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / (n - 1.0) / n);
  }
  return {mean, se};
}

std::vector<double> cumulative_regret_by_activation(const EpisodeResult& result) {
  std::vector<std::size_t> order(result.agents.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.agents[a].activation_time < result.agents[b].activation_time;
  });
  std::vector<double> series;
  series.reserve(order.size());
  double running = 0.0;
  for (auto k : order) {
    running += result.agents[k].regret;
    series.push_back(running);
  }
  return series;
}

void write_observation_log(std::ostream& out, std::span<const Observation> log) {
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(9);
  for (const auto& o : log)
    out << o.time << ' ' << o.agent << ' ' << o.step << ' ' << o.state << ' ' << o.action << ' ' << o.next_state
        << ' ' << o.reward << '\n';
  out.flags(flags);
}

}  // namespace seedrl
