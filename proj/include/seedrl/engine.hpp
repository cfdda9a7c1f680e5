#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

#include "seedrl/beliefs.hpp"
#include "seedrl/environments.hpp"
#include "seedrl/strategies.hpp"

namespace seedrl {

/// One transition taken by one agent.
struct Observation {
  std::size_t agent = 0;
  int step = 0;  ///< 1-based step index m of the agent
  double time = 0.0;
  StateId state = 0;
  ActionId action = 0;
  StateId next_state = 0;
  double reward = 0.0;
};

struct Event {
  double time = 0.0;
  std::size_t agent = 0;
  int step = 0;
};

/// Pending agent activations, popped in time order; ties go to the lower (agent, step).
class EventQueue {
 public:
  void push(const Event& e) { heap_.push(e); }
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.agent != b.agent) return a.agent > b.agent;
      return a.step > b.step;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

/// arrivals[k][m-1] is the time of agent k's m-th action.
using Arrivals = std::vector<std::vector<double>>;

/// Cumulative sums of i.i.d. Exp(rate) gaps. Agent k's list depends only on (seed_root, k).
Arrivals generate_arrivals(std::size_t agents, int horizon, std::uint64_t seed_root, double rate = 1.0);

struct AgentOutcome {
  double activation_time = 0.0;
  int steps = 0;
  double total_reward = 0.0;
  double regret = 0.0;
};

struct EpisodeResult {
  std::vector<AgentOutcome> agents;
  double optimal_reward = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  /// Empty unless requested.
  std::vector<Observation> log;
};

struct EpisodeOptions {
  std::uint64_t seed = 0;
  double arrival_rate = 1.0;
  bool keep_log = false;
  std::uint64_t config_hash = 0;
  /// Replaces the generated arrival times when set.
  const Arrivals* arrivals = nullptr;
  /// Called at every decision with the event and the belief the agent acted on.
  std::function<void(const Event&, const Belief&, const SampledModel&)> on_decision;
};

/// Simulates one episode: events in global time order; at each, the agent reads the shared
/// belief, gets a model from its strategy, plans over its remaining horizon, steps the
/// environment and folds the observation into the shared belief. Agents stop after H steps
/// or on reaching an absorbing state.
EpisodeResult run_episode(const Environment& env, Strategy& strategy, std::size_t agents,
                          const EpisodeOptions& options);
EpisodeResult run_episode(const Environment& env, StrategyKind kind, std::size_t agents, std::uint64_t seed,
                          double beta = 1.0);

/// First action of an optimal policy for `model` from `state`.
ActionId choose_action(const Environment& env, const SampledModel& model, StateId state, int steps_remaining);

/// Prior updated with every logged observation whose time is strictly before `before`.
Belief belief_from_log(const Environment& env, std::span<const Observation> log, double before);

struct RegretEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean over replications of the per-agent mean regret, with its Monte-Carlo standard error.
/// Throws InvalidInput on empty input.
RegretEstimate bayes_regret(std::span<const EpisodeResult> results);

/// Running sums of per-agent regret with agents ordered by activation time.
std::vector<double> cumulative_regret_by_activation(const EpisodeResult& result);

/// One line per observation: `time agent step state action next_state reward`, 9 decimals.
void write_observation_log(std::ostream& out, std::span<const Observation> log);

}  // namespace seedrl
