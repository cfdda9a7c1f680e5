#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include "seedrl/beliefs.hpp"
#include "seedrl/model.hpp"
#include "seedrl/rng.hpp"

namespace seedrl {

enum class Variant { bipolar_chain, parallel_chains, max_reward_path, dirichlet_testbed };

std::string_view to_string(Variant v);

struct EnvironmentSpec {
  Variant variant = Variant::bipolar_chain;
  int vertices = 0;  ///< N: chain length (bipolar), graph order (max-path), state count (testbed)
  int chains = 0;    ///< C (parallel chains)
  int horizon = 0;   ///< H
  double edge_probability = 0.0;  ///< p (max-path)
  /// Prior of each uncertain parameter: theta_c ~ N(mean, variance + c) for parallel chains,
  /// ln theta_e ~ N(mean, variance) for max-path, Dirichlet(variance) for the testbed.
  double prior_mean = 0.0;
  double prior_variance = 0.0;
  double noise_variance = 1.0;  ///< sigma^2 of the reward likelihood
  StateId start = 0;
};

struct TrueModel {
  /// Reward parameters on the natural scale.
  std::vector<double> theta;
  /// Bipolar chain: 0 means theta_L = +N, 1 means theta_R = +N.
  std::optional<std::size_t> scenario;
  /// Max-path undirected edges (u < v), sorted; edge i carries theta[i].
  std::vector<std::pair<StateId, StateId>> edges;
  /// Testbed kernel [s][a][s'].
  std::vector<double> transitions;
};

struct StepOutcome {
  StateId next_state = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// A benchmark environment: static description, true parameters, and the structure the
/// agents plan over.
class Environment {
 public:
  Environment(EnvironmentSpec spec, TrueModel truth, Topology topology);
  Environment(EnvironmentSpec spec, TrueModel truth, TabularModel tabular);

  const EnvironmentSpec& spec() const { return spec_; }
  const TrueModel& truth() const { return truth_; }
  /// True for the testbed; its kernel is the unknown.
  bool stochastic_transitions() const { return tabular_.has_value(); }
  /// Deterministic-transition graph (undefined for the testbed).
  const Topology& topology() const { return topology_; }
  /// Testbed model with known rewards and the true kernel.
  const TabularModel& tabular() const { return *tabular_; }

  std::size_t num_states() const;
  std::size_t num_actions(StateId s) const;
  bool absorbing(StateId s) const;
  /// Reward parameter revealed by taking `a` at `s`, if any.
  std::optional<std::size_t> observed_param(StateId s, ActionId a) const;
  /// Shared prior of the agents.
  Belief prior() const;

 private:
  EnvironmentSpec spec_;
  TrueModel truth_;
  Topology topology_;
  std::optional<TabularModel> tabular_;
};

/// Chain of N vertices with absorbing endpoints; theta = (theta_L, theta_R) = +-(N, -N) with
/// probability 1/2 each. Start N/2; H = 3N/2 unless `horizon` > 0.
/// Throws InvalidSpec unless N is even and >= 4.
Environment make_bipolar_chain(int vertices, Rng& rng, int horizon = 0);

/// C chains of H edges from a shared source. Only the last edge of chain c (0-based) is
/// rewarded, with weight theta_c ~ N(mean, variance + c + 1).
Environment make_parallel_chains(int chains, int horizon, double prior_mean, double prior_variance,
                                 double noise_variance, Rng& rng);

/// Undirected G(N, p) resampled until no vertex is isolated (at most 1000 attempts), with
/// ln theta_e ~ N(mean, variance) and start vertex 0.
Environment make_max_reward_path(int vertices, double edge_probability, double prior_mean, double prior_variance,
                                 double noise_variance, int horizon, Rng& rng);

/// Small unknown-transition MDP: `states` states, actions {0, 1}, kernel rows drawn from
/// Dirichlet(prior_alpha), known reward r(s, a) = s / (states - 1), start state 0.
Environment make_dirichlet_testbed(int states, int horizon, double prior_alpha, Rng& rng);

/// Takes `action` at `state` as the `step_index`-th (1-based) step of an agent.
/// Throws InvalidAction for an action not available at `state`.
StepOutcome step(const Environment& env, StateId state, ActionId action, int step_index, Rng& rng);

/// Value of the optimal H-step policy from the start state under the true parameters.
double optimal_reward(const Environment& env);

/// Plain-text dump: one header line, then `u v theta` per rewarded arc ordered by (u, v)
/// (`s a s' p` rows for the testbed).
void write_model(std::ostream& out, const Environment& env);

}  // namespace seedrl
