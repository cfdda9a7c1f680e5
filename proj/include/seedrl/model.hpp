#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace seedrl {

using StateId = std::size_t;
using ActionId = std::size_t;

/// One action available at a state of a deterministic-transition graph.
struct Arc {
  StateId next = 0;
  /// Index of the uncertain reward parameter this arc observes; empty for a known reward.
  std::optional<std::size_t> param;
  double fixed_reward = 0.0;

  double reward(std::span<const double> theta) const { return param ? theta[*param] : fixed_reward; }
};

/// Deterministic-transition state graph. Action `a` at state `s` is `actions(s)[a]`;
/// a state with no actions is absorbing.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<std::vector<Arc>> arcs);

  std::size_t num_states() const { return arcs_.size(); }
  std::span<const Arc> actions(StateId s) const { return arcs_.at(s); }
  bool absorbing(StateId s) const { return arcs_.at(s).empty(); }
  std::size_t max_degree() const;
  std::size_t num_arcs() const;

 private:
  std::vector<std::vector<Arc>> arcs_;
};

/// Finite MDP with a tabular kernel, laid out [s][a][s'], and known rewards [s][a].
/// Every action is available in every state.
struct TabularModel {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<double> transitions;
  std::vector<double> rewards;

  std::size_t row_offset(StateId s, ActionId a) const { return (s * actions + a) * states; }
  std::span<const double> row(StateId s, ActionId a) const {
    return std::span<const double>(transitions).subspan(row_offset(s, a), states);
  }
  double reward(StateId s, ActionId a) const { return rewards[s * actions + a]; }
};

/// Scales a nonnegative row so that its left-to-right sum is exactly 1; the last positive
/// entry absorbs the rounding. Throws InvalidModel when the row has no positive entry.
void normalize_row(std::span<double> row);

/// A concrete parameterization produced by a strategy at one event.
struct SampledModel {
  /// Reward parameters on the natural scale (theta, not ln theta).
  std::vector<double> theta;
  /// Transition kernel [s][a][s'] when transitions are the uncertain part.
  std::vector<double> transitions;
  /// Chosen hypothesis of a finite-scenario belief.
  std::optional<std::size_t> scenario;

  friend bool operator==(const SampledModel&, const SampledModel&) = default;
};

}  // namespace seedrl
