#include "seedrl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "seedrl/errors.hpp"

namespace seedrl {

PlanResult plan(const Topology& topology, std::span<const double> theta, StateId state, int steps_remaining) {
  if (state >= topology.num_states()) throw InvalidInput("state " + std::to_string(state) + " out of range");
  if (steps_remaining < 1) throw NoAction("no steps remaining");
  if (topology.absorbing(state)) throw NoAction("state " + std::to_string(state) + " is absorbing");

  const std::size_t n = topology.num_states();
  std::vector<double> prev(n, 0.0);
  std::vector<double> next(n, 0.0);
  for (int h = 1; h < steps_remaining; ++h) {
    for (StateId v = 0; v < n; ++v) {
      const auto arcs = topology.actions(v);
      if (arcs.empty()) {
        next[v] = 0.0;
        continue;
      }
      double best = arcs[0].reward(theta) + prev[arcs[0].next];
      for (std::size_t a = 1; a < arcs.size(); ++a) {
        const double q = arcs[a].reward(theta) + prev[arcs[a].next];
        if (q > best) best = q;
      }
      next[v] = best;
    }
    std::swap(prev, next);
  }

  const auto arcs = topology.actions(state);
  PlanResult result{0, arcs[0].reward(theta) + prev[arcs[0].next]};
  for (std::size_t a = 1; a < arcs.size(); ++a) {
    const double q = arcs[a].reward(theta) + prev[arcs[a].next];
    if (q > result.value) result = {a, q};
  }
  return result;
}

PlanResult plan_expected(const TabularModel& model, StateId state, int steps_remaining) {
  if (state >= model.states) throw InvalidInput("state " + std::to_string(state) + " out of range");
  if (model.actions == 0) throw NoAction("model has no actions");
  if (steps_remaining < 1) throw NoAction("no steps remaining");
  if (model.transitions.size() != model.states * model.actions * model.states ||
      model.rewards.size() != model.states * model.actions)
    throw InvalidModel("tabular model has the wrong shape");
  for (StateId s = 0; s < model.states; ++s) {
    for (ActionId a = 0; a < model.actions; ++a) {
      double total = 0.0;
      for (double p : model.row(s, a)) {
        if (!(p >= 0.0)) throw InvalidModel("negative transition probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) throw InvalidModel("transition row does not sum to 1");
    }
  }

  const std::size_t n = model.states;
  auto q_value = [&](const std::vector<double>& values, StateId s, ActionId a) {
    double expected = 0.0;
    const auto row = model.row(s, a);
    for (StateId t = 0; t < n; ++t) expected += row[t] * values[t];
    return model.reward(s, a) + expected;
  };

  std::vector<double> prev(n, 0.0);
  std::vector<double> next(n, 0.0);
  for (int h = 1; h < steps_remaining; ++h) {
    for (StateId s = 0; s < n; ++s) {
      double best = q_value(prev, s, 0);
      for (ActionId a = 1; a < model.actions; ++a) best = std::max(best, q_value(prev, s, a));
      next[s] = best;
    }
    std::swap(prev, next);
  }

  PlanResult result{0, q_value(prev, state, 0)};
  for (ActionId a = 1; a < model.actions; ++a) {
    const double q = q_value(prev, state, a);
    if (q > result.value) result = {a, q};
  }
  return result;
}

}  // namespace seedrl
