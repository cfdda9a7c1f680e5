#pragma once

#include <span>

#include "seedrl/model.hpp"

namespace seedrl {

struct PlanResult {
  ActionId action = 0;
  double value = 0.0;
};

/// Finite-horizon backward induction on a deterministic-transition graph whose uncertain
/// arc rewards are read from `theta`:
///   V_0 = 0,  V_h(v) = max_a [ r(v, a) + V_{h-1}(next(v, a)) ],  V_h(absorbing) = 0.
/// Returns the first action of an optimal `steps_remaining`-step policy from `state`
/// (lowest action index among ties) and its value.
/// Throws NoAction when `state` is absorbing or `steps_remaining` < 1.
PlanResult plan(const Topology& topology, std::span<const double> theta, StateId state, int steps_remaining);

/// Backward induction with expectation over next states:
///   V_h(s) = max_a [ r(s, a) + sum_s' p(s, a, s') V_{h-1}(s') ].
/// Throws InvalidModel if any row deviates from summing to 1 by more than 1e-9.
PlanResult plan_expected(const TabularModel& model, StateId state, int steps_remaining);

}  // namespace seedrl
