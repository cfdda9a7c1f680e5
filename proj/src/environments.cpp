#include "seedrl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <string>
#include <tuple>

#include "seedrl/errors.hpp"
#include "seedrl/planner.hpp"

namespace seedrl {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::bipolar_chain:
      return "bipolar_chain";
    case Variant::parallel_chains:
      return "parallel_chains";
    case Variant::max_reward_path:
      return "max_reward_path";
    case Variant::dirichlet_testbed:
      return "dirichlet_testbed";
  }
  return "unknown";
}

Environment::Environment(EnvironmentSpec spec, TrueModel truth, Topology topology)
    : spec_(std::move(spec)), truth_(std::move(truth)), topology_(std::move(topology)) {}

Environment::Environment(EnvironmentSpec spec, TrueModel truth, TabularModel tabular)
    : spec_(std::move(spec)), truth_(std::move(truth)), tabular_(std::move(tabular)) {}

std::size_t Environment::num_states() const {
  return tabular_ ? tabular_->states : topology_.num_states();
}

std::size_t Environment::num_actions(StateId s) const {
  if (s >= num_states()) throw InvalidInput("state " + std::to_string(s) + " out of range");
  return tabular_ ? tabular_->actions : topology_.actions(s).size();
}

bool Environment::absorbing(StateId s) const { return num_actions(s) == 0; }

std::optional<std::size_t> Environment::observed_param(StateId s, ActionId a) const {
  if (tabular_) return std::nullopt;
  const auto arcs = topology_.actions(s);
  if (a >= arcs.size()) throw InvalidAction("action " + std::to_string(a) + " unavailable at state " + std::to_string(s));
  return arcs[a].param;
}

Belief Environment::prior() const {
  switch (spec_.variant) {
    case Variant::bipolar_chain: {
      const double n = spec_.vertices;
      return FiniteScenarioBelief({{n, -n}, {-n, n}}, {0.5, 0.5});
    }
    case Variant::parallel_chains: {
      const auto c = static_cast<std::size_t>(spec_.chains);
      std::vector<double> variances(c);
      for (std::size_t i = 0; i < c; ++i) variances[i] = spec_.prior_variance + static_cast<double>(i + 1);
      return GaussianVectorBelief::diagonal(std::vector<double>(c, spec_.prior_mean), std::move(variances),
                                            spec_.noise_variance, Scale::normal);
    }
    case Variant::max_reward_path: {
      const std::size_t e = truth_.edges.size();
      return GaussianVectorBelief::diagonal(std::vector<double>(e, spec_.prior_mean),
                                            std::vector<double>(e, spec_.prior_variance), spec_.noise_variance,
                                            Scale::lognormal);
    }
    case Variant::dirichlet_testbed:
      return DirichletBelief(tabular_->states, tabular_->actions, spec_.prior_variance);
  }
  throw InvalidSpec("unknown variant");
}

Environment make_bipolar_chain(int vertices, Rng& rng, int horizon) {
  if (vertices < 4 || vertices % 2 != 0)
    throw InvalidSpec("bipolar chain needs an even number of vertices >= 4, got " + std::to_string(vertices));
  EnvironmentSpec spec;
  spec.variant = Variant::bipolar_chain;
  spec.vertices = vertices;
  spec.horizon = horizon > 0 ? horizon : 3 * vertices / 2;
  spec.start = static_cast<StateId>(vertices / 2);

  const auto n = static_cast<std::size_t>(vertices);
  std::vector<std::vector<Arc>> arcs(n);
  for (StateId v = 1; v + 1 < n; ++v) {
    Arc left{v - 1, std::nullopt, -1.0};
    Arc right{v + 1, std::nullopt, -1.0};
    if (v == 1) left.param = 0;
    if (v == n - 2) right.param = 1;
    arcs[v] = {left, right};
  }

  std::bernoulli_distribution coin(0.5);
  TrueModel truth;
  truth.scenario = coin(rng) ? 1 : 0;
  const double big = vertices;
  truth.theta = *truth.scenario == 0 ? std::vector<double>{big, -big} : std::vector<double>{-big, big};
  return Environment(spec, std::move(truth), Topology(std::move(arcs)));
}

Environment make_parallel_chains(int chains, int horizon, double prior_mean, double prior_variance,
                                 double noise_variance, Rng& rng) {
  if (chains < 1) throw InvalidSpec("parallel chains needs C >= 1");
  if (horizon < 1) throw InvalidSpec("parallel chains needs H >= 1");
  if (!(noise_variance > 0.0)) throw InvalidSpec("noise variance must be positive");
  if (!(prior_variance + 1.0 > 0.0)) throw InvalidSpec("prior variance must be positive");
  EnvironmentSpec spec;
  spec.variant = Variant::parallel_chains;
  spec.chains = chains;
  spec.horizon = horizon;
  spec.prior_mean = prior_mean;
  spec.prior_variance = prior_variance;
  spec.noise_variance = noise_variance;
  spec.start = 0;

  // State 0 is the source; depth d (1..H) of chain c is 1 + c * H + (d - 1).
  const auto c_count = static_cast<std::size_t>(chains);
  const auto h = static_cast<std::size_t>(horizon);
  auto id = [h](std::size_t c, std::size_t d) { return 1 + c * h + (d - 1); };
  std::vector<std::vector<Arc>> arcs(1 + c_count * h);
  for (std::size_t c = 0; c < c_count; ++c) {
    Arc first{id(c, 1), std::nullopt, 0.0};
    if (h == 1) first.param = c;
    arcs[0].push_back(first);
    for (std::size_t d = 1; d < h; ++d) {
      Arc advance{id(c, d + 1), std::nullopt, 0.0};
      if (d + 1 == h) advance.param = c;
      arcs[id(c, d)] = {advance};
    }
  }

  TrueModel truth;
  truth.theta.resize(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    std::normal_distribution<double> prior(prior_mean, std::sqrt(prior_variance + static_cast<double>(c + 1)));
    truth.theta[c] = prior(rng);
  }
  return Environment(spec, std::move(truth), Topology(std::move(arcs)));
}

Environment make_max_reward_path(int vertices, double edge_probability, double prior_mean, double prior_variance,
                                 double noise_variance, int horizon, Rng& rng) {
  if (vertices < 2) throw InvalidSpec("max-reward path needs N >= 2");
  if (!(edge_probability > 0.0 && edge_probability <= 1.0)) throw InvalidSpec("edge probability must be in (0, 1]");
  if (horizon < 1) throw InvalidSpec("max-reward path needs H >= 1");
  if (!(noise_variance > 0.0)) throw InvalidSpec("noise variance must be positive");
  if (!(prior_variance >= 0.0)) throw InvalidSpec("prior variance must be nonnegative");
  EnvironmentSpec spec;
  spec.variant = Variant::max_reward_path;
  spec.vertices = vertices;
  spec.horizon = horizon;
  spec.edge_probability = edge_probability;
  spec.prior_mean = prior_mean;
  spec.prior_variance = prior_variance;
  spec.noise_variance = noise_variance;
  spec.start = 0;

  const auto n = static_cast<std::size_t>(vertices);
  std::bernoulli_distribution coin(edge_probability);
  std::vector<std::pair<StateId, StateId>> edges;
  constexpr int max_attempts = 1000;
  bool admissible = false;
  for (int attempt = 0; attempt < max_attempts && !admissible; ++attempt) {
    edges.clear();
    std::vector<std::size_t> degree(n, 0);
    for (StateId u = 0; u < n; ++u)
      for (StateId v = u + 1; v < n; ++v)
        if (coin(rng)) {
          edges.emplace_back(u, v);
          ++degree[u];
          ++degree[v];
        }
    admissible = std::none_of(degree.begin(), degree.end(), [](std::size_t d) { return d == 0; });
  }
  if (!admissible) throw GenerationError("no graph without isolated vertices within 1000 attempts");

  TrueModel truth;
  truth.edges = edges;
  truth.theta.resize(edges.size());
  std::normal_distribution<double> log_prior(prior_mean, std::sqrt(prior_variance));
  for (auto& t : truth.theta) t = std::exp(log_prior(rng));

  std::vector<std::vector<Arc>> arcs(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    arcs[u].push_back({v, e, 0.0});
    arcs[v].push_back({u, e, 0.0});
  }
  for (auto& list : arcs)
    std::sort(list.begin(), list.end(), [](const Arc& a, const Arc& b) { return a.next < b.next; });
  return Environment(spec, std::move(truth), Topology(std::move(arcs)));
}

Environment make_dirichlet_testbed(int states, int horizon, double prior_alpha, Rng& rng) {
  if (states < 2) throw InvalidSpec("testbed needs at least 2 states");
  if (horizon < 1) throw InvalidSpec("testbed needs H >= 1");
  if (!(prior_alpha > 0.0)) throw InvalidSpec("Dirichlet prior must be positive");
  EnvironmentSpec spec;
  spec.variant = Variant::dirichlet_testbed;
  spec.vertices = states;
  spec.horizon = horizon;
  spec.prior_variance = prior_alpha;
  spec.start = 0;

  TabularModel model;
  model.states = static_cast<std::size_t>(states);
  model.actions = 2;
  model.rewards.resize(model.states * model.actions);
  for (StateId s = 0; s < model.states; ++s)
    for (ActionId a = 0; a < model.actions; ++a)
      model.rewards[s * model.actions + a] = static_cast<double>(s) / static_cast<double>(model.states - 1);

  std::gamma_distribution<double> gamma(prior_alpha, 1.0);
  model.transitions.resize(model.states * model.actions * model.states);
  for (StateId s = 0; s < model.states; ++s) {
    for (ActionId a = 0; a < model.actions; ++a) {
      const std::size_t off = model.row_offset(s, a);
      double total = 0.0;
      for (StateId t = 0; t < model.states; ++t) total += model.transitions[off + t] = gamma(rng);
      for (StateId t = 0; t < model.states; ++t) model.transitions[off + t] /= total;
    }
  }
  TrueModel truth;
  truth.transitions = model.transitions;
  return Environment(spec, std::move(truth), std::move(model));
}

StepOutcome step(const Environment& env, StateId state, ActionId action, int step_index, Rng& rng) {
  const auto& spec = env.spec();
  if (action >= env.num_actions(state))
    throw InvalidAction("action " + std::to_string(action) + " unavailable at state " + std::to_string(state));

  StepOutcome out;
  if (env.stochastic_transitions()) {
    const auto& model = env.tabular();
    const auto row = model.row(state, action);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double cumulative = 0.0;
    out.next_state = model.states - 1;
    for (StateId t = 0; t < model.states; ++t) {
      cumulative += row[t];
      if (u < cumulative) {
        out.next_state = t;
        break;
      }
    }
    out.reward = model.reward(state, action);
  } else {
    const Arc& arc = env.topology().actions(state)[action];
    out.next_state = arc.next;
    if (!arc.param) {
      out.reward = arc.fixed_reward;
    } else {
      const double theta = env.truth().theta[*arc.param];
      const double s2 = spec.noise_variance;
      switch (spec.variant) {
        case Variant::parallel_chains: {
          std::normal_distribution<double> noise(theta, std::sqrt(s2));
          out.reward = noise(rng);
          break;
        }
        case Variant::max_reward_path: {
          std::normal_distribution<double> log_noise(std::log(theta) - s2 / 2.0, std::sqrt(s2));
          out.reward = std::exp(log_noise(rng));
          break;
        }
        default:
          out.reward = theta;
      }
    }
  }
  out.terminal = step_index >= spec.horizon || env.absorbing(out.next_state);
  return out;
}

double optimal_reward(const Environment& env) {
  const int h = env.spec().horizon;
  if (env.stochastic_transitions()) return plan_expected(env.tabular(), env.spec().start, h).value;
  return plan(env.topology(), env.truth().theta, env.spec().start, h).value;
}

void write_model(std::ostream& out, const Environment& env) {
  const auto& spec = env.spec();
  const auto flags = out.flags();
  out << std::fixed << std::setprecision(9);
  if (env.stochastic_transitions()) {
    const auto& m = env.tabular();
    out << "# " << to_string(spec.variant) << " states=" << m.states << " actions=" << m.actions
        << " columns=s,a,next,p\n";
    for (StateId s = 0; s < m.states; ++s)
      for (ActionId a = 0; a < m.actions; ++a)
        for (StateId t = 0; t < m.states; ++t) out << s << ' ' << a << ' ' << t << ' ' << m.row(s, a)[t] << '\n';
    out.flags(flags);
    return;
  }

  std::vector<std::tuple<StateId, StateId, double>> rows;
  const auto& topo = env.topology();
  for (StateId u = 0; u < topo.num_states(); ++u) {
    for (const Arc& arc : topo.actions(u)) {
      if (spec.variant == Variant::max_reward_path && arc.next < u) continue;
      rows.emplace_back(u, arc.next, arc.reward(env.truth().theta));
    }
  }
  std::sort(rows.begin(), rows.end());
  out << "# " << to_string(spec.variant) << " states=" << topo.num_states() << " edges=" << rows.size()
      << " horizon=" << spec.horizon << " start=" << spec.start << " columns=u,v,theta\n";
  for (const auto& [u, v, theta] : rows) out << u << ' ' << v << ' ' << theta << '\n';
  out.flags(flags);
}

}  // namespace seedrl
