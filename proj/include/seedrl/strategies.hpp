#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "seedrl/beliefs.hpp"
#include "seedrl/environments.hpp"
#include "seedrl/model.hpp"
#include "seedrl/rng.hpp"

namespace seedrl {

enum class StrategyKind {
  seed_standard_gaussian,
  seed_martingalean_gaussian,
  seed_exponential_dirichlet,
  seed_finite_scenario,
  thompson_resampling,
  concurrent_ucrl,
  greedy,
};

/// Canonical CLI name, e.g. "seed-standard-gaussian".
std::string_view to_string(StrategyKind kind);
/// Throws ConfigError for an unknown name.
StrategyKind parse_strategy(std::string_view name);
const std::vector<StrategyKind>& all_strategies();
/// Whether the strategy is defined for this family of posterior.
bool supports(StrategyKind kind, const Belief& belief);

// Per-agent seeds. Each is drawn once per episode and never changes afterwards.

struct GaussianSeed {
  std::vector<double> z;
};

/// Prior draw theta0 (on the parameter scale: ln theta for lognormal beliefs) plus an
/// indexed perturbation stream w_j ~ N(mean, variance).
struct MartingaleanSeed {
  std::vector<double> theta0;
  std::uint64_t stream_key = 0;
  double perturbation_mean = 0.0;
  double perturbation_variance = 1.0;

  /// Perturbation bound to global observation index j; identical on every access.
  double perturbation(std::size_t j) const;
};

/// Exp(1) streams z_{s,a,s',i}, regenerated from a counter-based generator.
struct ExponentialSeed {
  std::uint64_t stream_key = 0;

  double value(StateId s, ActionId a, StateId next, std::uint64_t i) const;
};

struct UniformSeed {
  double u = 0.0;
};

using AgentSeed = std::variant<GaussianSeed, MartingaleanSeed, ExponentialSeed, UniformSeed>;

GaussianSeed draw_gaussian_seed(std::size_t dimension, Rng& rng);
MartingaleanSeed draw_martingalean_seed(const GaussianVectorBelief& prior, Rng& rng);
ExponentialSeed draw_exponential_seed(Rng& rng);
UniformSeed draw_uniform_seed(Rng& rng);

/// An observation of an uncertain reward parameter, tagged with its position in the
/// global observation log.
struct RewardObservation {
  std::size_t index = 0;
  std::size_t param = 0;
  double reward = 0.0;
};

/// mu + D^T z (exponentiated for lognormal beliefs), D from factorize_covariance.
SampledModel propose_standard_gaussian(const GaussianVectorBelief& belief, const GaussianSeed& seed);

/// Regularized least-squares fit anchored at the seed's prior draw:
///   (O^T O + s2 S0^-1)^-1 (O^T y + s2 S0^-1 theta0)
/// with perturbed targets y_j = r_j + w_j (normal) or y_j = ln r_j - w_j (lognormal,
/// w_j ~ N(-s2/2, s2), so y_j is centred on ln r_j + s2/2 like the conjugate update).
SampledModel propose_martingalean(const GaussianVectorBelief& prior, std::span<const RewardObservation> history,
                                  const MartingaleanSeed& seed);

/// p(s'|s,a) = sum_{i <= alpha(s,a,s')} z_{s,a,s',i} / sum over all s~ of the same.
/// Throws InvalidModel for non-integer alpha.
SampledModel propose_exponential_dirichlet(const DirichletBelief& belief, const ExponentialSeed& seed);

/// Inverse CDF of the scenario posterior at the seed's uniform variate.
SampledModel propose_finite_scenario_seed(const FiniteScenarioBelief& belief, const UniformSeed& seed);

SampledModel propose_thompson_resampling(const Belief& belief, Rng& rng);

SampledModel propose_ucrl(const GaussianVectorBelief& belief, double beta);
SampledModel propose_ucrl(const FiniteScenarioBelief& belief,
                          const std::function<double(std::span<const double>)>& scenario_value);

/// Posterior-mean model; exp of the ln-scale mean for lognormal beliefs.
SampledModel propose_greedy(const Belief& belief);

/// What a strategy sees when one of its agents acts.
struct ProposalContext {
  std::size_t agent = 0;
  const Belief& belief;
  std::span<const RewardObservation> reward_history;
  const Environment& env;
  StateId state = 0;
  int steps_remaining = 0;
};

/// A population of agents following one algorithm through an episode.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual StrategyKind kind() const = 0;
  /// Fixes per-agent randomness for a new episode; agent k's randomness depends only on
  /// (seed_root, k).
  virtual void begin_episode(const Environment& env, std::size_t agents, std::uint64_t seed_root) = 0;
  virtual SampledModel propose(const ProposalContext& ctx) = 0;
};

/// Seed-sampling strategies. Seeds can be pinned per agent, which takes effect at the
/// next begin_episode.
class SeedSampling : public Strategy {
 public:
  explicit SeedSampling(StrategyKind kind);

  StrategyKind kind() const override { return kind_; }
  void begin_episode(const Environment& env, std::size_t agents, std::uint64_t seed_root) override;
  SampledModel propose(const ProposalContext& ctx) override;

  void pin_seed(std::size_t agent, AgentSeed seed);
  const AgentSeed& seed(std::size_t agent) const { return seeds_.at(agent); }

 private:
  struct MartingaleanCache {
    std::size_t consumed = 0;
    std::vector<double> sums;
    std::vector<double> counts;
  };

  SampledModel propose_martingalean_cached(const ProposalContext& ctx);
  SampledModel propose_exponential_cached(const ProposalContext& ctx);

  StrategyKind kind_;
  std::optional<GaussianVectorBelief> prior_;
  std::vector<AgentSeed> seeds_;
  std::unordered_map<std::size_t, AgentSeed> pinned_;
  std::vector<MartingaleanCache> martingalean_;
  std::vector<std::vector<std::vector<double>>> exponential_prefix_;
};

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, double beta = 1.0);

}  // namespace seedrl
