#include "seedrl/strategies.hpp"

#include <array>
#include <cmath>
#include <string>

#include "seedrl/errors.hpp"
#include "seedrl/planner.hpp"

namespace seedrl {

namespace {

constexpr std::array<std::pair<StrategyKind, std::string_view>, 7> kStrategyNames{{
    {StrategyKind::seed_standard_gaussian, "seed-standard-gaussian"},
    {StrategyKind::seed_martingalean_gaussian, "seed-martingalean-gaussian"},
    {StrategyKind::seed_exponential_dirichlet, "seed-exponential-dirichlet"},
    {StrategyKind::seed_finite_scenario, "seed-finite-scenario"},
    {StrategyKind::thompson_resampling, "thompson-resampling"},
    {StrategyKind::concurrent_ucrl, "concurrent-ucrl"},
    {StrategyKind::greedy, "greedy"},
}};

SampledModel to_natural_scale(const Eigen::VectorXd& values, Scale scale) {
  SampledModel m;
  m.theta.assign(values.data(), values.data() + values.size());
  if (scale == Scale::lognormal)
    for (auto& x : m.theta) x = std::exp(x);
  return m;
}

double martingalean_target(const GaussianVectorBelief& prior, const MartingaleanSeed& seed,
                           const RewardObservation& obs) {
  const double w = seed.perturbation(obs.index);
  if (prior.scale() == Scale::normal) return obs.reward + w;
  if (!(obs.reward > 0.0)) throw InvalidInput("lognormal likelihood requires a positive reward");
  return std::log(obs.reward) - w;
}

double diagonal_fit(double sum, double count, double prior_variance, double noise_variance, double theta0) {
  if (!(prior_variance > 0.0)) throw NumericDomain("prior covariance must be invertible");
  const double lambda = noise_variance / prior_variance;
  return (sum + lambda * theta0) / (count + lambda);
}

void check_integer_alpha(double alpha) {
  if (alpha != std::floor(alpha)) throw InvalidModel("exponential-Dirichlet mapping needs integer alpha");
}

template <class B>
const B& expect_belief(const Belief& belief, StrategyKind kind) {
  if (const auto* b = std::get_if<B>(&belief)) return *b;
  throw ConfigError(std::string(to_string(kind)) + " is not defined for this environment's posterior");
}

}  // namespace

std::string_view to_string(StrategyKind kind) {
  for (const auto& [k, name] : kStrategyNames)
    if (k == kind) return name;
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames)
    if (n == name) return k;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

const std::vector<StrategyKind>& all_strategies() {
  static const std::vector<StrategyKind> kinds = [] {
    std::vector<StrategyKind> v;
    for (const auto& [k, name] : kStrategyNames) v.push_back(k);
    return v;
  }();
  return kinds;
}

bool supports(StrategyKind kind, const Belief& belief) {
  const bool gaussian = std::holds_alternative<GaussianVectorBelief>(belief);
  const bool dirichlet = std::holds_alternative<DirichletBelief>(belief);
  const bool finite = std::holds_alternative<FiniteScenarioBelief>(belief);
  switch (kind) {
    case StrategyKind::seed_standard_gaussian:
    case StrategyKind::seed_martingalean_gaussian:
      return gaussian;
    case StrategyKind::seed_exponential_dirichlet:
      return dirichlet;
    case StrategyKind::seed_finite_scenario:
      return finite;
    case StrategyKind::concurrent_ucrl:
      return gaussian || finite;
    case StrategyKind::thompson_resampling:
    case StrategyKind::greedy:
      return true;
  }
  return false;
}

double MartingaleanSeed::perturbation(std::size_t j) const {
  return perturbation_mean + std::sqrt(perturbation_variance) * counter_normal(stream_key, {j});
}

double ExponentialSeed::value(StateId s, ActionId a, StateId next, std::uint64_t i) const {
  return counter_exponential(stream_key, {s, a, next, i});
}

GaussianSeed draw_gaussian_seed(std::size_t dimension, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  GaussianSeed seed;
  seed.z.resize(dimension);
  for (auto& x : seed.z) x = normal(rng);
  return seed;
}

MartingaleanSeed draw_martingalean_seed(const GaussianVectorBelief& prior, Rng& rng) {
  const auto z = draw_gaussian_seed(prior.dimension(), rng).z;
  const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
  Eigen::VectorXd theta0;
  if (prior.is_diagonal())
    theta0 = prior.mean() + prior.variances().cwiseSqrt().cwiseProduct(zv);
  else
    theta0 = prior.mean() + factorize_covariance(prior.covariance()).transpose() * zv;

  MartingaleanSeed seed;
  seed.theta0.assign(theta0.data(), theta0.data() + theta0.size());
  seed.stream_key = rng();
  const double s2 = prior.noise_variance();
  seed.perturbation_mean = prior.scale() == Scale::normal ? 0.0 : -s2 / 2.0;
  seed.perturbation_variance = s2;
  return seed;
}

ExponentialSeed draw_exponential_seed(Rng& rng) { return ExponentialSeed{rng()}; }

UniformSeed draw_uniform_seed(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return UniformSeed{unit(rng)};
}

SampledModel propose_standard_gaussian(const GaussianVectorBelief& belief, const GaussianSeed& seed) {
  if (seed.z.size() != belief.dimension()) throw InvalidInput("seed dimension does not match the belief");
  const Eigen::Map<const Eigen::VectorXd> z(seed.z.data(), static_cast<Eigen::Index>(seed.z.size()));
  Eigen::VectorXd values;
  if (belief.is_diagonal())
    values = belief.mean() + belief.variances().cwiseSqrt().cwiseProduct(z);
  else
    values = belief.mean() + factorize_covariance(belief.covariance()).transpose() * z;
  return to_natural_scale(values, belief.scale());
}

SampledModel propose_martingalean(const GaussianVectorBelief& prior, std::span<const RewardObservation> history,
                                  const MartingaleanSeed& seed) {
  const std::size_t d = prior.dimension();
  if (seed.theta0.size() != d) throw InvalidInput("seed dimension does not match the prior");
  const double s2 = prior.noise_variance();

  if (prior.is_diagonal()) {
    std::vector<double> sums(d, 0.0);
    std::vector<double> counts(d, 0.0);
    for (const auto& obs : history) {
      if (obs.param >= d) throw InvalidInput("observation parameter out of range");
      sums[obs.param] += martingalean_target(prior, seed, obs);
      counts[obs.param] += 1.0;
    }
    Eigen::VectorXd fit(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
      fit(static_cast<Eigen::Index>(i)) = diagonal_fit(sums[i], counts[i], prior.variance(i), s2, seed.theta0[i]);
    return to_natural_scale(fit, prior.scale());
  }

  const Eigen::LLT<Eigen::MatrixXd> prior_chol(prior.covariance());
  if (prior_chol.info() != Eigen::Success) throw NumericDomain("prior covariance must be positive definite");
  const auto n = static_cast<Eigen::Index>(d);
  const Eigen::MatrixXd precision = prior_chol.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::Map<const Eigen::VectorXd> theta0(seed.theta0.data(), n);
  Eigen::MatrixXd normal_matrix = s2 * precision;
  Eigen::VectorXd rhs = s2 * precision * theta0;
  for (const auto& obs : history) {
    if (obs.param >= d) throw InvalidInput("observation parameter out of range");
    const auto p = static_cast<Eigen::Index>(obs.param);
    normal_matrix(p, p) += 1.0;
    rhs(p) += martingalean_target(prior, seed, obs);
  }
  const Eigen::LLT<Eigen::MatrixXd> solver(normal_matrix);
  if (solver.info() != Eigen::Success) throw NumericDomain("singular normal equations");
  return to_natural_scale(solver.solve(rhs), prior.scale());
}

SampledModel propose_exponential_dirichlet(const DirichletBelief& belief, const ExponentialSeed& seed) {
  const std::size_t n = belief.states();
  SampledModel m;
  m.transitions.resize(n * belief.actions() * n);
  std::size_t out = 0;
  for (StateId s = 0; s < n; ++s) {
    for (ActionId a = 0; a < belief.actions(); ++a) {
      const std::size_t start = out;
      double total = 0.0;
      for (StateId t = 0; t < n; ++t) {
        const double alpha = belief.alpha(s, a, t);
        check_integer_alpha(alpha);
        double partial = 0.0;
        for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(alpha); ++i) partial += seed.value(s, a, t, i);
        m.transitions[out++] = partial;
        total += partial;
      }
      if (!(total > 0.0)) throw InvalidModel("Dirichlet row has no positive parameter");
      normalize_row(std::span<double>(m.transitions).subspan(start, out - start));
    }
  }
  return m;
}

SampledModel propose_finite_scenario_seed(const FiniteScenarioBelief& belief, const UniformSeed& seed) {
  const auto& p = belief.probabilities();
  std::size_t chosen = p.size() - 1;
  while (chosen > 0 && !(p[chosen] > 0.0)) --chosen;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cumulative += p[i];
    if (seed.u < cumulative && p[i] > 0.0) {
      chosen = i;
      break;
    }
  }
  SampledModel m;
  m.scenario = chosen;
  m.theta = belief.scenario(chosen);
  return m;
}

SampledModel propose_thompson_resampling(const Belief& belief, Rng& rng) { return sample_posterior(belief, rng); }

SampledModel propose_ucrl(const GaussianVectorBelief& belief, double beta) { return ucb_parameters(belief, beta); }

SampledModel propose_ucrl(const FiniteScenarioBelief& belief,
                          const std::function<double(std::span<const double>)>& scenario_value) {
  return ucb_parameters(belief, scenario_value);
}

SampledModel propose_greedy(const Belief& belief) {
  if (const auto* g = std::get_if<GaussianVectorBelief>(&belief)) return ucb_parameters(*g, 0.0);
  if (const auto* f = std::get_if<FiniteScenarioBelief>(&belief)) {
    SampledModel m;
    m.theta.assign(f->scenario(0).size(), 0.0);
    for (std::size_t i = 0; i < f->size(); ++i)
      for (std::size_t j = 0; j < m.theta.size(); ++j) m.theta[j] += f->probabilities()[i] * f->scenario(i)[j];
    return m;
  }
  const auto& d = std::get<DirichletBelief>(belief);
  SampledModel m;
  for (StateId s = 0; s < d.states(); ++s) {
    for (ActionId a = 0; a < d.actions(); ++a) {
      const auto row = d.row(s, a);
      double total = 0.0;
      for (double x : row) total += x;
      if (!(total > 0.0)) throw InvalidModel("Dirichlet row has no positive parameter");
      for (double x : row) m.transitions.push_back(x / total);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

SeedSampling::SeedSampling(StrategyKind kind) : kind_(kind) {
  switch (kind) {
    case StrategyKind::seed_standard_gaussian:
    case StrategyKind::seed_martingalean_gaussian:
    case StrategyKind::seed_exponential_dirichlet:
    case StrategyKind::seed_finite_scenario:
      return;
    default:
      throw ConfigError(std::string(to_string(kind)) + " is not a seed-sampling strategy");
  }
}

void SeedSampling::pin_seed(std::size_t agent, AgentSeed seed) { pinned_[agent] = std::move(seed); }

void SeedSampling::begin_episode(const Environment& env, std::size_t agents, std::uint64_t seed_root) {
  const Belief prior = env.prior();
  if (!supports(kind_, prior))
    throw ConfigError(std::string(to_string(kind_)) + " is not defined for this environment's posterior");
  prior_.reset();
  if (const auto* g = std::get_if<GaussianVectorBelief>(&prior)) prior_ = *g;

  seeds_.clear();
  seeds_.reserve(agents);
  for (std::size_t k = 0; k < agents; ++k) {
    if (auto it = pinned_.find(k); it != pinned_.end()) {
      seeds_.push_back(it->second);
      continue;
    }
    Rng rng = make_rng(derive_seed(seed_root, Stream::agent_seed, k));
    switch (kind_) {
      case StrategyKind::seed_standard_gaussian:
        seeds_.emplace_back(draw_gaussian_seed(prior_->dimension(), rng));
        break;
      case StrategyKind::seed_martingalean_gaussian:
        seeds_.emplace_back(draw_martingalean_seed(*prior_, rng));
        break;
      case StrategyKind::seed_exponential_dirichlet:
        seeds_.emplace_back(draw_exponential_seed(rng));
        break;
      default:
        seeds_.emplace_back(draw_uniform_seed(rng));
    }
  }

  martingalean_.assign(kind_ == StrategyKind::seed_martingalean_gaussian ? agents : 0, MartingaleanCache{});
  exponential_prefix_.assign(kind_ == StrategyKind::seed_exponential_dirichlet ? agents : 0, {});
}

SampledModel SeedSampling::propose(const ProposalContext& ctx) {
  switch (kind_) {
    case StrategyKind::seed_standard_gaussian:
      return propose_standard_gaussian(expect_belief<GaussianVectorBelief>(ctx.belief, kind_),
                                       std::get<GaussianSeed>(seeds_.at(ctx.agent)));
    case StrategyKind::seed_martingalean_gaussian:
      return propose_martingalean_cached(ctx);
    case StrategyKind::seed_exponential_dirichlet:
      return propose_exponential_cached(ctx);
    default:
      return propose_finite_scenario_seed(expect_belief<FiniteScenarioBelief>(ctx.belief, kind_),
                                          std::get<UniformSeed>(seeds_.at(ctx.agent)));
  }
}

// Same accumulation order as propose_martingalean, so results are bit-identical; the cache
// only avoids re-reading the history from the start at every event.
SampledModel SeedSampling::propose_martingalean_cached(const ProposalContext& ctx) {
  const auto& seed = std::get<MartingaleanSeed>(seeds_.at(ctx.agent));
  if (!prior_->is_diagonal()) return propose_martingalean(*prior_, ctx.reward_history, seed);

  const std::size_t d = prior_->dimension();
  auto& cache = martingalean_.at(ctx.agent);
  if (cache.sums.empty()) {
    cache.sums.assign(d, 0.0);
    cache.counts.assign(d, 0.0);
  }
  for (; cache.consumed < ctx.reward_history.size(); ++cache.consumed) {
    const auto& obs = ctx.reward_history[cache.consumed];
    if (obs.param >= d) throw InvalidInput("observation parameter out of range");
    cache.sums[obs.param] += martingalean_target(*prior_, seed, obs);
    cache.counts[obs.param] += 1.0;
  }
  Eigen::VectorXd fit(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    fit(static_cast<Eigen::Index>(i)) =
        diagonal_fit(cache.sums[i], cache.counts[i], prior_->variance(i), prior_->noise_variance(), seed.theta0[i]);
  return to_natural_scale(fit, prior_->scale());
}

// Prefix sums are extended in index order, matching propose_exponential_dirichlet bit for bit.
SampledModel SeedSampling::propose_exponential_cached(const ProposalContext& ctx) {
  const auto& belief = expect_belief<DirichletBelief>(ctx.belief, kind_);
  const auto& seed = std::get<ExponentialSeed>(seeds_.at(ctx.agent));
  auto& prefix = exponential_prefix_.at(ctx.agent);
  const std::size_t n = belief.states();
  if (prefix.empty()) prefix.resize(n * belief.actions() * n);

  SampledModel m;
  m.transitions.resize(n * belief.actions() * n);
  std::size_t out = 0;
  for (StateId s = 0; s < n; ++s) {
    for (ActionId a = 0; a < belief.actions(); ++a) {
      const std::size_t start = out;
      double total = 0.0;
      for (StateId t = 0; t < n; ++t, ++out) {
        const double alpha = belief.alpha(s, a, t);
        check_integer_alpha(alpha);
        const auto count = static_cast<std::size_t>(alpha);
        auto& sums = prefix[out];
        while (sums.size() < count) {
          const double previous = sums.empty() ? 0.0 : sums.back();
          sums.push_back(previous + seed.value(s, a, t, sums.size() + 1));
        }
        const double partial = count == 0 ? 0.0 : sums[count - 1];
        m.transitions[out] = partial;
        total += partial;
      }
      if (!(total > 0.0)) throw InvalidModel("Dirichlet row has no positive parameter");
      normalize_row(std::span<double>(m.transitions).subspan(start, out - start));
    }
  }
  return m;
}

namespace {

class ThompsonResampling final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::thompson_resampling; }
  void begin_episode(const Environment&, std::size_t, std::uint64_t seed_root) override { root_ = seed_root; }
  SampledModel propose(const ProposalContext& ctx) override {
    // One fresh stream per (agent, event); nothing carries over between events.
    Rng rng = make_rng(hash_combine(derive_seed(root_, Stream::resample, ctx.agent),
                                    static_cast<std::uint64_t>(ctx.steps_remaining)));
    return propose_thompson_resampling(ctx.belief, rng);
  }

 private:
  std::uint64_t root_ = 0;
};

class ConcurrentUcrl final : public Strategy {
 public:
  explicit ConcurrentUcrl(double beta) : beta_(beta) {
    if (!(beta >= 0.0)) throw ConfigError("beta must be nonnegative");
  }
  StrategyKind kind() const override { return StrategyKind::concurrent_ucrl; }
  void begin_episode(const Environment& env, std::size_t, std::uint64_t) override {
    if (!supports(kind(), env.prior())) throw ConfigError("concurrent-ucrl is not defined for this environment");
  }
  SampledModel propose(const ProposalContext& ctx) override {
    if (const auto* g = std::get_if<GaussianVectorBelief>(&ctx.belief)) return propose_ucrl(*g, beta_);
    const auto& f = expect_belief<FiniteScenarioBelief>(ctx.belief, kind());
    return propose_ucrl(f, [&ctx](std::span<const double> theta) {
      return plan(ctx.env.topology(), theta, ctx.state, ctx.steps_remaining).value;
    });
  }

 private:
  double beta_;
};

class Greedy final : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::greedy; }
  void begin_episode(const Environment&, std::size_t, std::uint64_t) override {}
  SampledModel propose(const ProposalContext& ctx) override { return propose_greedy(ctx.belief); }
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, double beta) {
  switch (kind) {
    case StrategyKind::thompson_resampling:
      return std::make_unique<ThompsonResampling>();
    case StrategyKind::concurrent_ucrl:
      return std::make_unique<ConcurrentUcrl>(beta);
    case StrategyKind::greedy:
      return std::make_unique<Greedy>();
    default:
      return std::make_unique<SeedSampling>(kind);
  }
}

}  // namespace seedrl
