#include "seedrl/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seedrl/errors.hpp"

namespace seedrl {

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

SampledModel from_parameter_scale(const Eigen::VectorXd& values, Scale scale) {
  SampledModel m;
  m.theta = to_std(values);
  if (scale == Scale::lognormal)
    for (auto& x : m.theta) x = std::exp(x);
  return m;
}

void check_index(const GaussianVectorBelief& b, std::size_t i) {
  if (i >= b.dimension())
    throw InvalidInput("parameter index " + std::to_string(i) + " out of range for dimension " +
                       std::to_string(b.dimension()));
}

}  // namespace

GaussianVectorBelief GaussianVectorBelief::diagonal(std::vector<double> mean, std::vector<double> variances,
                                                    double noise_variance, Scale scale) {
  if (mean.size() != variances.size()) throw InvalidInput("mean and variance lengths differ");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw InvalidInput("observation noise variance must be positive");
  for (double v : variances)
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericDomain("prior variances must be finite and nonnegative");
  GaussianVectorBelief b;
  b.mean_ = to_eigen(mean);
  b.diag_ = to_eigen(variances);
  b.noise_variance_ = noise_variance;
  b.scale_ = scale;
  return b;
}

GaussianVectorBelief GaussianVectorBelief::dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                                 double noise_variance, Scale scale) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
    throw InvalidInput("covariance shape does not match the mean");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
    throw InvalidInput("observation noise variance must be positive");
  factorize_covariance(covariance);  // validates symmetry and PSD
  GaussianVectorBelief b;
  b.mean_ = std::move(mean);
  b.dense_ = std::move(covariance);
  b.noise_variance_ = noise_variance;
  b.scale_ = scale;
  return b;
}

double GaussianVectorBelief::variance(std::size_t i) const {
  const auto k = static_cast<Eigen::Index>(i);
  return dense_ ? (*dense_)(k, k) : diag_(k);
}

Eigen::VectorXd GaussianVectorBelief::variances() const { return dense_ ? Eigen::VectorXd(dense_->diagonal()) : diag_; }

Eigen::MatrixXd GaussianVectorBelief::covariance() const {
  if (dense_) return *dense_;
  return diag_.asDiagonal();
}

void GaussianVectorBelief::absorb(std::size_t index, double y) {
  const auto i = static_cast<Eigen::Index>(index);
  const double s2 = noise_variance_;
  if (!dense_) {
    const double v = diag_(i);
    mean_(i) = (s2 * mean_(i) + v * y) / (v + s2);
    diag_(i) = v * s2 / (v + s2);
    return;
  }
  auto& cov = *dense_;
  const Eigen::VectorXd column = cov.col(i);
  const double denom = column(i) + s2;
  const double innovation = y - mean_(i);
  mean_ += column * (innovation / denom);
  cov.noalias() -= column * column.transpose() / denom;
  cov = 0.5 * (cov + cov.transpose()).eval();
}

GaussianVectorBelief update_normal(GaussianVectorBelief belief, std::size_t param_index, double reward) {
  if (belief.scale() != Scale::normal) throw InvalidInput("update_normal on a lognormal belief");
  check_index(belief, param_index);
  if (!std::isfinite(reward)) throw InvalidInput("non-finite reward");
  belief.absorb(param_index, reward);
  return belief;
}

GaussianVectorBelief update_lognormal(GaussianVectorBelief belief, std::size_t param_index, double reward) {
  if (belief.scale() != Scale::lognormal) throw InvalidInput("update_lognormal on a normal belief");
  check_index(belief, param_index);
  if (!std::isfinite(reward) || !(reward > 0.0))
    throw InvalidInput("lognormal likelihood requires a positive finite reward");
  // ln r ~ N(ln theta - s2/2, s2), so ln r + s2/2 is an unbiased observation of ln theta.
  belief.absorb(param_index, std::log(reward) + belief.noise_variance() / 2.0);
  return belief;
}

GaussianVectorBelief update_gaussian(GaussianVectorBelief belief, std::size_t param_index, double reward) {
  return belief.scale() == Scale::normal ? update_normal(std::move(belief), param_index, reward)
                                         : update_lognormal(std::move(belief), param_index, reward);
}

DirichletBelief::DirichletBelief(std::size_t states, std::size_t actions, double prior_alpha)
    : DirichletBelief(states, actions, std::vector<double>(states * actions * states, prior_alpha)) {}

DirichletBelief::DirichletBelief(std::size_t states, std::size_t actions, std::vector<double> alpha)
    : states_(states), actions_(actions), alpha_(std::move(alpha)) {
  if (states == 0 || actions == 0) throw InvalidInput("empty Dirichlet belief");
  if (alpha_.size() != states * actions * states) throw InvalidInput("alpha has the wrong shape");
  for (double a : alpha_)
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidInput("Dirichlet parameters must be nonnegative");
}

void DirichletBelief::increment(StateId s, ActionId a, StateId next) {
  if (s >= states_ || a >= actions_ || next >= states_) throw InvalidInput("transition triple out of range");
  alpha_[offset(s, a) + next] += 1.0;
}

DirichletBelief update_dirichlet(DirichletBelief belief, StateId s, ActionId a, StateId next) {
  belief.increment(s, a, next);
  return belief;
}

FiniteScenarioBelief::FiniteScenarioBelief(std::vector<std::vector<double>> scenarios,
                                           std::vector<double> probabilities)
    : scenarios_(std::move(scenarios)), probabilities_(std::move(probabilities)) {
  if (scenarios_.empty() || scenarios_.size() != probabilities_.size())
    throw InvalidInput("scenario list and probability vector must be non-empty and of equal length");
  double total = 0.0;
  for (double p : probabilities_) {
    if (!(p >= 0.0)) throw InvalidInput("scenario probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("scenario probabilities must sum to 1");
}

FiniteScenarioBelief update_finite_scenario(FiniteScenarioBelief belief, std::optional<std::size_t> param,
                                            double reward) {
  if (!param) return belief;
  auto& p = belief.mutable_probabilities();
  std::vector<double> posterior(p.size(), 0.0);
  double evidence = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& theta = belief.scenario(i);
    if (*param >= theta.size()) throw InvalidInput("parameter index out of range for scenario");
    const double predicted = theta[*param];
    const double tol = 1e-9 * std::max(1.0, std::abs(predicted));
    if (std::abs(predicted - reward) <= tol) {
      posterior[i] = p[i];
      evidence += p[i];
    }
  }
  if (!(evidence > 0.0)) throw ModelMismatch("observation is inconsistent with every scenario");
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = posterior[i] / evidence;
  return belief;
}

Eigen::MatrixXd factorize_covariance(const Eigen::MatrixXd& covariance) {
  const Eigen::Index n = covariance.rows();
  if (covariance.cols() != n) throw NumericDomain("covariance must be square");
  const double scale = n == 0 ? 0.0 : covariance.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw NumericDomain("covariance has non-finite entries");
  const double sym_tol = 1e-12 * std::max(scale, 1e-300);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(covariance(i, j) - covariance(j, i)) > sym_tol) throw NumericDomain("covariance is not symmetric");

  // Lower Cholesky factor L with L L^T = covariance; semidefinite pivots become zero columns.
  const double pivot_tol = 1e-12 * std::max(scale, 1e-300);
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = covariance(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (d < -pivot_tol) throw NumericDomain("covariance is indefinite");
    if (d <= pivot_tol) {
      for (Eigen::Index i = j + 1; i < n; ++i) {
        double r = covariance(i, j);
        for (Eigen::Index k = 0; k < j; ++k) r -= lower(i, k) * lower(j, k);
        if (std::abs(r) > 1e-9 * std::max(scale, 1e-300)) throw NumericDomain("covariance is indefinite");
      }
      continue;
    }
    const double root = std::sqrt(d);
    lower(j, j) = root;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double r = covariance(i, j);
      for (Eigen::Index k = 0; k < j; ++k) r -= lower(i, k) * lower(j, k);
      lower(i, j) = r / root;
    }
  }
  return lower.transpose();
}

SampledModel sample_posterior(const GaussianVectorBelief& belief, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(belief.dimension());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  Eigen::VectorXd draw;
  if (belief.is_diagonal()) {
    draw = belief.mean() + belief.variances().cwiseSqrt().cwiseProduct(z);
  } else {
    draw = belief.mean() + factorize_covariance(belief.covariance()).transpose() * z;
  }
  return from_parameter_scale(draw, belief.scale());
}

SampledModel sample_posterior(const DirichletBelief& belief, Rng& rng) {
  SampledModel m;
  m.transitions.resize(belief.states() * belief.actions() * belief.states());
  std::size_t out = 0;
  for (StateId s = 0; s < belief.states(); ++s) {
    for (ActionId a = 0; a < belief.actions(); ++a) {
      const auto alpha = belief.row(s, a);
      double total = 0.0;
      const std::size_t start = out;
      for (double shape : alpha) {
        double g = 0.0;
        if (shape > 0.0) {
          std::gamma_distribution<double> gamma(shape, 1.0);
          g = gamma(rng);
        }
        m.transitions[out++] = g;
        total += g;
      }
      if (!(total > 0.0)) throw InvalidModel("Dirichlet row has no positive parameter");
      normalize_row(std::span<double>(m.transitions).subspan(start, out - start));
    }
  }
  return m;
}

SampledModel sample_posterior(const FiniteScenarioBelief& belief, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const auto& p = belief.probabilities();
  double cumulative = 0.0;
  std::size_t chosen = p.size() - 1;
  while (chosen > 0 && !(p[chosen] > 0.0)) --chosen;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cumulative += p[i];
    if (u < cumulative && p[i] > 0.0) {
      chosen = i;
      break;
    }
  }
  SampledModel m;
  m.scenario = chosen;
  m.theta = belief.scenario(chosen);
  return m;
}

SampledModel sample_posterior(const Belief& belief, Rng& rng) {
  return std::visit([&rng](const auto& b) { return sample_posterior(b, rng); }, belief);
}

SampledModel ucb_parameters(const GaussianVectorBelief& belief, double beta) {
  if (!(beta >= 0.0)) throw InvalidInput("confidence width must be nonnegative");
  const Eigen::VectorXd bound = belief.mean() + beta * belief.variances().cwiseSqrt();
  return from_parameter_scale(bound, belief.scale());
}

SampledModel ucb_parameters(const FiniteScenarioBelief& belief,
                            const std::function<double(std::span<const double>)>& scenario_value) {
  std::optional<std::size_t> best;
  double best_value = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    if (!(belief.probabilities()[i] > 0.0)) continue;
    const double v = scenario_value(belief.scenario(i));
    if (!best || v > best_value) {
      best = i;
      best_value = v;
    }
  }
  SampledModel m;
  m.scenario = *best;
  m.theta = belief.scenario(*best);
  return m;
}

}  // namespace seedrl
