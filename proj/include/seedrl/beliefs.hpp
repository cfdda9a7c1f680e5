#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "seedrl/model.hpp"
#include "seedrl/rng.hpp"

namespace seedrl {

/// Whether the Gaussian is over theta itself or over ln theta.
enum class Scale { normal, lognormal };

/// Multivariate Gaussian posterior over reward parameters (or their logs) with a
/// known observation variance. Independent coordinates are stored as a diagonal;
/// correlated priors use the dense path.
class GaussianVectorBelief {
 public:
  static GaussianVectorBelief diagonal(std::vector<double> mean, std::vector<double> variances,
                                       double noise_variance, Scale scale);
  static GaussianVectorBelief dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                    double noise_variance, Scale scale);

  std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  double variance(std::size_t i) const;
  Eigen::VectorXd variances() const;
  /// Dense copy of the covariance regardless of storage.
  Eigen::MatrixXd covariance() const;
  bool is_diagonal() const { return !dense_.has_value(); }
  double noise_variance() const { return noise_variance_; }
  Scale scale() const { return scale_; }

  /// Conjugate update of coordinate `index` with an unbiased observation `y` of it.
  void absorb(std::size_t index, double y);

 private:
  GaussianVectorBelief() = default;

  Eigen::VectorXd mean_;
  Eigen::VectorXd diag_;
  std::optional<Eigen::MatrixXd> dense_;
  double noise_variance_ = 1.0;
  Scale scale_ = Scale::normal;
};

/// Independent Dirichlet posteriors over the next-state distribution of every (s, a).
class DirichletBelief {
 public:
  DirichletBelief(std::size_t states, std::size_t actions, double prior_alpha);
  DirichletBelief(std::size_t states, std::size_t actions, std::vector<double> alpha);

  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }
  double alpha(StateId s, ActionId a, StateId next) const { return alpha_[offset(s, a) + next]; }
  std::span<const double> row(StateId s, ActionId a) const {
    return std::span<const double>(alpha_).subspan(offset(s, a), states_);
  }
  void increment(StateId s, ActionId a, StateId next);

  friend bool operator==(const DirichletBelief&, const DirichletBelief&) = default;

 private:
  std::size_t offset(StateId s, ActionId a) const { return (s * actions_ + a) * states_; }

  std::size_t states_;
  std::size_t actions_;
  std::vector<double> alpha_;
};

/// Posterior over a finite list of complete parameter vectors, each predicting
/// deterministic rewards.
class FiniteScenarioBelief {
 public:
  FiniteScenarioBelief(std::vector<std::vector<double>> scenarios, std::vector<double> probabilities);

  std::size_t size() const { return scenarios_.size(); }
  const std::vector<double>& scenario(std::size_t i) const { return scenarios_.at(i); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  std::vector<double>& mutable_probabilities() { return probabilities_; }

  friend bool operator==(const FiniteScenarioBelief&, const FiniteScenarioBelief&) = default;

 private:
  std::vector<std::vector<double>> scenarios_;
  std::vector<double> probabilities_;
};

using Belief = std::variant<GaussianVectorBelief, DirichletBelief, FiniteScenarioBelief>;

GaussianVectorBelief update_normal(GaussianVectorBelief belief, std::size_t param_index, double reward);
GaussianVectorBelief update_lognormal(GaussianVectorBelief belief, std::size_t param_index, double reward);
/// Dispatches on the belief's scale.
GaussianVectorBelief update_gaussian(GaussianVectorBelief belief, std::size_t param_index, double reward);
DirichletBelief update_dirichlet(DirichletBelief belief, StateId s, ActionId a, StateId next);
/// Bayes rule over scenarios. An observation with no parameter (a known reward) is
/// uninformative and leaves the belief unchanged.
FiniteScenarioBelief update_finite_scenario(FiniteScenarioBelief belief, std::optional<std::size_t> param,
                                            double reward);

/// Returns the upper-triangular factor D with D^T D = covariance (the transpose of the
/// lower Cholesky factor). Positive semidefinite input is accepted: a zero pivot yields a
/// zero row, provided the remaining column is also zero.
Eigen::MatrixXd factorize_covariance(const Eigen::MatrixXd& covariance);

SampledModel sample_posterior(const GaussianVectorBelief& belief, Rng& rng);
SampledModel sample_posterior(const DirichletBelief& belief, Rng& rng);
SampledModel sample_posterior(const FiniteScenarioBelief& belief, Rng& rng);
SampledModel sample_posterior(const Belief& belief, Rng& rng);

/// mean + beta * sd coordinatewise; computed on the ln scale and exponentiated for lognormal beliefs.
SampledModel ucb_parameters(const GaussianVectorBelief& belief, double beta);

/// Scenario with the largest optimal value among those with positive probability;
/// ties go to the lowest index.
SampledModel ucb_parameters(const FiniteScenarioBelief& belief,
                            const std::function<double(std::span<const double>)>& scenario_value);

}  // namespace seedrl
