#include "star/belief.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "star/errors.hpp"

namespace star {

Dataset::Dataset(std::size_t cells, int owner)
    : owner_(owner),
      precision_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells))),
      weighted_y_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells))),
      sensed_(cells, 0) {}

void Dataset::append(Observation obs) {
  const auto& rows = obs.action.rows;
  if (obs.y.size() != rows.size() || obs.noise_variance.size() != rows.size()) {
    throw DomainError("observation vectors must match the action's row count");
  }
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const auto cell = rows[q].cell;
    if (cell < 0 || static_cast<std::size_t>(cell) >= cells()) {
      throw DomainError("observation references cell " + std::to_string(cell) +
                        " outside the grid");
    }
    if (!(obs.noise_variance[q] > 0.0)) {
      throw DomainError("observation noise variance must be positive");
    }
  }
  for (std::size_t q = 0; q < rows.size(); ++q) {
    const auto m = static_cast<Eigen::Index>(rows[q].cell);
    const double w = 1.0 / obs.noise_variance[q];
    precision_[m] += w;
    weighted_y_[m] += w * obs.y[q];
    sensed_[static_cast<std::size_t>(m)] = 1;
  }
  records_.push_back(std::move(obs));
}

Posterior e_step(const Dataset& data, const Eigen::VectorXd& gamma, const Hyperparameters& hyper) {
  if (static_cast<std::size_t>(gamma.size()) != data.cells()) {
    throw DomainError("gamma must have one entry per cell");
  }
  if (!(gamma.array() > 0.0).all() || !gamma.allFinite()) {
    throw DomainError("gamma must be strictly positive and finite");
  }
  Posterior post;
  post.gamma = gamma;
  post.hyper = hyper;
  post.var = (gamma.cwiseInverse() + data.precision()).cwiseInverse();
  post.mu = post.var.cwiseProduct(data.weighted_measurement());
  return post;
}

Eigen::VectorXd m_step(const Posterior& posterior) {
  const double denom = 1.0 + 2.0 * posterior.hyper.a;
  return (posterior.var.array() + posterior.mu.array().square() + 2.0 * posterior.hyper.b) /
         denom;
}

Posterior fit_posterior(const Dataset& data, const Eigen::VectorXd& init_gamma,
                        const EmOptions& options, const Hyperparameters& hyper) {
  if (options.max_iter < 1) throw DomainError("EM needs max_iter >= 1");
  if (!(options.tol > 0.0)) throw DomainError("EM needs tol > 0");
  Eigen::VectorXd gamma = init_gamma;
  Posterior post;
  int iter = 0;
  while (iter < options.max_iter) {
    post = e_step(data, gamma, hyper);
    Eigen::VectorXd next = m_step(post);
    ++iter;
    const double change = (next - gamma).cwiseAbs().maxCoeff();
    gamma = std::move(next);
    if (change < options.tol) break;
  }
  post = e_step(data, gamma, hyper);
  post.em_iterations = iter;
  return post;
}

Posterior condition(const Posterior& prior, std::span<const Observation> observations) {
  Eigen::VectorXd precision = prior.var.cwiseInverse();
  Eigen::VectorXd info = precision.cwiseProduct(prior.mu);
  for (const auto& obs : observations) {
    for (std::size_t q = 0; q < obs.action.rows.size(); ++q) {
      const auto m = static_cast<Eigen::Index>(obs.action.rows[q].cell);
      const double w = 1.0 / obs.noise_variance[q];
      precision[m] += w;
      info[m] += w * obs.y[q];
    }
  }
  Posterior post = prior;
  post.var = precision.cwiseInverse();
  post.mu = post.var.cwiseProduct(info);
  return post;
}

Eigen::VectorXd thompson_sample(const Posterior& posterior, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd sample(posterior.mu.size());
  for (Eigen::Index m = 0; m < sample.size(); ++m) {
    sample[m] = posterior.mu[m] + std::sqrt(posterior.var[m]) * gauss(rng);
  }
  return sample;
}

double folded_normal_mean(double mean, double variance) {
  if (!(variance > 0.0)) return std::abs(mean);
  const double sd = std::sqrt(variance);
  // 1 - 2 Phi(-mean/sd) == erf(mean / (sd sqrt 2))
  return sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-mean * mean / (2.0 * variance)) +
         mean * std::erf(mean / (sd * std::numbers::sqrt2));
}

double folded_normal_mean_dmu(double mean, double variance) {
  if (!(variance > 0.0)) return mean > 0.0 ? 1.0 : (mean < 0.0 ? -1.0 : 0.0);
  return std::erf(mean / (std::sqrt(variance) * std::numbers::sqrt2));
}

Eigen::VectorXd visibility_mean(const Posterior& posterior) {
  Eigen::VectorXd out(posterior.mu.size());
  for (Eigen::Index m = 0; m < out.size(); ++m) {
    out[m] = folded_normal_mean(posterior.mu[m], posterior.var[m]);
  }
  return out;
}

}  // namespace star
