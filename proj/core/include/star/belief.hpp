#pragma once

#include <Eigen/Core>
#include <random>
#include <span>
#include <vector>

#include "star/sensing.hpp"

namespace star {

/// Inverse-gamma hyperparameters of the sparsity prior on each gamma_m.
struct Hyperparameters {
  double a = 0.1;
  double b = 1.0;
};

/// Gaussian belief N(mu, V) over target indicators, with the prior variances
/// gamma it was computed under.
///
/// Every sensing row is one-hot and the rows of one action are distinct cells,
/// so X^T W X is diagonal and so is V. `var` is therefore the whole covariance,
/// not an approximation of it.
struct Posterior {
  Eigen::VectorXd mu;
  Eigen::VectorXd var;
  Eigen::VectorXd gamma;
  Hyperparameters hyper;
  int em_iterations = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(mu.size()); }
};

/// Append-only observation log of one agent. Keeps per-cell sufficient
/// statistics (summed precision and precision-weighted measurement) so the
/// E-step costs O(M).
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t cells, int owner);

  /// Throws DomainError when a row references a cell outside the grid or a
  /// variance is not positive.
  void append(Observation obs);

  int owner() const noexcept { return owner_; }
  std::size_t cells() const noexcept { return static_cast<std::size_t>(precision_.size()); }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::vector<Observation>& records() const noexcept { return records_; }

  const Eigen::VectorXd& precision() const noexcept { return precision_; }
  const Eigen::VectorXd& weighted_measurement() const noexcept { return weighted_y_; }
  /// Cells that appear in at least one record.
  const std::vector<std::uint8_t>& sensed() const noexcept { return sensed_; }

 private:
  int owner_ = 0;
  std::vector<Observation> records_;
  Eigen::VectorXd precision_;
  Eigen::VectorXd weighted_y_;
  std::vector<std::uint8_t> sensed_;
};

/// V = (Gamma^-1 + X^T W X)^-1, mu = V X^T W y with W the inverse noise
/// variances. Throws DomainError unless gamma is strictly positive and sized M.
Posterior e_step(const Dataset& data, const Eigen::VectorXd& gamma,
                 const Hyperparameters& hyper = {});

/// gamma_m = (V_mm + mu_m^2 + 2 b) / (1 + 2 a).
Eigen::VectorXd m_step(const Posterior& posterior);

struct EmOptions {
  int max_iter = 20;
  double tol = 1e-4;
};

/// Alternates E and M steps from `init_gamma` until the largest gamma change
/// drops below tol or max_iter is reached. The returned posterior is the
/// E-step under the returned gamma.
Posterior fit_posterior(const Dataset& data, const Eigen::VectorXd& init_gamma,
                        const EmOptions& options = {}, const Hyperparameters& hyper = {});

/// Gaussian update of `prior` (mean and diagonal covariance) with extra
/// observations. gamma and hyperparameters carry over unchanged.
Posterior condition(const Posterior& prior, std::span<const Observation> observations);

/// One draw from N(mu, diag(var)).
Eigen::VectorXd thompson_sample(const Posterior& posterior, std::mt19937_64& rng);

/// E|X| for X ~ N(mean, variance); |mean| when variance is 0.
double folded_normal_mean(double mean, double variance);
/// d/d(mean) of folded_normal_mean: 1 - 2 Phi(-mean / sd).
double folded_normal_mean_dmu(double mean, double variance);

/// Elementwise folded-normal mean of the posterior marginals.
Eigen::VectorXd visibility_mean(const Posterior& posterior);

}  // namespace star
