#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "star/belief.hpp"
#include "star/sensing.hpp"
#include "star/terrain.hpp"

namespace star {

enum class PolicyKind { kStar, kGuts, kRsi, kCoverage, kRandom };

std::string_view policy_name(PolicyKind kind);
/// Throws DomainError on an unknown name.
PolicyKind parse_policy(std::string_view name);

struct PolicyParams {
  PolicyKind kind = PolicyKind::kStar;
  double tradeoff = 1.0;  // weight of the normalized stealth penalty
  double lambda = 0.01;   // indicator penalty in the reward
  double eps = 0.1;       // "non-zero" cutoff for counting top entries

  /// Throws DomainError on a negative tradeoff or lambda.
  void validate() const;
};

/// A sensing action paired with the goal cell the robot drives to.
struct Candidate {
  const SensingAction* action = nullptr;
  CellIndex goal = 0;
};

using CandidateSet = std::vector<Candidate>;

/// Every traversable cell whose index is a multiple of `stride` (and which is
/// marked in `allowed`, when given) times the 8 headings.
CandidateSet build_candidates(const TerrainGrid& grid, const ActionTable& actions, int stride = 1,
                              const std::vector<std::uint8_t>* allowed = nullptr);

struct Selection {
  std::size_t index = 0;
  double raw_reward = 0.0;
  double raw_penalty = 0.0;
};

/// Observation the candidate would return if `beta_sample` were the truth:
/// y* = clip(X beta_sample, 0, 1) with the nominal row variances.
Observation hypothetical_observation(const SensingAction& action,
                                     const Eigen::VectorXd& beta_sample, const NoiseModel& noise);

/// Posterior mean of data plus the hypothetical candidate observation under a
/// fixed gamma (one E-step, no M-step).
Eigen::VectorXd conditional_estimate(const Dataset& data, const SensingAction& candidate,
                                     const Eigen::VectorXd& beta_sample,
                                     const Eigen::VectorXd& gamma, const NoiseModel& noise);

/// Indices of the top ceil(k/2) entries, where k counts entries above eps.
/// Ordered by value descending, then index ascending.
std::vector<CellIndex> top_half_entries(const Eigen::VectorXd& v, double eps);

/// 0 when the top halves of beta_hat and beta_sample share a cell, else 1.
int top_match_indicator(const Eigen::VectorXd& beta_sample, const Eigen::VectorXd& beta_hat,
                        double eps);

/// -||beta_sample - beta_hat||^2 - lambda * I(beta_sample, beta_hat).
double reward(const Eigen::VectorXd& beta_sample, const Eigen::VectorXd& beta_hat, double lambda,
              double eps);

/// Evaluates the reward of many candidates against one posterior and one
/// Thompson sample. Each call touches only the candidate's rows plus a merge
/// over the pre-sorted posterior mean, instead of O(M log M).
class RewardEvaluator {
 public:
  RewardEvaluator(const Posterior& posterior, Eigen::VectorXd beta_sample,
                  const PolicyParams& params, const NoiseModel& noise);

  double operator()(const SensingAction& action) const;
  const Eigen::VectorXd& beta_sample() const noexcept { return sample_; }

 private:
  const Posterior& post_;
  Eigen::VectorXd sample_;
  PolicyParams params_;
  NoiseModel noise_;
  std::vector<std::uint8_t> in_sample_top_;
  std::vector<CellIndex> mean_order_;
  double base_residual_ = 0.0;
  std::size_t mean_above_eps_ = 0;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
};

/// Believed risk at the goal cell. Throws DomainError for an out-of-range goal.
double stealth_penalty(CellIndex goal, const ScalarField& risk);

/// Maps scores to [0, 1] by min-max; a constant vector maps to all zeros.
std::vector<double> min_max_normalize(const std::vector<double>& scores);

/// Draws one Thompson sample, scores every candidate, and returns the argmax
/// of normalized reward minus tradeoff * normalized penalty. Ties are broken
/// uniformly with `rng`; exactly one tie-break draw is always consumed.
Selection select_action_star(const Posterior& belief, const CandidateSet& candidates,
                             const PolicyParams& params, const ScalarField& risk,
                             const NoiseModel& noise, std::mt19937_64& rng);

/// select_action_star with tradeoff 0.
Selection select_action_guts(const Posterior& belief, const CandidateSet& candidates,
                             const PolicyParams& params, const ScalarField& risk,
                             const NoiseModel& noise, std::mt19937_64& rng);

/// 1/2 log det(I + W^1/2 X V X^T W^1/2) for the candidate's rows.
double information_gain(const Posterior& belief, const SensingAction& action,
                        const NoiseModel& noise);

/// Greedy information gain; ties go to the lowest goal index.
Selection select_action_rsi(const Posterior& belief, const CandidateSet& candidates,
                            const NoiseModel& noise);

/// Most never-sensed cells in the footprint; ties go to the smallest
/// goal_distance, then the lowest candidate index.
Selection select_action_coverage(const std::vector<std::uint8_t>& visited,
                                 const CandidateSet& candidates,
                                 const std::vector<double>& goal_distance);

Selection select_action_random(const CandidateSet& candidates, std::mt19937_64& rng);

}  // namespace star
