#include "star/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "star/errors.hpp"

namespace star {
namespace {

constexpr std::array<std::string_view, 5> kPolicyNames = {"star", "guts", "rsi", "coverage",
                                                          "random"};
constexpr double kTieTolerance = 1e-12;

void require_candidates(const CandidateSet& candidates) {
  if (candidates.empty()) throw DomainError("candidate set is empty");
}

// Larger value first; equal values by smaller index.
bool ranks_before(double va, CellIndex a, double vb, CellIndex b) {
  return va > vb || (va == vb && a < b);
}

double conditioned_mean(double mean, double var, double precision, double y) {
  if (!(var > 0.0)) return mean;
  return (mean / var + precision * y) / (1.0 / var + precision);
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  return kPolicyNames[static_cast<std::size_t>(kind)];
}

PolicyKind parse_policy(std::string_view name) {
  for (std::size_t i = 0; i < kPolicyNames.size(); ++i) {
    if (kPolicyNames[i] == name) return static_cast<PolicyKind>(i);
  }
  throw DomainError("unknown policy '" + std::string(name) + "'");
}

void PolicyParams::validate() const {
  if (!(tradeoff >= 0.0)) throw DomainError("policy tradeoff gamma must be >= 0");
  if (!(lambda >= 0.0)) throw DomainError("policy lambda must be >= 0");
  if (!(eps >= 0.0)) throw DomainError("policy eps must be >= 0");
}

CandidateSet build_candidates(const TerrainGrid& grid, const ActionTable& actions, int stride,
                              const std::vector<std::uint8_t>* allowed) {
  if (stride < 1) throw DomainError("candidate stride must be >= 1");
  CandidateSet out;
  for (CellIndex i = 0; i < static_cast<CellIndex>(grid.size()); i += stride) {
    if (!grid.traversable(i)) continue;
    if (allowed && !(*allowed)[static_cast<std::size_t>(i)]) continue;
    for (Heading h : kAllHeadings) out.push_back({&actions.at(i, h), i});
  }
  return out;
}

Observation hypothetical_observation(const SensingAction& action,
                                     const Eigen::VectorXd& beta_sample,
                                     const NoiseModel& noise) {
  Observation obs;
  obs.action = action;
  for (const auto& row : action.rows) {
    obs.y.push_back(std::clamp(beta_sample[row.cell], 0.0, 1.0));
    obs.noise_variance.push_back(noise.variance(row));
  }
  return obs;
}

Eigen::VectorXd conditional_estimate(const Dataset& data, const SensingAction& candidate,
                                     const Eigen::VectorXd& beta_sample,
                                     const Eigen::VectorXd& gamma, const NoiseModel& noise) {
  if (static_cast<std::size_t>(beta_sample.size()) != data.cells()) {
    throw DomainError("beta sample must have one entry per cell");
  }
  const Posterior base = e_step(data, gamma);
  const Observation hypo = hypothetical_observation(candidate, beta_sample, noise);
  return condition(base, std::span<const Observation>(&hypo, 1)).mu;
}

std::vector<CellIndex> top_half_entries(const Eigen::VectorXd& v, double eps) {
  std::vector<CellIndex> above;
  for (Eigen::Index m = 0; m < v.size(); ++m) {
    if (v[m] > eps) above.push_back(static_cast<CellIndex>(m));
  }
  const std::size_t n = (above.size() + 1) / 2;
  std::partial_sort(above.begin(), above.begin() + static_cast<std::ptrdiff_t>(n), above.end(),
                    [&](CellIndex a, CellIndex b) { return ranks_before(v[a], a, v[b], b); });
  above.resize(n);
  return above;
}

int top_match_indicator(const Eigen::VectorXd& beta_sample, const Eigen::VectorXd& beta_hat,
                        double eps) {
  const auto a = top_half_entries(beta_hat, eps);
  auto b = top_half_entries(beta_sample, eps);
  std::sort(b.begin(), b.end());
  for (CellIndex i : a) {
    if (std::binary_search(b.begin(), b.end(), i)) return 0;
  }
  return 1;
}

double reward(const Eigen::VectorXd& beta_sample, const Eigen::VectorXd& beta_hat, double lambda,
              double eps) {
  if (beta_sample.size() != beta_hat.size()) {
    throw DomainError("reward needs equal-length vectors");
  }
  return -(beta_sample - beta_hat).squaredNorm() -
         lambda * top_match_indicator(beta_sample, beta_hat, eps);
}

RewardEvaluator::RewardEvaluator(const Posterior& posterior, Eigen::VectorXd beta_sample,
                                 const PolicyParams& params, const NoiseModel& noise)
    : post_(posterior),
      sample_(std::move(beta_sample)),
      params_(params),
      noise_(noise),
      in_sample_top_(posterior.size(), 0),
      stamp_(posterior.size(), 0) {
  for (CellIndex i : top_half_entries(sample_, params_.eps)) {
    in_sample_top_[static_cast<std::size_t>(i)] = 1;
  }
  const auto& mu = post_.mu;
  mean_order_.resize(post_.size());
  std::iota(mean_order_.begin(), mean_order_.end(), 0);
  std::sort(mean_order_.begin(), mean_order_.end(),
            [&](CellIndex a, CellIndex b) { return ranks_before(mu[a], a, mu[b], b); });
  base_residual_ = (sample_ - mu).squaredNorm();
  mean_above_eps_ = static_cast<std::size_t>((mu.array() > params_.eps).count());
}

double RewardEvaluator::operator()(const SensingAction& action) const {
  const auto& mu = post_.mu;
  const auto& var = post_.var;
  const double eps = params_.eps;

  struct Updated {
    CellIndex cell;
    double value;
  };
  thread_local std::vector<Updated> updated;
  updated.clear();

  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  double residual = base_residual_;
  std::size_t above = mean_above_eps_;
  for (const auto& row : action.rows) {
    const CellIndex m = row.cell;
    const double s = sample_[m];
    const double y = std::clamp(s, 0.0, 1.0);
    const double value = conditioned_mean(mu[m], var[m], 1.0 / noise_.variance(row), y);
    residual += (s - value) * (s - value) - (s - mu[m]) * (s - mu[m]);
    if (mu[m] > eps) --above;
    if (value > eps) ++above;
    updated.push_back({m, value});
    stamp_[static_cast<std::size_t>(m)] = epoch_;
  }
  std::sort(updated.begin(), updated.end(), [](const Updated& a, const Updated& b) {
    return ranks_before(a.value, a.cell, b.value, b.cell);
  });

  // Merge the untouched cells (already sorted by mean) with the updated ones
  // and stop at the first top entry shared with the sample.
  int indicator = 1;
  const std::size_t wanted = (above + 1) / 2;
  std::size_t taken = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (taken < wanted) {
    while (i < mean_order_.size() &&
           stamp_[static_cast<std::size_t>(mean_order_[i])] == epoch_) {
      ++i;
    }
    CellIndex pick;
    if (j < updated.size() &&
        (i >= mean_order_.size() ||
         ranks_before(updated[j].value, updated[j].cell, mu[mean_order_[i]], mean_order_[i]))) {
      pick = updated[j++].cell;
    } else if (i < mean_order_.size()) {
      pick = mean_order_[i++];
    } else {
      break;
    }
    ++taken;
    if (in_sample_top_[static_cast<std::size_t>(pick)]) {
      indicator = 0;
      break;
    }
  }
  return -residual - params_.lambda * indicator;
}

double stealth_penalty(CellIndex goal, const ScalarField& risk) {
  if (goal < 0 || static_cast<std::size_t>(goal) >= risk.size()) {
    throw DomainError("stealth penalty goal out of bounds");
  }
  return risk[goal];
}

std::vector<double> min_max_normalize(const std::vector<double>& scores) {
  std::vector<double> out(scores.size(), 0.0);
  if (scores.empty()) return out;
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double span = *hi - *lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - *lo) / span;
  return out;
}

Selection select_action_star(const Posterior& belief, const CandidateSet& candidates,
                             const PolicyParams& params, const ScalarField& risk,
                             const NoiseModel& noise, std::mt19937_64& rng) {
  require_candidates(candidates);
  params.validate();
  const RewardEvaluator evaluate(belief, thompson_sample(belief, rng), params, noise);

  std::vector<double> rewards(candidates.size());
  std::vector<double> penalties(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    rewards[k] = evaluate(*candidates[k].action);
    penalties[k] = stealth_penalty(candidates[k].goal, risk);
  }
  const auto nr = min_max_normalize(rewards);
  const auto np = min_max_normalize(penalties);

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> ties;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double score = nr[k] - params.tradeoff * np[k];
    if (score > best + kTieTolerance) {
      best = score;
      ties.assign(1, k);
    } else if (std::abs(score - best) <= kTieTolerance) {
      ties.push_back(k);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
  const std::size_t chosen = ties[pick(rng)];
  return {chosen, rewards[chosen], penalties[chosen]};
}

Selection select_action_guts(const Posterior& belief, const CandidateSet& candidates,
                             const PolicyParams& params, const ScalarField& risk,
                             const NoiseModel& noise, std::mt19937_64& rng) {
  PolicyParams reward_only = params;
  reward_only.tradeoff = 0.0;
  return select_action_star(belief, candidates, reward_only, risk, noise, rng);
}

double information_gain(const Posterior& belief, const SensingAction& action,
                        const NoiseModel& noise) {
  double gain = 0.0;
  for (const auto& row : action.rows) {
    gain += std::log1p(belief.var[row.cell] / noise.variance(row));
  }
  return 0.5 * gain;
}

Selection select_action_rsi(const Posterior& belief, const CandidateSet& candidates,
                            const NoiseModel& noise) {
  require_candidates(candidates);
  Selection best{0, -std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double gain = information_gain(belief, *candidates[k].action, noise);
    if (gain > best.raw_reward + kTieTolerance ||
        (std::abs(gain - best.raw_reward) <= kTieTolerance &&
         candidates[k].goal < candidates[best.index].goal)) {
      best = {k, gain, 0.0};
    }
  }
  return best;
}

Selection select_action_coverage(const std::vector<std::uint8_t>& visited,
                                 const CandidateSet& candidates,
                                 const std::vector<double>& goal_distance) {
  require_candidates(candidates);
  std::size_t best = 0;
  long best_count = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    long count = 0;
    for (const auto& row : candidates[k].action->rows) {
      if (!visited[static_cast<std::size_t>(row.cell)]) ++count;
    }
    const double dist = goal_distance[static_cast<std::size_t>(candidates[k].goal)];
    if (count > best_count || (count == best_count && dist < best_dist)) {
      best = k;
      best_count = count;
      best_dist = dist;
    }
  }
  return {best, static_cast<double>(best_count), 0.0};
}

Selection select_action_random(const CandidateSet& candidates, std::mt19937_64& rng) {
  require_candidates(candidates);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  return {pick(rng), 0.0, 0.0};
}

}  // namespace star
