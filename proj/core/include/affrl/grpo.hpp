#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "affrl/error.hpp"
#include "affrl/reward.hpp"
#include "affrl/rng.hpp"

namespace affrl {

/// Group-relative policy optimization settings.
/// group_size is the number of candidates sampled per query; clip_epsilon
/// bounds the probability ratio; kl_beta weights the penalty against the
/// frozen reference policy. Defaults: N=8, epsilon=0.2, beta=5e-3.
struct GrpoConfig {
  int group_size = 8;
  double clip_epsilon = 0.2;
  double kl_beta = 5e-3;
  double learning_rate = 0.1;
  int steps = 500;
  std::uint64_t seed = 0;

  void validate() const {
    if (group_size < 2) throw Error("GroupTooSmall", "group_size must be at least 2");
    if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0))
      throw Error("InvalidConfig", "clip_epsilon must lie in (0,1)");
    if (!(kl_beta >= 0.0)) throw Error("InvalidConfig", "kl_beta must be nonnegative");
    if (!(learning_rate > 0.0)) throw Error("InvalidConfig", "learning_rate must be positive");
    if (steps < 0) throw Error("InvalidConfig", "steps must be nonnegative");
  }
};

/// One sampled response with the log-probabilities the surrogate needs.
struct Candidate {
  std::string text;
  double logprob_current = 0.0;
  double logprob_old = 0.0;
  double logprob_ref = 0.0;
  double reward = 0.0;
  double advantage = 0.0;
};

/// The N candidates drawn for one query.
struct RolloutGroup {
  std::string query_id;
  std::vector<Candidate> candidates;
};

/// Rewards standardized within the group: (r_i - mean) / std with the
/// population std (divide by N). Groups whose std falls below 1e-8
/// contribute no gradient: every advantage is 0. Throws GroupTooSmall for
/// fewer than two rewards.
std::vector<double> normalize_advantages(std::span<const double> rewards);

inline constexpr double kDegenerateStd = 1e-8;

/// rho = logprob_ref - logprob_current is clamped here before exp() so a
/// wild ratio cannot overflow; grpo_step counts clamped candidates.
inline constexpr double kKlRhoCeiling = 50.0;

/// Nonnegative unbiased KL estimator exp(rho) - rho - 1.
double kl_estimate(double logprob_current, double logprob_ref);
bool kl_rho_clamped(double logprob_current, double logprob_ref);

/// Mean over the group of min(s1*A, clip(s1, 1-eps, 1+eps)*A) - beta*KL,
/// with s1 = exp(logprob_current - logprob_old). This is the quantity the
/// step ascends.
double surrogate_objective(const RolloutGroup& group, const GrpoConfig& config);

/// Per-candidate scalars w_i such that the gradient of the surrogate with
/// respect to the policy parameters is (1/N) * sum_i w_i * grad log
/// pi(o_i). w_i = [unclipped-branch] * s1_i * A_i + beta * (exp(rho_i) - 1).
std::vector<double> candidate_gradient_weights(const RolloutGroup& group,
                                               const GrpoConfig& config);

/// Aggregates emitted once per training step.
struct StepStats {
  int step = 0;
  double mean_reward = 0.0;
  double mean_kl = 0.0;
  double objective = 0.0;
  std::array<double, 7> component_means{};
  long kl_clamp_count = 0;
};

/// One GRPO step over a roster of queries.
///
/// The policy snapshot at step start serves as pi_old; for every query,
/// group_size candidates are drawn from it, scored with reward_fn,
/// standardized into advantages, and the clipped-plus-KL surrogate is
/// ascended with a single parameter update (gradients accumulated in query
/// order, so fixed seeds reproduce bit-identically).
///
/// Policy requirements:
///   std::size_t candidate_count(const Query&) const
///   std::size_t sample(const Query&, Rng&) const
///   double logprob(const Query&, std::size_t index) const
///   double logprob_given(const Query&, std::size_t index,
///                        std::span<const double> params) const
///   std::vector<double> grad_logprob(const Query&, std::size_t index) const
///   const std::string& text(const Query&, std::size_t index) const
///   std::vector<double>& parameters()
///
/// reward_fn: RewardBreakdown(const std::string& text, const Query&).
template <typename Policy, typename Query, typename RewardFn>
StepStats grpo_step(Policy& policy, std::span<const Query> queries, RewardFn&& reward_fn,
                    const GrpoConfig& config, std::span<const double> reference_params,
                    Rng& rng) {
  config.validate();
  if (queries.empty()) throw Error("EmptySet", "grpo_step: no queries");

  const std::size_t group_size = static_cast<std::size_t>(config.group_size);
  std::vector<double>& params = policy.parameters();
  std::vector<double> gradient(params.size(), 0.0);

  StepStats stats;
  double objective_sum = 0.0;
  double reward_sum = 0.0;
  double kl_sum = 0.0;
  std::array<double, 7> component_sums{};
  std::size_t sample_count = 0;

  for (const Query& query : queries) {
    RolloutGroup group;
    std::vector<std::size_t> indices(group_size);
    std::vector<double> rewards(group_size);
    group.candidates.resize(group_size);
    for (std::size_t i = 0; i < group_size; ++i) {
      const std::size_t index = policy.sample(query, rng);
      indices[i] = index;
      Candidate& candidate = group.candidates[i];
      candidate.text = policy.text(query, index);
      // pi_old is the step-start snapshot; parameters only change at the
      // end of the step, so current and old coincide during scoring.
      candidate.logprob_current = policy.logprob(query, index);
      candidate.logprob_old = candidate.logprob_current;
      candidate.logprob_ref = policy.logprob_given(query, index, reference_params);
      const RewardBreakdown breakdown = reward_fn(candidate.text, query);
      candidate.reward = breakdown.total;
      rewards[i] = breakdown.total;
      reward_sum += breakdown.total;
      for (std::size_t c = 0; c < component_sums.size(); ++c)
        component_sums[c] += breakdown.components[c].value_or(0.0);
      kl_sum += kl_estimate(candidate.logprob_current, candidate.logprob_ref);
      if (kl_rho_clamped(candidate.logprob_current, candidate.logprob_ref))
        ++stats.kl_clamp_count;
      ++sample_count;
    }
    const std::vector<double> advantages = normalize_advantages(rewards);
    for (std::size_t i = 0; i < group_size; ++i)
      group.candidates[i].advantage = advantages[i];

    objective_sum += surrogate_objective(group, config);
    const std::vector<double> weights = candidate_gradient_weights(group, config);
    for (std::size_t i = 0; i < group_size; ++i) {
      if (weights[i] == 0.0) continue;
      const std::vector<double> grad = policy.grad_logprob(query, indices[i]);
      const double scale = weights[i] / static_cast<double>(group_size);
      for (std::size_t d = 0; d < gradient.size(); ++d) gradient[d] += scale * grad[d];
    }
  }

  const double query_count = static_cast<double>(queries.size());
  for (std::size_t d = 0; d < params.size(); ++d)
    params[d] += config.learning_rate * gradient[d] / query_count;

  stats.mean_reward = reward_sum / static_cast<double>(sample_count);
  stats.mean_kl = kl_sum / static_cast<double>(sample_count);
  stats.objective = objective_sum / query_count;
  for (std::size_t c = 0; c < component_sums.size(); ++c)
    stats.component_means[c] = component_sums[c] / static_cast<double>(sample_count);
  return stats;
}

}  // namespace affrl
