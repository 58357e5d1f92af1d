// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/grpo.hpp"

#include <algorithm>

namespace affrl {

std::vector<double> normalize_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw Error("GroupTooSmall", "need at least two rewards");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double variance = 0.0;
  for (double r : rewards) variance += (r - mean) * (r - mean);
  variance /= n;
  const double std_dev = std::sqrt(variance);
  std::vector<double> advantages(rewards.size(), 0.0);
  if (std_dev < kDegenerateStd) return advantages;
  for (std::size_t i = 0; i < rewards.size(); ++i) advantages[i] = (rewards[i] - mean) / std_dev;
  return advantages;
}

double kl_estimate(double logprob_current, double logprob_ref) {
  const double rho = std::min(logprob_ref - logprob_current, kKlRhoCeiling);
  return std::exp(rho) - rho - 1.0;
}

bool kl_rho_clamped(double logprob_current, double logprob_ref) {
  return logprob_ref - logprob_current > kKlRhoCeiling;
}

double surrogate_objective(const RolloutGroup& group, const GrpoConfig& config) {
  if (group.candidates.empty()) throw Error("EmptySet", "surrogate of an empty group");
  double total = 0.0;
  for (const Candidate& candidate : group.candidates) {
    const double s1 = std::exp(candidate.logprob_current - candidate.logprob_old);
    const double s2 =
        std::clamp(s1, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon);
    const double clipped_term =
        std::min(s1 * candidate.advantage, s2 * candidate.advantage);
    total += clipped_term -
             config.kl_beta * kl_estimate(candidate.logprob_current, candidate.logprob_ref);
  }
  return total / static_cast<double>(group.candidates.size());
}

std::vector<double> candidate_gradient_weights(const RolloutGroup& group,
                                               const GrpoConfig& config) {
  std::vector<double> weights;
  weights.reserve(group.candidates.size());
  for (const Candidate& candidate : group.candidates) {
    const double s1 = std::exp(candidate.logprob_current - candidate.logprob_old);
    const double s2 =
        std::clamp(s1, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon);
    // d/dtheta min(s1*A, s2*A): the clipped branch is constant in theta, so
    // only the unclipped branch (ties included) carries gradient.
    double weight = 0.0;
    if (s1 * candidate.advantage <= s2 * candidate.advantage)
      weight += s1 * candidate.advantage;
    // Once rho hits the ceiling the clamped estimator is constant in theta,
    // so the KL term stops contributing gradient.
    const double rho = candidate.logprob_ref - candidate.logprob_current;
    if (rho <= kKlRhoCeiling) weight += config.kl_beta * (std::exp(rho) - 1.0);
    weights.push_back(weight);
  }
  return weights;
}

}  // namespace affrl
