#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "affrl/dataset.hpp"
#include "affrl/grpo.hpp"
#include "affrl/lexicon.hpp"
#include "affrl/reward.hpp"
#include "affrl/rng.hpp"

namespace affrl {

/// easy: 2 objects with 2 distinct labels. hard: 5 objects drawing on 4
/// labels, one label duplicated, so instructions can demand several boxes
/// and distractors share labels with targets.
enum class Difficulty { easy, hard };

Difficulty difficulty_from_string(std::string_view name);
std::string_view to_string(Difficulty difficulty);

struct SceneObject {
  Box region;
  std::string affordance;
};

/// A synthetic grounding query: objects on a pixel grid, an instruction
/// naming one affordance, and the matching objects as ground truth.
struct SceneSpec {
  int width = 64;
  int height = 64;
  std::vector<SceneObject> objects;
  std::string instruction;
  std::string instruction_label;
};

/// One enumerated response template the policy can emit. Corrupted
/// templates (deliberately malformed text) carry zero features except being
/// identifiable through the format feature.
struct ToyCandidate {
  std::string text;
  bool well_formed = false;
  std::size_t entry_count = 0;
  std::vector<double> features;
};

/// A scene bundled with its ground-truth record and its finite candidate
/// set; this is the Query type fed to grpo_step.
struct ToyScene {
  std::string id;
  SceneSpec spec;
  GroundingRecord record;
  std::vector<ToyCandidate> candidates;
};

/// Candidate feature order. Hand-crafted descriptors of the rendered
/// response relative to the scene's targets; all lie in [0, 1].
enum ToyFeature : std::size_t {
  kFeatureFormatOk = 0,    // parses cleanly
  kFeatureLabelMatch,      // fraction of entries labeled like the instruction
  kFeatureCenterProximity, // exp(-distance/4) to the nearest target center
  kFeatureSizeRatio,       // area ratio vs the nearest target box
  kFeatureCountMatch,      // entry count equals target count
  kFeatureSingleEntry,     // exactly one entry
  kToyFeatureCount,
};

/// Reproducible scene (objects, instruction, record, candidate set) from
/// the rng state. Exactly the objects carrying the instruction's label are
/// targets; hard scenes can have two.
ToyScene generate_scene(Rng& rng, Difficulty difficulty);

/// Categorical softmax policy over each scene's candidate set with logits
/// theta . features. Log-probabilities, gradients and KLs are exact.
class ToyPolicy {
 public:
  ToyPolicy() : theta_(kToyFeatureCount, 0.0) {}
  explicit ToyPolicy(std::vector<double> theta);

  std::vector<double>& parameters() { return theta_; }
  const std::vector<double>& parameters() const { return theta_; }

  std::size_t candidate_count(const ToyScene& scene) const { return scene.candidates.size(); }
  const std::string& text(const ToyScene& scene, std::size_t index) const {
    return scene.candidates[index].text;
  }

  /// Softmax distribution over the scene's candidates, enumerated exactly.
  std::vector<double> probabilities(const ToyScene& scene) const;
  std::vector<double> probabilities_given(const ToyScene& scene,
                                          std::span<const double> params) const;

  std::size_t sample(const ToyScene& scene, Rng& rng) const;
  double logprob(const ToyScene& scene, std::size_t index) const;
  double logprob_given(const ToyScene& scene, std::size_t index,
                       std::span<const double> params) const;

  /// Exact score function: features(index) - E_pi[features].
  std::vector<double> grad_logprob(const ToyScene& scene, std::size_t index) const;

  /// KL(pi_theta || pi_ref) by enumeration over the candidate set.
  double exact_kl(const ToyScene& scene, std::span<const double> reference_params) const;

 private:
  std::vector<double> theta_;
};

/// Spec-level wrappers over the policy methods.
std::pair<std::string, double> policy_sample(const ToyPolicy& policy, const ToyScene& scene,
                                             Rng& rng);
std::vector<double> policy_grad_logprob(const ToyPolicy& policy, const ToyScene& scene,
                                        std::size_t candidate_index);
double exact_kl(const ToyPolicy& policy, std::span<const double> reference_theta,
                const ToyScene& scene);

/// Embeddings for the toy affordance vocabulary: unit basis vectors, so
/// distinct labels are orthogonal and only exact matches pass the 0.8
/// similarity bar.
EmbeddingLexicon toy_lexicon();
std::span<const std::string> toy_vocabulary();

/// Reward of every candidate in the scene under the full pipeline
/// (parse_response + total_reward), in candidate order.
std::vector<RewardBreakdown> candidate_rewards(const ToyScene& scene,
                                               const EmbeddingLexicon& lexicon,
                                               const RewardConfig& config);

/// Exact policy mean reward on one scene: sum_i pi(i) * reward(i).
double expected_reward(const ToyPolicy& policy, const ToyScene& scene,
                       std::span<const double> rewards);

/// Probability mass the policy puts on candidates whose entry count equals
/// the target count, averaged over scenes with at least `min_targets`
/// targets. Throws EmptySet when no scene qualifies.
double count_match_accuracy(const ToyPolicy& policy, std::span<const ToyScene> scenes,
                            std::size_t min_targets);

/// Toy-trainer GRPO defaults. kl_beta is zero here: the toy reference
/// policy is the uniform initial one, and any pull toward it parks training
/// at a reward/KL equilibrium whose noise breaks the smoothed-monotone
/// learning curve. Set kl_beta explicitly to study the penalty.
inline GrpoConfig toy_default_grpo() {
  GrpoConfig config;
  config.kl_beta = 0.0;
  return config;
}

struct ToyTrainConfig {
  Difficulty difficulty = Difficulty::easy;
  int num_scenes = 8;
  GrpoConfig grpo = toy_default_grpo();
  RewardConfig reward;
};

struct ToyTrainStep {
  StepStats stats;
  double expected_reward = 0.0;  // exact policy mean after the update
};

struct ToyTrainResult {
  std::vector<double> theta;
  std::vector<ToyTrainStep> history;
  double uniform_expected_reward = 0.0;
  double max_achievable_reward = 0.0;
  std::vector<ToyScene> scenes;
};

/// Full training run: builds the scene roster from the seed, scores every
/// candidate once through the real reward pipeline, then iterates
/// grpo_step. The reference policy is the uniform initial one.
ToyTrainResult train_toy(const ToyTrainConfig& config, const EmbeddingLexicon& lexicon);

/// Stats serialization used by the train-toy CLI: a meta line followed by
/// one JSON line per step.
void write_train_stats(std::ostream& out, const ToyTrainConfig& config,
                       const ToyTrainResult& result);

}  // namespace affrl
