#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affrl/dataset.hpp"
#include "affrl/lexicon.hpp"
#include "affrl/response.hpp"

namespace affrl {

/// The seven switchable reward components. format_* are the structural
/// rewards; iou/l1/box_num grade the spatial payload; recognition grades the
/// predicted affordance label.
enum class RewardComponent {
  format_think,
  format_rethink,
  format_answer,
  iou,
  l1,
  box_num,
  recognition,
};

inline constexpr std::array<RewardComponent, 7> kAllRewardComponents = {
    RewardComponent::format_think, RewardComponent::format_rethink,
    RewardComponent::format_answer, RewardComponent::iou,
    RewardComponent::l1,            RewardComponent::box_num,
    RewardComponent::recognition,
};

std::string_view to_string(RewardComponent component);
std::optional<RewardComponent> reward_component_from_string(std::string_view name);

/// Thresholds, per-component weights and the ablation toggles.
/// Defaults: IoU threshold 0.5, combined L1 threshold 10 pixels, label
/// similarity threshold 0.8, unit weights, everything enabled.
struct RewardConfig {
  double iou_threshold = 0.5;
  double l1_threshold = 10.0;
  double similarity_threshold = 0.8;
  std::array<double, 7> weights = {1, 1, 1, 1, 1, 1, 1};
  std::array<bool, 7> enabled = {true, true, true, true, true, true, true};

  double weight(RewardComponent c) const { return weights[static_cast<std::size_t>(c)]; }
  bool is_enabled(RewardComponent c) const { return enabled[static_cast<std::size_t>(c)]; }
  void set_weight(RewardComponent c, double w) { weights[static_cast<std::size_t>(c)] = w; }
  void set_enabled(RewardComponent c, bool on) { enabled[static_cast<std::size_t>(c)] = on; }

  /// Throws InvalidConfig when a threshold or weight is out of range.
  void validate() const;
};

/// Binary structural rewards derived from the staged parse: think is earned
/// once a well-formed think block was seen, rethink likewise, and answer
/// only when the whole response (payload included) validated.
struct FormatReward {
  double think = 0.0;
  double rethink = 0.0;
  double answer = 0.0;
};

FormatReward format_reward(const ParseReport& report);

/// One-to-one assignment between predicted entries and ground-truth
/// targets, as (pred_index, gt_index) pairs sorted by pred_index.
using Matching = std::vector<std::pair<std::size_t, std::size_t>>;

/// Optimal assignment of min(|pred|, |gt|) pairs maximizing total box IoU,
/// found by exhaustive enumeration (lists are small). Ties break to the
/// lexicographically smallest pair list. Throws EmptyPrediction /
/// EmptyGroundTruth.
Matching match_entries(std::span<const GroundingEntry> pred, std::span<const RecordTarget> gt);

/// Fraction of matched pairs with IoU strictly above the threshold.
/// Equals the single-box binary rule when one prediction meets one target.
double iou_reward(const Matching& matching, std::span<const GroundingEntry> pred,
                  std::span<const RecordTarget> gt, const RewardConfig& config);

/// Fraction of matched pairs whose combined box + point L1 distance is
/// strictly below the threshold.
double l1_reward(const Matching& matching, std::span<const GroundingEntry> pred,
                 std::span<const RecordTarget> gt, const RewardConfig& config);

/// 1 iff the prediction produced exactly as many boxes as the ground truth.
double box_num_reward(std::size_t pred_count, std::size_t gt_count);

/// 1 iff the cosine similarity of the two labels' mean token embeddings is
/// strictly above the threshold. Identical strings short-circuit to 1
/// without touching the lexicon; otherwise unknown tokens throw
/// UnknownToken.
double recognition_reward(const std::string& pred_label, const std::string& gt_label,
                          const EmbeddingLexicon& lexicon, const RewardConfig& config);

/// Full per-response score. Component slots are nullopt when disabled;
/// total is the weighted sum over enabled components. When the format is
/// invalid there is no payload, so every perception/recognition component
/// scores 0. An UnknownToken inside recognition degrades that component to
/// 0 and sets the flag instead of failing the rollout.
struct RewardBreakdown {
  std::array<std::optional<double>, 7> components;
  double total = 0.0;
  Matching matching;
  bool format_ok = false;
  FailureStage failure_stage = FailureStage::missing_think;
  bool recognition_unknown_token = false;

  std::optional<double> component(RewardComponent c) const {
    return components[static_cast<std::size_t>(c)];
  }
  double component_or_zero(RewardComponent c) const {
    return components[static_cast<std::size_t>(c)].value_or(0.0);
  }
};

RewardBreakdown total_reward(std::string_view text, const GroundingRecord& record,
                             const EmbeddingLexicon& lexicon, const RewardConfig& config);

}  // namespace affrl
