// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/reward.hpp"

#include <algorithm>
#include <limits>

namespace affrl {

namespace {

// Enumerates one-to-one assignments of min(|pred|,|gt|) pairs, keeping the
// best total IoU. Branches are visited in lexicographic pair-list order and
// replaced only on strict improvement, so ties resolve to the
// lexicographically smallest matching.
struct AssignmentSearch {
  std::span<const GroundingEntry> pred;
  std::span<const RecordTarget> gt;
  std::size_t required;
  std::vector<double> iou;  // pred-major |pred| x |gt| table
  std::vector<bool> gt_used;
  Matching current;
  Matching best;
  double best_total = -1.0;

  double iou_at(std::size_t p, std::size_t g) const { return iou[p * gt.size() + g]; }

  void run() {
    iou.resize(pred.size() * gt.size());
    for (std::size_t p = 0; p < pred.size(); ++p)
      for (std::size_t g = 0; g < gt.size(); ++g)
        iou[p * gt.size() + g] = box_iou(pred[p].bbox, gt[g].bbox);
    gt_used.assign(gt.size(), false);
    descend(0, 0.0);
  }

  void descend(std::size_t p, double total) {
    if (current.size() == required) {
      if (total > best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    if (p == pred.size()) return;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt_used[g]) continue;
      gt_used[g] = true;
      current.emplace_back(p, g);
      descend(p + 1, total + iou_at(p, g));
      current.pop_back();
      gt_used[g] = false;
    }
    // Leaving this prediction unmatched is only possible when enough
    // predictions remain to reach the required pair count; the skip branch
    // comes last so lexicographically smaller assignments win ties.
    if (pred.size() - p - 1 >= required - current.size()) descend(p + 1, total);
  }
};

double pair_fraction(const Matching& matching, auto&& pair_passes) {
  if (matching.empty()) return 0.0;
  std::size_t passing = 0;
  for (const auto& [p, g] : matching)
    if (pair_passes(p, g)) ++passing;
  return static_cast<double>(passing) / static_cast<double>(matching.size());
}

}  // namespace

std::string_view to_string(RewardComponent component) {
  switch (component) {
    case RewardComponent::format_think: return "format_think";
    case RewardComponent::format_rethink: return "format_rethink";
    case RewardComponent::format_answer: return "format_answer";
    case RewardComponent::iou: return "iou";
    case RewardComponent::l1: return "l1";
    case RewardComponent::box_num: return "box_num";
    case RewardComponent::recognition: return "recognition";
  }
  return "unknown";
}

std::optional<RewardComponent> reward_component_from_string(std::string_view name) {
  for (RewardComponent c : kAllRewardComponents)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

void RewardConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
    throw Error("InvalidConfig", "iou_threshold must lie in (0,1)");
  if (!(l1_threshold > 0.0)) throw Error("InvalidConfig", "l1_threshold must be positive");
  if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0))
    throw Error("InvalidConfig", "similarity_threshold must lie in (0,1)");
  for (double w : weights)
    if (!(w >= 0.0)) throw Error("InvalidConfig", "weights must be nonnegative");
}

FormatReward format_reward(const ParseReport& report) {
  FormatReward reward;
  reward.think = report.think_block_ok ? 1.0 : 0.0;
  reward.rethink = report.rethink_block_ok ? 1.0 : 0.0;
  // A well-formed answer means the whole response validated, payload
  // included, so the answer bit coincides with format_ok.
  reward.answer = report.format_ok ? 1.0 : 0.0;
  return reward;
}

Matching match_entries(std::span<const GroundingEntry> pred, std::span<const RecordTarget> gt) {
  if (pred.empty()) throw Error("EmptyPrediction", "match_entries: no predicted entries");
  if (gt.empty()) throw Error("EmptyGroundTruth", "match_entries: no ground-truth targets");
  AssignmentSearch search;
  search.pred = pred;
  search.gt = gt;
  search.required = std::min(pred.size(), gt.size());
  search.run();
  return search.best;
}

double iou_reward(const Matching& matching, std::span<const GroundingEntry> pred,
                  std::span<const RecordTarget> gt, const RewardConfig& config) {
  return pair_fraction(matching, [&](std::size_t p, std::size_t g) {
    return box_iou(pred[p].bbox, gt[g].bbox) > config.iou_threshold;
  });
}

double l1_reward(const Matching& matching, std::span<const GroundingEntry> pred,
                 std::span<const RecordTarget> gt, const RewardConfig& config) {
  return pair_fraction(matching, [&](std::size_t p, std::size_t g) {
    const double distance = static_cast<double>(box_l1(pred[p].bbox, gt[g].bbox) +
                                                point_l1(pred[p].point, gt[g].centroid));
    return distance < config.l1_threshold;
  });
}

double box_num_reward(std::size_t pred_count, std::size_t gt_count) {
  return pred_count == gt_count ? 1.0 : 0.0;
}

double recognition_reward(const std::string& pred_label, const std::string& gt_label,
                          const EmbeddingLexicon& lexicon, const RewardConfig& config) {
  if (pred_label.empty() || gt_label.empty())
    throw Error("UnknownToken", "recognition_reward: empty label");
  if (pred_label == gt_label) return 1.0;
  const std::vector<double> pred_vec = lexicon.embed_label(pred_label);
  const std::vector<double> gt_vec = lexicon.embed_label(gt_label);
  return cosine_similarity(pred_vec, gt_vec) > config.similarity_threshold ? 1.0 : 0.0;
}

RewardBreakdown total_reward(std::string_view text, const GroundingRecord& record,
                             const EmbeddingLexicon& lexicon, const RewardConfig& config) {
  RewardBreakdown breakdown;
  const ParseReport report = parse_response(text);
  breakdown.format_ok = report.format_ok;
  breakdown.failure_stage = report.failure_stage;

  const FormatReward fmt = format_reward(report);
  const auto set_component = [&](RewardComponent c, double value) {
    if (config.is_enabled(c)) breakdown.components[static_cast<std::size_t>(c)] = value;
  };
  set_component(RewardComponent::format_think, fmt.think);
  set_component(RewardComponent::format_rethink, fmt.rethink);
  set_component(RewardComponent::format_answer, fmt.answer);

  double iou_value = 0.0, l1_value = 0.0, box_num_value = 0.0, recognition_value = 0.0;
  if (report.format_ok) {
    const std::span<const GroundingEntry> pred = report.response->answer_entries;
    const std::span<const RecordTarget> gt = record.targets;
    breakdown.matching = match_entries(pred, gt);
    iou_value = iou_reward(breakdown.matching, pred, gt, config);
    l1_value = l1_reward(breakdown.matching, pred, gt, config);
    box_num_value = box_num_reward(pred.size(), gt.size());
    if (config.is_enabled(RewardComponent::recognition)) {
      std::size_t passing = 0;
      for (const auto& [p, g] : breakdown.matching) {
        try {
          passing += recognition_reward(pred[p].affordance, gt[g].affordance, lexicon, config) > 0;
        } catch (const Error& e) {
          if (e.name() != "UnknownToken") throw;
          breakdown.recognition_unknown_token = true;
        }
      }
      recognition_value =
          static_cast<double>(passing) / static_cast<double>(breakdown.matching.size());
    }
  }
  set_component(RewardComponent::iou, iou_value);
  set_component(RewardComponent::l1, l1_value);
  set_component(RewardComponent::box_num, box_num_value);
  set_component(RewardComponent::recognition, recognition_value);

  double total = 0.0;
  for (RewardComponent c : kAllRewardComponents)
    total += config.weight(c) * breakdown.component_or_zero(c);
  breakdown.total = total;
  return breakdown;
}

}  // namespace affrl
