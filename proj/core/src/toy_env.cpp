// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/toy_env.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <utility>

#include "json.hpp"

namespace affrl {

namespace {

using json = nlohmann::ordered_json;

const std::array<std::string, 6> kVocabulary = {"openable",  "graspable", "pourable",
                                                "cuttable",  "pressable", "sittable"};

const std::array<std::string, 3> kInstructionTemplates = {
    "Find every region that affords '%s' interaction and report each one.",
    "A robot needs something %s here. Mark all usable regions.",
    "Highlight all areas whose affordance is %s.",
};

constexpr std::array<std::pair<int, int>, 4> kJitters = {{{0, 0}, {1, 1}, {2, 2}, {6, -6}}};

std::string instantiate_template(std::size_t template_id, const std::string& label) {
  const std::string& pattern = kInstructionTemplates[template_id % kInstructionTemplates.size()];
  const std::size_t slot = pattern.find("%s");
  return pattern.substr(0, slot) + label + pattern.substr(slot + 2);
}

PointXY box_center(const Box& box) {
  // Same rounding as mask_centroid on the rasterized box, so exact
  // candidates score a zero point distance.
  const auto mid = [](int lo, int hi) {
    return static_cast<int>(std::llround((static_cast<double>(lo) + hi) / 2.0));
  };
  return PointXY(mid(box.x1, box.x2), mid(box.y1, box.y2));
}

Box shifted_box(const Box& box, int dx, int dy, int width, int height) {
  // Clamp the shift so the box keeps its size and stays inside the grid.
  const int w = box.x2 - box.x1;
  const int h = box.y2 - box.y1;
  const int x1 = std::clamp(box.x1 + dx, 0, width - 1 - w);
  const int y1 = std::clamp(box.y1 + dy, 0, height - 1 - h);
  return Box(x1, y1, x1 + w, y1 + h);
}

double center_distance(const Box& a, const Box& b) {
  const PointXY ca = box_center(a);
  const PointXY cb = box_center(b);
  return std::hypot(static_cast<double>(ca.x) - cb.x, static_cast<double>(ca.y) - cb.y);
}

std::vector<double> entry_features(const std::vector<GroundingEntry>& entries,
                                   const ToyScene& scene) {
  std::vector<double> features(kToyFeatureCount, 0.0);
  features[kFeatureFormatOk] = 1.0;
  const auto& targets = scene.record.targets;
  double label_matches = 0.0, proximity = 0.0, size_ratio = 0.0;
  for (const GroundingEntry& entry : entries) {
    if (entry.affordance == scene.spec.instruction_label) label_matches += 1.0;
    double best_distance = std::numeric_limits<double>::infinity();
    const RecordTarget* nearest = nullptr;
    for (const RecordTarget& target : targets) {
      const double d = center_distance(entry.bbox, target.bbox);
      if (d < best_distance) {
        best_distance = d;
        nearest = &target;
      }
    }
    proximity += std::exp(-best_distance / 4.0);
    const double entry_area = static_cast<double>(entry.bbox.area());
    const double target_area = static_cast<double>(nearest->bbox.area());
    size_ratio += std::min(entry_area, target_area) / std::max(entry_area, target_area);
  }
  const double n = static_cast<double>(entries.size());
  features[kFeatureLabelMatch] = label_matches / n;
  features[kFeatureCenterProximity] = proximity / n;
  features[kFeatureSizeRatio] = size_ratio / n;
  features[kFeatureCountMatch] = entries.size() == targets.size() ? 1.0 : 0.0;
  features[kFeatureSingleEntry] = entries.size() == 1 ? 1.0 : 0.0;
  return features;
}

const std::string kThinkFiller =
    "The instruction names one affordance; I compare each region's position "
    "and extent against it.";
const std::string kRethinkFiller =
    "Re-checking the selected boxes: labels, centers and sizes still match "
    "the requested affordance.";

ToyCandidate make_candidate(std::vector<GroundingEntry> entries, const ToyScene& scene) {
  ToyCandidate candidate;
  candidate.entry_count = entries.size();
  candidate.features = entry_features(entries, scene);
  candidate.well_formed = true;
  candidate.text =
      make_structured_response(kThinkFiller, kRethinkFiller, std::move(entries)).raw;
  return candidate;
}

ToyCandidate make_corrupted(std::string text) {
  ToyCandidate candidate;
  candidate.text = std::move(text);
  candidate.well_formed = false;
  candidate.entry_count = 0;
  candidate.features.assign(kToyFeatureCount, 0.0);
  return candidate;
}

void build_candidates(ToyScene& scene) {
  std::vector<std::string> labels;
  for (const SceneObject& object : scene.spec.objects)
    if (std::find(labels.begin(), labels.end(), object.affordance) == labels.end())
      labels.push_back(object.affordance);

  for (const SceneObject& object : scene.spec.objects) {
    for (const auto& [dx, dy] : kJitters) {
      const Box box = shifted_box(object.region, dx, dy, scene.spec.width, scene.spec.height);
      for (const std::string& label : labels) {
        scene.candidates.push_back(
            make_candidate({GroundingEntry{box, box_center(box), label}}, scene));
      }
    }
  }
  // The full correct answer when several objects match the instruction.
  if (scene.record.targets.size() >= 2) {
    std::vector<GroundingEntry> entries;
    for (const RecordTarget& target : scene.record.targets)
      entries.push_back(GroundingEntry{target.bbox, target.centroid, target.affordance});
    scene.candidates.push_back(make_candidate(std::move(entries), scene));
  }
  // Deliberately corrupted templates keep the format reward exercised.
  const std::string payload = "[{\"bbox_2d\":[1,1,8,8],\"point_2d\":[4,4],\"affordance\":\"" +
                              scene.spec.instruction_label + "\"}]";
  scene.candidates.push_back(make_corrupted("<think>" + kThinkFiller + "</think><answer>" +
                                            payload + "</answer>"));
  scene.candidates.push_back(make_corrupted("<think>" + kThinkFiller + "</think><rethink>" +
                                            kRethinkFiller + "</rethink><answer>[{\"bbox_2d\":[1,1," +
                                            "</answer>"));
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double logit : logits) sum += std::exp(logit - max_logit);
  const double log_sum = max_logit + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_sum;
  return out;
}

std::vector<double> scene_logits(const ToyScene& scene, std::span<const double> params) {
  std::vector<double> logits(scene.candidates.size(), 0.0);
  for (std::size_t i = 0; i < scene.candidates.size(); ++i) {
    const std::vector<double>& features = scene.candidates[i].features;
    double logit = 0.0;
    for (std::size_t d = 0; d < params.size(); ++d) logit += params[d] * features[d];
    logits[i] = logit;
  }
  return logits;
}

}  // namespace

Difficulty difficulty_from_string(std::string_view name) {
  if (name == "easy") return Difficulty::easy;
  if (name == "hard") return Difficulty::hard;
  throw Error("InvalidConfig", "unknown difficulty '" + std::string(name) + "'");
}

std::string_view to_string(Difficulty difficulty) {
  return difficulty == Difficulty::easy ? "easy" : "hard";
}

ToyScene generate_scene(Rng& rng, Difficulty difficulty) {
  ToyScene scene;
  scene.spec.width = 64;
  scene.spec.height = 64;

  const int object_count = difficulty == Difficulty::easy ? 2 : 5;
  const int label_count = difficulty == Difficulty::easy ? 2 : 4;

  // Distinct labels drawn from the vocabulary.
  std::vector<std::string> labels(kVocabulary.begin(), kVocabulary.end());
  for (int i = 0; i < label_count; ++i) {
    const int j = rng.next_int(i, static_cast<int>(labels.size()) - 1);
    std::swap(labels[i], labels[j]);
  }
  labels.resize(label_count);

  // Objects sit in distinct cells of a 3x3 layout so regions never overlap.
  std::array<int, 9> cells = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  for (int i = 0; i < object_count; ++i) {
    const int j = rng.next_int(i, 8);
    std::swap(cells[i], cells[j]);
  }
  for (int i = 0; i < object_count; ++i) {
    const int cell_x = (cells[i] % 3) * 21;
    const int cell_y = (cells[i] / 3) * 21;
    const int w = rng.next_int(11, 15);
    const int h = rng.next_int(11, 15);
    const int x1 = cell_x + rng.next_int(1, 20 - w);
    const int y1 = cell_y + rng.next_int(1, 20 - h);
    // Object i takes label i; the extra objects duplicate earlier labels so
    // hard scenes hold multi-target instructions and shared-label
    // distractors.
    const std::string& label = labels[static_cast<std::size_t>(i) % labels.size()];
    scene.spec.objects.push_back(SceneObject{Box(x1, y1, x1 + w - 1, y1 + h - 1), label});
  }

  if (difficulty == Difficulty::easy) {
    scene.spec.instruction_label = labels[static_cast<std::size_t>(rng.next_int(0, 1))];
  } else {
    // Half the instructions ask for the duplicated label (two targets).
    const std::string& duplicated = scene.spec.objects.back().affordance;
    if (rng.next_double() < 0.5) {
      scene.spec.instruction_label = duplicated;
    } else {
      std::vector<std::string> others;
      for (const std::string& label : labels)
        if (label != duplicated) others.push_back(label);
      scene.spec.instruction_label =
          others[static_cast<std::size_t>(rng.next_int(0, static_cast<int>(others.size()) - 1))];
    }
  }
  const std::size_t template_id = static_cast<std::size_t>(rng.next_int(0, 2));
  scene.spec.instruction = instantiate_template(template_id, scene.spec.instruction_label);

  // Ground truth through the real geometry pipeline.
  scene.record.image_path = "";
  scene.record.instruction = scene.spec.instruction;
  for (const SceneObject& object : scene.spec.objects) {
    if (object.affordance != scene.spec.instruction_label) continue;
    const MaskGrid mask = rasterize_box(object.region, scene.spec.width, scene.spec.height);
    scene.record.targets.push_back(
        RecordTarget{object.affordance, "", mask_to_box(mask), mask_centroid(mask)});
  }
  scene.id = "scene-" + std::string(to_string(difficulty)) + "-" +
             std::to_string(rng.next_u64() % 1000000000ULL);
  scene.record.id = scene.id;

  build_candidates(scene);
  return scene;
}

ToyPolicy::ToyPolicy(std::vector<double> theta) : theta_(std::move(theta)) {
  if (theta_.size() != kToyFeatureCount)
    throw Error("InvalidConfig", "theta must have " + std::to_string(kToyFeatureCount) +
                                     " entries");
}

std::vector<double> ToyPolicy::probabilities_given(const ToyScene& scene,
                                                   std::span<const double> params) const {
  const std::vector<double> log_probs = log_softmax(scene_logits(scene, params));
  std::vector<double> probs(log_probs.size());
  for (std::size_t i = 0; i < log_probs.size(); ++i) probs[i] = std::exp(log_probs[i]);
  return probs;
}

std::vector<double> ToyPolicy::probabilities(const ToyScene& scene) const {
  return probabilities_given(scene, theta_);
}

std::size_t ToyPolicy::sample(const ToyScene& scene, Rng& rng) const {
  const std::vector<double> probs = probabilities(scene);
  return rng.categorical(probs);
}

double ToyPolicy::logprob_given(const ToyScene& scene, std::size_t index,
                                std::span<const double> params) const {
  if (index >= scene.candidates.size()) throw Error("OutOfBounds", "candidate index");
  return log_softmax(scene_logits(scene, params))[index];
}

double ToyPolicy::logprob(const ToyScene& scene, std::size_t index) const {
  return logprob_given(scene, index, theta_);
}

std::vector<double> ToyPolicy::grad_logprob(const ToyScene& scene, std::size_t index) const {
  if (index >= scene.candidates.size()) throw Error("OutOfBounds", "candidate index");
  const std::vector<double> probs = probabilities(scene);
  std::vector<double> grad(scene.candidates[index].features);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const std::vector<double>& features = scene.candidates[i].features;
    for (std::size_t d = 0; d < grad.size(); ++d) grad[d] -= probs[i] * features[d];
  }
  return grad;
}

double ToyPolicy::exact_kl(const ToyScene& scene, std::span<const double> reference_params) const {
  const std::vector<double> log_p = log_softmax(scene_logits(scene, theta_));
  const std::vector<double> log_q = log_softmax(scene_logits(scene, reference_params));
  double kl = 0.0;
  for (std::size_t i = 0; i < log_p.size(); ++i) kl += std::exp(log_p[i]) * (log_p[i] - log_q[i]);
  return std::max(kl, 0.0);
}

std::pair<std::string, double> policy_sample(const ToyPolicy& policy, const ToyScene& scene,
                                             Rng& rng) {
  const std::size_t index = policy.sample(scene, rng);
  return {policy.text(scene, index), policy.logprob(scene, index)};
}

std::vector<double> policy_grad_logprob(const ToyPolicy& policy, const ToyScene& scene,
                                        std::size_t candidate_index) {
  return policy.grad_logprob(scene, candidate_index);
}

double exact_kl(const ToyPolicy& policy, std::span<const double> reference_theta,
                const ToyScene& scene) {
  return policy.exact_kl(scene, reference_theta);
}

EmbeddingLexicon toy_lexicon() {
  EmbeddingLexicon lexicon(8);
  for (std::size_t i = 0; i < kVocabulary.size(); ++i) {
    std::vector<double> basis(8, 0.0);
    basis[i] = 1.0;
    lexicon.add(kVocabulary[i], std::move(basis));
  }
  return lexicon;
}

std::span<const std::string> toy_vocabulary() { return kVocabulary; }

std::vector<RewardBreakdown> candidate_rewards(const ToyScene& scene,
                                               const EmbeddingLexicon& lexicon,
                                               const RewardConfig& config) {
  std::vector<RewardBreakdown> rewards;
  rewards.reserve(scene.candidates.size());
  for (const ToyCandidate& candidate : scene.candidates)
    rewards.push_back(total_reward(candidate.text, scene.record, lexicon, config));
  return rewards;
}

double expected_reward(const ToyPolicy& policy, const ToyScene& scene,
                       std::span<const double> rewards) {
  const std::vector<double> probs = policy.probabilities(scene);
  double expectation = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) expectation += probs[i] * rewards[i];
  return expectation;
}

double count_match_accuracy(const ToyPolicy& policy, std::span<const ToyScene> scenes,
                            std::size_t min_targets) {
  double accuracy_sum = 0.0;
  std::size_t counted = 0;
  for (const ToyScene& scene : scenes) {
    if (scene.record.targets.size() < min_targets) continue;
    const std::vector<double> probs = policy.probabilities(scene);
    double mass = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
      if (scene.candidates[i].entry_count == scene.record.targets.size()) mass += probs[i];
    accuracy_sum += mass;
    ++counted;
  }
  if (counted == 0) throw Error("EmptySet", "no scene with enough targets");
  return accuracy_sum / static_cast<double>(counted);
}

ToyTrainResult train_toy(const ToyTrainConfig& config, const EmbeddingLexicon& lexicon) {
  config.grpo.validate();
  config.reward.validate();
  if (config.num_scenes < 1) throw Error("InvalidConfig", "num_scenes must be positive");

  Rng rng(config.grpo.seed);
  ToyTrainResult result;
  result.scenes.reserve(static_cast<std::size_t>(config.num_scenes));
  for (int i = 0; i < config.num_scenes; ++i) {
    ToyScene scene = generate_scene(rng, config.difficulty);
    // Roster-unique ids; the reward cache is keyed by them.
    scene.id = "q" + std::to_string(i) + "-" + scene.id;
    scene.record.id = scene.id;
    result.scenes.push_back(std::move(scene));
  }

  // Candidate sets are finite and fixed, so the full reward pipeline runs
  // once per candidate and the training loop reuses the results.
  std::vector<std::vector<RewardBreakdown>> reward_cache;
  std::vector<std::unordered_map<std::string, std::size_t>> text_index;
  std::unordered_map<std::string, std::size_t> scene_index;
  reward_cache.reserve(result.scenes.size());
  for (std::size_t s = 0; s < result.scenes.size(); ++s) {
    const ToyScene& scene = result.scenes[s];
    reward_cache.push_back(candidate_rewards(scene, lexicon, config.reward));
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < scene.candidates.size(); ++i)
      index.emplace(scene.candidates[i].text, i);
    text_index.push_back(std::move(index));
    scene_index.emplace(scene.id, s);
  }

  ToyPolicy policy;
  const std::vector<double> reference_params = policy.parameters();

  std::vector<std::vector<double>> totals(result.scenes.size());
  double uniform_sum = 0.0, max_sum = 0.0;
  for (std::size_t s = 0; s < result.scenes.size(); ++s) {
    double mean = 0.0, best = 0.0;
    totals[s].reserve(reward_cache[s].size());
    for (const RewardBreakdown& breakdown : reward_cache[s]) {
      totals[s].push_back(breakdown.total);
      mean += breakdown.total;
      best = std::max(best, breakdown.total);
    }
    uniform_sum += mean / static_cast<double>(reward_cache[s].size());
    max_sum += best;
  }
  result.uniform_expected_reward = uniform_sum / static_cast<double>(result.scenes.size());
  result.max_achievable_reward = max_sum / static_cast<double>(result.scenes.size());

  const auto reward_fn = [&](const std::string& text, const ToyScene& scene) -> RewardBreakdown {
    const std::size_t s = scene_index.at(scene.id);
    const auto it = text_index[s].find(text);
    if (it != text_index[s].end()) return reward_cache[s][it->second];
    return total_reward(text, scene.record, lexicon, config.reward);
  };

  result.history.reserve(static_cast<std::size_t>(config.grpo.steps));
  for (int step = 1; step <= config.grpo.steps; ++step) {
    ToyTrainStep entry;
    entry.stats = grpo_step(policy, std::span<const ToyScene>(result.scenes), reward_fn,
                            config.grpo, reference_params, rng);
    entry.stats.step = step;
    double expected_sum = 0.0;
    for (std::size_t s = 0; s < result.scenes.size(); ++s)
      expected_sum += expected_reward(policy, result.scenes[s], totals[s]);
    entry.expected_reward = expected_sum / static_cast<double>(result.scenes.size());
    result.history.push_back(std::move(entry));
  }
  result.theta = policy.parameters();
  return result;
}

void write_train_stats(std::ostream& out, const ToyTrainConfig& config,
                       const ToyTrainResult& result) {
  json meta;
  meta["difficulty"] = std::string(to_string(config.difficulty));
  meta["num_scenes"] = config.num_scenes;
  meta["group_size"] = config.grpo.group_size;
  meta["clip_epsilon"] = config.grpo.clip_epsilon;
  meta["kl_beta"] = config.grpo.kl_beta;
  meta["learning_rate"] = config.grpo.learning_rate;
  meta["steps"] = config.grpo.steps;
  meta["seed"] = config.grpo.seed;
  meta["uniform_expected_reward"] = result.uniform_expected_reward;
  meta["max_achievable_reward"] = result.max_achievable_reward;
  json meta_line;
  meta_line["meta"] = std::move(meta);
  out << meta_line.dump() << "\n";

  for (const ToyTrainStep& entry : result.history) {
    json line;
    line["step"] = entry.stats.step;
    line["mean_reward"] = entry.stats.mean_reward;
    line["expected_reward"] = entry.expected_reward;
    line["mean_kl"] = entry.stats.mean_kl;
    line["objective"] = entry.stats.objective;
    line["kl_clamp_count"] = entry.stats.kl_clamp_count;
    for (RewardComponent component : kAllRewardComponents)
      line["mean_" + std::string(to_string(component))] =
          entry.stats.component_means[static_cast<std::size_t>(component)];
    out << line.dump() << "\n";
  }
}

}  // namespace affrl
