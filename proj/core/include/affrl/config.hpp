#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "affrl/grpo.hpp"
#include "affrl/reward.hpp"
#include "affrl/toy_env.hpp"

namespace affrl {

/// Flat key=value settings file. '#' starts a comment, blank lines are
/// ignored, keys are unique. The sorted map makes snapshots byte-stable.
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap read_key_value_file(const std::string& path);
KeyValueMap parse_key_values(std::istream& in, const std::string& context);
void write_key_value_file(const std::string& path, const KeyValueMap& values);

/// Applies recognized keys onto the config structs and rejects unknown
/// keys. Grpo keys: group_size, clip_epsilon, kl_beta, learning_rate,
/// steps, seed. Reward keys: iou_threshold, l1_threshold,
/// similarity_threshold, enable_<component>, weight_<component>. Toy keys:
/// difficulty, num_scenes.
void apply_config(const KeyValueMap& values, ToyTrainConfig& config);
void apply_config(const KeyValueMap& values, RewardConfig& config);

/// Effective-settings snapshot written next to the training stats.
KeyValueMap snapshot_config(const ToyTrainConfig& config);

/// Shortest round-trip decimal rendering (the JSON one), used everywhere a
/// double lands in a text report so outputs stay byte-stable.
std::string format_double(double value);

}  // namespace affrl
