// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace affrl {

namespace {

std::string trim_copy(const std::string& s) {
  const auto* ws = " \t\r\n";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error("ConfigParse", "bad value '" + value + "' for key '" + key + "'");
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return parsed;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_value(key, value);
  }
}

long long to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (used != value.size()) bad_value(key, value);
    return parsed;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_value(key, value);
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

// Reward keys live in their own helper so both the score and train-toy
// configs accept them.
bool apply_reward_key(const std::string& key, const std::string& value, RewardConfig& config) {
  if (key == "iou_threshold") {
    config.iou_threshold = to_double(key, value);
    return true;
  }
  if (key == "l1_threshold") {
    config.l1_threshold = to_double(key, value);
    return true;
  }
  if (key == "similarity_threshold") {
    config.similarity_threshold = to_double(key, value);
    return true;
  }
  constexpr std::string_view enable_prefix = "enable_";
  constexpr std::string_view weight_prefix = "weight_";
  if (key.starts_with(enable_prefix)) {
    const auto component = reward_component_from_string(key.substr(enable_prefix.size()));
    if (!component) throw Error("ConfigParse", "unknown reward component in key '" + key + "'");
    config.set_enabled(*component, to_bool(key, value));
    return true;
  }
  if (key.starts_with(weight_prefix)) {
    const auto component = reward_component_from_string(key.substr(weight_prefix.size()));
    if (!component) throw Error("ConfigParse", "unknown reward component in key '" + key + "'");
    config.set_weight(*component, to_double(key, value));
    return true;
  }
  return false;
}

}  // namespace

KeyValueMap parse_key_values(std::istream& in, const std::string& context) {
  KeyValueMap values;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string trimmed = trim_copy(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw Error("ConfigParse",
                  context + ": line " + std::to_string(line_number) + ": expected key=value");
    const std::string key = trim_copy(trimmed.substr(0, eq));
    const std::string value = trim_copy(trimmed.substr(eq + 1));
    if (key.empty())
      throw Error("ConfigParse", context + ": line " + std::to_string(line_number) + ": empty key");
    if (!values.emplace(key, value).second)
      throw Error("ConfigParse", context + ": duplicate key '" + key + "'");
  }
  return values;
}

KeyValueMap read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  return parse_key_values(in, path);
}

void write_key_value_file(const std::string& path, const KeyValueMap& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot open '" + path + "' for writing");
  for (const auto& [key, value] : values) out << key << "=" << value << "\n";
  if (!out) throw Error("IoError", "write failure on '" + path + "'");
}

void apply_config(const KeyValueMap& values, RewardConfig& config) {
  for (const auto& [key, value] : values)
    if (!apply_reward_key(key, value, config))
      throw Error("ConfigParse", "unknown key '" + key + "'");
}

void apply_config(const KeyValueMap& values, ToyTrainConfig& config) {
  for (const auto& [key, value] : values) {
    if (apply_reward_key(key, value, config.reward)) continue;
    if (key == "group_size")
      config.grpo.group_size = static_cast<int>(to_int(key, value));
    else if (key == "clip_epsilon")
      config.grpo.clip_epsilon = to_double(key, value);
    else if (key == "kl_beta")
      config.grpo.kl_beta = to_double(key, value);
    else if (key == "learning_rate")
      config.grpo.learning_rate = to_double(key, value);
    else if (key == "steps")
      config.grpo.steps = static_cast<int>(to_int(key, value));
    else if (key == "seed")
      config.grpo.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "difficulty")
      config.difficulty = difficulty_from_string(value);
    else if (key == "num_scenes")
      config.num_scenes = static_cast<int>(to_int(key, value));
    else
      throw Error("ConfigParse", "unknown key '" + key + "'");
  }
}

KeyValueMap snapshot_config(const ToyTrainConfig& config) {
  KeyValueMap values;
  values["difficulty"] = std::string(to_string(config.difficulty));
  values["num_scenes"] = std::to_string(config.num_scenes);
  values["group_size"] = std::to_string(config.grpo.group_size);
  values["clip_epsilon"] = format_double(config.grpo.clip_epsilon);
  values["kl_beta"] = format_double(config.grpo.kl_beta);
  values["learning_rate"] = format_double(config.grpo.learning_rate);
  values["steps"] = std::to_string(config.grpo.steps);
  values["seed"] = std::to_string(config.grpo.seed);
  values["iou_threshold"] = format_double(config.reward.iou_threshold);
  values["l1_threshold"] = format_double(config.reward.l1_threshold);
  values["similarity_threshold"] = format_double(config.reward.similarity_threshold);
  for (RewardComponent component : kAllRewardComponents) {
    const std::string name(to_string(component));
    values["enable_" + name] = config.reward.is_enabled(component) ? "true" : "false";
    values["weight_" + name] = format_double(config.reward.weight(component));
  }
  return values;
}

std::string format_double(double value) { return nlohmann::json(value).dump(); }

}  // namespace affrl
