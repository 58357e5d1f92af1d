// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Single entry point for the four workflows:
//   affrl score     -- reward breakdowns for candidate responses
//   affrl train-toy -- GRPO training on the synthetic grounding environment
//   affrl eval      -- mask metrics over a prediction/ground-truth manifest
//   affrl convert   -- build grounding records from mask manifests

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "affrl/config.hpp"
#include "affrl/dataset.hpp"
#include "affrl/lexicon.hpp"
#include "affrl/metrics.hpp"
#include "affrl/reward.hpp"
#include "affrl/toy_env.hpp"

namespace {

using affrl::Error;
using json = nlohmann::ordered_json;

bool g_verbose = false;

// Writes either to a file or, for "-", to stdout.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("IoError", "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct ScoreOptions {
  std::string responses_path;
  std::string records_path;
  std::string lexicon_path;
  std::string config_path;
  std::string out_path = "-";
};

// One response per line; lines starting with '{' are JSONL objects with a
// "text" field (the only way to carry multi-line responses).
std::vector<std::string> read_responses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  std::vector<std::string> responses;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (line[first] == '{') {
      const json parsed = json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("text") ||
          !parsed["text"].is_string())
        throw Error("ParseError", path + ": line " + std::to_string(line_number) +
                                      ": expected JSON object with a 'text' string");
      responses.push_back(parsed["text"].get<std::string>());
    } else {
      responses.push_back(line);
    }
  }
  return responses;
}

int run_score(const ScoreOptions& options) {
  affrl::RewardConfig reward_config;
  if (!options.config_path.empty())
    affrl::apply_config(affrl::read_key_value_file(options.config_path), reward_config);
  reward_config.validate();

  const std::vector<std::string> responses = read_responses(options.responses_path);
  const std::vector<affrl::GroundingRecord> records = affrl::read_records(options.records_path);
  if (responses.size() != records.size())
    throw Error("CountMismatch", std::to_string(responses.size()) + " responses vs " +
                                     std::to_string(records.size()) + " records");
  const affrl::EmbeddingLexicon lexicon = affrl::EmbeddingLexicon::load(options.lexicon_path);

  OutputTarget out(options.out_path);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const affrl::RewardBreakdown breakdown =
        affrl::total_reward(responses[i], records[i], lexicon, reward_config);
    json line;
    line["index"] = i;
    line["id"] = records[i].id;
    line["total"] = breakdown.total;
    line["format_ok"] = breakdown.format_ok;
    line["failure_stage"] = std::string(affrl::to_string(breakdown.failure_stage));
    json components = json::object();
    for (affrl::RewardComponent component : affrl::kAllRewardComponents) {
      const auto value = breakdown.component(component);
      if (value) components[std::string(affrl::to_string(component))] = *value;
    }
    line["components"] = std::move(components);
    json matching = json::array();
    for (const auto& [pred_index, gt_index] : breakdown.matching)
      matching.push_back(json::array({pred_index, gt_index}));
    line["matching"] = std::move(matching);
    line["recognition_unknown_token"] = breakdown.recognition_unknown_token;
    out.stream() << line.dump() << "\n";
  }
  return 0;
}

struct TrainToyOptions {
  std::string difficulty;
  std::string config_path;
  std::string out_path = "train_stats.jsonl";
  std::string theta_path;
  int steps = -1;
  long long seed = -1;
  int scenes = -1;
};

int run_train_toy(const TrainToyOptions& options) {
  affrl::ToyTrainConfig config;
  if (!options.config_path.empty())
    affrl::apply_config(affrl::read_key_value_file(options.config_path), config);
  // Flags override the config file, which overrides defaults.
  if (!options.difficulty.empty())
    config.difficulty = affrl::difficulty_from_string(options.difficulty);
  if (options.steps >= 0) config.grpo.steps = options.steps;
  if (options.seed >= 0) config.grpo.seed = static_cast<std::uint64_t>(options.seed);
  if (options.scenes > 0) config.num_scenes = options.scenes;
  config.grpo.validate();
  config.reward.validate();

  const affrl::EmbeddingLexicon lexicon = affrl::toy_lexicon();
  const affrl::ToyTrainResult result = affrl::train_toy(config, lexicon);
  if (g_verbose && !result.history.empty())
    std::cerr << "final expected reward " << result.history.back().expected_reward << " of max "
              << result.max_achievable_reward << "\n";

  {
    std::ofstream stats(options.out_path, std::ios::binary);
    if (!stats) throw Error("IoError", "cannot open '" + options.out_path + "' for writing");
    affrl::write_train_stats(stats, config, result);
  }
  const std::string theta_path =
      options.theta_path.empty() ? options.out_path + ".theta" : options.theta_path;
  {
    std::ofstream theta(theta_path, std::ios::binary);
    if (!theta) throw Error("IoError", "cannot open '" + theta_path + "' for writing");
    for (double value : result.theta) theta << affrl::format_double(value) << "\n";
  }
  affrl::write_key_value_file(options.out_path + ".config", affrl::snapshot_config(config));
  return 0;
}

struct EvalOptions {
  std::string manifest_path;
  std::string out_path = "-";
  std::string detail_path;
};

int run_eval(const EvalOptions& options) {
  const auto [summary, details] = affrl::evaluate_manifest(options.manifest_path);
  OutputTarget out(options.out_path);
  auto& report = out.stream();
  report << "n=" << summary.n << "\n";
  report << "giou=" << affrl::format_double(summary.giou) << "\n";
  report << "ciou=" << affrl::format_double(summary.ciou) << "\n";
  report << "p50=" << affrl::format_double(summary.p50) << "\n";
  report << "p50_95=" << affrl::format_double(summary.p50_95) << "\n";
  report << "kld=" << affrl::format_double(summary.kld) << "\n";
  report << "sim=" << affrl::format_double(summary.sim) << "\n";
  report << "nss=" << affrl::format_double(summary.nss) << "\n";
  if (!options.detail_path.empty()) {
    std::ofstream detail(options.detail_path, std::ios::binary);
    if (!detail) throw Error("IoError", "cannot open '" + options.detail_path + "' for writing");
    for (const affrl::PairDetail& row : details) {
      json line;
      line["id"] = row.id;
      line["iou"] = row.iou;
      line["kld"] = row.kld;
      line["sim"] = row.sim;
      line["nss"] = row.nss;
      detail << line.dump() << "\n";
    }
  }
  return 0;
}

struct ConvertOptions {
  std::string input_dir;
  std::string out_path;
  bool strict = false;
};

int run_convert(const ConvertOptions& options) {
  const std::size_t count = affrl::convert_directory(options.input_dir, options.out_path);
  if (options.strict) affrl::read_records(options.out_path, /*strict=*/true);
  if (g_verbose) std::cerr << "wrote " << count << " records to " << options.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GRPO affordance-grounding engine"};
  app.require_subcommand(1);
  app.fallthrough();  // let subcommands inherit the global flags
  app.add_flag("-v,--verbose", g_verbose, "Progress notes on stderr");

  ScoreOptions score;
  CLI::App* score_cmd = app.add_subcommand("score", "Score responses against records");
  score_cmd->add_option("--responses", score.responses_path, "Response file (text or JSONL)")
      ->required();
  score_cmd->add_option("--records", score.records_path, "Grounding records JSONL")->required();
  score_cmd->add_option("--lexicon", score.lexicon_path, "Embedding lexicon file")->required();
  score_cmd->add_option("--config", score.config_path, "Reward key=value config");
  score_cmd->add_option("--out", score.out_path, "Breakdown JSONL output ('-' = stdout)");

  TrainToyOptions train;
  CLI::App* train_cmd = app.add_subcommand("train-toy", "Train the toy policy with GRPO");
  train_cmd->add_option("--difficulty", train.difficulty, "easy or hard");
  train_cmd->add_option("--steps", train.steps, "Training steps");
  train_cmd->add_option("--seed", train.seed, "Seed (overrides config file)");
  train_cmd->add_option("--scenes", train.scenes, "Number of scenes in the roster");
  train_cmd->add_option("--config", train.config_path, "key=value config file");
  train_cmd->add_option("--out", train.out_path, "Stats JSONL path");
  train_cmd->add_option("--theta-out", train.theta_path, "Final parameter vector path");

  EvalOptions eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate predicted masks");
  eval_cmd->add_option("--manifest", eval.manifest_path, "TSV manifest: id, pred, gt")->required();
  eval_cmd->add_option("--out", eval.out_path, "key=value report ('-' = stdout)");
  eval_cmd->add_option("--detail", eval.detail_path, "Per-pair JSONL output");

  ConvertOptions convert;
  CLI::App* convert_cmd = app.add_subcommand("convert", "Build records from mask manifests");
  convert_cmd->add_option("--input", convert.input_dir, "Directory of *.rec manifests")
      ->required();
  convert_cmd->add_option("--out", convert.out_path, "Records JSONL output")->required();
  convert_cmd->add_flag("--strict", convert.strict, "Re-derive and verify after writing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(score_cmd)) return run_score(score);
    if (app.got_subcommand(train_cmd)) return run_train_toy(train);
    if (app.got_subcommand(eval_cmd)) return run_eval(eval);
    if (app.got_subcommand(convert_cmd)) return run_convert(convert);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
