// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <vector>

#include "affrl/geometry.hpp"
#include "affrl/grpo.hpp"
#include "affrl/metrics.hpp"
#include "affrl/response.hpp"
#include "affrl/reward.hpp"
#include "affrl/rng.hpp"
#include "affrl/toy_env.hpp"

namespace {

using namespace affrl;

void BM_BoxIou(benchmark::State& state) {
  const Box a(3, 4, 40, 50);
  const Box b(20, 10, 60, 45);
  for (auto _ : state) {
    benchmark::DoNotOptimize(box_iou(a, b));
  }
}
BENCHMARK(BM_BoxIou);

void BM_MaskToBox(benchmark::State& state) {
  Rng rng(1);
  MaskGrid mask(64, 64, 0.0);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (rng.next_double() < 0.1) mask.set(x, y, 1.0);
  mask.set(32, 32, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mask_to_box(mask));
    benchmark::DoNotOptimize(mask_centroid(mask));
  }
}
BENCHMARK(BM_MaskToBox);

const std::string kValidResponse =
    "<think>compare the regions</think>\n<rethink>still the handle</rethink>\n"
    "<answer>[{\"bbox_2d\":[10,10,24,30],\"point_2d\":[17,20],\"affordance\":\"openable\"},"
    "{\"bbox_2d\":[40,8,60,26],\"point_2d\":[50,17],\"affordance\":\"graspable\"}]</answer>";

void BM_ParseValid(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_response(kValidResponse));
  }
}
BENCHMARK(BM_ParseValid);

void BM_ParseMalformed(benchmark::State& state) {
  const std::string malformed = "<think>x</think><answer>[{\"bbox_2d\":[1,2</answer>";
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_response(malformed));
  }
}
BENCHMARK(BM_ParseMalformed);

void BM_TotalReward(benchmark::State& state) {
  GroundingRecord record;
  record.id = "r";
  record.instruction = "open it";
  record.targets = {RecordTarget{"openable", "", Box(10, 10, 24, 30), PointXY(17, 20)},
                    RecordTarget{"graspable", "", Box(40, 8, 60, 26), PointXY(50, 17)}};
  Rng rng(2);
  EmbeddingLexicon lexicon(8);
  lexicon.add("openable", {1, 0, 0, 0, 0, 0, 0, 0});
  lexicon.add("graspable", {0, 1, 0, 0, 0, 0, 0, 0});
  const RewardConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_reward(kValidResponse, record, lexicon, config));
  }
}
BENCHMARK(BM_TotalReward);

void BM_NormalizeAdvantages(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> rewards(static_cast<std::size_t>(state.range(0)));
  for (double& r : rewards) r = rng.next_double() * 7.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize_advantages(rewards));
  }
}
BENCHMARK(BM_NormalizeAdvantages)->Arg(8)->Arg(64);

void BM_GrpoStep(benchmark::State& state) {
  Rng rng(4);
  std::vector<ToyScene> scenes;
  for (int i = 0; i < 4; ++i) scenes.push_back(generate_scene(rng, Difficulty::easy));
  const EmbeddingLexicon lexicon = toy_lexicon();
  const RewardConfig reward_config;
  GrpoConfig config;
  config.kl_beta = 0.0;
  ToyPolicy policy;
  const std::vector<double> reference = policy.parameters();
  const auto reward_fn = [&](const std::string& text, const ToyScene& scene) {
    return total_reward(text, scene.record, lexicon, reward_config);
  };
  Rng step_rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grpo_step(policy, std::span<const ToyScene>(scenes), reward_fn,
                                       config, reference, step_rng));
  }
}
BENCHMARK(BM_GrpoStep);

void BM_MetricsSummarize(benchmark::State& state) {
  Rng rng(6);
  std::vector<EvalPair> pairs;
  for (int i = 0; i < 20; ++i) {
    MaskGrid pred(64, 64, 0.0), gt(64, 64, 0.0);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        if (rng.next_double() < 0.2) pred.set(x, y, 1.0);
        if (rng.next_double() < 0.2) gt.set(x, y, 1.0);
      }
    gt.set(32, 32, 1.0);
    pairs.push_back(EvalPair{pred, gt, "p"});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(summarize(pairs));
  }
}
BENCHMARK(BM_MetricsSummarize);

void BM_MatchEntries(benchmark::State& state) {
  Rng rng(7);
  std::vector<GroundingEntry> pred;
  std::vector<RecordTarget> gt;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    const int x = rng.next_int(0, 40), y = rng.next_int(0, 40);
    pred.push_back(GroundingEntry{Box(x, y, x + 10, y + 10), PointXY(x + 5, y + 5), "a"});
    const int gx = rng.next_int(0, 40), gy = rng.next_int(0, 40);
    gt.push_back(RecordTarget{"a", "", Box(gx, gy, gx + 10, gy + 10), PointXY(gx + 5, gy + 5)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(match_entries(pred, gt));
  }
}
BENCHMARK(BM_MatchEntries)->Arg(3)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
