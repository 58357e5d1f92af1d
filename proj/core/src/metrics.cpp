// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "affrl/pgm.hpp"

namespace affrl {

namespace {

// Neumaier-compensated accumulator; keeps reductions order-independent to
// well below the tolerances asserted on the summaries.
class CompensatedSum {
 public:
  void add(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value))
      compensation_ += (sum_ - t) + value;
    else
      compensation_ += (value - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

void require_same_dims(const MaskGrid& a, const MaskGrid& b, const char* op) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error("DimensionMismatch", std::string(op) + ": mask dimensions differ");
}

void require_non_empty(std::span<const EvalPair> pairs, const char* op) {
  if (pairs.empty()) throw Error("EmptySet", std::string(op) + ": no pairs");
}

struct PixelCounts {
  long long intersection = 0;
  long long uni = 0;
};

PixelCounts count_pixels(const MaskGrid& pred, const MaskGrid& gt, const char* op) {
  require_same_dims(pred, gt, op);
  if (!pred.is_binary() || !gt.is_binary())
    throw Error("NonBinaryMask", std::string(op) + " requires binary masks");
  PixelCounts counts;
  const auto pv = pred.values();
  const auto gv = gt.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const bool p = pv[i] != 0.0;
    const bool g = gv[i] != 0.0;
    counts.intersection += p && g;
    counts.uni += p || g;
  }
  return counts;
}

MaskGrid binary_view(const MaskGrid& pred) { return threshold_bytes(pred); }

constexpr std::array<double, 10> kP5095 = {0.50, 0.55, 0.60, 0.65, 0.70,
                                           0.75, 0.80, 0.85, 0.90, 0.95};

}  // namespace

double mask_iou(const MaskGrid& pred, const MaskGrid& gt) {
  const PixelCounts counts = count_pixels(pred, gt, "mask_iou");
  if (counts.uni == 0) return 1.0;  // both empty
  return static_cast<double>(counts.intersection) / static_cast<double>(counts.uni);
}

double compute_giou(std::span<const EvalPair> pairs) {
  require_non_empty(pairs, "compute_giou");
  CompensatedSum sum;
  for (const EvalPair& pair : pairs) sum.add(mask_iou(binary_view(pair.pred), pair.gt));
  return sum.value() / static_cast<double>(pairs.size());
}

double compute_ciou(std::span<const EvalPair> pairs) {
  require_non_empty(pairs, "compute_ciou");
  long long intersection = 0, uni = 0;
  for (const EvalPair& pair : pairs) {
    const PixelCounts counts = count_pixels(binary_view(pair.pred), pair.gt, "compute_ciou");
    intersection += counts.intersection;
    uni += counts.uni;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(intersection) / static_cast<double>(uni);
}

std::vector<std::pair<double, double>> compute_precision(std::span<const EvalPair> pairs,
                                                         std::span<const double> thresholds) {
  require_non_empty(pairs, "compute_precision");
  for (double t : thresholds)
    if (!(t > 0.0 && t < 1.0)) throw Error("InvalidConfig", "precision threshold outside (0,1)");
  std::vector<double> ious;
  ious.reserve(pairs.size());
  for (const EvalPair& pair : pairs) ious.push_back(mask_iou(binary_view(pair.pred), pair.gt));
  std::vector<std::pair<double, double>> result;
  result.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto hits = std::count_if(ious.begin(), ious.end(), [t](double v) { return v > t; });
    result.emplace_back(t, static_cast<double>(hits) / static_cast<double>(ious.size()));
  }
  return result;
}

std::span<const double> precision_50_95_thresholds() { return kP5095; }

double compute_kld(const MaskGrid& pred, const MaskGrid& gt) {
  require_same_dims(pred, gt, "compute_kld");
  if (!gt.is_binary()) throw Error("NonBinaryMask", "compute_kld ground truth must be binary");
  const auto pv = pred.values();
  const auto gv = gt.values();
  double pred_sum = 0.0, gt_sum = 0.0;
  for (double v : pv) pred_sum += v;
  for (double v : gv) gt_sum += v;
  if (pred_sum == 0.0) return kKldCap;  // worst score for an empty prediction
  CompensatedSum divergence;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (gv[i] == 0.0) continue;
    const double g = gv[i] / (gt_sum + kSaliencyEpsilon);
    const double p = pv[i] / (pred_sum + kSaliencyEpsilon);
    divergence.add(g * std::log(g / (p + kSaliencyEpsilon)));
  }
  return std::clamp(divergence.value(), 0.0, kKldCap);
}

double compute_sim(const MaskGrid& pred, const MaskGrid& gt) {
  require_same_dims(pred, gt, "compute_sim");
  if (!gt.is_binary()) throw Error("NonBinaryMask", "compute_sim ground truth must be binary");
  const auto pv = pred.values();
  const auto gv = gt.values();
  double pred_sum = 0.0, gt_sum = 0.0;
  for (double v : pv) pred_sum += v;
  for (double v : gv) gt_sum += v;
  if (pred_sum == 0.0 || gt_sum == 0.0) return 0.0;
  CompensatedSum intersection;
  for (std::size_t i = 0; i < pv.size(); ++i)
    intersection.add(std::min(pv[i] / (pred_sum + kSaliencyEpsilon),
                              gv[i] / (gt_sum + kSaliencyEpsilon)));
  return intersection.value();
}

double compute_nss(const MaskGrid& pred, const MaskGrid& gt) {
  require_same_dims(pred, gt, "compute_nss");
  if (!gt.is_binary()) throw Error("NonBinaryMask", "compute_nss ground truth must be binary");
  if (gt.foreground_count() == 0)
    throw Error("EmptyGroundTruth", "compute_nss: no ground-truth foreground");
  const auto pv = pred.values();
  const auto gv = gt.values();
  const double n = static_cast<double>(pv.size());
  double mean = 0.0;
  for (double v : pv) mean += v;
  mean /= n;
  double variance = 0.0;
  for (double v : pv) variance += (v - mean) * (v - mean);
  variance /= n;
  const double std_dev = std::sqrt(variance);
  if (std_dev < kSaliencyEpsilon) return 0.0;
  CompensatedSum standardized;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (gv[i] == 0.0) continue;
    standardized.add((pv[i] - mean) / std_dev);
    ++count;
  }
  return standardized.value() / static_cast<double>(count);
}

EvalSummary summarize(std::span<const EvalPair> pairs) {
  require_non_empty(pairs, "summarize");
  EvalSummary summary;
  summary.n = pairs.size();
  summary.giou = compute_giou(pairs);
  summary.ciou = compute_ciou(pairs);
  const auto precisions = compute_precision(pairs, precision_50_95_thresholds());
  summary.p50 = precisions.front().second;
  CompensatedSum precision_sum;
  for (const auto& [threshold, value] : precisions) precision_sum.add(value);
  summary.p50_95 = precision_sum.value() / static_cast<double>(precisions.size());
  CompensatedSum kld_sum, sim_sum, nss_sum;
  for (const EvalPair& pair : pairs) {
    kld_sum.add(compute_kld(pair.pred, pair.gt));
    sim_sum.add(compute_sim(pair.pred, pair.gt));
    nss_sum.add(compute_nss(pair.pred, pair.gt));
  }
  const double n = static_cast<double>(pairs.size());
  summary.kld = kld_sum.value() / n;
  summary.sim = sim_sum.value() / n;
  summary.nss = nss_sum.value() / n;
  return summary;
}

std::pair<EvalSummary, std::vector<PairDetail>> evaluate_manifest(const std::string& path) {
  namespace fs = std::filesystem;
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  const fs::path base = fs::path(path).parent_path();

  std::vector<EvalPair> pairs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string id, pred_path, gt_path;
    if (!std::getline(fields, id, '\t') || !std::getline(fields, pred_path, '\t') ||
        !std::getline(fields, gt_path, '\t'))
      throw Error("ParseError",
                  path + ": line " + std::to_string(line_number) + ": expected 3 TSV fields");
    while (!gt_path.empty() && (gt_path.back() == '\r' || gt_path.back() == '\n'))
      gt_path.pop_back();
    pairs.push_back(EvalPair{read_gray_pgm((base / pred_path).string()),
                             read_mask_pgm((base / gt_path).string()), id});
  }
  const EvalSummary summary = summarize(pairs);
  std::vector<PairDetail> details;
  details.reserve(pairs.size());
  for (const EvalPair& pair : pairs) {
    PairDetail detail;
    detail.id = pair.id;
    detail.iou = mask_iou(threshold_bytes(pair.pred), pair.gt);
    detail.kld = compute_kld(pair.pred, pair.gt);
    detail.sim = compute_sim(pair.pred, pair.gt);
    detail.nss = compute_nss(pair.pred, pair.gt);
    details.push_back(std::move(detail));
  }
  return {summary, details};
}

}  // namespace affrl
