#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "affrl/geometry.hpp"

namespace affrl {

/// One evaluation sample. gt must be binary; pred may be real-valued (the
/// saliency metrics use it as-is, the IoU family thresholds byte-valued
/// grids at >= 128 first).
struct EvalPair {
  MaskGrid pred;
  MaskGrid gt;
  std::string id;
};

/// Dataset-level metric report.
struct EvalSummary {
  double giou = 0.0;
  double ciou = 0.0;
  double p50 = 0.0;
  double p50_95 = 0.0;
  double kld = 0.0;
  double sim = 0.0;
  double nss = 0.0;
  std::size_t n = 0;
};

/// Pixelwise intersection over union of two binary masks of equal size.
/// Both empty -> 1, exactly one empty -> 0. Throws DimensionMismatch /
/// NonBinaryMask.
double mask_iou(const MaskGrid& pred, const MaskGrid& gt);

/// Mean of the per-sample IoUs.
double compute_giou(std::span<const EvalPair> pairs);

/// Pooled ratio: sum of intersections over sum of unions across the whole
/// set (1.0 when every union is empty).
double compute_ciou(std::span<const EvalPair> pairs);

/// P@t = fraction of pairs with IoU strictly above t, for each threshold.
std::vector<std::pair<double, double>> compute_precision(std::span<const EvalPair> pairs,
                                                         std::span<const double> thresholds);

/// The ten thresholds 0.50, 0.55, ..., 0.95 averaged by P@50:95.
std::span<const double> precision_50_95_thresholds();

inline constexpr double kSaliencyEpsilon = 1e-12;
inline constexpr double kKldCap = 1e6;

/// KL divergence of the sum-normalized ground truth G from the
/// sum-normalized prediction P: sum G * log(G / (P + eps)), clamped to
/// [0, cap]. An all-zero prediction scores the cap (worst).
double compute_kld(const MaskGrid& pred, const MaskGrid& gt);

/// Histogram intersection of the two sum-normalized maps: sum min(P, G).
/// An all-zero prediction scores 0.
double compute_sim(const MaskGrid& pred, const MaskGrid& gt);

/// Mean standardized prediction value over ground-truth foreground pixels;
/// 0 when the prediction has (near-)zero variance. Throws EmptyGroundTruth.
double compute_nss(const MaskGrid& pred, const MaskGrid& gt);

/// All seven metrics over a non-empty set of pairs. Saliency metrics are
/// per-pair means. Reductions use compensated summation so the result is
/// independent of accumulation order to well below 1e-9.
EvalSummary summarize(std::span<const EvalPair> pairs);

/// Per-pair detail row produced by the manifest runner.
struct PairDetail {
  std::string id;
  double iou = 0.0;
  double kld = 0.0;
  double sim = 0.0;
  double nss = 0.0;
};

/// Read a TSV manifest (id <TAB> pred_path <TAB> gt_path, paths relative to
/// the manifest), load the PGM masks (pred keeps raw intensities for the
/// saliency metrics) and evaluate.
std::pair<EvalSummary, std::vector<PairDetail>> evaluate_manifest(const std::string& path);

}  // namespace affrl
