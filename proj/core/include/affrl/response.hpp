#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affrl/geometry.hpp"

namespace affrl {

// The wire format between a policy and the reward engine is tagged text:
//
//   response = *WSP think-block *WSP rethink-block *WSP answer-block *WSP
//   think-block   = "<think>"   1*CHAR "</think>"     ; non-empty after trim
//   rethink-block = "<rethink>" 1*CHAR "</rethink>"   ; non-empty after trim
//   answer-block  = "<answer>"  payload "</answer>"
//   payload       = JSON array of one or more objects, each exactly
//                   {"bbox_2d": [x1,y1,x2,y2], "point_2d": [x,y],
//                    "affordance": label}
//   label         = 1*(%x61-7A / "_")                 ; lowercase a-z and _
//
// Tags are literal, case-sensitive and non-nested; nothing but whitespace
// may appear outside the three blocks. See docs/formats.md for the full
// grammar.

/// One grounded answer: a box, a point prompt, and the predicted affordance.
struct GroundingEntry {
  Box bbox;
  PointXY point;
  std::string affordance;

  friend bool operator==(const GroundingEntry&, const GroundingEntry&) = default;
};

/// A fully validated think/rethink/answer triple. Instances come from
/// parse_response or make_structured_response only; `raw` records the text
/// the value was parsed from (or the canonical rendering when built
/// directly) and is excluded from equality.
struct StructuredResponse {
  std::string think_text;
  std::string rethink_text;
  std::vector<GroundingEntry> answer_entries;
  std::string raw;

  friend bool operator==(const StructuredResponse& a, const StructuredResponse& b) {
    return a.think_text == b.think_text && a.rethink_text == b.rethink_text &&
           a.answer_entries == b.answer_entries;
  }
};

/// First check that failed, in grammar order. `ok` means the input is fully
/// valid.
enum class FailureStage {
  missing_think,
  missing_rethink,
  missing_answer,
  tag_order,
  payload_syntax,
  payload_semantics,
  ok,
};

std::string_view to_string(FailureStage stage);

/// Outcome of parsing one candidate response. `response` is present iff
/// `format_ok`. The two block flags record how far the staged scan got
/// before the first failure; the format reward reads them (a well-formed
/// answer implies format_ok, so it needs no separate flag).
struct ParseReport {
  bool format_ok = false;
  FailureStage failure_stage = FailureStage::missing_think;
  std::optional<StructuredResponse> response;
  bool think_block_ok = false;
  bool rethink_block_ok = false;
};

/// Total, deterministic parse of arbitrary (possibly adversarial) text.
/// Never throws; every failure is encoded in the report.
ParseReport parse_response(std::string_view text) noexcept;

/// Canonical serialization. parse_response(render_response(r)) yields a
/// response equal to r. Field order inside each payload object is fixed:
/// bbox_2d, point_2d, affordance.
std::string render_response(const StructuredResponse& response);

/// Build a response from parts, enforcing the same invariants the parser
/// does (non-empty trimmed texts without tag literals, at least one valid
/// entry, lowercase labels). Throws InvalidResponse. `raw` is set to the
/// canonical rendering.
StructuredResponse make_structured_response(std::string think, std::string rethink,
                                            std::vector<GroundingEntry> entries);

}  // namespace affrl
