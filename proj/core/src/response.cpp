// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/response.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>

#include "json.hpp"

namespace affrl {

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kTags[3][2] = {
    {"<think>", "</think>"},
    {"<rethink>", "</rethink>"},
    {"<answer>", "</answer>"},
};

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\f\v";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

bool whitespace_only(std::string_view s) { return trim(s).empty(); }

bool valid_label(std::string_view label) {
  if (label.empty()) return false;
  return std::all_of(label.begin(), label.end(),
                     [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; });
}

// Extracts the body of the next tagged block. The open tag must follow the
// cursor after nothing but whitespace; the body ends at the first matching
// close tag (tags are non-nested). An incomplete block counts as missing;
// a complete block in the wrong place is an ordering failure.
enum class BlockResult { ok, missing, out_of_order };

BlockResult next_block(std::string_view text, std::size_t& cursor, int tag_index,
                       std::string_view& body) {
  const std::string_view open = kTags[tag_index][0];
  const std::string_view close = kTags[tag_index][1];
  const std::size_t open_pos = text.find(open, cursor);
  if (open_pos == std::string_view::npos) return BlockResult::missing;
  const std::size_t close_pos = text.find(close, open_pos + open.size());
  if (close_pos == std::string_view::npos) return BlockResult::missing;
  if (!whitespace_only(text.substr(cursor, open_pos - cursor))) return BlockResult::out_of_order;
  body = text.substr(open_pos + open.size(), close_pos - (open_pos + open.size()));
  cursor = close_pos + close.size();
  return BlockResult::ok;
}

// Duplicate open or close tags anywhere past the block just consumed make
// the "exactly one of each" rule fail.
bool duplicate_tag_after(std::string_view text, std::size_t cursor, int tag_index) {
  return text.find(kTags[tag_index][0], cursor) != std::string_view::npos ||
         text.find(kTags[tag_index][1], cursor) != std::string_view::npos;
}

FailureStage missing_stage(int tag_index) {
  switch (tag_index) {
    case 0: return FailureStage::missing_think;
    case 1: return FailureStage::missing_rethink;
    default: return FailureStage::missing_answer;
  }
}

bool to_int(const json& value, int& out) {
  if (!value.is_number_integer()) return false;
  const auto wide = value.get<std::int64_t>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max())
    return false;
  out = static_cast<int>(wide);
  return true;
}

// Payload shape (array of objects with exactly the three required fields of
// the right JSON types) is payload_syntax; violated value-domain invariants
// (box corner order, negative coordinates, label charset) are
// payload_semantics.
FailureStage parse_payload(std::string_view body, std::vector<GroundingEntry>& entries) {
  const json payload = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (payload.is_discarded() || !payload.is_array() || payload.empty())
    return FailureStage::payload_syntax;
  struct RawEntry {
    std::array<int, 4> bbox;
    std::array<int, 2> point;
    std::string label;
  };
  std::vector<RawEntry> raw;
  for (const json& item : payload) {
    if (!item.is_object() || item.size() != 3 || !item.contains("bbox_2d") ||
        !item.contains("point_2d") || !item.contains("affordance"))
      return FailureStage::payload_syntax;
    const json& bbox = item["bbox_2d"];
    const json& point = item["point_2d"];
    const json& label = item["affordance"];
    if (!bbox.is_array() || bbox.size() != 4 || !point.is_array() || point.size() != 2 ||
        !label.is_string())
      return FailureStage::payload_syntax;
    RawEntry entry;
    for (std::size_t i = 0; i < 4; ++i)
      if (!to_int(bbox[i], entry.bbox[i])) return FailureStage::payload_syntax;
    for (std::size_t i = 0; i < 2; ++i)
      if (!to_int(point[i], entry.point[i])) return FailureStage::payload_syntax;
    entry.label = label.get<std::string>();
    raw.push_back(std::move(entry));
  }
  for (const RawEntry& entry : raw) {
    const auto [x1, y1, x2, y2] = entry.bbox;
    if (x1 < 0 || y1 < 0 || x2 < x1 || y2 < y1) return FailureStage::payload_semantics;
    if (entry.point[0] < 0 || entry.point[1] < 0) return FailureStage::payload_semantics;
    if (!valid_label(entry.label)) return FailureStage::payload_semantics;
  }
  entries.reserve(raw.size());
  for (const RawEntry& entry : raw)
    entries.push_back(GroundingEntry{Box(entry.bbox[0], entry.bbox[1], entry.bbox[2], entry.bbox[3]),
                                     PointXY(entry.point[0], entry.point[1]), entry.label});
  return FailureStage::ok;
}

ParseReport fail(FailureStage stage, bool think_ok, bool rethink_ok) {
  ParseReport report;
  report.format_ok = false;
  report.failure_stage = stage;
  report.think_block_ok = think_ok;
  report.rethink_block_ok = rethink_ok;
  return report;
}

ParseReport parse_impl(std::string_view text) {
  std::size_t cursor = 0;
  std::array<std::string_view, 3> bodies;
  bool think_ok = false;
  bool rethink_ok = false;
  for (int tag = 0; tag < 3; ++tag) {
    switch (next_block(text, cursor, tag, bodies[tag])) {
      case BlockResult::missing:
        return fail(missing_stage(tag), think_ok, rethink_ok);
      case BlockResult::out_of_order:
        return fail(FailureStage::tag_order, think_ok, rethink_ok);
      case BlockResult::ok:
        break;
    }
    if (duplicate_tag_after(text, cursor, tag))
      return fail(FailureStage::tag_order, think_ok, rethink_ok);
    if (whitespace_only(bodies[tag])) return fail(missing_stage(tag), think_ok, rethink_ok);
    if (tag == 0) think_ok = true;
    if (tag == 1) rethink_ok = true;
  }
  if (!whitespace_only(text.substr(cursor))) return fail(FailureStage::tag_order, true, true);

  std::vector<GroundingEntry> entries;
  const FailureStage payload_stage = parse_payload(trim(bodies[2]), entries);
  if (payload_stage != FailureStage::ok) return fail(payload_stage, true, true);

  ParseReport report;
  report.format_ok = true;
  report.failure_stage = FailureStage::ok;
  report.think_block_ok = true;
  report.rethink_block_ok = true;
  StructuredResponse response;
  response.think_text = std::string(trim(bodies[0]));
  response.rethink_text = std::string(trim(bodies[1]));
  response.answer_entries = std::move(entries);
  response.raw = std::string(text);
  report.response = std::move(response);
  return report;
}

}  // namespace

std::string_view to_string(FailureStage stage) {
  switch (stage) {
    case FailureStage::missing_think: return "missing_think";
    case FailureStage::missing_rethink: return "missing_rethink";
    case FailureStage::missing_answer: return "missing_answer";
    case FailureStage::tag_order: return "tag_order";
    case FailureStage::payload_syntax: return "payload_syntax";
    case FailureStage::payload_semantics: return "payload_semantics";
    case FailureStage::ok: return "ok";
  }
  return "unknown";
}

ParseReport parse_response(std::string_view text) noexcept {
  try {
    return parse_impl(text);
  } catch (...) {
    // Reaching this means a bug upstream; still honor totality.
    ParseReport report;
    report.format_ok = false;
    report.failure_stage = FailureStage::payload_syntax;
    return report;
  }
}

std::string render_response(const StructuredResponse& response) {
  json payload = json::array();
  for (const GroundingEntry& entry : response.answer_entries) {
    json item;
    item["bbox_2d"] = {entry.bbox.x1, entry.bbox.y1, entry.bbox.x2, entry.bbox.y2};
    item["point_2d"] = {entry.point.x, entry.point.y};
    item["affordance"] = entry.affordance;
    payload.push_back(std::move(item));
  }
  std::string out;
  out += "<think>";
  out += response.think_text;
  out += "</think>\n<rethink>";
  out += response.rethink_text;
  out += "</rethink>\n<answer>";
  out += payload.dump();
  out += "</answer>";
  return out;
}

StructuredResponse make_structured_response(std::string think, std::string rethink,
                                            std::vector<GroundingEntry> entries) {
  StructuredResponse response;
  response.think_text = std::string(trim(think));
  response.rethink_text = std::string(trim(rethink));
  response.answer_entries = std::move(entries);
  response.raw = render_response(response);
  const ParseReport check = parse_response(response.raw);
  if (!check.format_ok)
    throw Error("InvalidResponse", "parts do not form a valid response (" +
                                       std::string(to_string(check.failure_stage)) + ")");
  if (*check.response != response)
    throw Error("InvalidResponse", "parts do not survive the render/parse round trip");
  return response;
}

}  // namespace affrl
