#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <span>
#include <string>
#include <vector>

#include "affrl/geometry.hpp"

namespace affrl {

/// Ground-truth target: affordance label, the mask it came from, and the
/// bbox/centroid derived from that mask (stored redundantly so records are
/// usable without the mask files present).
struct RecordTarget {
  std::string affordance;
  std::string mask_path;
  Box bbox;
  PointXY centroid;

  friend bool operator==(const RecordTarget&, const RecordTarget&) = default;
};

/// One grounding sample: an image reference, an instruction, and >= 1
/// targets. The reward engine scores candidate responses against this.
struct GroundingRecord {
  std::string id;
  std::string image_path;
  std::string instruction;
  std::vector<RecordTarget> targets;

  friend bool operator==(const GroundingRecord&, const GroundingRecord&) = default;
};

/// Input to build_record: a labeled binary mask plus the path it will be
/// referenced by.
struct LabeledMask {
  std::string affordance;
  std::string mask_path;
  MaskGrid mask;
};

/// Derive bbox and centroid for every target. Deterministic; throws
/// EmptyMask naming the offending target index.
GroundingRecord build_record(std::string id, std::string image_path, std::string instruction,
                             std::span<const LabeledMask> labeled_masks);

/// JSONL serialization, one record per line, stable field order
/// (id, image_path, instruction, targets[affordance, mask_path, bbox,
/// centroid]). read_records throws ParseError with the line number on
/// malformed input. In strict mode the masks are loaded (paths resolved
/// against the records file's directory) and the stored bbox/centroid are
/// re-derived; any disagreement raises DerivationMismatch.
void write_records(const std::string& path, std::span<const GroundingRecord> records);
std::vector<GroundingRecord> read_records(const std::string& path, bool strict = false);

std::string record_to_json_line(const GroundingRecord& record);
GroundingRecord record_from_json_line(const std::string& line, std::size_t line_number);

/// Scan `input_dir` for record manifests (*.rec: first line image path,
/// second line instruction, then one "label mask_path" pair per line),
/// derive the geometry from the referenced PGM masks, and write the record
/// file. Manifests are processed in filename order; returns the number of
/// records written. Mask paths in the output are stored relative to the
/// output file's directory.
std::size_t convert_directory(const std::string& input_dir, const std::string& out_path);

}  // namespace affrl
