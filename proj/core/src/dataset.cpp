// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "affrl/pgm.hpp"

namespace affrl {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json box_to_json(const Box& box) { return json::array({box.x1, box.y1, box.x2, box.y2}); }
json point_to_json(const PointXY& point) { return json::array({point.x, point.y}); }

[[noreturn]] void parse_error(std::size_t line_number, const std::string& why) {
  throw Error("ParseError", "line " + std::to_string(line_number) + ": " + why);
}

int json_int(const json& value, std::size_t line_number, const char* what) {
  if (!value.is_number_integer()) parse_error(line_number, std::string("expected integer ") + what);
  return value.get<int>();
}

std::string json_string(const json& object, const char* key, std::size_t line_number) {
  if (!object.contains(key) || !object[key].is_string())
    parse_error(line_number, std::string("missing string field '") + key + "'");
  return object[key].get<std::string>();
}

std::string trim_copy(const std::string& s) {
  const auto* ws = " \t\r\n";
  const auto begin = s.find_first_not_of(ws);
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(ws);
  return s.substr(begin, end - begin + 1);
}

}  // namespace

GroundingRecord build_record(std::string id, std::string image_path, std::string instruction,
                             std::span<const LabeledMask> labeled_masks) {
  if (labeled_masks.empty()) throw Error("EmptyRecord", "record needs at least one target");
  GroundingRecord record;
  record.id = std::move(id);
  record.image_path = std::move(image_path);
  record.instruction = std::move(instruction);
  record.targets.reserve(labeled_masks.size());
  for (std::size_t i = 0; i < labeled_masks.size(); ++i) {
    const LabeledMask& lm = labeled_masks[i];
    try {
      record.targets.push_back(
          RecordTarget{lm.affordance, lm.mask_path, mask_to_box(lm.mask), mask_centroid(lm.mask)});
    } catch (const Error& e) {
      throw Error(e.name(), "target " + std::to_string(i) + ": " + e.what());
    }
  }
  return record;
}

std::string record_to_json_line(const GroundingRecord& record) {
  json line;
  line["id"] = record.id;
  line["image_path"] = record.image_path;
  line["instruction"] = record.instruction;
  json targets = json::array();
  for (const RecordTarget& target : record.targets) {
    json t;
    t["affordance"] = target.affordance;
    t["mask_path"] = target.mask_path;
    t["bbox"] = box_to_json(target.bbox);
    t["centroid"] = point_to_json(target.centroid);
    targets.push_back(std::move(t));
  }
  line["targets"] = std::move(targets);
  return line.dump();
}

GroundingRecord record_from_json_line(const std::string& line, std::size_t line_number) {
  const json parsed = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) parse_error(line_number, "not a JSON object");
  GroundingRecord record;
  record.id = json_string(parsed, "id", line_number);
  record.image_path = json_string(parsed, "image_path", line_number);
  record.instruction = json_string(parsed, "instruction", line_number);
  if (!parsed.contains("targets") || !parsed["targets"].is_array() || parsed["targets"].empty())
    parse_error(line_number, "missing non-empty 'targets' array");
  for (const json& t : parsed["targets"]) {
    if (!t.is_object()) parse_error(line_number, "target is not an object");
    const std::string affordance = json_string(t, "affordance", line_number);
    const std::string mask_path = json_string(t, "mask_path", line_number);
    if (!t.contains("bbox") || !t["bbox"].is_array() || t["bbox"].size() != 4)
      parse_error(line_number, "bbox must be a 4-element array");
    if (!t.contains("centroid") || !t["centroid"].is_array() || t["centroid"].size() != 2)
      parse_error(line_number, "centroid must be a 2-element array");
    try {
      Box bbox(json_int(t["bbox"][0], line_number, "bbox"),
               json_int(t["bbox"][1], line_number, "bbox"),
               json_int(t["bbox"][2], line_number, "bbox"),
               json_int(t["bbox"][3], line_number, "bbox"));
      PointXY centroid(json_int(t["centroid"][0], line_number, "centroid"),
                       json_int(t["centroid"][1], line_number, "centroid"));
      record.targets.push_back(RecordTarget{affordance, mask_path, bbox, centroid});
    } catch (const Error& e) {
      if (e.name() == "ParseError") throw;
      parse_error(line_number, e.what());
    }
  }
  return record;
}

void write_records(const std::string& path, std::span<const GroundingRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot open '" + path + "' for writing");
  for (const GroundingRecord& record : records) out << record_to_json_line(record) << "\n";
  if (!out) throw Error("IoError", "write failure on '" + path + "'");
}

std::vector<GroundingRecord> read_records(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  const fs::path base = fs::path(path).parent_path();
  std::vector<GroundingRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim_copy(line).empty()) continue;
    GroundingRecord record = record_from_json_line(line, line_number);
    if (strict) {
      for (std::size_t i = 0; i < record.targets.size(); ++i) {
        const RecordTarget& target = record.targets[i];
        const MaskGrid mask = read_mask_pgm((base / target.mask_path).string());
        const Box derived_box = mask_to_box(mask);
        const PointXY derived_centroid = mask_centroid(mask);
        if (derived_box != target.bbox || derived_centroid != target.centroid)
          throw Error("DerivationMismatch",
                      "record '" + record.id + "' target " + std::to_string(i) +
                          ": stored bbox/centroid disagree with mask at '" + target.mask_path +
                          "'");
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::size_t convert_directory(const std::string& input_dir, const std::string& out_path) {
  if (!fs::is_directory(input_dir)) throw Error("IoError", "'" + input_dir + "' is not a directory");
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::directory_iterator(input_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".rec")
      manifests.push_back(entry.path());
  std::sort(manifests.begin(), manifests.end());

  const fs::path out_base = fs::absolute(fs::path(out_path)).parent_path();
  std::vector<GroundingRecord> records;
  for (const fs::path& manifest : manifests) {
    std::ifstream in(manifest);
    if (!in) throw Error("IoError", "cannot open '" + manifest.string() + "'");
    std::string image_path, instruction, line;
    if (!std::getline(in, image_path) || !std::getline(in, instruction))
      throw Error("ParseError", manifest.string() + ": expected image path and instruction lines");
    std::vector<LabeledMask> masks;
    std::size_t line_number = 2;
    while (std::getline(in, line)) {
      ++line_number;
      const std::string trimmed = trim_copy(line);
      if (trimmed.empty()) continue;
      std::istringstream fields(trimmed);
      std::string label, mask_rel;
      if (!(fields >> label >> mask_rel))
        throw Error("ParseError", manifest.string() + ": line " + std::to_string(line_number) +
                                      ": expected 'label mask_path'");
      const fs::path mask_abs = fs::absolute(fs::path(input_dir) / mask_rel);
      const fs::path stored = fs::proximate(mask_abs, out_base);
      masks.push_back(
          LabeledMask{label, stored.generic_string(), read_mask_pgm(mask_abs.string())});
    }
    records.push_back(build_record(manifest.stem().string(), trim_copy(image_path),
                                   trim_copy(instruction), masks));
  }
  write_records(out_path, records);
  return records.size();
}

}  // namespace affrl
