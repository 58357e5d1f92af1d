// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/pgm.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

namespace affrl {

namespace {

[[noreturn]] void bad_pgm(const std::string& context, const std::string& why) {
  throw Error("PgmFormat", context + ": " + why);
}

// Reads the next header token, skipping whitespace and '#' comments. The
// single whitespace byte terminating the token is consumed, which is exactly
// the separator P5 requires between the header and the raw pixel data.
std::string next_token(std::istream& in, const std::string& context) {
  constexpr int eof = std::char_traits<char>::eof();
  int c = in.get();
  while (c != eof && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != eof && c != '\n') c = in.get();
    c = in.get();
  }
  if (c == eof) bad_pgm(context, "truncated header");
  std::string token;
  while (c != eof && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  return token;
}

int parse_positive(const std::string& token, const std::string& context, const char* what) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size() || value <= 0) bad_pgm(context, std::string("bad ") + what);
    return value;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_pgm(context, std::string("bad ") + what);
  }
}

MaskGrid read_pgm_impl(std::istream& in, const std::string& context, bool threshold) {
  if (!in) throw Error("IoError", context + ": cannot read");
  const std::string magic = next_token(in, context);
  if (magic != "P5") bad_pgm(context, "expected magic P5, got '" + magic + "'");
  const int width = parse_positive(next_token(in, context), context, "width");
  const int height = parse_positive(next_token(in, context), context, "height");
  const int maxval = parse_positive(next_token(in, context), context, "maxval");
  if (maxval > 255) bad_pgm(context, "only 8-bit PGM supported");

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<char> raw(count);
  in.read(raw.data(), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) bad_pgm(context, "truncated pixel data");

  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto byte = static_cast<unsigned char>(raw[i]);
    values[i] = threshold ? (byte >= 128 ? 1.0 : 0.0) : static_cast<double>(byte);
  }
  return MaskGrid::from_values(width, height, std::move(values));
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  return in;
}

}  // namespace

MaskGrid read_mask_pgm(std::istream& in, const std::string& context) {
  return read_pgm_impl(in, context, /*threshold=*/true);
}

MaskGrid read_mask_pgm(const std::string& path) {
  auto in = open_input(path);
  return read_mask_pgm(in, path);
}

MaskGrid read_gray_pgm(std::istream& in, const std::string& context) {
  return read_pgm_impl(in, context, /*threshold=*/false);
}

MaskGrid read_gray_pgm(const std::string& path) {
  auto in = open_input(path);
  return read_gray_pgm(in, path);
}

void write_mask_pgm(std::ostream& out, const MaskGrid& mask) {
  if (!mask.is_binary()) throw Error("NonBinaryMask", "write_mask_pgm requires a binary mask");
  out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
  std::vector<char> raw;
  raw.reserve(mask.size());
  for (double v : mask.values()) raw.push_back(v == 1.0 ? static_cast<char>(255) : 0);
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error("IoError", "write_mask_pgm: stream failure");
}

void write_mask_pgm(const std::string& path, const MaskGrid& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot open '" + path + "' for writing");
  write_mask_pgm(out, mask);
}

MaskGrid threshold_bytes(const MaskGrid& gray) {
  if (gray.is_binary()) return gray;
  std::vector<double> values(gray.values().begin(), gray.values().end());
  for (double& v : values) v = v >= 128.0 ? 1.0 : 0.0;
  return MaskGrid::from_values(gray.width(), gray.height(), std::move(values));
}

}  // namespace affrl
