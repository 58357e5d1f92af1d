#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "affrl/error.hpp"

namespace affrl {

/// Pluggable word-embedding table used by the recognition reward. Labels
/// are embedded as the mean of their underscore-separated token vectors.
///
/// File format: first line is the dimension, then one `token v1 ... vd`
/// line per entry (space-separated decimals).
class EmbeddingLexicon {
 public:
  explicit EmbeddingLexicon(std::size_t dimension);

  static EmbeddingLexicon load(const std::string& path);
  static EmbeddingLexicon load(std::istream& in, const std::string& context);
  void save(const std::string& path) const;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& token) const { return entries_.count(token) != 0; }

  /// Rejects dimension mismatches, zero-norm vectors and duplicates.
  void add(const std::string& token, std::vector<double> vector);

  std::span<const double> vector(const std::string& token) const;

  /// Mean of the label's token vectors; throws UnknownToken when a token is
  /// absent or the label has no tokens.
  std::vector<double> embed_label(const std::string& label) const;

 private:
  std::size_t dimension_;
  std::map<std::string, std::vector<double>> entries_;
};

/// Cosine of the angle between two equal-length vectors.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Underscore-split into non-empty tokens ("pick_up" -> {"pick", "up"}).
std::vector<std::string> label_tokens(const std::string& label);

}  // namespace affrl
