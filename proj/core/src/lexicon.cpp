// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "affrl/lexicon.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace affrl {

EmbeddingLexicon::EmbeddingLexicon(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error("LexiconFormat", "dimension must be positive");
}

EmbeddingLexicon EmbeddingLexicon::load(std::istream& in, const std::string& context) {
  std::string line;
  if (!std::getline(in, line)) throw Error("LexiconFormat", context + ": empty file");
  std::size_t dimension = 0;
  try {
    dimension = std::stoul(line);
  } catch (...) {
    throw Error("LexiconFormat", context + ": first line must be the dimension");
  }
  EmbeddingLexicon lexicon(dimension);
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    std::vector<double> vector;
    vector.reserve(dimension);
    double value = 0.0;
    while (fields >> value) vector.push_back(value);
    try {
      lexicon.add(token, std::move(vector));
    } catch (const Error& e) {
      throw Error("LexiconFormat",
                  context + ": line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return lexicon;
}

EmbeddingLexicon EmbeddingLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("IoError", "cannot open '" + path + "'");
  return load(in, path);
}

void EmbeddingLexicon::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("IoError", "cannot open '" + path + "' for writing");
  out << dimension_ << "\n";
  out.precision(17);
  for (const auto& [token, vector] : entries_) {
    out << token;
    for (double v : vector) out << " " << v;
    out << "\n";
  }
  if (!out) throw Error("IoError", "write failure on '" + path + "'");
}

void EmbeddingLexicon::add(const std::string& token, std::vector<double> vector) {
  if (token.empty()) throw Error("LexiconFormat", "empty token");
  if (vector.size() != dimension_)
    throw Error("LexiconFormat", "token '" + token + "' has " + std::to_string(vector.size()) +
                                     " values, expected " + std::to_string(dimension_));
  double norm_sq = 0.0;
  for (double v : vector) norm_sq += v * v;
  if (norm_sq == 0.0) throw Error("LexiconFormat", "token '" + token + "' has zero norm");
  if (!entries_.emplace(token, std::move(vector)).second)
    throw Error("LexiconFormat", "duplicate token '" + token + "'");
}

std::span<const double> EmbeddingLexicon::vector(const std::string& token) const {
  const auto it = entries_.find(token);
  if (it == entries_.end()) throw Error("UnknownToken", "token '" + token + "' not in lexicon");
  return it->second;
}

std::vector<double> EmbeddingLexicon::embed_label(const std::string& label) const {
  const std::vector<std::string> tokens = label_tokens(label);
  if (tokens.empty()) throw Error("UnknownToken", "label '" + label + "' has no tokens");
  std::vector<double> mean(dimension_, 0.0);
  for (const std::string& token : tokens) {
    const auto vec = vector(token);
    for (std::size_t i = 0; i < dimension_; ++i) mean[i] += vec[i];
  }
  for (double& v : mean) v /= static_cast<double>(tokens.size());
  return mean;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("DimensionMismatch", "cosine of unequal-length vectors");
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0)
    throw Error("ZeroVector", "cosine undefined for zero vectors");
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

std::vector<std::string> label_tokens(const std::string& label) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : label) {
    if (c == '_') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace affrl
