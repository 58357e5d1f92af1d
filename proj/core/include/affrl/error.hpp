#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>
#include <string>
#include <utility>

namespace affrl {

/// Domain error with a stable machine-readable name ("EmptyMask",
/// "DimensionMismatch", ...). The CLI maps any affrl::Error to exit code 1
/// and prints the name on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace affrl
