#pragma once

// Copyright 2026 The affrl Authors
// SPDX-License-Identifier: Apache-2.0

#include <iosfwd>
#include <string>

#include "affrl/geometry.hpp"

namespace affrl {

// Masks travel as binary PGM ("P5", 8-bit, maxval 255): foreground 255,
// background 0. Reads threshold at byte >= 128.

/// Read a PGM as a binary mask (values {0,1} after thresholding).
MaskGrid read_mask_pgm(const std::string& path);
MaskGrid read_mask_pgm(std::istream& in, const std::string& context);

/// Read a PGM keeping raw byte intensities as doubles in [0, 255].
/// Saliency-style metrics accept these real-valued grids directly.
MaskGrid read_gray_pgm(const std::string& path);
MaskGrid read_gray_pgm(std::istream& in, const std::string& context);

/// Write a binary mask (throws NonBinaryMask otherwise).
void write_mask_pgm(const std::string& path, const MaskGrid& mask);
void write_mask_pgm(std::ostream& out, const MaskGrid& mask);

/// Threshold a byte-valued grid at >= 128 into a {0,1} mask. Grids that are
/// already binary pass through unchanged.
MaskGrid threshold_bytes(const MaskGrid& gray);

}  // namespace affrl
