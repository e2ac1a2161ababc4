// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

// Text encodings of layer dumps (one format for File_SW, File_Design and File_HW) and of
// input tensors.
//
//   blobdump version 1
//   stage <sw|design|hw>
//   image <id>
//   layer <name> <count>
//   <count> values, eight per line
//   ...
//   prediction <class-index>

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "coverify/engines.hpp"
#include "coverify/tensor.hpp"

namespace coverify {

void write_blob_dump(const BlobDump& dump, std::ostream& out);
std::string format_blob_dump(const BlobDump& dump);

/// Throws ParseError for malformed input, including unknown stages and per-layer count mismatches.
BlobDump read_blob_dump(std::istream& in);
BlobDump parse_blob_dump(std::string_view text);

/// `tensor <C> <H> <W>` followed by C*H*W values.
void write_tensor(const Tensor& t, std::ostream& out);
Tensor read_tensor(std::istream& in);

/// 8-bit grayscale raster (row-major, height*width bytes) normalized by 1/255 into a 1×H×W tensor.
Tensor import_gray8(std::span<const std::uint8_t> pixels, std::size_t height, std::size_t width);

}  // namespace coverify
