// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// PLY point-cloud I/O. Only the vertex element is loaded; x, y and z are
// required, an `intensity` property is kept when present, and every other
// property or element is skipped. Vertex order is preserved.

#pragma once

#include <filesystem>
#include <string_view>

#include "roadex/cloud.hpp"

namespace roadex {

enum class PlyFormat { ascii, binary_le };

/// Throws IoError (unreadable), ParseError (bad header, with byte offset),
/// TruncationError (fewer vertices than declared) or ValidationError
/// (non-finite coordinate, naming the vertex index).
PointCloud read_ply(const std::filesystem::path& path);

/// Parses an in-memory PLY document with the same rules as read_ply.
PointCloud parse_ply(std::string_view bytes);

void write_ply(const PointCloud& cloud, const std::filesystem::path& path,
               PlyFormat format = PlyFormat::binary_le);

}  // namespace roadex
