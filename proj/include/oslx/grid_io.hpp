// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "oslx/grid.hpp"

namespace oslx {

// Grid files.
//
// CSV: one value per line in one dimension; N lines of N comma-separated
// values (row i holds cells (i, 0..N-1)) in two.
//
// Binary: 16-byte header, magic "OSLX", u32 dim, u32 N, u32 reserved (0),
// then N^dim little-endian IEEE-754 doubles in row-major order.

enum class GridFormat { csv, binary };

GridFormat parse_format(std::string_view text);

/// Number formatting used by every text output: %.17g.
std::string format_number(double v);

std::string to_csv(const GridFunction& f);
std::string to_binary(const GridFunction& f);

GridFunction parse_csv(std::string_view text);
GridFunction parse_binary(std::string_view bytes);

/// Reads either format, detected by the magic.
GridFunction read_grid(const std::filesystem::path& path);
void write_grid(const std::filesystem::path& path, const GridFunction& f, GridFormat format);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace oslx
