// SPDX-License-Identifier: Apache-2.0
#include "oslx/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "oslx/error.hpp"

namespace oslx {

static_assert(std::endian::native == std::endian::little, "binary grid I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'O', 'S', 'L', 'X'};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_fail(std::size_t line, std::size_t column, const std::string& what) {
    throw Error(ErrorCode::parse, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

}  // namespace

GridFormat parse_format(std::string_view text) {
    if (text == "csv") return GridFormat::csv;
    if (text == "bin" || text == "binary") return GridFormat::binary;
    throw Error(ErrorCode::validation, "unknown grid format '" + std::string(text) + "'");
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const GridFunction& f) {
    std::string out;
    const int n = f.resolution();
    if (f.dim() == 1) {
        for (double v : f.values()) {
            out += format_number(v);
            out += '\n';
        }
        return out;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j) out += ',';
            out += format_number(f.at({i, j}));
        }
        out += '\n';
    }
    return out;
}

std::string to_binary(const GridFunction& f) {
    std::string out(16 + 8 * f.size(), '\0');
    const std::uint32_t header[3] = {static_cast<std::uint32_t>(f.dim()), static_cast<std::uint32_t>(f.resolution()), 0};
    std::memcpy(out.data(), kMagic, 4);
    std::memcpy(out.data() + 4, header, sizeof header);
    std::memcpy(out.data() + 16, f.values().data(), 8 * f.size());
    return out;
}

GridFunction parse_csv(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t blank_tail = 0;
    while (!text.empty()) {
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (trim(line).empty()) {
            ++blank_tail;
            continue;
        }
        if (blank_tail) parse_fail(line_no - 1, 1, "blank line inside grid");
        std::vector<double> row;
        std::size_t column = 1;
        std::string_view rest = line;
        while (true) {
            const std::size_t comma = rest.find(',');
            const std::string_view field = trim(rest.substr(0, comma));
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
                parse_fail(line_no, column, "expected a number, got '" + std::string(field) + "'");
            }
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            column += comma + 1;
            rest = rest.substr(comma + 1);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::parse, "empty grid file");

    const bool one_dim = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.size() == 1; });
    if (one_dim) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[0]);
        const int n = static_cast<int>(v.size());
        return GridFunction(1, n, std::move(v));
    }
    const std::size_t n = rows.size();
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            parse_fail(i + 1, 1, "expected " + std::to_string(n) + " values in row, got " + std::to_string(rows[i].size()));
        }
        v.insert(v.end(), rows[i].begin(), rows[i].end());
    }
    return GridFunction(2, static_cast<int>(n), std::move(v));
}

GridFunction parse_binary(std::string_view bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw Error(ErrorCode::parse, "offset 0: missing OSLX header");
    }
    std::uint32_t header[3];
    std::memcpy(header, bytes.data() + 4, sizeof header);
    const std::uint32_t dim = header[0];
    const std::uint32_t n = header[1];
    if (dim != 1 && dim != 2) throw Error(ErrorCode::parse, "offset 4: bad dimension " + std::to_string(dim));
    const std::uint64_t count = dim == 1 ? n : static_cast<std::uint64_t>(n) * n;
    if (bytes.size() != 16 + 8 * count) {
        throw Error(ErrorCode::parse, "offset 16: expected " + std::to_string(8 * count) + " payload bytes, got " +
                                          std::to_string(bytes.size() - 16));
    }
    std::vector<double> v(count);
    std::memcpy(v.data(), bytes.data() + 16, 8 * count);
    return GridFunction(static_cast<int>(dim), static_cast<int>(n), std::move(v));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::parse, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::validation, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

GridFunction read_grid(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return parse_binary(bytes);
    return parse_csv(bytes);
}

void write_grid(const std::filesystem::path& path, const GridFunction& f, GridFormat format) {
    write_file(path, format == GridFormat::csv ? to_csv(f) : to_binary(f));
}

}  // namespace oslx
