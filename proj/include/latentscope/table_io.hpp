#pragma once

// Loading numeric tables from CSV and NPY files.
//
// CSV: comma separated, LF or CRLF, optional single header row (a first row
// in which no cell parses as a number), decimal numbers only.
// NPY: format version 1.0, C order, 2-D, '<f8' or '<i8' only.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "latentscope/core.hpp"

namespace latentscope {

enum class TableFormat { csv, npy };

struct Table {
    Matrix values;
    std::vector<std::string> names;  ///< CSV header names, empty if absent
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        return std::nullopt;
    }
    return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("error while reading '" + path.string() + "'");
    }
    return bytes;
}

template <typename T>
T load_le(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
            std::swap(b[i], b[sizeof(T) - 1 - i]);
        }
    }
    return v;
}

/// Value of `key` in a numpy header dict, as raw text up to the next
/// top-level comma or closing brace.
inline std::optional<std::string> npy_field(std::string_view header, std::string_view key) {
    const std::string quoted = "'" + std::string(key) + "'";
    auto pos = header.find(quoted);
    if (pos == std::string_view::npos) {
        return std::nullopt;
    }
    pos = header.find(':', pos + quoted.size());
    if (pos == std::string_view::npos) {
        return std::nullopt;
    }
    ++pos;
    int depth = 0;
    std::size_t end = pos;
    for (; end < header.size(); ++end) {
        const char c = header[end];
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            --depth;
        } else if ((c == ',' || c == '}') && depth == 0) {
            break;
        }
    }
    return std::string(trim(header.substr(pos, end - pos)));
}

}  // namespace detail

inline Table parse_csv(std::string_view text, const std::string& source = "csv") {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        auto line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = nl + 1;
    }
    while (!lines.empty() && detail::trim(lines.back()).empty()) {
        lines.pop_back();
    }
    if (lines.empty()) {
        throw ValidationError(source + ": file is empty");
    }

    Table table;
    std::size_t first_data = 0;
    {
        const auto cells = detail::split_commas(lines.front());
        bool any_number = false;
        for (auto c : cells) {
            any_number = any_number || detail::parse_number(c).has_value();
        }
        if (!any_number) {
            for (auto c : cells) {
                table.names.emplace_back(detail::trim(c));
            }
            first_data = 1;
        }
    }
    if (first_data == lines.size()) {
        throw ValidationError(source + ": no data rows");
    }

    const std::size_t cols = detail::split_commas(lines[first_data]).size();
    if (!table.names.empty() && table.names.size() != cols) {
        throw ValidationError(source + ": header has " + std::to_string(table.names.size()) +
                              " names but rows have " + std::to_string(cols) + " cells");
    }
    std::vector<double> data;
    data.reserve((lines.size() - first_data) * cols);
    for (std::size_t l = first_data; l < lines.size(); ++l) {
        const auto cells = detail::split_commas(lines[l]);
        const std::string where = source + ": row " + std::to_string(l - first_data + 1) +
                                  " (line " + std::to_string(l + 1) + ")";
        if (cells.size() != cols) {
            throw ValidationError(where + " has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = detail::parse_number(cells[c]);
            if (!v) {
                throw ValidationError(where + ", column " + std::to_string(c + 1) +
                                      ": '" + std::string(detail::trim(cells[c])) +
                                      "' is not a number");
            }
            if (!std::isfinite(*v)) {
                throw ValidationError(where + ", column " + std::to_string(c + 1) +
                                      ": non-finite value '" +
                                      std::string(detail::trim(cells[c])) + "'");
            }
            data.push_back(*v);
        }
    }
    table.values = Matrix(lines.size() - first_data, cols, std::move(data));
    return table;
}

inline Table parse_npy(std::string_view bytes, const std::string& source = "npy") {
    constexpr std::string_view magic = "\x93NUMPY";
    if (bytes.size() < 10 || bytes.substr(0, magic.size()) != magic) {
        throw ValidationError(source + ": not an NPY file");
    }
    const auto major = static_cast<unsigned char>(bytes[6]);
    const auto minor = static_cast<unsigned char>(bytes[7]);
    if (major != 1 || minor != 0) {
        throw ValidationError(source + ": unsupported NPY format version " + std::to_string(major) +
                              "." + std::to_string(minor) + " (only 1.0 is supported)");
    }
    const std::size_t header_len = detail::load_le<std::uint16_t>(bytes.data() + 8);
    if (bytes.size() < 10 + header_len) {
        throw ValidationError(source + ": truncated NPY header");
    }
    const std::string_view header = bytes.substr(10, header_len);

    const auto descr = detail::npy_field(header, "descr");
    const auto fortran = detail::npy_field(header, "fortran_order");
    const auto shape = detail::npy_field(header, "shape");
    if (!descr || !fortran || !shape) {
        throw ValidationError(source + ": malformed NPY header");
    }
    bool is_float = false;
    if (*descr == "'<f8'") {
        is_float = true;
    } else if (*descr != "'<i8'") {
        throw ValidationError(source + ": unsupported dtype " + *descr +
                              " (expected '<f8' or '<i8')");
    }
    if (*fortran != "False") {
        throw ValidationError(source + ": Fortran-ordered arrays are not supported");
    }

    std::vector<std::size_t> dims;
    {
        std::string_view s = *shape;
        if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
            throw ValidationError(source + ": malformed shape " + *shape);
        }
        s = s.substr(1, s.size() - 2);
        for (auto part : detail::split_commas(s)) {
            part = detail::trim(part);
            if (part.empty()) {
                continue;
            }
            std::size_t v = 0;
            const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
            if (ec != std::errc() || ptr != part.data() + part.size()) {
                throw ValidationError(source + ": malformed shape " + *shape);
            }
            dims.push_back(v);
        }
    }
    if (dims.size() != 2) {
        throw ValidationError(source + ": expected a 2-D array, got " +
                              std::to_string(dims.size()) + " dimensions");
    }
    const std::size_t count = dims[0] * dims[1];
    const std::string_view payload = bytes.substr(10 + header_len);
    if (payload.size() != count * 8) {
        throw ValidationError(source + ": payload has " + std::to_string(payload.size()) +
                              " bytes, expected " + std::to_string(count * 8));
    }
    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        const char* p = payload.data() + i * 8;
        data[i] = is_float ? detail::load_le<double>(p)
                           : static_cast<double>(detail::load_le<std::int64_t>(p));
        if (!std::isfinite(data[i])) {
            throw ValidationError(source + ": non-finite value at row " +
                                  std::to_string(i / dims[1] + 1) + ", column " +
                                  std::to_string(i % dims[1] + 1));
        }
    }
    return {Matrix(dims[0], dims[1], std::move(data)), {}};
}

inline TableFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".npy" ? TableFormat::npy : TableFormat::csv;
}

inline Table load_table(const std::filesystem::path& path, std::optional<TableFormat> format = {}) {
    const std::string bytes = detail::read_file(path);
    const TableFormat f = format.value_or(format_from_path(path));
    return f == TableFormat::npy ? parse_npy(bytes, path.string()) : parse_csv(bytes, path.string());
}

/// Serializes a matrix as an NPY 1.0 '<f8' array.
inline std::string to_npy(const Matrix& m) {
    std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                         std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "), }";
    const std::size_t unpadded = 10 + header.size() + 1;
    header.append((64 - unpadded % 64) % 64, ' ');
    header.push_back('\n');
    std::string out = "\x93NUMPY";
    out.push_back('\x01');
    out.push_back('\x00');
    const auto len = static_cast<std::uint16_t>(header.size());
    out.push_back(static_cast<char>(len & 0xff));
    out.push_back(static_cast<char>(len >> 8));
    out += header;
    for (double v : m.data()) {
        char b[8];
        std::memcpy(b, &v, 8);
        if constexpr (std::endian::native == std::endian::big) {
            std::reverse(b, b + 8);
        }
        out.append(b, 8);
    }
    return out;
}

inline std::string to_csv(const Matrix& m, const std::vector<std::string>& names = {}) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t c = 0; c < names.size(); ++c) {
        os << (c ? "," : "") << names[c];
    }
    if (!names.empty()) {
        os << '\n';
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            os << (c ? "," : "") << m(r, c);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace latentscope
