#pragma once

// CSV reading and writing for series and square matrices.
//
// Series files: a header row of channel names, then one row per time step.
// Matrix files: P rows of P comma-separated numbers, no header.

#include "series.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcgc {

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

inline double parse_real(std::string_view cell, const std::string& where, std::size_t line_no) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ParseError(where + ":" + std::to_string(line_no) + ": non-numeric cell '" + std::string(cell) + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(where + ":" + std::to_string(line_no) + ": non-finite value '" + std::string(cell) + "'");
    }
    return value;
}

inline bool blank(std::string_view line) { return trim(line).empty(); }

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return in;
}

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline MultivariateSeries read_series_csv(std::istream& in, const std::string& where = "<stream>") {
    std::string line;
    std::size_t line_no = 0;
    MultivariateSeries series;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::blank(line)) break;
    }
    if (detail::blank(line)) throw ParseError(where + ": missing header row");
    for (auto name : detail::split_commas(line)) series.channel_names.emplace_back(name);
    const std::size_t p = series.channel_names.size();

    std::vector<double> flat;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::blank(line)) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != p) {
            throw ParseError(where + ":" + std::to_string(line_no) + ": expected " + std::to_string(p) +
                             " columns, found " + std::to_string(cells.size()));
        }
        for (auto c : cells) flat.push_back(detail::parse_real(c, where, line_no));
        ++rows;
    }
    if (rows == 0) throw ParseError(where + ": empty series");
    series.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    return series;
}

inline MultivariateSeries read_series_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_series_csv(in, path.string());
}

inline Matrix read_matrix_csv(std::istream& in, const std::string& where = "<stream>") {
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> flat;
    std::size_t cols = 0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::blank(line)) continue;
        const auto cells = detail::split_commas(line);
        if (rows == 0) cols = cells.size();
        if (cells.size() != cols) {
            throw ParseError(where + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                             " columns, found " + std::to_string(cells.size()));
        }
        for (auto c : cells) flat.push_back(detail::parse_real(c, where, line_no));
        ++rows;
    }
    if (rows == 0) throw ParseError(where + ": empty matrix");
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

inline Matrix read_matrix_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_matrix_csv(in, path.string());
}

/// Reads a ground-truth adjacency file; entries must be 0 or 1.
inline AdjacencyMatrix read_adjacency_csv(const std::filesystem::path& path) {
    AdjacencyMatrix adj{read_matrix_csv(path)};
    if (adj.entries.rows() != adj.entries.cols()) throw ParseError(path.string() + ": adjacency matrix is not square");
    if (!adj.is_binary()) throw ParseError(path.string() + ": non-binary ground truth");
    return adj;
}

inline void write_series_csv(std::ostream& out, const MultivariateSeries& series) {
    for (std::size_t c = 0; c < series.channel_names.size(); ++c) {
        out << (c ? "," : "") << series.channel_names[c];
    }
    out << '\n';
    for (Eigen::Index t = 0; t < series.length(); ++t) {
        for (Eigen::Index c = 0; c < series.channels(); ++c) {
            out << (c ? "," : "") << detail::format_real(series.values(t, c));
        }
        out << '\n';
    }
}

/// Writes every entry with round-trip precision so identical matrices give
/// identical bytes.
inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (c ? "," : "") << detail::format_real(m(r, c));
        }
        out << '\n';
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_series_csv(const std::filesystem::path& path, const MultivariateSeries& series) {
    std::ostringstream os;
    write_series_csv(os, series);
    write_text_file(path, os.str());
}

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ostringstream os;
    write_matrix_csv(os, m);
    write_text_file(path, os.str());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace mcgc
