#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "l2boost/design.hpp"
#include "l2boost/errors.hpp"

namespace l2boost::cli {

/// Malformed input file; the CLI maps this to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numeric table with a header row. Dialect: comma separated, '.' decimal
/// point, no quoting, UTF-8.
struct CsvTable {
    std::vector<std::string> header;
    Matrix data;

    Index column_index(std::string_view name) const {
        for (std::size_t k = 0; k < header.size(); ++k) {
            if (header[k] == name) return static_cast<Index>(k);
        }
        return -1;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace detail

/// Parses CSV text. Data rows are numbered from 1 (the header is not counted).
inline CsvTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    CsvTable out;
    if (!std::getline(in, line)) throw DataError("csv: empty input, header row required");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    for (auto cell : detail::split(line)) out.header.emplace_back(cell);
    for (std::size_t k = 0; k < out.header.size(); ++k) {
        if (out.header[k].empty()) throw DataError("csv: empty column name at position " + std::to_string(k + 1));
    }

    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto cells = detail::split(line);
        if (cells.size() != out.header.size()) {
            throw DataError("csv: row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(out.header.size()));
        }
        std::vector<double> values(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto cell = cells[k];
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), values[k]);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(values[k])) {
                throw DataError("csv: non-numeric value '" + std::string(cell) + "' at row " + std::to_string(row) +
                                ", column '" + out.header[k] + "'");
            }
        }
        rows.push_back(std::move(values));
    }
    out.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(out.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < rows[i].size(); ++k) out.data(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
    }
    return out;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("csv: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

/// Writes with 17 significant digits so values round-trip exactly.
inline void write_csv(const std::string& path, const std::vector<std::string>& header, const Matrix& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("csv: cannot write " + path);
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << "\n";
    char buf[32];
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index k = 0; k < data.cols(); ++k) {
            const auto res = std::to_chars(buf, buf + sizeof buf, data(i, k));
            out << (k ? "," : "") << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << "\n";
    }
}

/// Resolves "a,b,c" (exact names) or "prefix*" (every header starting with
/// prefix, minus `exclude`) to column positions.
inline std::vector<std::size_t> resolve_columns(const CsvTable& table, const std::string& selector,
                                                const std::vector<std::string>& exclude = {}) {
    std::vector<std::size_t> out;
    const std::string_view sel = detail::trim(selector);
    if (!sel.empty() && sel.back() == '*') {
        const auto prefix = sel.substr(0, sel.size() - 1);
        for (std::size_t k = 0; k < table.header.size(); ++k) {
            const auto& name = table.header[k];
            if (name.compare(0, prefix.size(), prefix) != 0) continue;
            bool skip = false;
            for (const auto& e : exclude) skip = skip || e == name;
            if (!skip) out.push_back(k);
        }
        if (out.empty()) throw DataError("no columns match prefix '" + std::string(prefix) + "'");
        return out;
    }
    for (auto name : detail::split(sel)) {
        if (name.empty()) continue;
        const Index k = table.column_index(name);
        if (k < 0) throw DataError("missing column '" + std::string(name) + "'");
        out.push_back(static_cast<std::size_t>(k));
    }
    if (out.empty()) throw DataError("empty column selection");
    return out;
}

}  // namespace l2boost::cli
