#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "chanprobe/b2b_curve.hpp"
#include "chanprobe/errors.hpp"

namespace chanprobe {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace detail

inline double parse_double(std::string_view text, const std::string& where)
{
    text = detail::trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw SchemaError(where, "expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> cells;
    const std::string& operator[](std::size_t i) const { return cells[i]; }
};

/// Reads a headed CSV whose header must equal `columns`. Blank lines are skipped.
/// Locations in errors are `origin:line/column`.
inline std::vector<CsvRow> read_csv(std::istream& in, const std::vector<std::string>& columns,
                                                      const std::string& origin)
{
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split(line);
        const std::string where = origin + ":" + std::to_string(line_no);
        if (!header_seen) {
            if (cells != columns) {
                std::string want;
                for (const auto& c : columns) want += (want.empty() ? "" : ",") + c;
                throw SchemaError(where, "expected header '" + want + "'");
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != columns.size()) {
            throw SchemaError(where, "expected " + std::to_string(columns.size()) + " fields, got " +
                                         std::to_string(cells.size()));
        }
        rows.push_back({line_no, std::move(cells)});
    }
    if (!header_seen) {
        throw SchemaError(origin + ":1", "missing header");
    }
    return rows;
}

/// Back-to-back samples from CSV with header `osnr_db,q_db`.
inline std::vector<B2BSample> read_b2b_csv(std::istream& in, const std::string& origin = "b2b")
{
    std::vector<B2BSample> out;
    const auto rows = read_csv(in, {"osnr_db", "q_db"}, origin);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string where = origin + ":" + std::to_string(rows[i].line);
        out.push_back({parse_double(rows[i][0], where + "/osnr_db"), parse_double(rows[i][1], where + "/q_db")});
    }
    return out;
}

} // namespace chanprobe
