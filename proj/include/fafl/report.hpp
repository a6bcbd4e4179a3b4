#pragma once

// Table rendering of Monte Carlo reports: rows MSE / bias / std / coverage,
// one column per estimator (and per coefficient when K > 1).

#include <cstdio>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fafl/json_io.hpp"
#include "fafl/montecarlo.hpp"

namespace fafl {

enum class TableFormat { ascii, csv, json };

inline TableFormat parse_table_format(std::string_view name) {
    if (name == "ascii") return TableFormat::ascii;
    if (name == "csv") return TableFormat::csv;
    if (name == "json") return TableFormat::json;
    throw InvalidArgument("unknown table format '" + std::string(name) + "'");
}

inline const std::vector<std::string>& table_rows() {
    static const std::vector<std::string> rows{"MSE", "bias", "std", "coverage"};
    return rows;
}

/// Column-oriented view of a rendered table; empty cells are rendered blank.
struct TableData {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> cells;  // [row][column]
};

inline TableData tabulate(const MonteCarloReport& report) {
    TableData t;
    t.cells.assign(table_rows().size(), {});
    const Index k = report.config.dgp.k();
    for (const auto& s : report.estimators) {
        for (Index j = 0; j < k; ++j) {
            std::string name(to_string(s.kind));
            if (k > 1) name += ".b" + std::to_string(j + 1);
            t.columns.push_back(name);
            t.cells[0].push_back(s.count ? std::optional<double>(s.mse(j)) : std::nullopt);
            t.cells[1].push_back(s.count ? std::optional<double>(s.bias(j)) : std::nullopt);
            t.cells[2].push_back(s.std_defined ? std::optional<double>(s.std(j)) : std::nullopt);
            t.cells[3].push_back(s.coverage ? std::optional<double>((*s.coverage)(j)) : std::nullopt);
        }
    }
    return t;
}

namespace detail {

inline std::string format_number(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace detail

inline std::string render_table(const MonteCarloReport& report, TableFormat format) {
    if (format == TableFormat::json) return to_json(report).dump(2) + "\n";

    const TableData t = tabulate(report);
    std::ostringstream out;
    if (format == TableFormat::csv) {
        out << "metric";
        for (const auto& c : t.columns) out << ',' << c;
        out << '\n';
        if (t.columns.empty()) return out.str();
        for (std::size_t r = 0; r < table_rows().size(); ++r) {
            out << table_rows()[r];
            for (const auto& cell : t.cells[r]) {
                out << ',';
                if (cell) out << detail::format_number(*cell, 17);
            }
            out << '\n';
        }
        return out.str();
    }

    constexpr int width = 14;
    out << std::left << std::setw(10) << "" << std::right;
    for (const auto& c : t.columns) out << std::setw(width) << c;
    out << '\n';
    if (t.columns.empty()) return out.str();
    for (std::size_t r = 0; r < table_rows().size(); ++r) {
        out << std::left << std::setw(10) << table_rows()[r] << std::right;
        for (const auto& cell : t.cells[r]) out << std::setw(width) << (cell ? detail::format_number(*cell, 6) : "");
        out << '\n';
    }
    return out.str();
}

/// Inverse of the csv rendering.
inline TableData parse_table_csv(std::string_view text) {
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    };
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw ParseError("table csv: empty input");
    auto header = split(line);
    if (header.empty() || header[0] != "metric") throw ParseError("table csv: missing metric header");
    TableData t;
    t.columns.assign(header.begin() + 1, header.end());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != header.size()) throw ParseError("table csv: ragged row '" + fields[0] + "'");
        std::vector<std::optional<double>> row;
        for (std::size_t i = 1; i < fields.size(); ++i)
            row.push_back(fields[i].empty() ? std::nullopt : std::optional<double>(std::stod(fields[i])));
        t.cells.push_back(std::move(row));
    }
    return t;
}

}  // namespace fafl
