#pragma once

// Long-format panel CSV: header `unit,time,y,x1,...,xK`, one row per (unit, time).
// Units keep their first-appearance order; times are sorted (numerically when
// every label is a number).

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fafl/projectors.hpp"

namespace fafl {

struct PanelCsv {
    PanelData data;
    std::vector<std::string> units;
    std::vector<std::string> times;
    std::vector<std::string> regressor_names;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
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
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

inline PanelCsv read_panel_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!line.empty()) {
            header = detail::split_csv_line(line);
            break;
        }
    }
    if (header.size() < 4 || header[0] != "unit" || header[1] != "time" || header[2] != "y")
        throw ParseError("line " + std::to_string(line_no) + ": header must be unit,time,y,x1,...,xK");
    const std::size_t k = header.size() - 3;

    struct Row {
        std::size_t unit;
        std::string time;
        std::vector<double> values;  // y, x1..xK
        std::size_t line;
    };
    std::vector<std::string> units;
    std::unordered_map<std::string, std::size_t> unit_index;
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        if (fields[0].empty() || fields[1].empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty unit or time label");
        Row row{0, fields[1], std::vector<double>(k + 1), line_no};
        for (std::size_t c = 0; c <= k; ++c) {
            double v = 0.0;
            if (!detail::parse_double(fields[c + 2], v) || !std::isfinite(v))
                throw ParseError("line " + std::to_string(line_no) + ": column '" + header[c + 2] +
                                 "' is not a finite number: '" + fields[c + 2] + "'");
            row.values[c] = v;
        }
        auto [it, inserted] = unit_index.try_emplace(fields[0], units.size());
        if (inserted) units.push_back(fields[0]);
        row.unit = it->second;
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no data rows");

    std::vector<std::string> times;
    {
        std::vector<std::string> seen;
        std::unordered_map<std::string, bool> known;
        for (const auto& r : rows)
            if (known.try_emplace(r.time, true).second) seen.push_back(r.time);
        bool numeric = true;
        std::map<std::string, double> as_number;
        for (const auto& s : seen) {
            double v = 0.0;
            if (!detail::parse_double(s, v)) {
                numeric = false;
                break;
            }
            as_number[s] = v;
        }
        times = seen;
        if (numeric) {
            std::stable_sort(times.begin(), times.end(),
                             [&](const std::string& a, const std::string& b) { return as_number[a] < as_number[b]; });
        } else {
            std::sort(times.begin(), times.end());
        }
    }
    std::unordered_map<std::string, std::size_t> time_index;
    for (std::size_t i = 0; i < times.size(); ++i) time_index[times[i]] = i;

    const auto n = static_cast<Index>(units.size());
    const auto t = static_cast<Index>(times.size());
    Mat y(n, t);
    std::vector<Mat> x(k, Mat(n, t));
    std::vector<std::size_t> filled(static_cast<std::size_t>(n * t), 0);
    for (const auto& r : rows) {
        const auto i = static_cast<Index>(r.unit);
        const auto j = static_cast<Index>(time_index.at(r.time));
        auto& slot = filled[static_cast<std::size_t>(i * t + j)];
        if (slot != 0)
            throw ParseError("line " + std::to_string(r.line) + ": duplicate observation for unit '" + units[r.unit] +
                             "' at time '" + r.time + "' (first seen on line " + std::to_string(slot) + ")");
        slot = r.line;
        y(i, j) = r.values[0];
        for (std::size_t c = 0; c < k; ++c) x[c](i, j) = r.values[c + 1];
    }
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < t; ++j)
            if (filled[static_cast<std::size_t>(i * t + j)] == 0)
                throw ParseError("unbalanced panel: missing observation for unit '" + units[static_cast<std::size_t>(i)] +
                                 "' at time '" + times[static_cast<std::size_t>(j)] + "'");

    return PanelCsv{PanelData(std::move(y), std::move(x)), std::move(units), std::move(times),
                    std::vector<std::string>(header.begin() + 3, header.end())};
}

/// Writes unit-major rows. Labels default to 1..N and 1..T; numbers use 17
/// significant digits so that reading back is exact.
inline void write_panel_csv(std::ostream& out, const PanelData& data, const std::vector<std::string>& units = {},
                            const std::vector<std::string>& times = {}) {
    auto label = [](const std::vector<std::string>& names, Index i) {
        return names.empty() ? std::to_string(i + 1) : names.at(static_cast<std::size_t>(i));
    };
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "unit,time,y";
    for (Index k = 0; k < data.k(); ++k) out << ",x" << (k + 1);
    out << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < data.t(); ++j) {
            out << label(units, i) << ',' << label(times, j) << ',' << num(data.y()(i, j));
            for (const auto& xk : data.regressors()) out << ',' << num(xk(i, j));
            out << '\n';
        }
    }
}

}  // namespace fafl
