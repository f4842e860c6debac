#include "rcar/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "rcar/errors.hpp"

namespace rcar {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& s) {
    if (s.empty()) return true;
    std::string lower;
    lower.reserve(s.size());
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(c)));
    return lower == "na" || lower == "nan" || lower == "null";
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    const auto res = std::from_chars(b, e, out);
    return res.ec == std::errc{} && res.ptr == e;
}

}  // namespace

TimeSeries read_csv_series(const CsvSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw data_error("cannot open '" + spec.path + "'");

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw data_error("'" + spec.path + "' contains no data");

    // Resolve the column: a plain integer is an index, anything else a
    // header name.
    std::size_t col = 0;
    bool by_name = false;
    {
        int idx;
        const char* b = spec.column.data();
        const char* e = b + spec.column.size();
        const auto res = std::from_chars(b, e, idx);
        if (res.ec == std::errc{} && res.ptr == e && idx >= 0)
            col = static_cast<std::size_t>(idx);
        else
            by_name = true;
    }

    std::size_t first_row = 0;
    if (by_name) {
        const auto& header = rows.front();
        auto it = std::find_if(header.begin(), header.end(),
                               [&](const std::string& h) { return trim(h) == spec.column; });
        if (it == header.end())
            throw data_error("column '" + spec.column + "' not found in header of '" +
                             spec.path + "'");
        col = static_cast<std::size_t>(it - header.begin());
        first_row = 1;
    } else {
        // Header auto-detection: skip the first row when the selected field
        // does not parse as a number.
        if (col >= rows.front().size())
            throw data_error("column index " + std::to_string(col) + " out of range");
        double probe;
        const std::string cell = trim(rows.front()[col]);
        if (!parse_double(cell, probe) && !is_missing(cell)) first_row = 1;
    }

    TimeSeries series;
    series.label = spec.column;
    for (std::size_t r = first_row; r < rows.size(); ++r) {
        if (col >= rows[r].size())
            throw data_error("row " + std::to_string(r + 1) + " of '" + spec.path +
                             "' has no column " + std::to_string(col));
        const std::string cell = trim(rows[r][col]);
        if (is_missing(cell)) {
            if (spec.drop_missing) continue;
            throw data_error("missing value at row " + std::to_string(r + 1) + " of '" +
                             spec.path + "' (use --drop-missing to skip rows)");
        }
        double value;
        if (!parse_double(cell, value))
            throw data_error("non-numeric value '" + cell + "' at row " +
                             std::to_string(r + 1) + " of '" + spec.path + "'");
        series.values.push_back(value);
    }
    if (series.values.empty())
        throw data_error("no usable observations in '" + spec.path + "'");
    return series;
}

void write_csv_series(const TimeSeries& series, const std::string& path,
                      const std::string& label) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path + "'");
    out << label << '\n';
    out.precision(17);
    for (double v : series.values) out << v << '\n';
    if (!out) throw data_error("write to '" + path + "' failed");
}

}  // namespace rcar
