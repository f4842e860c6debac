#pragma once

#include <string>

#include "rcar/dgp.hpp"

namespace rcar {

// How to pull one numeric column out of a CSV file. The column may be given
// by 0-based index or by header name (a name requires a header row; with an
// index the header is auto-detected). Dates or any other columns are ignored
// for computation; row order defines t = 1..T.
struct CsvSpec {
    std::string path;
    std::string column = "0";     // index or name
    bool drop_missing = false;    // otherwise missing values are a data error
};

// Reads the selected column; throws data_error on unreadable files,
// non-numeric cells or empty selections.
TimeSeries read_csv_series(const CsvSpec& spec);

// Writes a one-column CSV with header `label` (t index omitted).
void write_csv_series(const TimeSeries& series, const std::string& path,
                      const std::string& label = "value");

}  // namespace rcar
