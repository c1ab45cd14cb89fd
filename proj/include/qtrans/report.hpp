#pragma once

// CSV and JSON serialization of sweep results.

#include "qtrans/config.hpp"
#include "qtrans/sweep.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qtrans {

struct EmitOptions {
    Format format = Format::Csv;
    bool record_timing = false; // wall time and worker count break byte determinism
};

/// Column names of the CSV/JSON rows for a grid.
std::vector<std::string> result_columns(const SweepGrid& grid);

void write_csv(const SweepResult& res, std::ostream& os);
void write_json(const SweepResult& res, std::ostream& os, bool record_timing);

/// path "-" writes to stdout. Throws IoError naming the path.
void emit_result(const SweepResult& res, const std::string& path, const EmitOptions& opt);

struct JsonRow {
    std::vector<double> values; // in result_columns order, without the valid flag
    bool valid = true;
};

/// Rows of a file written by write_json.
std::vector<JsonRow> read_json_rows(const std::string& path);

/// Writes to path ("-" for stdout) through a callback; IoError names the path.
void with_output(const std::string& path, const std::function<void(std::ostream&)>& body);

} // namespace qtrans
