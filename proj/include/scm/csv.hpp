#pragma once

#include <string>
#include <vector>

namespace scm {

// A fully materialized CSV table: header plus string cells. Cells are written
// bare (no quoting); producing a cell that would need quoting is an error,
// which keeps the format trivially diff-able and re-parseable.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// %.17g — doubles survive a write/parse round trip bit-exactly.
std::string format_double(double v);
std::string format_long(long v);

std::string csv_to_string(const CsvTable& table);

// Strict reader for the tool's own output: nonempty header, every row with
// the same arity, no quoting. Throws ConfigError on malformed input.
CsvTable parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace scm
