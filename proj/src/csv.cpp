#include "scm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "scm/errors.hpp"

namespace scm {

namespace {

void check_cell(const std::string& cell) {
    if (cell.empty()) throw ConfigError("CSV cell must be nonempty");
    if (cell.find_first_of(",\"\n\r") != std::string::npos)
        throw ConfigError("CSV cell '" + cell + "' would need quoting");
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(comma == std::string::npos ? line.substr(pos)
                                                 : line.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_long(long v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%ld", v);
    return buf;
}

std::string csv_to_string(const CsvTable& table) {
    if (table.header.empty()) throw ConfigError("CSV header must be nonempty");
    std::ostringstream os;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        check_cell(table.header[i]);
        os << (i ? "," : "") << table.header[i];
    }
    os << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw ConfigError("CSV row arity does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            check_cell(row[i]);
            os << (i ? "," : "") << row[i];
        }
        os << "\n";
    }
    return os.str();
}

CsvTable parse_csv(const std::string& text) {
    if (text.empty()) throw ConfigError("CSV input is empty");
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) throw ConfigError("CSV contains an empty line");
        if (line.find('"') != std::string::npos)
            throw ConfigError("quoted CSV cells are not supported");
        std::vector<std::string> cells = split_line(line);
        for (const std::string& c : cells)
            if (c.empty()) throw ConfigError("CSV contains an empty cell");
        if (table.header.empty()) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size())
                throw ConfigError("CSV row arity does not match the header");
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty()) throw ConfigError("CSV input has no header row");
    return table;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) {
        out.close();
        std::remove(path.c_str());
        throw std::runtime_error("failed while writing '" + path + "'");
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace scm
