#include "wavecast/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavecast::csv {

std::string format_double(double v) {
    char buf[40];
    // Shortest representation that parses back to the same double.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            return buf;
        }
    }
    return buf;
}

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

Table read_file(const std::string& path, char sep) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("csv: cannot open '" + path + "'");
    }
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) {
            break;
        }
        auto cells = split_line(line, sep);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

void write_file(const std::string& path, const Table& table, char sep) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("csv: cannot write '" + path + "'");
    }
    auto write_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out << sep;
            }
            out << cells[i];
        }
        out << '\n';
    };
    write_row(table.header);
    for (const auto& row : table.rows) {
        write_row(row);
    }
    if (!out) {
        throw std::runtime_error("csv: write failed for '" + path + "'");
    }
}

std::optional<double> parse_optional(const std::string& cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) {
        throw std::runtime_error("csv: unparsable number '" + cell + "'");
    }
    return v;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace wavecast::csv
