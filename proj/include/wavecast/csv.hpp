#pragma once

#include <optional>
#include <string>
#include <vector>

namespace wavecast::csv {

// Round-trip safe formatting for doubles (shortest form recovering the bits).
std::string format_double(double v);

std::vector<std::string> split_line(const std::string& line, char sep = ',');

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_file(const std::string& path, char sep = ',');
void write_file(const std::string& path, const Table& table, char sep = ',');

// Empty cell <-> missing value.
std::optional<double> parse_optional(const std::string& cell);
std::string format_optional(const std::optional<double>& v);

}  // namespace wavecast::csv
