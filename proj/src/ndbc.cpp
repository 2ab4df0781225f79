#include "wavecast/ndbc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "wavecast/csv.hpp"

#ifndef WAVECAST_NO_NETWORK
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#endif

namespace wavecast::ndbc {

namespace {

// Sentinel codes per NDBC documentation. 9999.0 marks missing anywhere.
bool is_sentinel(int feature, double value) {
    if (value == 9999.0) {
        return true;
    }
    switch (feature) {
        case 1:  // WSPD
        case 2:  // GST
        case 3:  // WVHT
        case 4:  // DPD
        case 5:  // APD
            return value == 99.0;
        case 0:  // WDIR
        case 6:  // MWD
        case 7:  // PRES
        case 8:  // ATMP
        case 9:  // WTMP
        case 10: // DEWP
            return value == 999.0;
        default:
            return false;
    }
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        out.push_back(tok);
    }
    return out;
}

double parse_number(const std::string& tok, std::size_t line_no) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
        throw std::runtime_error("parse_stdmet: unparsable number '" + tok + "' at line " +
                                 std::to_string(line_no));
    }
    return v;
}

std::mutex g_cache_mutex;

}  // namespace

void StationMeta::validate() const {
    if (latitude < -90.0 || latitude > 90.0) {
        throw std::invalid_argument("StationMeta: latitude out of [-90, 90]");
    }
    if (longitude < -180.0 || longitude > 180.0) {
        throw std::invalid_argument("StationMeta: longitude out of [-180, 180]");
    }
    if (!(water_depth > 0.0)) {
        throw std::invalid_argument("StationMeta: water depth must be positive");
    }
}

int feature_index(const std::string& name) {
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
        if (name == kFeatureNames[i]) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

const std::vector<std::optional<double>>& TimeSeriesTable::column(const std::string& name) const {
    const int idx = feature_index(name);
    if (idx < 0) {
        throw std::invalid_argument("TimeSeriesTable: unknown feature '" + name + "'");
    }
    return columns[static_cast<std::size_t>(idx)];
}

void TimeSeriesTable::validate() const {
    for (const auto& col : columns) {
        if (col.size() != timestamps.size()) {
            throw std::runtime_error("TimeSeriesTable: column length mismatch");
        }
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (timestamps[i] <= timestamps[i - 1]) {
            throw std::runtime_error("TimeSeriesTable: timestamps not strictly increasing");
        }
    }
}

TimeSeriesTable parse_stdmet(const std::string& raw_text) {
    std::istringstream in(raw_text);
    std::string line;
    std::size_t line_no = 0;

    // First header line names the columns; the second carries units.
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        if (line[0] != '#') {
            break;
        }
        if (header.empty()) {
            std::string stripped = line.substr(1);
            header = split_ws(stripped);
        }
    }
    if (header.empty()) {
        throw std::runtime_error("parse_stdmet: missing '#' header line");
    }
    if (header.size() < 5) {
        throw std::runtime_error("parse_stdmet: header has fewer than 5 time columns");
    }

    // Map measurement columns (beyond YY MM DD hh mm) onto the 11 features.
    std::vector<int> feature_of_column(header.size(), -1);
    for (std::size_t c = 5; c < header.size(); ++c) {
        feature_of_column[c] = feature_index(header[c]);
    }

    struct RawRecord {
        Timestamp ts;
        std::array<std::optional<double>, 11> values;
    };
    std::vector<RawRecord> records;

    auto consume_row = [&](const std::string& row_line, std::size_t row_no) {
        const auto toks = split_ws(row_line);
        if (toks.empty()) {
            return;
        }
        if (toks.size() != header.size()) {
            throw std::runtime_error("parse_stdmet: wrong column count at line " +
                                     std::to_string(row_no) + " (got " +
                                     std::to_string(toks.size()) + ", header has " +
                                     std::to_string(header.size()) + ")");
        }
        const int year = static_cast<int>(parse_number(toks[0], row_no));
        const int month = static_cast<int>(parse_number(toks[1], row_no));
        const int day = static_cast<int>(parse_number(toks[2], row_no));
        const int hour = static_cast<int>(parse_number(toks[3], row_no));
        const int minute = static_cast<int>(parse_number(toks[4], row_no));
        RawRecord rec;
        rec.ts = make_timestamp(year < 100 ? year + 1900 : year, month, day, hour, minute);
        for (std::size_t c = 5; c < toks.size(); ++c) {
            const int f = feature_of_column[c];
            if (f < 0) {
                continue;  // e.g. VIS, TIDE
            }
            const double v = parse_number(toks[c], row_no);
            if (!is_sentinel(f, v)) {
                rec.values[static_cast<std::size_t>(f)] = v;
            }
        }
        if (!records.empty() && rec.ts <= records.back().ts) {
            throw std::runtime_error("parse_stdmet: non-monotone timestamp at line " +
                                     std::to_string(row_no));
        }
        records.push_back(std::move(rec));
    };

    // `line` currently holds the first data row (if any body exists).
    if (!line.empty() && line[0] != '#') {
        consume_row(line, line_no);
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        consume_row(line, line_no);
    }

    // Collapse sub-hourly records: round to the nearest hour mark and keep the
    // record closest to it (earlier record wins ties).
    std::map<Timestamp, std::pair<std::int64_t, std::size_t>> best;  // hour -> (dist, index)
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Timestamp ts = records[i].ts;
        const Timestamp hour_mark =
            ((ts + kSecondsPerHour / 2) / kSecondsPerHour) * kSecondsPerHour;
        const std::int64_t dist = std::llabs(ts - hour_mark);
        auto it = best.find(hour_mark);
        if (it == best.end() || dist < it->second.first) {
            best[hour_mark] = {dist, i};
        }
    }

    TimeSeriesTable table;
    table.timestamps.reserve(best.size());
    for (auto& col : table.columns) {
        col.reserve(best.size());
    }
    for (const auto& [hour_mark, pick] : best) {
        table.timestamps.push_back(hour_mark);
        const RawRecord& rec = records[pick.second];
        for (std::size_t f = 0; f < 11; ++f) {
            table.columns[f].push_back(rec.values[f]);
        }
    }
    table.validate();
    return table;
}

std::string cache_path_for(const std::string& data_dir, const std::string& station_id, int year) {
    return data_dir + "/" + station_id + "/" + station_id + "h" + std::to_string(year) + ".txt";
}

std::string fetch_station_year(const std::string& station_id, int year, const FetchOptions& opts) {
    const int current_year = [] {
        int y, m, d;
        civil_from_days(static_cast<std::int64_t>(std::time(nullptr)) / 86400, y, m, d);
        return y;
    }();
    if (year < 1970 || year > current_year) {
        throw std::invalid_argument("fetch_station_year: year " + std::to_string(year) +
                                    " outside [1970, " + std::to_string(current_year) + "]");
    }

    const std::string cache_path = cache_path_for(opts.data_dir, station_id, year);
    {
        std::ifstream cached(cache_path, std::ios::binary);
        if (cached) {
            std::ostringstream body;
            body << cached.rdbuf();
            return body.str();
        }
    }

#ifdef WAVECAST_NO_NETWORK
    throw std::runtime_error("fetch_station_year: '" + cache_path +
                             "' not cached and network support is compiled out");
#else
    if (!opts.allow_network) {
        throw std::runtime_error("fetch_station_year: '" + cache_path +
                                 "' not cached and network access is disabled");
    }

    std::string url = opts.endpoint;
    auto substitute = [&url](const std::string& key, const std::string& value) {
        for (std::size_t pos = url.find(key); pos != std::string::npos; pos = url.find(key)) {
            url.replace(pos, key.size(), value);
        }
    };
    substitute("{station}", station_id);
    substitute("{year}", std::to_string(year));

    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("fetch_station_year: endpoint lacks a scheme: " + url);
    }
    const auto host_start = scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(20);
    client.set_read_timeout(60);
    auto res = client.Get(path);
    if (!res) {
        throw std::runtime_error("fetch_station_year: request to " + origin +
                                 " failed (retryable): " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw std::runtime_error("fetch_station_year: HTTP " + std::to_string(res->status) +
                                 " from " + url + " (retryable)");
    }

    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        std::filesystem::create_directories(opts.data_dir + "/" + station_id);
        const std::string tmp = cache_path + ".tmp";
        std::ofstream out(tmp, std::ios::binary);
        out << res->body;
        out.close();
        if (!out) {
            throw std::runtime_error("fetch_station_year: cache write failed for " + cache_path);
        }
        std::filesystem::rename(tmp, cache_path);
    }
    return res->body;
#endif
}

TimeSeriesTable concat_years(const std::vector<TimeSeriesTable>& tables) {
    std::vector<const TimeSeriesTable*> nonempty;
    for (const auto& t : tables) {
        if (t.rows() > 0) {
            nonempty.push_back(&t);
        }
    }
    std::sort(nonempty.begin(), nonempty.end(),
              [](const TimeSeriesTable* a, const TimeSeriesTable* b) {
                  return a->timestamps.front() < b->timestamps.front();
              });
    for (std::size_t i = 1; i < nonempty.size(); ++i) {
        if (nonempty[i]->timestamps.front() <= nonempty[i - 1]->timestamps.back()) {
            throw std::invalid_argument("concat_years: overlapping timestamp ranges");
        }
    }
    TimeSeriesTable out;
    for (const TimeSeriesTable* t : nonempty) {
        out.timestamps.insert(out.timestamps.end(), t->timestamps.begin(), t->timestamps.end());
        for (std::size_t f = 0; f < 11; ++f) {
            out.columns[f].insert(out.columns[f].end(), t->columns[f].begin(),
                                  t->columns[f].end());
        }
    }
    out.validate();
    return out;
}

void write_canonical_csv(const TimeSeriesTable& table, const std::string& path) {
    csv::Table t;
    t.header.push_back("timestamp");
    for (const char* name : kFeatureNames) {
        t.header.push_back(name);
    }
    t.rows.reserve(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
        std::vector<std::string> row;
        row.reserve(12);
        row.push_back(format_iso8601(table.timestamps[r]));
        for (std::size_t f = 0; f < 11; ++f) {
            row.push_back(csv::format_optional(table.columns[f][r]));
        }
        t.rows.push_back(std::move(row));
    }
    csv::write_file(path, t);
}

TimeSeriesTable read_canonical_csv(const std::string& path) {
    const csv::Table t = csv::read_file(path);
    if (t.header.size() != 12 || t.header[0] != "timestamp") {
        throw std::runtime_error("read_canonical_csv: unexpected header in " + path);
    }
    for (std::size_t f = 0; f < 11; ++f) {
        if (t.header[f + 1] != kFeatureNames[f]) {
            throw std::runtime_error("read_canonical_csv: column " + std::to_string(f + 1) +
                                     " is '" + t.header[f + 1] + "', expected '" +
                                     kFeatureNames[f] + "'");
        }
    }
    TimeSeriesTable table;
    for (const auto& row : t.rows) {
        if (row.size() != 12) {
            throw std::runtime_error("read_canonical_csv: bad row width in " + path);
        }
        table.timestamps.push_back(parse_iso8601(row[0]));
        for (std::size_t f = 0; f < 11; ++f) {
            table.columns[f].push_back(csv::parse_optional(row[f + 1]));
        }
    }
    table.validate();
    return table;
}

}  // namespace wavecast::ndbc
