#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wavecast/time_utils.hpp"

namespace wavecast::ndbc {

struct StationMeta {
    std::string station_id;
    double latitude = 0.0;    // degrees, [-90, 90]
    double longitude = 0.0;   // degrees, [-180, 180]
    double water_depth = 0.0; // meters, > 0

    void validate() const;
};

// The 11 standard-meteorological features, in canonical column order.
inline constexpr std::array<const char*, 11> kFeatureNames = {
    "WDIR", "WSPD", "GST", "WVHT", "DPD", "APD", "MWD", "PRES", "ATMP", "WTMP", "DEWP"};

int feature_index(const std::string& name);  // -1 if unknown

// Hourly rows of the 11 features with explicit missingness. Column vectors
// are indexed per kFeatureNames and always have length == timestamps.size().
struct TimeSeriesTable {
    std::vector<Timestamp> timestamps;  // strictly increasing, UTC
    std::array<std::vector<std::optional<double>>, 11> columns;

    std::size_t rows() const { return timestamps.size(); }
    const std::vector<std::optional<double>>& column(const std::string& name) const;
    void validate() const;
};

// Parse an NDBC stdmet annual file (two '#' header lines, then whitespace
// separated records YY MM DD hh mm followed by measurements). Sentinel cells
// become missing; sub-hourly records collapse to the record nearest each hour
// mark, stamped at that hour.
TimeSeriesTable parse_stdmet(const std::string& raw_text);

struct FetchOptions {
    std::string data_dir = "data";
    // {station} and {year} are substituted. The default endpoint serves the
    // decompressed historical stdmet file as plain text.
    std::string endpoint =
        "https://www.ndbc.noaa.gov/view_text_file.php"
        "?filename={station}h{year}.txt.gz&dir=data/historical/stdmet/";
    bool allow_network = true;
};

// Returns the raw annual stdmet body, serving from <data_dir>/<station>/ when
// cached and persisting the body there after a live fetch.
std::string fetch_station_year(const std::string& station_id, int year,
                               const FetchOptions& opts = {});

std::string cache_path_for(const std::string& data_dir, const std::string& station_id, int year);

// Merge non-overlapping annual tables into one, sorted by timestamp. Gaps
// stay as absent rows.
TimeSeriesTable concat_years(const std::vector<TimeSeriesTable>& tables);

// Canonical CSV: header timestamp,WDIR,...,DEWP; ISO-8601 stamps; empty cell
// = missing. Round-trips exactly.
void write_canonical_csv(const TimeSeriesTable& table, const std::string& path);
TimeSeriesTable read_canonical_csv(const std::string& path);

}  // namespace wavecast::ndbc
