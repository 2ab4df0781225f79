#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wavecast/ndbc.hpp"

using namespace wavecast;
namespace fs = std::filesystem;

namespace {

const char* kHeader =
    "#YY  MM DD hh mm WDIR WSPD GST  WVHT   DPD   APD MWD   PRES  ATMP  WTMP  DEWP\n"
    "#yr  mo dy hr mn degT m/s  m/s     m   sec   sec degT   hPa  degC  degC  degC\n";

std::string fixture_path() {
    return std::string(WAVECAST_TEST_DATA_DIR) + "/sample_stdmet.txt";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("wavecast_ndbc_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("single record parses into one hourly row") {
    const std::string text =
        std::string(kHeader) +
        "2019 01 01 00 00 120 5.0 6.0 1.10 9.0 6.5 118 1015.2 22.0 23.0 18.0\n";
    const auto table = ndbc::parse_stdmet(text);
    REQUIRE(table.rows() == 1);
    CHECK(table.timestamps[0] == make_timestamp(2019, 1, 1, 0));
    CHECK(table.column("WVHT")[0] == 1.10);
    CHECK(table.column("WDIR")[0] == 120.0);
    CHECK(table.column("PRES")[0] == 1015.2);
}

TEST_CASE("wave-height sentinel becomes a missing cell") {
    const std::string text =
        std::string(kHeader) +
        "2019 01 01 00 00 120 5.0 6.0 99.00 9.0 6.5 118 1015.2 22.0 23.0 18.0\n";
    const auto table = ndbc::parse_stdmet(text);
    REQUIRE(table.rows() == 1);
    CHECK_FALSE(table.column("WVHT")[0].has_value());
    CHECK(table.column("WSPD")[0] == 5.0);
}

TEST_CASE("headers only is an empty table") {
    const auto table = ndbc::parse_stdmet(kHeader);
    CHECK(table.rows() == 0);
}

TEST_CASE("malformed rows name the line") {
    const std::string short_row = std::string(kHeader) + "2019 01 01 00 00 120 5.0\n";
    CHECK_THROWS_WITH_AS((void)ndbc::parse_stdmet(short_row), doctest::Contains("line 3"),
                         std::runtime_error);
    const std::string bad_number =
        std::string(kHeader) +
        "2019 01 01 00 00 120 5.0 6.0 x.yz 9.0 6.5 118 1015.2 22.0 23.0 18.0\n";
    CHECK_THROWS_WITH_AS((void)ndbc::parse_stdmet(bad_number), doctest::Contains("line 3"),
                         std::runtime_error);
}

TEST_CASE("non-monotone timestamps are rejected") {
    const std::string text =
        std::string(kHeader) +
        "2019 01 01 01 00 120 5.0 6.0 1.10 9.0 6.5 118 1015.2 22.0 23.0 18.0\n"
        "2019 01 01 00 00 120 5.0 6.0 1.20 9.0 6.5 118 1015.2 22.0 23.0 18.0\n";
    CHECK_THROWS_WITH_AS((void)ndbc::parse_stdmet(text), doctest::Contains("non-monotone"),
                         std::runtime_error);
}

TEST_CASE("fixture file: sentinels, sub-hourly collapse, gaps") {
    const auto table = ndbc::parse_stdmet(read_file(fixture_path()));

    // 00:30 rounds to hour 1 and loses to the 01:00 record; 05:50 rounds to
    // hour 6; 03..05 remain a gap.
    REQUIRE(table.rows() == 10);
    CHECK(table.timestamps[0] == make_timestamp(2019, 1, 1, 0));
    CHECK(table.timestamps[1] == make_timestamp(2019, 1, 1, 1));
    CHECK(table.timestamps[2] == make_timestamp(2019, 1, 1, 2));
    CHECK(table.timestamps[3] == make_timestamp(2019, 1, 1, 6));

    CHECK(table.column("WVHT")[0] == 1.10);             // 00:00 beats 00:30
    CHECK_FALSE(table.column("WVHT")[1].has_value());   // 99.00
    CHECK_FALSE(table.column("WDIR")[2].has_value());   // 999
    CHECK_FALSE(table.column("PRES")[2].has_value());   // 9999.0
    CHECK_FALSE(table.column("DPD")[2].has_value());    // 99.0
    CHECK(table.column("WVHT")[3] == 1.40);             // the 05:50 record
    CHECK_FALSE(table.column("MWD")[5].has_value());
    CHECK_FALSE(table.column("DEWP")[5].has_value());
    CHECK_FALSE(table.column("ATMP")[6].has_value());
    CHECK_FALSE(table.column("GST")[7].has_value());
    CHECK_FALSE(table.column("WSPD")[8].has_value());
    CHECK_FALSE(table.column("WTMP")[8].has_value());
    CHECK_FALSE(table.column("APD")[9].has_value());

    // no value invention: every present cell equals a source token
    CHECK(table.column("WSPD")[0] == 5.0);
    CHECK(table.column("GST")[9] == 8.2);
}

TEST_CASE("canonical csv round-trips exactly") {
    const auto table = ndbc::parse_stdmet(read_file(fixture_path()));
    const auto dir = temp_dir("roundtrip");
    const std::string path = (dir / "canonical.csv").string();
    ndbc::write_canonical_csv(table, path);
    const auto back = ndbc::read_canonical_csv(path);
    REQUIRE(back.rows() == table.rows());
    CHECK(back.timestamps == table.timestamps);
    for (std::size_t f = 0; f < 11; ++f) {
        CHECK(back.columns[f] == table.columns[f]);
    }
    fs::remove_all(dir);
}

TEST_CASE("concat joins disjoint years and rejects overlap") {
    const std::string row =
        "2019 01 01 00 00 120 5.0 6.0 1.10 9.0 6.5 118 1015.2 22.0 23.0 18.0\n";
    const std::string row2020 =
        "2020 01 01 00 00 121 5.1 6.1 1.20 9.1 6.6 119 1015.3 22.1 23.1 18.1\n";
    const auto t2019 = ndbc::parse_stdmet(std::string(kHeader) + row);
    const auto t2020 = ndbc::parse_stdmet(std::string(kHeader) + row2020);

    const auto joined = ndbc::concat_years({t2019, t2020});
    REQUIRE(joined.rows() == 2);
    CHECK(joined.timestamps[0] < joined.timestamps[1]);

    const auto reversed = ndbc::concat_years({t2020, t2019});
    CHECK(reversed.timestamps == joined.timestamps);
    CHECK(reversed.column("WVHT") == joined.column("WVHT"));

    CHECK_THROWS_AS((void)ndbc::concat_years({t2019, t2019}), std::invalid_argument);
}

TEST_CASE("fetch serves from the cache without network") {
    const auto dir = temp_dir("cache");
    ndbc::FetchOptions opts;
    opts.data_dir = dir.string();
    opts.allow_network = false;

    CHECK_THROWS_AS((void)ndbc::fetch_station_year("41008", 2019, opts), std::runtime_error);

    fs::create_directories(dir / "41008");
    const std::string body = "# cached stdmet body\n";
    std::ofstream(dir / "41008" / "41008h2019.txt") << body;
    CHECK(ndbc::fetch_station_year("41008", 2019, opts) == body);
    fs::remove_all(dir);
}

TEST_CASE("fetch validates the year range") {
    ndbc::FetchOptions opts;
    opts.allow_network = false;
    CHECK_THROWS_AS((void)ndbc::fetch_station_year("41008", 3000, opts), std::invalid_argument);
    CHECK_THROWS_AS((void)ndbc::fetch_station_year("41008", 1960, opts), std::invalid_argument);
}

TEST_CASE("station metadata invariants") {
    // the two study stations: nearshore 41008 and offshore 41047
    ndbc::StationMeta nearshore{"41008", 31.400, -80.866, 16.0};
    ndbc::StationMeta offshore{"41047", 27.557, -71.480, 5328.0};
    CHECK_NOTHROW(nearshore.validate());
    CHECK_NOTHROW(offshore.validate());

    ndbc::StationMeta station = nearshore;
    station.latitude = 95.0;
    CHECK_THROWS_AS(station.validate(), std::invalid_argument);
    station.latitude = 31.4;
    station.water_depth = 0.0;
    CHECK_THROWS_AS(station.validate(), std::invalid_argument);
}

// Containment check against the station reference bounds; runs when a real
// annual file is available locally (see README for fetching).
TEST_CASE("41008 2019 wave heights stay inside the station reference bounds") {
    const char* data_dir = std::getenv("WAVECAST_DATA_DIR");
    const std::string path = ndbc::cache_path_for(data_dir ? data_dir : "data", "41008", 2019);
    if (!fs::exists(path)) {
        MESSAGE("skipped: no cached 41008h2019.txt under the data directory");
        return;
    }
    const auto table = ndbc::parse_stdmet(read_file(path));
    double lo = 1e9, hi = -1e9;
    std::size_t present = 0;
    for (const auto& cell : table.column("WVHT")) {
        if (cell) {
            lo = std::min(lo, *cell);
            hi = std::max(hi, *cell);
            ++present;
        }
    }
    REQUIRE(present > 1000);
    CHECK(lo >= 0.20);
    CHECK(hi <= 4.54);
}

TEST_CASE("endpoint failures are reported as retryable") {
    const auto dir = temp_dir("endpoint");
    ndbc::FetchOptions opts;
    opts.data_dir = dir.string();
    opts.allow_network = true;
    opts.endpoint = "http://127.0.0.1:9/{station}h{year}.txt";  // nothing listens here
    try {
        (void)ndbc::fetch_station_year("41008", 2019, opts);
        FAIL("fetch unexpectedly succeeded");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("retryable") != std::string::npos);
    }
    fs::remove_all(dir);
}
