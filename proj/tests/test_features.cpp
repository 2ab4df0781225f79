#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "wavecast/csv.hpp"
#include "wavecast/features.hpp"
#include "wavecast/preprocess.hpp"
#include "wavecast/stl.hpp"
#include "wavecast/synthetic.hpp"

using namespace wavecast;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// A one-column clean table with a daily cycle.
preprocess::CleanTable tiny_clean(std::size_t rows) {
    preprocess::CleanTable t;
    const Timestamp start = make_timestamp(2021, 1, 1, 0);
    for (std::size_t i = 0; i < rows; ++i) {
        t.timestamps.push_back(start + static_cast<Timestamp>(i) * kSecondsPerHour);
    }
    t.names = {"WVHT"};
    std::vector<double> col(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        col[i] = 0.5 + 0.4 * std::sin(2.0 * kPi * static_cast<double>(i) / 24.0);
    }
    t.values = {col};
    return t;
}

features::SpectralFeatures fake_spectral(std::size_t rows) {
    features::SpectralFeatures f;
    f.global.dominant_periods = {24.0};
    f.global.dominant_amplitudes = {1.0};
    f.dominant_frequency.assign(rows, 1.0 / 24.0);
    return f;
}

}  // namespace

TEST_CASE("one base feature with K=1 yields six columns") {
    const auto clean = tiny_clean(96);
    std::map<std::string, stl::StlDecomposition> decomp;
    decomp["WVHT"] = stl::stl_decompose(clean.values[0], stl::StlConfig{});
    std::map<std::string, features::SpectralFeatures> spec;
    spec["WVHT"] = fake_spectral(96);

    features::FeatureBuildOptions opt;
    opt.k_periods = 1;
    const auto fm = features::build_feature_matrix(clean, decomp, spec, opt);
    CHECK(fm.cols() == 6);  // trend, seasonal, residual, period, amp, domfreq
    CHECK(fm.column_index("WVHT_trend") >= 0);
    CHECK(fm.column_index("WVHT_gsf_period_0") >= 0);
    CHECK(fm.column_index("WVHT_domfreq") >= 0);
    for (const auto& col : fm.columns) {
        for (double v : col) {
            CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("missing decomposition or misaligned spectra raise") {
    const auto clean = tiny_clean(96);
    std::map<std::string, stl::StlDecomposition> decomp;  // empty
    std::map<std::string, features::SpectralFeatures> spec;
    spec["WVHT"] = fake_spectral(96);
    features::FeatureBuildOptions opt;
    CHECK_THROWS_AS((void)features::build_feature_matrix(clean, decomp, spec, opt),
                    std::invalid_argument);

    decomp["WVHT"] = stl::stl_decompose(clean.values[0], stl::StlConfig{});
    spec["WVHT"].dominant_frequency.resize(40);  // misaligned
    CHECK_THROWS_AS((void)features::build_feature_matrix(clean, decomp, spec, opt),
                    std::invalid_argument);
}

TEST_CASE("decomposition columns reassemble the clean feature") {
    const auto clean = tiny_clean(240);
    std::map<std::string, stl::StlDecomposition> decomp;
    decomp["WVHT"] = stl::stl_decompose(clean.values[0], stl::StlConfig{});
    std::map<std::string, features::SpectralFeatures> spec;
    spec["WVHT"] = fake_spectral(240);
    features::FeatureBuildOptions opt;
    const auto fm = features::build_feature_matrix(clean, decomp, spec, opt);

    const auto& sec = fm.secondary;
    const auto t = fm.column("WVHT_trend");
    const auto s = fm.column("WVHT_seasonal");
    const auto r = fm.column("WVHT_residual");
    const std::size_t it = static_cast<std::size_t>(fm.column_index("WVHT_trend"));
    const std::size_t is = static_cast<std::size_t>(fm.column_index("WVHT_seasonal"));
    const std::size_t ir = static_cast<std::size_t>(fm.column_index("WVHT_residual"));
    for (std::size_t row = 0; row < fm.rows(); ++row) {
        const double reassembled =
            sec.invert(it, t[row]) + sec.invert(is, s[row]) + sec.invert(ir, r[row]);
        CHECK(std::abs(reassembled - clean.values[0][row]) < 1e-10);
    }
}

TEST_CASE("window arithmetic") {
    const auto clean = tiny_clean(30);
    std::map<std::string, stl::StlDecomposition> decomp;
    std::map<std::string, features::SpectralFeatures> spec;
    features::FeatureBuildOptions opt;
    opt.include_decomposition = false;
    opt.include_global_spectrum = false;
    opt.include_dominant_frequency = false;
    opt.include_raw = true;
    const auto fm = features::build_feature_matrix(clean, decomp, spec, opt);

    const auto set = features::make_windows(fm, clean.values[0], 24, 1);
    CHECK(set.num_samples() == 6);  // 30 - 24 - 1 + 1
    CHECK(set.feature_count == 1);
    CHECK(set.lookback == 24);

    SUBCASE("minimal window") {
        const auto tiny = tiny_clean(2);
        features::FeatureMatrix fm2;
        fm2.timestamps = tiny.timestamps;
        fm2.names = {"WVHT"};
        fm2.columns = {tiny.values[0]};
        const auto one = features::make_windows(fm2, tiny.values[0], 1, 1);
        REQUIRE(one.num_samples() == 1);
        CHECK(one.sample_input(0)[0] == fm2.columns[0][0]);
        CHECK(one.targets[0] == tiny.values[0][1]);
    }

    SUBCASE("insufficient rows") {
        CHECK_THROWS_AS((void)features::make_windows(fm, clean.values[0], 30, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("windows never cross a recorded gap") {
    auto clean = tiny_clean(60);
    // remove rows 30..35 to create a 7-hour jump
    preprocess::CleanTable gapped;
    gapped.names = clean.names;
    gapped.values.resize(1);
    for (std::size_t i = 0; i < clean.rows(); ++i) {
        if (i >= 30 && i < 36) {
            continue;
        }
        gapped.timestamps.push_back(clean.timestamps[i]);
        gapped.values[0].push_back(clean.values[0][i]);
    }
    features::FeatureMatrix fm;
    fm.timestamps = gapped.timestamps;
    fm.names = {"WVHT"};
    fm.columns = {gapped.values[0]};

    const auto set = features::make_windows(fm, gapped.values[0], 12, 1, 3.0);
    // every sample's covered range must be contiguous
    for (std::size_t i = 0; i < set.num_samples(); ++i) {
        const Timestamp target_ts = set.sample_timestamps[i];
        CHECK((target_ts <= clean.timestamps[29] ||
               target_ts >= clean.timestamps[36] + 12 * kSecondsPerHour));
    }
    // causality: inputs end strictly before the target
    for (std::size_t i = 0; i < set.num_samples(); ++i) {
        CHECK(set.last_observed[i] != 0.0);
    }
}

TEST_CASE("window count formula holds for random shapes") {
    std::mt19937 rng(55);
    std::uniform_int_distribution<std::size_t> rows_d(10, 100);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t rows = rows_d(rng);
        std::uniform_int_distribution<std::size_t> lb_d(1, rows / 2);
        const std::size_t lookback = lb_d(rng);
        std::uniform_int_distribution<std::size_t> h_d(1, rows - lookback);
        const std::size_t horizon = h_d(rng);
        const auto clean = tiny_clean(rows);
        features::FeatureMatrix fm;
        fm.timestamps = clean.timestamps;
        fm.names = {"WVHT"};
        fm.columns = {clean.values[0]};
        const auto set = features::make_windows(fm, clean.values[0], lookback, horizon);
        CHECK(set.num_samples() == rows - lookback - horizon + 1);
        for (std::size_t i = 0; i < set.num_samples(); ++i) {
            // max input timestamp < target timestamp
            const Timestamp window_end_ts =
                set.sample_timestamps[i] -
                static_cast<Timestamp>(horizon) * kSecondsPerHour;
            CHECK(window_end_ts < set.sample_timestamps[i]);
        }
    }
}

TEST_CASE("chronological split") {
    const auto clean = tiny_clean(100);
    features::FeatureMatrix fm;
    fm.timestamps = clean.timestamps;
    fm.names = {"WVHT"};
    fm.columns = {clean.values[0]};
    const auto set = features::make_windows(fm, clean.values[0], 10, 1);

    const Timestamp boundary = clean.timestamps[60];
    const auto [train, test] = features::split_train_test(set, boundary);
    CHECK(train.num_samples() + test.num_samples() == set.num_samples());
    for (Timestamp ts : train.sample_timestamps) {
        CHECK(ts < boundary);
    }
    for (Timestamp ts : test.sample_timestamps) {
        CHECK(ts >= boundary);
    }

    SUBCASE("boundary before the first sample") {
        CHECK_THROWS_AS((void)features::split_train_test(set, clean.timestamps[0] - 100000),
                        std::invalid_argument);
    }
    SUBCASE("boundary at the last sample leaves a minimal test split") {
        const auto [tr, te] = features::split_train_test(set, set.sample_timestamps.back());
        CHECK(te.num_samples() == 1);
        CHECK(tr.num_samples() == set.num_samples() - 1);
    }
}

TEST_CASE("correlation matrix basics") {
    std::mt19937 rng(66);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(50), negx(50), flat(50, 2.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = u(rng);
        negx[i] = -x[i];
    }
    const auto cm = features::correlation_matrix({"x", "negx", "flat"}, {x, negx, flat});
    CHECK(cm.values[0][0] == 1.0);
    CHECK(cm.values[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(cm.values[1][0] == cm.values[0][1]);
    CHECK(cm.zero_variance[2]);
    CHECK(cm.values[0][2] == 0.0);
}

TEST_CASE("wind speed and gusts correlate strongly on generated data") {
    const auto raw = synthetic::generate_table(24 * 120, 77);
    const auto prep = preprocess::preprocess_table(raw, raw.timestamps[24 * 100],
                                                   preprocess::PreprocessConfig{});
    const auto cm = features::correlation_matrix(prep.table.names, prep.table.values);
    const auto iw = static_cast<std::size_t>(prep.table.column_index("WSPD"));
    const auto ig = static_cast<std::size_t>(prep.table.column_index("GST"));
    CHECK(cm.values[iw][ig] >= 0.9);
}

TEST_CASE("tensor container round-trips") {
    const auto dir = fs::temp_directory_path() / "wavecast_tensor_test";
    fs::create_directories(dir);
    const std::string path = (dir / "t.bin").string();
    std::vector<double> data(24);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = std::sin(static_cast<double>(i)) * 1e3;
    }
    features::write_tensor_file(path, {2, 3, 4}, data);
    const auto [shape, back] = features::read_tensor_file(path);
    CHECK(shape == std::vector<std::size_t>{2, 3, 4});
    CHECK(back == data);
    CHECK_THROWS_AS((void)features::write_tensor_file(path, {2, 3}, data),
                    std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("feature matrix persists as csv plus schema") {
    const auto clean = tiny_clean(48);
    std::map<std::string, stl::StlDecomposition> decomp;
    decomp["WVHT"] = stl::stl_decompose(clean.values[0], stl::StlConfig{});
    std::map<std::string, features::SpectralFeatures> spec;
    spec["WVHT"] = fake_spectral(48);
    features::FeatureBuildOptions opt;
    opt.k_periods = 1;
    const auto fm = features::build_feature_matrix(clean, decomp, spec, opt);

    const auto dir = fs::temp_directory_path() / "wavecast_fm_test";
    fs::create_directories(dir);
    features::write_feature_matrix(fm, (dir / "features.csv").string(),
                                   (dir / "features_schema.json").string());
    const auto back = csv::read_file((dir / "features.csv").string());
    CHECK(back.header.size() == fm.cols() + 1);
    CHECK(back.rows.size() == fm.rows());
    for (std::size_t c = 0; c < fm.cols(); ++c) {
        CHECK(back.header[c + 1] == fm.names[c]);
        CHECK(*csv::parse_optional(back.rows[10][c + 1]) == fm.columns[c][10]);
    }
    std::ifstream schema_in(dir / "features_schema.json");
    const auto schema = nlohmann::json::parse(schema_in);
    CHECK(schema.at("rows").get<std::size_t>() == fm.rows());
    CHECK(schema.at("columns").size() == fm.cols());
    CHECK(schema.at("secondary_scaler").contains("WVHT_trend"));
    fs::remove_all(dir);
}

TEST_CASE("sample sets persist with aligned metadata") {
    const auto clean = tiny_clean(40);
    features::FeatureMatrix fm;
    fm.timestamps = clean.timestamps;
    fm.names = {"WVHT"};
    fm.columns = {clean.values[0]};
    const auto set = features::make_windows(fm, clean.values[0], 8, 2);

    const auto dir = fs::temp_directory_path() / "wavecast_sampleset_test";
    fs::create_directories(dir);
    set.save((dir / "inputs.bin").string(), (dir / "meta.csv").string());
    const auto [shape, data] = features::read_tensor_file((dir / "inputs.bin").string());
    CHECK(shape == std::vector<std::size_t>{set.num_samples(), 8, 1});
    CHECK(data == set.inputs);
    fs::remove_all(dir);
}
