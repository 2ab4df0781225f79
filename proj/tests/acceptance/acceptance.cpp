// Acceptance suite: one line per criterion, PASS/FAIL/BLOCKED, with the
// measured values and the runtime budget printed next to each.
//
//   acceptance core      criteria runnable offline (default)
//   acceptance realdata  the checks that need real 41008 buoy files
//
// Exit codes: 0 all pass, 1 any failure, 77 nothing failed but some
// criterion is blocked on unavailable real data (ctest skip code).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wavecast/experiment.hpp"
#include "wavecast/metrics.hpp"
#include "wavecast/model.hpp"
#include "wavecast/ndbc.hpp"
#include "wavecast/nn/layers.hpp"
#include "wavecast/preprocess.hpp"
#include "wavecast/spectral.hpp"
#include "wavecast/stl.hpp"
#include "wavecast/synthetic.hpp"

namespace fs = std::filesystem;
using namespace wavecast;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    std::string name;
    enum class Status { Pass, Fail, Blocked } status;
    std::string detail;
    double seconds;
};

std::vector<Outcome> g_results;

void record(const std::string& name, Outcome::Status status, const std::string& detail,
            double seconds) {
    g_results.push_back({name, status, detail, seconds});
    const char* tag = status == Outcome::Status::Pass      ? "PASS"
                      : status == Outcome::Status::Blocked ? "BLOCKED"
                                                           : "FAIL";
    std::ostringstream line;
    line << "[" << tag << "] " << name << ": " << detail << " [" << std::fixed
         << std::setprecision(1) << seconds << " s]";
    std::cout << line.str() << std::endl;
}

void run_criterion(const std::string& name, double budget_seconds,
                   const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        auto [passed, text] = body();
        ok = passed;
        detail = text;
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && budget_seconds > 0.0 && seconds > budget_seconds) {
        ok = false;
        detail += " (runtime budget " + std::to_string(budget_seconds) + " s exceeded)";
    }
    record(name, ok ? Outcome::Status::Pass : Outcome::Status::Fail, detail, seconds);
}

// ---------------------------------------------------------------------------
// criterion 1: FFT oracle equivalence + Parseval
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion_fft() {
    std::mt19937 rng(20250101);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // 1000 inputs spread over N = 2..4096, weighted so the O(N^2) oracle
    // stays inside the budget.
    std::vector<std::pair<std::size_t, int>> plan = {
        {2, 109},  {4, 109},   {8, 109},   {16, 109},  {32, 109},  {64, 109},
        {128, 109}, {256, 109}, {512, 109}, {1024, 12}, {2048, 5},  {4096, 2}};
    std::size_t total = 0;
    double worst_rel = 0.0;
    double worst_parseval = 0.0;
    for (const auto& [n, reps] : plan) {
        for (int rep = 0; rep < reps; ++rep) {
            ++total;
            std::vector<spectral::Complex> x(n);
            for (auto& c : x) {
                c = {u(rng), u(rng)};
            }
            const auto fast = spectral::fft(x);
            const auto slow = spectral::dft_naive(x);
            double scale = 1e-300;
            for (const auto& c : slow) {
                scale = std::max(scale, std::abs(c));
            }
            for (std::size_t k = 0; k < n; ++k) {
                worst_rel = std::max(worst_rel, std::abs(fast[k] - slow[k]) / scale);
            }
            double te = 0.0, fe = 0.0;
            for (const auto& c : x) {
                te += std::norm(c);
            }
            for (const auto& c : fast) {
                fe += std::norm(c);
            }
            worst_parseval =
                std::max(worst_parseval, std::abs(te - fe / static_cast<double>(n)) / te);
        }
    }
    std::ostringstream detail;
    detail << total << " inputs, max rel err " << std::scientific << std::setprecision(2)
           << worst_rel << " (<=1e-9), parseval " << worst_parseval << " (<=1e-8)";
    return {total == 1000 && worst_rel <= 1e-9 && worst_parseval <= 1e-8, detail.str()};
}

// ---------------------------------------------------------------------------
// criterion 2: STL identity, seasonal recovery, spike robustness
// ---------------------------------------------------------------------------

double variance_of(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) {
        mean += x;
    }
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) {
        var += (x - mean) * (x - mean);
    }
    return var / static_cast<double>(v.size());
}

std::pair<bool, std::string> criterion_stl() {
    stl::StlConfig cfg;
    cfg.outer_iters = 1;

    double worst_identity = 0.0;
    std::mt19937 rng(77);
    std::normal_distribution<double> gauss(0.0, 0.2);

    // identity on assorted inputs
    for (int series_kind = 0; series_kind < 3; ++series_kind) {
        std::vector<double> series(24 * 40);
        for (std::size_t t = 0; t < series.size(); ++t) {
            const double ft = static_cast<double>(t);
            switch (series_kind) {
                case 0: series[t] = 2.5; break;
                case 1: series[t] = std::sin(2.0 * kPi * ft / 24.0) + 0.001 * ft; break;
                default: series[t] = 1.0 + std::sin(2.0 * kPi * ft / 24.0) + gauss(rng);
            }
        }
        const auto d = stl::stl_decompose(series, cfg);
        for (std::size_t t = 0; t < series.size(); ++t) {
            worst_identity = std::max(
                worst_identity,
                std::abs(d.trend[t] + d.seasonal[t] + d.residual[t] - series[t]));
        }
    }

    // seasonal variance share on the synthetic daily cycle
    std::vector<double> seasonal_series(24 * 50);
    for (std::size_t t = 0; t < seasonal_series.size(); ++t) {
        seasonal_series[t] = std::sin(2.0 * kPi * static_cast<double>(t) / 24.0) +
                             0.0001 * static_cast<double>(t);
    }
    const auto d = stl::stl_decompose(seasonal_series, cfg);
    const double share = variance_of(d.seasonal) / variance_of(seasonal_series);

    // spike robustness of the trend
    std::vector<double> clean(24 * 30), spiked;
    for (std::size_t t = 0; t < clean.size(); ++t) {
        clean[t] = std::sin(2.0 * kPi * static_cast<double>(t) / 24.0) +
                   0.0005 * static_cast<double>(t);
    }
    spiked = clean;
    const double range = 2.0 + 0.0005 * static_cast<double>(clean.size());
    const std::size_t spike_at = clean.size() / 2;
    spiked[spike_at] += 10.0 * range;
    const auto base = stl::stl_decompose(clean, cfg);
    const auto robust = stl::stl_decompose(spiked, cfg);
    double worst_shift = 0.0;
    for (std::size_t t = 0; t < clean.size(); ++t) {
        if (t != spike_at) {
            worst_shift = std::max(worst_shift, std::abs(robust.trend[t] - base.trend[t]));
        }
    }

    std::ostringstream detail;
    detail << "identity " << std::scientific << std::setprecision(2) << worst_identity
           << " (<=1e-10), seasonal share " << std::fixed << std::setprecision(3) << share
           << " (>=0.95), spike trend shift " << std::setprecision(3)
           << worst_shift / range * 100.0 << "% (<5%)";
    return {worst_identity <= 1e-10 && share >= 0.95 && worst_shift < 0.05 * range,
            detail.str()};
}

// ---------------------------------------------------------------------------
// criterion 3: gradient correctness on 20 seeds
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion_gradients() {
    double worst = 0.0;
    for (std::uint32_t seed = 1; seed <= 20; ++seed) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> u(-0.6, 0.6);

        model::ModelConfig cfg;
        cfg.channels = 3;
        cfg.dilations = {1, 2};
        cfg.lstm_hidden = 4;
        cfg.dropout = 0.2;
        cfg.seed = seed;
        auto m = model::build_model(cfg, 2);
        // keep pre-activations generically off the ReLU kink
        for (auto& block : m.blocks) {
            for (nn::Tensor* t : {&block.conv1.bias, &block.conv2.bias, &block.bn1.beta,
                                  &block.bn2.beta}) {
                for (double& v : t->values()) {
                    v = u(rng);
                }
            }
        }

        const std::size_t batch = 4, steps = 8;
        std::vector<double> xv(batch * steps * 2), tv(batch);
        for (double& v : xv) {
            v = u(rng);
        }
        for (double& v : tv) {
            v = u(rng);
        }

        auto params = m.parameters();
        if (params.size() > 40 || m.parameter_count() > 1000) {
            return {false, "reference network larger than intended"};
        }

        auto frozen = [&m]() {
            std::vector<std::vector<double>> stats;
            for (auto& b : m.blocks) {
                stats.push_back(b.bn1.running_mean);
                stats.push_back(b.bn1.running_var);
                stats.push_back(b.bn2.running_mean);
                stats.push_back(b.bn2.running_var);
            }
            return stats;
        }();
        auto restore_stats = [&]() {
            std::size_t i = 0;
            for (auto& b : m.blocks) {
                b.bn1.running_mean = frozen[i++];
                b.bn1.running_var = frozen[i++];
                b.bn2.running_mean = frozen[i++];
                b.bn2.running_var = frozen[i++];
            }
        };
        auto graph = [&]() {
            restore_stats();
            std::mt19937 drop_rng(seed * 1000 + 17);  // same masks every build
            nn::Tensor x = nn::Tensor::from_values({batch, steps, 2}, xv);
            nn::Tensor y = model::model_forward(m, x, true, drop_rng);
            nn::Tensor target = nn::Tensor::from_values({batch, 1}, tv);
            return nn::mse_loss(y, target);
        };

        for (auto& p : params) {
            p.zero_grad();
        }
        nn::Tensor loss = graph();
        loss.backward();

        const double step = 1e-5;
        for (auto& p : params) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double saved = p.values()[i];
                p.values()[i] = saved + step;
                const double up = graph().values()[0];
                p.values()[i] = saved - step;
                const double down = graph().values()[0];
                p.values()[i] = saved;
                const double fd = (up - down) / (2.0 * step);
                const double analytic = p.grad()[i];
                const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
                worst = std::max(worst, std::abs(fd - analytic) / denom);
            }
        }
        restore_stats();
    }
    std::ostringstream detail;
    detail << "20 seeds, max relative mismatch " << std::scientific << std::setprecision(2)
           << worst << " (<1e-4)";
    return {worst < 1e-4, detail.str()};
}

// ---------------------------------------------------------------------------
// criterion 4: metric formulas and properties
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion_metrics() {
    bool ok = true;
    std::ostringstream detail;

    const std::vector<double> y{0.3, 1.2, 0.7};
    ok = ok && metrics::rmse(y, y) == 0.0 && metrics::mae(y, y) == 0.0 &&
         metrics::smape(y, y) == 0.0 && metrics::r2(y, y) == 1.0;

    const std::vector<double> t1{1.0}, p1{3.0};
    ok = ok && metrics::mae(p1, t1) == 2.0 && metrics::rmse(p1, t1) == 2.0 &&
         std::abs(metrics::smape(p1, t1) - 100.0) < 1e-12;

    const std::vector<double> t3{1.0, 2.0, 3.0}, pm{2.0, 2.0, 2.0};
    ok = ok && std::abs(metrics::r2(pm, t3)) < 1e-12;

    const std::vector<double> ph{1.1, 1.9, 3.2};
    ok = ok && std::abs(metrics::mae(ph, t3) - 0.4 / 3.0) < 1e-12 &&
         std::abs(metrics::rmse(ph, t3) - std::sqrt(0.02)) < 1e-12 &&
         std::abs(metrics::r2(ph, t3) - 0.97) < 1e-12;
    if (!ok) {
        return {false, "unit examples failed"};
    }

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    std::uniform_real_distribution<double> su(0.1, 10.0);
    double worst_sym = 0.0, worst_scale = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> p(12), t(12);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = u(rng);
            t[i] = u(rng);
        }
        worst_sym = std::max(worst_sym, std::abs(metrics::smape(p, t) - metrics::smape(t, p)));
        const double a = su(rng);
        std::vector<double> ap(p), at(t);
        for (std::size_t i = 0; i < p.size(); ++i) {
            ap[i] *= a;
            at[i] *= a;
        }
        worst_scale = std::max(worst_scale,
                               std::abs(metrics::mae(ap, at) - a * metrics::mae(p, t)) +
                                   std::abs(metrics::rmse(ap, at) - a * metrics::rmse(p, t)));
    }
    detail << "unit examples exact; 1000 random vectors: smape symmetry "
           << std::scientific << std::setprecision(2) << worst_sym << ", scale equivariance "
           << worst_scale;
    return {worst_sym < 1e-10 && worst_scale < 1e-8, detail.str()};
}

// ---------------------------------------------------------------------------
// criterion 5 (offline parts): Eq. 13 / Eq. 14-15 / Eq. 16
// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion_preprocessing() {
    // Eq. 13 linear exactness
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_lin = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const double a = u(rng), b = u(rng);
        std::vector<std::optional<double>> col(50);
        std::vector<double> pos(50);
        for (std::size_t i = 0; i < col.size(); ++i) {
            pos[i] = static_cast<double>(i) * 0.7;
            col[i] = a * pos[i] + b;
        }
        for (std::size_t i = 1; i + 1 < col.size(); ++i) {
            if (unit(rng) < 0.5) {
                col[i] = std::nullopt;
            }
        }
        const auto out = preprocess::interpolate_missing(col, pos);
        for (std::size_t i = 0; i < out.size(); ++i) {
            worst_lin = std::max(worst_lin, std::abs(out[i] - (a * pos[i] + b)));
        }
    }

    // Eq. 14-15 angle table
    const auto e0 = preprocess::encode_angle(0.0);
    const auto e180 = preprocess::encode_angle(180.0);
    const auto e270 = preprocess::encode_angle(270.0);
    const bool angles_ok = std::abs(e0.x_new) < 1e-12 && e0.x_sign == 0 &&
                           std::abs(e180.x_new - 1.0) < 1e-12 && e180.x_sign == 0 &&
                           std::abs(e270.x_new - 0.5) < 1e-12 && e270.x_sign == 1 &&
                           std::abs(preprocess::decode_angle({0.5, 1}) - 270.0) < 1e-9 &&
                           std::abs(preprocess::decode_angle({1.0, 0}) - 180.0) < 1e-9;

    // Eq. 16 round-trip
    std::vector<std::vector<double>> cols{{0.20, 4.54}};
    const auto scaler = preprocess::fit_scaler({"WVHT"}, cols, 0, 2, {true});
    double worst_rt = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double x = u(rng) * 2.0;
        worst_rt = std::max(worst_rt, std::abs(scaler.invert(0, scaler.scale(0, x)) - x));
    }
    const bool example_ok = std::abs(scaler.scale(0, 1.13) - (1.13 - 0.20) / (4.54 - 0.20)) < 1e-12;

    std::ostringstream detail;
    detail << "interpolation linear error " << std::scientific << std::setprecision(2)
           << worst_lin << ", angle table " << (angles_ok ? "exact" : "WRONG")
           << ", scaler round-trip " << worst_rt << " (<=1e-12)";
    return {worst_lin < 1e-10 && angles_ok && worst_rt <= 1e-12 && example_ok, detail.str()};
}

// ---------------------------------------------------------------------------
// criterion 6: desk-scale end-to-end on the synthetic generator
// ---------------------------------------------------------------------------

experiment::PipelineConfig desk_scale_config(const std::string& out_dir) {
    experiment::PipelineConfig cfg;
    cfg.synthetic = true;
    cfg.synthetic_hours = 6000;
    cfg.synthetic_seed = 20190101;  // the documented generator seed
    cfg.years = {2021};
    cfg.split_boundary = "2021-07-30T00:00:00Z";  // ~5060 train rows of 6000
    // Whole-series decomposition, the mode the reference numbers correspond
    // to. Strict mode trains on interior-smoothed components but predicts
    // from trailing-window ones, which costs accuracy by construction.
    cfg.paper_faithful = true;
    cfg.out_dir = out_dir;
    cfg.prep.base_features = {"WVHT"};
    cfg.features.lookback = 24;
    cfg.features.horizon = 1;
    cfg.model.channels = 16;
    cfg.model.lstm_hidden = 32;
    cfg.model.dilations = {1, 2, 4};
    cfg.model.batch_size = 32;
    cfg.model.max_epochs = 40;
    cfg.model.patience = 6;
    cfg.model.seed = 20190101;
    return cfg;
}

std::pair<bool, std::string> criterion_desk_scale() {
    const fs::path dir = fs::temp_directory_path() / "wavecast_acceptance_desk";
    fs::remove_all(dir);
    const auto cfg = desk_scale_config(dir.string());
    const auto result = experiment::run_pipeline(cfg);
    fs::remove_all(dir);

    std::ostringstream detail;
    detail << std::fixed << std::setprecision(4) << "test R2 " << result.test_scaled.r2
           << " (>=0.9), model MAE " << result.test_scaled.mae << " vs persistence "
           << result.persistence_scaled.mae << " on " << result.test_scaled.n << " samples";
    return {result.test_scaled.r2 >= 0.9 &&
                result.test_scaled.mae < result.persistence_scaled.mae,
            detail.str()};
}

// ---------------------------------------------------------------------------
// criterion 8: bit-exact determinism
// ---------------------------------------------------------------------------

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

std::pair<bool, std::string> criterion_determinism() {
    const fs::path dir = fs::temp_directory_path() / "wavecast_acceptance_det";
    fs::remove_all(dir);

    experiment::PipelineConfig cfg;
    cfg.synthetic = true;
    cfg.synthetic_hours = 2000;
    cfg.synthetic_seed = 7;
    cfg.years = {2021};
    cfg.split_boundary = "2021-03-10T00:00:00Z";
    cfg.paper_faithful = true;
    cfg.out_dir = (dir / "run").string();
    cfg.prep.base_features = {"WVHT", "WSPD"};
    cfg.spectral.k = 2;
    cfg.spectral.nperseg = 64;
    cfg.spectral.noverlap = 32;
    cfg.model.channels = 6;
    cfg.model.lstm_hidden = 8;
    cfg.model.dilations = {1, 2};
    cfg.model.max_epochs = 4;
    cfg.model.patience = 0;
    cfg.model.seed = 1234;

    const auto first = experiment::run_pipeline(cfg);
    const std::string metrics_first = read_file(dir / "run" / "metrics.csv");
    const std::string forecasts_first = read_file(dir / "run" / "forecasts.csv");
    fs::remove_all(dir / "run");

    const auto second = experiment::run_pipeline(cfg);
    const std::string metrics_second = read_file(dir / "run" / "metrics.csv");
    const std::string forecasts_second = read_file(dir / "run" / "forecasts.csv");
    fs::remove_all(dir);

    const bool curves_equal = first.report.train_loss == second.report.train_loss &&
                              first.report.val_mae == second.report.val_mae;
    const bool files_equal =
        metrics_first == metrics_second && forecasts_first == forecasts_second;
    const bool preds_equal = first.test_pred == second.test_pred;

    std::ostringstream detail;
    detail << "loss curves " << (curves_equal ? "identical" : "DIFFER") << ", artifacts "
           << (files_equal ? "byte-identical" : "DIFFER") << ", predictions "
           << (preds_equal ? "bit-identical" : "DIFFER");
    return {curves_equal && files_equal && preds_equal, detail.str()};
}

// ---------------------------------------------------------------------------
// real-data criteria (5d and 7)
// ---------------------------------------------------------------------------

std::string data_directory() {
    if (const char* env = std::getenv("WAVECAST_DATA_DIR")) {
        return env;
    }
    return "data";
}

bool real_data_available(std::string& missing) {
    const std::string dir = data_directory();
    const bool allow_network = std::getenv("WAVECAST_ALLOW_NETWORK") != nullptr;
    for (int year : {2019, 2020, 2021, 2022}) {
        const std::string path = ndbc::cache_path_for(dir, "41008", year);
        if (fs::exists(path)) {
            continue;
        }
        if (allow_network) {
            try {
                ndbc::FetchOptions opts;
                opts.data_dir = dir;
                (void)ndbc::fetch_station_year("41008", year, opts);
                continue;
            } catch (const std::exception& e) {
                missing = path + " (fetch failed: " + e.what() + ")";
                return false;
            }
        }
        missing = path;
        return false;
    }
    return true;
}

void blocked(const std::string& name, const std::string& missing) {
    record(name, Outcome::Status::Blocked,
           "real 41008 stdmet data unavailable (first missing: " + missing +
               "); fetch the four annual files via `wavecast fetch --station 41008 "
               "--years 2019 2020 2021 2022` on a networked machine or set "
               "WAVECAST_DATA_DIR, then rerun",
           0.0);
}

std::pair<bool, std::string> criterion_table1_containment() {
    std::vector<ndbc::TimeSeriesTable> tables;
    for (int year : {2019, 2020, 2021, 2022}) {
        const std::string path = ndbc::cache_path_for(data_directory(), "41008", year);
        tables.push_back(ndbc::parse_stdmet(read_file(path)));
    }
    const auto joined = ndbc::concat_years(tables);
    double lo = 1e9, hi = -1e9;
    std::size_t count = 0;
    for (const auto& cell : joined.column("WVHT")) {
        if (cell) {
            lo = std::min(lo, *cell);
            hi = std::max(hi, *cell);
            ++count;
        }
    }
    std::ostringstream detail;
    detail << count << " observations, WVHT in [" << lo << ", " << hi
           << "], reference bounds [0.20, 4.54]";
    return {count > 20000 && lo >= 0.20 && hi <= 4.54, detail.str()};
}

experiment::PipelineConfig real_data_config(const std::string& out_dir, std::uint64_t seed) {
    experiment::PipelineConfig cfg;
    cfg.station = "41008";
    cfg.years = {2019, 2020, 2021, 2022};
    cfg.split_boundary = "2022-01-01T00:00:00Z";
    cfg.paper_faithful = true;  // reproduction of whole-series processing
    cfg.data_dir = data_directory();
    cfg.out_dir = out_dir;
    cfg.model.channels = 16;
    cfg.model.lstm_hidden = 32;
    cfg.model.batch_size = 64;
    cfg.model.max_epochs = 30;
    cfg.model.patience = 5;
    cfg.model.seed = seed;
    return cfg;
}

std::pair<bool, std::string> criterion_paper_numbers() {
    const std::vector<std::uint64_t> seeds{7, 21, 42};
    std::vector<double> baseline_mae, baseline_r2;
    int ordering_hits = 0;

    const fs::path root = fs::temp_directory_path() / "wavecast_acceptance_real";
    fs::remove_all(root);
    for (std::uint64_t seed : seeds) {
        const auto cfg =
            real_data_config((root / ("seed" + std::to_string(seed))).string(), seed);
        const auto report = experiment::run_ablation_suite(cfg);
        baseline_mae.push_back(report.blocks[0].mae);
        baseline_r2.push_back(report.blocks[0].r2);
        bool ordered = true;
        for (std::size_t v = 1; v < report.blocks.size(); ++v) {
            ordered = ordered && report.blocks[0].mae < report.blocks[v].mae;
        }
        ordering_hits += ordered ? 1 : 0;
    }
    fs::remove_all(root);

    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    const double med_mae = median(baseline_mae);
    const double med_r2 = median(baseline_r2);

    std::ostringstream detail;
    detail << std::fixed << std::setprecision(4) << "median baseline MAE " << med_mae
           << " (<=0.0248 = 2x reference 0.0124), median R2 " << med_r2
           << " (>=0.95), ablation ordering on " << ordering_hits << "/3 seeds (need >=2)";
    return {med_mae <= 2.0 * 0.0124 && med_r2 >= 0.95 && ordering_hits >= 2, detail.str()};
}

int summarize() {
    std::size_t failed = 0, blocked_count = 0;
    for (const auto& r : g_results) {
        failed += r.status == Outcome::Status::Fail ? 1 : 0;
        blocked_count += r.status == Outcome::Status::Blocked ? 1 : 0;
    }
    std::cout << "\n" << g_results.size() << " criteria: "
              << (g_results.size() - failed - blocked_count) << " passed, " << failed
              << " failed, " << blocked_count << " blocked\n";
    if (failed > 0) {
        return 1;
    }
    return blocked_count > 0 ? 77 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "all";
    const bool core = mode == "core" || mode == "all";
    const bool realdata = mode == "realdata" || mode == "all";
    if (!core && !realdata) {
        std::cerr << "usage: acceptance [core|realdata|all]\n";
        return 2;
    }

    if (core) {
        run_criterion("criterion 1 fft-oracle", 30.0, criterion_fft);
        run_criterion("criterion 2 stl-identity-recovery", 60.0, criterion_stl);
        run_criterion("criterion 3 gradient-correctness", 300.0, criterion_gradients);
        run_criterion("criterion 4 metric-formulas", 60.0, criterion_metrics);
        run_criterion("criterion 5 preprocessing-exactness", 60.0, criterion_preprocessing);
        run_criterion("criterion 6 desk-scale-end-to-end", 600.0, criterion_desk_scale);
        run_criterion("criterion 8 determinism", 600.0, criterion_determinism);
    }
    if (realdata) {
        std::string missing;
        if (real_data_available(missing)) {
            run_criterion("criterion 5 table1-containment", 120.0,
                          criterion_table1_containment);
            run_criterion("criterion 7 paper-number-reproduction", 3 * 7200.0,
                          criterion_paper_numbers);
        } else {
            blocked("criterion 5 table1-containment", missing);
            blocked("criterion 7 paper-number-reproduction", missing);
        }
    }
    return summarize();
}
