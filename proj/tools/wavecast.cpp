// Command-line front end: each subcommand runs one pipeline stage against
// artifacts persisted under --out, so expensive steps (ingest, STL) are
// cached between invocations.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wavecast/csv.hpp"
#include "wavecast/experiment.hpp"
#include "wavecast/metrics.hpp"
#include "wavecast/model.hpp"
#include "wavecast/ndbc.hpp"

namespace {

namespace fs = std::filesystem;
using wavecast::experiment::PipelineConfig;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> data_dir;
    std::optional<std::string> out_dir;
    std::optional<std::string> station;
    std::vector<int> years;
    std::optional<std::string> variant;
    std::optional<std::string> mode;
    std::optional<std::string> boundary;
    bool synthetic = false;
    std::optional<std::size_t> synthetic_hours;
    bool dump_features = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
    cmd->add_option("--seed", f.seed, "Training seed override");
    cmd->add_option("--data-dir", f.data_dir,
                    "Buoy file cache directory (env WAVECAST_DATA_DIR overrides the default)");
    cmd->add_option("--out", f.out_dir, "Run directory for artifacts");
    cmd->add_option("--station", f.station, "Buoy station id, e.g. 41008");
    cmd->add_option("--years", f.years, "Years to ingest, e.g. --years 2019 2020");
    cmd->add_option("--variant", f.variant,
                    "Feature variant: baseline|dstl|dfft|dstft|dboth|raw");
    cmd->add_option("--mode", f.mode, "strict or paper-faithful")
        ->check(CLI::IsMember({"strict", "paper-faithful"}));
    cmd->add_option("--boundary", f.boundary, "Train/test split instant (ISO-8601)");
    cmd->add_flag("--synthetic", f.synthetic, "Use the synthetic generator instead of buoy data");
    cmd->add_option("--synthetic-hours", f.synthetic_hours, "Length of the synthetic series");
    cmd->add_flag("--dump-features", f.dump_features,
                  "Persist the assembled feature matrix next to the run artifacts");
}

PipelineConfig effective_config(const CommonFlags& f) {
    PipelineConfig cfg;
    if (!f.config_path.empty()) {
        cfg = PipelineConfig::load(f.config_path);
    }
    if (const char* env = std::getenv("WAVECAST_DATA_DIR")) {
        cfg.data_dir = env;
    }
    if (f.seed) {
        cfg.model.seed = *f.seed;
    }
    if (f.data_dir) {
        cfg.data_dir = *f.data_dir;
    }
    if (f.out_dir) {
        cfg.out_dir = *f.out_dir;
    }
    if (f.station) {
        cfg.station = *f.station;
    }
    if (!f.years.empty()) {
        cfg.years = f.years;
    }
    if (f.variant) {
        cfg.variant = wavecast::experiment::variant_from_name(*f.variant);
    }
    if (f.mode) {
        cfg.paper_faithful = *f.mode == "paper-faithful";
    }
    if (f.boundary) {
        cfg.split_boundary = *f.boundary;
    }
    if (f.synthetic) {
        cfg.synthetic = true;
    }
    if (f.synthetic_hours) {
        cfg.synthetic_hours = *f.synthetic_hours;
    }
    if (f.dump_features) {
        cfg.dump_features = true;
    }
    return cfg;
}

void echo_config(const PipelineConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/config.json");
    out << cfg.to_json() << '\n';
}

int run_fetch(const CommonFlags& flags) {
    PipelineConfig cfg = effective_config(flags);
    cfg.allow_network = true;
    for (int year : cfg.years) {
        wavecast::ndbc::FetchOptions opts;
        opts.data_dir = cfg.data_dir;
        const std::string body = wavecast::ndbc::fetch_station_year(cfg.station, year, opts);
        std::cout << "fetched " << cfg.station << " " << year << " (" << body.size()
                  << " bytes) -> "
                  << wavecast::ndbc::cache_path_for(cfg.data_dir, cfg.station, year) << "\n";
    }
    return 0;
}

int run_prepare(const CommonFlags& flags) {
    const PipelineConfig cfg = effective_config(flags);
    echo_config(cfg);
    const auto data = wavecast::experiment::prepare_data(cfg, cfg.out_dir);
    data.prep.scaler.save(cfg.out_dir + "/scalers.json");

    wavecast::csv::Table clean;
    clean.header.push_back("timestamp");
    for (const auto& name : data.prep.table.names) {
        clean.header.push_back(name);
    }
    for (std::size_t r = 0; r < data.prep.table.rows(); ++r) {
        std::vector<std::string> row{wavecast::format_iso8601(data.prep.table.timestamps[r])};
        for (std::size_t c = 0; c < data.prep.table.cols(); ++c) {
            row.push_back(wavecast::csv::format_double(data.prep.table.values[c][r]));
        }
        clean.rows.push_back(std::move(row));
    }
    wavecast::csv::write_file(cfg.out_dir + "/clean.csv", clean);
    const auto cm =
        wavecast::features::correlation_matrix(data.prep.table.names, data.prep.table.values);
    cm.write_csv(cfg.out_dir + "/correlation.csv");
    std::cout << "prepared " << data.prep.table.rows() << " rows, "
              << data.prep.table.cols() << " columns -> " << cfg.out_dir << "\n";
    return 0;
}

int run_decompose(const CommonFlags& flags, const std::string& feature, bool all_features) {
    const PipelineConfig cfg = effective_config(flags);
    echo_config(cfg);
    const auto data = wavecast::experiment::prepare_data(cfg, cfg.out_dir);
    std::vector<std::string> wanted;
    if (all_features) {
        wanted = data.prep.table.names;
    } else {
        wanted.push_back(data.prep.table.column_index(feature) >= 0 ? feature
                                                                    : feature + "_new");
    }
    for (const auto& name : wanted) {
        const int c = data.prep.table.column_index(name);
        if (c < 0) {
            throw std::runtime_error("decompose: unknown feature '" + name + "'");
        }
        const std::string path = cfg.out_dir + "/decomposition_" + name + ".csv";
        wavecast::experiment::write_decomposition_csv(
            path, data.prep.table.timestamps, data.prep.table.values[static_cast<std::size_t>(c)],
            data.decomposition.at(name));
        std::cout << "decomposed " << name << " -> " << path << "\n";
    }
    return 0;
}

int run_spectra(const CommonFlags& flags, const std::string& feature) {
    const PipelineConfig cfg = effective_config(flags);
    echo_config(cfg);
    const auto data = wavecast::experiment::prepare_data(cfg, cfg.out_dir);
    const std::string name =
        data.prep.table.column_index(feature) >= 0 ? feature : feature + "_new";
    const auto it = data.decomposition.find(name);
    if (it == data.decomposition.end()) {
        throw std::runtime_error("spectra: unknown feature '" + feature + "'");
    }
    const auto& residual = it->second.residual;
    const auto spectrum = wavecast::spectral::global_spectrum(residual);
    wavecast::experiment::write_spectrum_csv(cfg.out_dir + "/spectrum_" + name + ".csv",
                                             spectrum);
    const auto sg =
        wavecast::spectral::stft(residual, cfg.spectral.nperseg, cfg.spectral.noverlap);
    wavecast::experiment::write_spectrogram_csv(cfg.out_dir + "/spectrogram_" + name + ".csv",
                                                sg);
    const auto gsf =
        wavecast::spectral::significant_periods(spectrum, cfg.spectral.threshold, cfg.spectral.k);
    std::ofstream gout(cfg.out_dir + "/gsf_" + name + ".json");
    gout << "{\"periods\":[";
    for (std::size_t i = 0; i < gsf.dominant_periods.size(); ++i) {
        gout << (i ? "," : "") << wavecast::csv::format_double(gsf.dominant_periods[i]);
    }
    gout << "],\"amplitudes\":[";
    for (std::size_t i = 0; i < gsf.dominant_amplitudes.size(); ++i) {
        gout << (i ? "," : "") << wavecast::csv::format_double(gsf.dominant_amplitudes[i]);
    }
    gout << "]}\n";
    std::cout << "spectra for " << name << " -> " << cfg.out_dir << "\n";
    return 0;
}

int run_train(const CommonFlags& flags) {
    const PipelineConfig cfg = effective_config(flags);
    echo_config(cfg);
    const auto result = wavecast::experiment::run_pipeline(cfg);
    std::cout << "trained " << wavecast::experiment::variant_name(cfg.variant) << ": best epoch "
              << result.report.best_epoch << ", test MAE (scaled) "
              << result.test_scaled.mae << ", R2 " << result.test_scaled.r2 << "\n"
              << "artifacts -> " << result.run_dir << "\n";
    return 0;
}

int run_evaluate(const CommonFlags& flags) {
    const PipelineConfig cfg = effective_config(flags);
    const std::string manifest = cfg.out_dir + "/checkpoint.json";
    const std::string payload = cfg.out_dir + "/checkpoint.bin";
    if (!fs::exists(manifest) || !fs::exists(payload)) {
        throw std::runtime_error("evaluate: missing checkpoint under '" + cfg.out_dir +
                                 "' (run the train stage first)");
    }
    auto net = wavecast::model::load_checkpoint(manifest, payload);
    const auto data = wavecast::experiment::prepare_data(cfg, cfg.out_dir);
    const auto fm = wavecast::experiment::build_variant_features(data, cfg, cfg.variant);
    const auto& target = data.prep.table.column("WVHT");
    const auto all = wavecast::features::make_windows(
        fm, target, cfg.features.lookback, cfg.features.horizon, cfg.features.max_gap_hours);
    auto [train_set, test_set] = wavecast::features::split_train_test(all, cfg.boundary());
    (void)train_set;
    if (test_set.num_samples() == 0) {
        throw std::runtime_error("evaluate: no test samples after the boundary");
    }
    const auto pred = wavecast::model::predict(net, test_set);
    const auto block = wavecast::metrics::evaluate(pred, test_set.targets,
                                                   wavecast::metrics::SmapePolicy::SkipUndefined);
    namespace wcsv = wavecast::csv;
    std::ofstream mout(cfg.out_dir + "/metrics.csv");
    mout << "metric,value\nrmse," << wcsv::format_double(block.rmse) << "\nmae,"
         << wcsv::format_double(block.mae) << "\nsmape," << wcsv::format_double(block.smape)
         << "\nr2," << wcsv::format_double(block.r2) << "\ncc," << wcsv::format_double(block.cc)
         << "\ncc_pearson," << wcsv::format_double(block.cc_pearson) << "\nn," << block.n
         << "\n";
    std::cout << "evaluate: MAE " << block.mae << ", RMSE " << block.rmse << ", R2 " << block.r2
              << " on " << block.n << " samples\n";
    return 0;
}

int run_ablate(const CommonFlags& flags) {
    const PipelineConfig cfg = effective_config(flags);
    echo_config(cfg);
    const auto report = wavecast::experiment::run_ablation_suite(cfg);
    for (std::size_t i = 0; i < report.variants.size(); ++i) {
        std::cout << wavecast::experiment::variant_name(report.variants[i]) << ": MAE "
                  << report.blocks[i].mae << ", RMSE " << report.blocks[i].rmse << ", R2 "
                  << report.blocks[i].r2 << "\n";
    }
    std::cout << "comparison -> " << cfg.out_dir << "/comparison.json\n";
    return 0;
}

int run_plot_data(const CommonFlags& flags) {
    const PipelineConfig cfg = effective_config(flags);
    wavecast::experiment::ComparisonReport report;
    report.variants = wavecast::experiment::ablation_variants();
    for (auto v : report.variants) {
        const std::string path =
            cfg.out_dir + "/" + wavecast::experiment::variant_name(v) + "/forecasts.csv";
        if (!fs::exists(path)) {
            throw std::runtime_error("plot-data: missing " + path + " (run ablate first)");
        }
        const auto t = wavecast::csv::read_file(path);
        std::vector<double> pred;
        for (const auto& row : t.rows) {
            if (report.predictions.empty() && report.test_truth.size() < t.rows.size()) {
                report.test_timestamps.push_back(wavecast::parse_iso8601(row[0]));
                report.test_truth.push_back(*wavecast::csv::parse_optional(row[3]));
            }
            pred.push_back(*wavecast::csv::parse_optional(row[4]));
        }
        report.blocks.push_back(wavecast::metrics::evaluate(pred, report.test_truth));
        report.predictions.push_back(std::move(pred));
    }
    wavecast::experiment::emit_plot_data(report, cfg.out_dir);
    std::cout << "plot data -> " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Significant-wave-height forecasting pipeline "
                 "(STL + FFT/STFT features, TCN-LSTM network)"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string feature = "WVHT";
    bool all_features = false;

    CLI::App* fetch = app.add_subcommand("fetch", "Download NDBC stdmet files into the cache");
    add_common_flags(fetch, flags);

    CLI::App* prepare =
        app.add_subcommand("prepare", "Ingest, repair, encode and scale the feature table");
    add_common_flags(prepare, flags);

    CLI::App* decompose =
        app.add_subcommand("decompose", "Write trend/seasonal/residual CSV for a feature");
    add_common_flags(decompose, flags);
    decompose->add_option("--feature", feature, "Feature column to decompose");
    decompose->add_flag("--all", all_features, "Decompose every column");

    CLI::App* spectra =
        app.add_subcommand("spectra", "Write spectrum and spectrogram CSVs for a feature");
    add_common_flags(spectra, flags);
    spectra->add_option("--feature", feature, "Feature column to transform");

    CLI::App* train = app.add_subcommand("train", "Train the network on the configured split");
    add_common_flags(train, flags);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Evaluate a trained checkpoint on the test split");
    add_common_flags(evaluate, flags);

    CLI::App* ablate = app.add_subcommand("ablate", "Run the five-variant ablation suite");
    add_common_flags(ablate, flags);

    CLI::App* plot_data =
        app.add_subcommand("plot-data", "Emit plot-ready CSVs from completed runs");
    add_common_flags(plot_data, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (fetch->parsed()) {
            return run_fetch(flags);
        }
        if (prepare->parsed()) {
            return run_prepare(flags);
        }
        if (decompose->parsed()) {
            return run_decompose(flags, feature, all_features);
        }
        if (spectra->parsed()) {
            return run_spectra(flags, feature);
        }
        if (train->parsed()) {
            return run_train(flags);
        }
        if (evaluate->parsed()) {
            return run_evaluate(flags);
        }
        if (ablate->parsed()) {
            return run_ablate(flags);
        }
        if (plot_data->parsed()) {
            return run_plot_data(flags);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
