#include "wavecast/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wavecast/csv.hpp"
#include "wavecast/synthetic.hpp"

namespace wavecast::experiment {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument("config: unknown key '" + key + "' in " + scope);
        }
    }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string metrics_csv_text(const metrics::MetricsBlock& b) {
    std::ostringstream os;
    os << "metric,value\n";
    os << "rmse," << csv::format_double(b.rmse) << "\n";
    os << "mae," << csv::format_double(b.mae) << "\n";
    os << "smape," << csv::format_double(b.smape) << "\n";
    os << "r2," << csv::format_double(b.r2) << "\n";
    os << "cc," << csv::format_double(b.cc) << "\n";
    os << "cc_pearson," << csv::format_double(b.cc_pearson) << "\n";
    os << "n," << b.n << "\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

}  // namespace

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::Baseline:
            return "baseline";
        case Variant::NoStl:
            return "dstl";
        case Variant::NoFft:
            return "dfft";
        case Variant::NoStft:
            return "dstft";
        case Variant::NoBoth:
            return "dboth";
        case Variant::RawTcnLstm:
            return "raw";
    }
    throw std::logic_error("variant_name: unreachable");
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : {Variant::Baseline, Variant::NoStl, Variant::NoFft, Variant::NoStft,
                      Variant::NoBoth, Variant::RawTcnLstm}) {
        if (variant_name(v) == name) {
            return v;
        }
    }
    throw std::invalid_argument("unknown variant '" + name +
                                "' (expected baseline|dstl|dfft|dstft|dboth|raw)");
}

std::vector<Variant> ablation_variants() {
    return {Variant::Baseline, Variant::NoStl, Variant::NoFft, Variant::NoStft, Variant::NoBoth};
}

Timestamp PipelineConfig::boundary() const { return parse_iso8601(split_boundary); }

std::string PipelineConfig::to_json() const {
    json j;
    j["station"] = station;
    j["years"] = years;
    j["split_boundary"] = split_boundary;
    j["mode"] = paper_faithful ? "paper-faithful" : "strict";
    j["variant"] = variant_name(variant);
    j["data_dir"] = data_dir;
    j["out_dir"] = out_dir;
    j["allow_network"] = allow_network;
    j["dump_features"] = dump_features;
    j["synthetic"] = synthetic;
    j["synthetic_hours"] = synthetic_hours;
    j["synthetic_seed"] = synthetic_seed;
    j["base_features"] = prep.base_features;
    j["angle_features"] = prep.angle_features;
    j["stl"] = {{"period", stl.period},
                {"seasonal_span", stl.seasonal_span},
                {"trend_span", stl.trend_span},
                {"lowpass_span", stl.lowpass_span},
                {"inner_iters", stl.inner_iters},
                {"outer_iters", stl.outer_iters},
                {"loess_degree", stl.loess_degree},
                {"convergence_tol", stl.convergence_tol}};
    j["spectral"] = {{"k", spectral.k},
                     {"threshold", spectral.threshold},
                     {"nperseg", spectral.nperseg},
                     {"noverlap", spectral.noverlap}};
    j["features"] = {{"lookback", features.lookback},
                     {"horizon", features.horizon},
                     {"max_gap_hours", features.max_gap_hours}};
    j["model"] = {{"kernel", model.kernel},
                  {"channels", model.channels},
                  {"dilations", model.dilations},
                  {"dropout", model.dropout},
                  {"canonical_residual", model.canonical_residual},
                  {"lstm_hidden", model.lstm_hidden},
                  {"lr", model.lr},
                  {"batch_size", model.batch_size},
                  {"max_epochs", model.max_epochs},
                  {"patience", model.patience},
                  {"val_fraction", model.val_fraction},
                  {"seed", model.seed}};
    return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    reject_unknown_keys(j,
                        {"station", "years", "split_boundary", "mode", "variant", "data_dir",
                         "out_dir", "allow_network", "dump_features", "synthetic",
                         "synthetic_hours", "synthetic_seed", "base_features", "angle_features",
                         "stl", "spectral", "features", "model"},
                        "top level");
    PipelineConfig c;
    read_if(j, "station", c.station);
    read_if(j, "years", c.years);
    read_if(j, "split_boundary", c.split_boundary);
    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "strict") {
            c.paper_faithful = false;
        } else if (mode == "paper-faithful") {
            c.paper_faithful = true;
        } else {
            throw std::invalid_argument("config: mode must be strict or paper-faithful");
        }
    }
    if (j.contains("variant")) {
        c.variant = variant_from_name(j.at("variant").get<std::string>());
    }
    read_if(j, "data_dir", c.data_dir);
    read_if(j, "out_dir", c.out_dir);
    read_if(j, "allow_network", c.allow_network);
    read_if(j, "dump_features", c.dump_features);
    read_if(j, "synthetic", c.synthetic);
    read_if(j, "synthetic_hours", c.synthetic_hours);
    read_if(j, "synthetic_seed", c.synthetic_seed);
    read_if(j, "base_features", c.prep.base_features);
    read_if(j, "angle_features", c.prep.angle_features);
    if (j.contains("stl")) {
        const json& s = j.at("stl");
        reject_unknown_keys(s,
                            {"period", "seasonal_span", "trend_span", "lowpass_span",
                             "inner_iters", "outer_iters", "loess_degree", "convergence_tol"},
                            "stl");
        read_if(s, "period", c.stl.period);
        read_if(s, "seasonal_span", c.stl.seasonal_span);
        read_if(s, "trend_span", c.stl.trend_span);
        read_if(s, "lowpass_span", c.stl.lowpass_span);
        read_if(s, "inner_iters", c.stl.inner_iters);
        read_if(s, "outer_iters", c.stl.outer_iters);
        read_if(s, "loess_degree", c.stl.loess_degree);
        read_if(s, "convergence_tol", c.stl.convergence_tol);
    }
    if (j.contains("spectral")) {
        const json& s = j.at("spectral");
        reject_unknown_keys(s, {"k", "threshold", "nperseg", "noverlap"}, "spectral");
        read_if(s, "k", c.spectral.k);
        read_if(s, "threshold", c.spectral.threshold);
        read_if(s, "nperseg", c.spectral.nperseg);
        read_if(s, "noverlap", c.spectral.noverlap);
    }
    if (j.contains("features")) {
        const json& s = j.at("features");
        reject_unknown_keys(s, {"lookback", "horizon", "max_gap_hours"}, "features");
        read_if(s, "lookback", c.features.lookback);
        read_if(s, "horizon", c.features.horizon);
        read_if(s, "max_gap_hours", c.features.max_gap_hours);
    }
    if (j.contains("model")) {
        const json& s = j.at("model");
        reject_unknown_keys(s,
                            {"kernel", "channels", "dilations", "dropout", "canonical_residual",
                             "lstm_hidden", "lr", "batch_size", "max_epochs", "patience",
                             "val_fraction", "seed"},
                            "model");
        read_if(s, "kernel", c.model.kernel);
        read_if(s, "channels", c.model.channels);
        read_if(s, "dilations", c.model.dilations);
        read_if(s, "dropout", c.model.dropout);
        read_if(s, "canonical_residual", c.model.canonical_residual);
        read_if(s, "lstm_hidden", c.model.lstm_hidden);
        read_if(s, "lr", c.model.lr);
        read_if(s, "batch_size", c.model.batch_size);
        read_if(s, "max_epochs", c.model.max_epochs);
        read_if(s, "patience", c.model.patience);
        read_if(s, "val_fraction", c.model.val_fraction);
        read_if(s, "seed", c.model.seed);
    }
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open '" + path + "'");
    }
    std::ostringstream body;
    body << in.rdbuf();
    return from_json(body.str());
}

std::string PipelineConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(to_json())));
    return buf;
}

ndbc::TimeSeriesTable ingest(const PipelineConfig& cfg) {
    if (cfg.synthetic) {
        const std::size_t hours =
            cfg.synthetic_hours > 0 ? cfg.synthetic_hours : 24 * 365 * cfg.years.size();
        return synthetic::generate_table(hours, cfg.synthetic_seed,
                                         cfg.years.empty() ? 2019 : cfg.years.front());
    }
    std::vector<ndbc::TimeSeriesTable> tables;
    for (int year : cfg.years) {
        ndbc::FetchOptions opts;
        opts.data_dir = cfg.data_dir;
        opts.allow_network = cfg.allow_network;
        const std::string body = ndbc::fetch_station_year(cfg.station, year, opts);
        tables.push_back(ndbc::parse_stdmet(body));
    }
    return ndbc::concat_years(tables);
}

namespace {

std::string hashed_key(const json& j) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

// Cache key over the fields that change ingestion.
std::string ingest_cache_key(const PipelineConfig& cfg) {
    json j;
    j["station"] = cfg.station;
    j["years"] = cfg.years;
    j["synthetic"] = cfg.synthetic;
    j["synthetic_hours"] = cfg.synthetic_hours;
    j["synthetic_seed"] = cfg.synthetic_seed;
    return hashed_key(j);
}

// Cache key over the fields that change ingestion or decomposition.
std::string stage_cache_key(const PipelineConfig& cfg) {
    json j;
    j["ingest"] = ingest_cache_key(cfg);
    j["boundary"] = cfg.split_boundary;
    j["mode"] = cfg.paper_faithful ? "paper-faithful" : "strict";
    j["base_features"] = cfg.prep.base_features;
    j["angle_features"] = cfg.prep.angle_features;
    j["stl"] = {cfg.stl.period,      cfg.stl.seasonal_span, cfg.stl.trend_span,
                cfg.stl.lowpass_span, cfg.stl.inner_iters,   cfg.stl.outer_iters,
                cfg.stl.loess_degree, cfg.stl.convergence_tol};
    return hashed_key(j);
}

std::string read_stamp(const std::string& path) {
    std::ifstream in(path);
    std::string text;
    std::getline(in, text);
    return text;
}

}  // namespace

PreparedData prepare_data(const PipelineConfig& cfg, const std::string& cache_dir) {
    namespace fs = std::filesystem;
    PreparedData data;

    const std::string canonical_path =
        cache_dir.empty() ? "" : cache_dir + "/canonical.csv";
    const std::string stamp_path = canonical_path + ".stamp";
    const std::string ingest_key = ingest_cache_key(cfg);
    if (!canonical_path.empty() && fs::exists(canonical_path) &&
        read_stamp(stamp_path) == ingest_key) {
        data.raw = ndbc::read_canonical_csv(canonical_path);
    } else {
        data.raw = ingest(cfg);
        if (!canonical_path.empty()) {
            fs::create_directories(cache_dir);
            ndbc::write_canonical_csv(data.raw, canonical_path);
            write_text(stamp_path, ingest_key + "\n");
        }
    }
    if (data.raw.rows() == 0) {
        throw std::runtime_error("prepare: ingested table is empty");
    }

    preprocess::PreprocessConfig prep_cfg = cfg.prep;
    prep_cfg.scale_on_full_series = cfg.paper_faithful;
    data.prep = preprocess::preprocess_table(data.raw, cfg.boundary(), prep_cfg);

    const auto [train_rows, test_rows] =
        features::split_rows(data.prep.table.timestamps, cfg.boundary());
    (void)test_rows;
    data.train_rows = train_rows;

    const auto& table = data.prep.table;
    const std::string decomp_dir =
        cache_dir.empty() ? "" : cache_dir + "/decomp_" + stage_cache_key(cfg);

    bool loaded_from_cache = false;
    if (!decomp_dir.empty() && fs::exists(decomp_dir)) {
        loaded_from_cache = true;
        for (std::size_t c = 0; c < table.cols() && loaded_from_cache; ++c) {
            const std::string path = decomp_dir + "/" + table.names[c] + ".csv";
            if (!fs::exists(path)) {
                loaded_from_cache = false;
                break;
            }
            const csv::Table t = csv::read_file(path);
            if (t.rows.size() != table.rows()) {
                loaded_from_cache = false;
                break;
            }
            stl::StlDecomposition d;
            for (const auto& row : t.rows) {
                d.trend.push_back(*csv::parse_optional(row[2]));
                d.seasonal.push_back(*csv::parse_optional(row[3]));
                d.residual.push_back(*csv::parse_optional(row[4]));
            }
            data.decomposition[table.names[c]] = std::move(d);
        }
        if (!loaded_from_cache) {
            data.decomposition.clear();
        }
    }

    if (!loaded_from_cache) {
        // Per-column decompositions are independent; run them concurrently.
        std::vector<std::future<stl::StlDecomposition>> jobs;
        for (std::size_t c = 0; c < table.cols(); ++c) {
            jobs.push_back(std::async(std::launch::async, [&, c]() {
                if (cfg.paper_faithful) {
                    return stl::stl_decompose(table.values[c], cfg.stl);
                }
                return stl::stl_decompose_causal(table.values[c], data.train_rows, cfg.stl);
            }));
        }
        for (std::size_t c = 0; c < table.cols(); ++c) {
            data.decomposition[table.names[c]] = jobs[c].get();
        }
        if (!decomp_dir.empty()) {
            fs::create_directories(decomp_dir);
            for (std::size_t c = 0; c < table.cols(); ++c) {
                write_decomposition_csv(decomp_dir + "/" + table.names[c] + ".csv",
                                        table.timestamps, table.values[c],
                                        data.decomposition[table.names[c]]);
            }
        }
    }

    // Spectral features: the pipeline consumes the residual spectra; the
    // no-decomposition ablations consume spectra of the scaled raw columns.
    const std::size_t gsf_rows = cfg.paper_faithful ? table.rows() : data.train_rows;
    auto spectral_of = [&](const std::vector<double>& series) {
        features::SpectralFeatures f;
        const std::vector<double> head(series.begin(),
                                       series.begin() + static_cast<std::ptrdiff_t>(gsf_rows));
        const auto spectrum = spectral::global_spectrum(head);
        f.global = spectral::significant_periods(spectrum, cfg.spectral.threshold,
                                                 cfg.spectral.k);
        const auto sg = spectral::stft(series, cfg.spectral.nperseg, cfg.spectral.noverlap);
        f.dominant_frequency =
            spectral::dominant_frequency_sequence(sg, series.size()).per_sample;
        return f;
    };
    for (std::size_t c = 0; c < table.cols(); ++c) {
        data.spectral_residual[table.names[c]] =
            spectral_of(data.decomposition[table.names[c]].residual);
        data.spectral_raw[table.names[c]] = spectral_of(table.values[c]);
    }
    return data;
}

features::FeatureMatrix build_variant_features(const PreparedData& data,
                                               const PipelineConfig& cfg, Variant variant) {
    features::FeatureBuildOptions opt;
    opt.k_periods = cfg.spectral.k;
    opt.secondary_fit_rows = cfg.paper_faithful ? 0 : data.train_rows;
    bool spectra_from_raw = false;
    switch (variant) {
        case Variant::Baseline:
            opt.include_decomposition = true;
            opt.include_raw = false;
            opt.include_global_spectrum = true;
            opt.include_dominant_frequency = true;
            break;
        case Variant::NoStl:
            opt.include_decomposition = false;
            opt.include_raw = true;
            opt.include_global_spectrum = true;
            opt.include_dominant_frequency = true;
            spectra_from_raw = true;
            break;
        case Variant::NoFft:
            opt.include_decomposition = true;
            opt.include_raw = false;
            opt.include_global_spectrum = false;
            opt.include_dominant_frequency = true;
            break;
        case Variant::NoStft:
            opt.include_decomposition = true;
            opt.include_raw = false;
            opt.include_global_spectrum = true;
            opt.include_dominant_frequency = false;
            break;
        case Variant::NoBoth:
            opt.include_decomposition = true;
            opt.include_raw = false;
            opt.include_global_spectrum = false;
            opt.include_dominant_frequency = false;
            break;
        case Variant::RawTcnLstm:
            opt.include_decomposition = false;
            opt.include_raw = true;
            opt.include_global_spectrum = false;
            opt.include_dominant_frequency = false;
            break;
    }
    return features::build_feature_matrix(
        data.prep.table, data.decomposition,
        spectra_from_raw ? data.spectral_raw : data.spectral_residual, opt);
}

RunResult run_variant(const PreparedData& data, const PipelineConfig& cfg, Variant variant,
                      const std::string& run_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(run_dir);

    const features::FeatureMatrix fm = build_variant_features(data, cfg, variant);
    if (cfg.dump_features) {
        features::write_feature_matrix(fm, run_dir + "/features.csv",
                                       run_dir + "/features_schema.json");
    }
    const auto& target = data.prep.table.column("WVHT");
    const features::SampleSet all = features::make_windows(
        fm, target, cfg.features.lookback, cfg.features.horizon, cfg.features.max_gap_hours);
    auto [train_set, test_set] = features::split_train_test(all, cfg.boundary());
    if (train_set.num_samples() == 0 || test_set.num_samples() == 0) {
        throw std::runtime_error("run_variant: empty train or test split");
    }

    model::TcnLstmModel net = model::build_model(cfg.model, fm.cols());
    RunResult result;
    result.report = model::train(net, train_set);
    result.test_pred = model::predict(net, test_set);
    result.test_truth = test_set.targets;
    result.test_timestamps = test_set.sample_timestamps;
    result.test_scaled = metrics::evaluate(result.test_pred, result.test_truth,
                                           metrics::SmapePolicy::SkipUndefined);

    std::vector<double> pred_m(result.test_pred.size()), truth_m(result.test_pred.size());
    for (std::size_t i = 0; i < result.test_pred.size(); ++i) {
        pred_m[i] = data.prep.scaler.invert("WVHT", result.test_pred[i]);
        truth_m[i] = data.prep.scaler.invert("WVHT", result.test_truth[i]);
    }
    result.test_meters = metrics::evaluate(pred_m, truth_m, metrics::SmapePolicy::SkipUndefined);

    const auto persist = model::persistence_baseline(test_set);
    result.persistence_scaled =
        metrics::evaluate(persist, test_set.targets, metrics::SmapePolicy::SkipUndefined);

    result.report.final_metrics = result.test_scaled;
    result.report.final_metrics_meters = result.test_meters;
    result.run_dir = run_dir;
    PipelineConfig effective = cfg;
    effective.variant = variant;
    effective.out_dir = run_dir;
    result.config_hash = effective.hash();

    // Persisted artifacts.
    write_text(run_dir + "/config.json", effective.to_json() + "\n");
    data.prep.scaler.save(run_dir + "/scalers.json");
    fm.secondary.save(run_dir + "/secondary_scaler.json");
    model::save_checkpoint(net, run_dir + "/checkpoint.json", run_dir + "/checkpoint.bin",
                           result.config_hash);
    write_text(run_dir + "/report.json", result.report.to_json() + "\n");
    write_text(run_dir + "/metrics.csv", metrics_csv_text(result.test_scaled));
    write_text(run_dir + "/metrics_meters.csv", metrics_csv_text(result.test_meters));
    write_text(run_dir + "/metrics_persistence.csv", metrics_csv_text(result.persistence_scaled));

    csv::Table forecasts;
    forecasts.header = {"timestamp", "wvht_true_m", "wvht_pred_m", "scaled_true", "scaled_pred"};
    for (std::size_t i = 0; i < result.test_pred.size(); ++i) {
        forecasts.rows.push_back({format_iso8601(result.test_timestamps[i]),
                                  csv::format_double(truth_m[i]), csv::format_double(pred_m[i]),
                                  csv::format_double(result.test_truth[i]),
                                  csv::format_double(result.test_pred[i])});
    }
    csv::write_file(run_dir + "/forecasts.csv", forecasts);

    json manifest;
    manifest["variant"] = variant_name(variant);
    manifest["config_hash"] = result.config_hash;
    manifest["seed"] = cfg.model.seed;
    json files = json::array({"config.json", "scalers.json", "secondary_scaler.json",
                              "checkpoint.json", "checkpoint.bin", "report.json",
                              "metrics.csv", "metrics_meters.csv", "metrics_persistence.csv",
                              "forecasts.csv"});
    if (cfg.dump_features) {
        files.push_back("features.csv");
        files.push_back("features_schema.json");
    }
    manifest["files"] = files;
    write_text(run_dir + "/manifest.json", manifest.dump(2) + "\n");
    return result;
}

RunResult run_pipeline(const PipelineConfig& cfg) {
    try {
        const PreparedData data = prepare_data(cfg, cfg.out_dir);
        return run_variant(data, cfg, cfg.variant, cfg.out_dir);
    } catch (const std::exception& e) {
        throw std::runtime_error("pipeline[" + variant_name(cfg.variant) + "]: " + e.what());
    }
}

ComparisonReport run_ablation_suite(const PipelineConfig& base_cfg) {
    const PreparedData data = prepare_data(base_cfg, base_cfg.out_dir);
    ComparisonReport report;
    report.seed = base_cfg.model.seed;
    report.config_hash = base_cfg.hash();
    report.variants = ablation_variants();

    for (Variant v : report.variants) {
        const std::string dir = base_cfg.out_dir + "/" + variant_name(v);
        const RunResult r = run_variant(data, base_cfg, v, dir);
        if (report.test_truth.empty()) {
            report.test_truth = r.test_truth;
            report.test_timestamps = r.test_timestamps;
            report.persistence = r.persistence_scaled;
        } else if (report.test_truth != r.test_truth) {
            throw std::runtime_error("ablation: variants disagree on test targets");
        }
        report.blocks.push_back(r.test_scaled);
        report.predictions.push_back(r.test_pred);
    }
    report.mae_delta_vs_baseline.resize(report.blocks.size());
    for (std::size_t i = 0; i < report.blocks.size(); ++i) {
        report.mae_delta_vs_baseline[i] = report.blocks[i].mae - report.blocks[0].mae;
    }
    write_text(base_cfg.out_dir + "/comparison.json", report.to_json() + "\n");
    emit_plot_data(report, base_cfg.out_dir);

    json manifest;
    manifest["config_hash"] = report.config_hash;
    manifest["seed"] = report.seed;
    json runs = json::array();
    for (Variant v : report.variants) {
        runs.push_back(variant_name(v));
    }
    manifest["runs"] = runs;
    manifest["files"] = {"comparison.json", "scatter.csv", "series.csv", "metrics_long.csv",
                         "error_distribution.csv"};
    write_text(base_cfg.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    return report;
}

std::string ComparisonReport::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    json rows = json::array();
    for (std::size_t i = 0; i < variants.size(); ++i) {
        rows.push_back({{"variant", variant_name(variants[i])},
                        {"metrics", json::parse(blocks[i].to_json())},
                        {"mae_delta_vs_baseline", mae_delta_vs_baseline[i]}});
    }
    j["variants"] = rows;
    j["persistence"] = json::parse(persistence.to_json());
    return j.dump(2);
}

void emit_plot_data(const ComparisonReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    csv::Table scatter;
    scatter.header = {"truth"};
    for (Variant v : report.variants) {
        scatter.header.push_back("pred_" + variant_name(v));
    }
    for (std::size_t i = 0; i < report.test_truth.size(); ++i) {
        std::vector<std::string> row{csv::format_double(report.test_truth[i])};
        for (std::size_t v = 0; v < report.variants.size(); ++v) {
            row.push_back(csv::format_double(report.predictions[v][i]));
        }
        scatter.rows.push_back(std::move(row));
    }
    csv::write_file(out_dir + "/scatter.csv", scatter);

    csv::Table series;
    series.header = {"timestamp", "truth"};
    for (Variant v : report.variants) {
        series.header.push_back("pred_" + variant_name(v));
    }
    for (std::size_t i = 0; i < report.test_truth.size(); ++i) {
        std::vector<std::string> row{format_iso8601(report.test_timestamps[i]),
                                     csv::format_double(report.test_truth[i])};
        for (std::size_t v = 0; v < report.variants.size(); ++v) {
            row.push_back(csv::format_double(report.predictions[v][i]));
        }
        series.rows.push_back(std::move(row));
    }
    csv::write_file(out_dir + "/series.csv", series);

    csv::Table metrics_long;
    metrics_long.header = {"variant", "metric", "value"};
    for (std::size_t v = 0; v < report.variants.size(); ++v) {
        const auto& b = report.blocks[v];
        const std::pair<const char*, double> rows[5] = {{"rmse", b.rmse},
                                                        {"mae", b.mae},
                                                        {"smape", b.smape},
                                                        {"r2", b.r2},
                                                        {"cc", b.cc}};
        for (const auto& [name, value] : rows) {
            metrics_long.rows.push_back(
                {variant_name(report.variants[v]), name, csv::format_double(value)});
        }
    }
    csv::write_file(out_dir + "/metrics_long.csv", metrics_long);

    csv::Table errors;
    errors.header = {"variant", "residual"};
    for (std::size_t v = 0; v < report.variants.size(); ++v) {
        for (std::size_t i = 0; i < report.test_truth.size(); ++i) {
            errors.rows.push_back(
                {variant_name(report.variants[v]),
                 csv::format_double(report.predictions[v][i] - report.test_truth[i])});
        }
    }
    csv::write_file(out_dir + "/error_distribution.csv", errors);
}

void write_decomposition_csv(const std::string& path, const std::vector<Timestamp>& ts,
                             const std::vector<double>& original,
                             const stl::StlDecomposition& d) {
    csv::Table t;
    t.header = {"timestamp", "original", "trend", "seasonal", "residual"};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        t.rows.push_back({format_iso8601(ts[i]), csv::format_double(original[i]),
                          csv::format_double(d.trend[i]), csv::format_double(d.seasonal[i]),
                          csv::format_double(d.residual[i])});
    }
    csv::write_file(path, t);
}

void write_spectrum_csv(const std::string& path, const spectral::Spectrum& spec) {
    csv::Table t;
    t.header = {"frequency", "amplitude"};
    for (std::size_t i = 0; i < spec.frequencies.size(); ++i) {
        t.rows.push_back(
            {csv::format_double(spec.frequencies[i]), csv::format_double(spec.amplitudes[i])});
    }
    csv::write_file(path, t);
}

void write_spectrogram_csv(const std::string& path, const spectral::Spectrogram& sg) {
    csv::Table t;
    t.header = {"frame_time", "frequency", "magnitude"};
    for (std::size_t m = 0; m < sg.frames(); ++m) {
        for (std::size_t k = 0; k < sg.frequencies.size(); ++k) {
            t.rows.push_back({csv::format_double(sg.frame_times[m]),
                              csv::format_double(sg.frequencies[k]),
                              csv::format_double(sg.magnitudes[m][k])});
        }
    }
    csv::write_file(path, t);
}

}  // namespace wavecast::experiment
