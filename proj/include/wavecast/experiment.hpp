#pragma once

#include <map>
#include <string>
#include <vector>

#include "wavecast/features.hpp"
#include "wavecast/metrics.hpp"
#include "wavecast/model.hpp"
#include "wavecast/ndbc.hpp"
#include "wavecast/preprocess.hpp"
#include "wavecast/spectral.hpp"
#include "wavecast/stl.hpp"

namespace wavecast::experiment {

// Ablation structure: the Baseline uses decomposition + global spectrum +
// dominant-frequency features; each variant removes one group. NoStl and
// RawTcnLstm feed the scaled raw columns instead of the decomposition, with
// NoStl keeping the spectral features (computed on the raw series).
enum class Variant { Baseline, NoStl, NoFft, NoStft, NoBoth, RawTcnLstm };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);
std::vector<Variant> ablation_variants();  // the five Table-style rows

struct SpectralConfig {
    std::size_t k = 3;
    double threshold = 0.2;
    std::size_t nperseg = 128;
    std::size_t noverlap = 64;
};

struct FeatureConfig {
    std::size_t lookback = 24;
    std::size_t horizon = 1;
    double max_gap_hours = 3.0;
};

struct PipelineConfig {
    std::string station = "41008";
    std::vector<int> years = {2019, 2020, 2021, 2022};
    std::string split_boundary = "2022-01-01T00:00:00Z";
    bool paper_faithful = false;  // mode: strict (default) or paper-faithful
    Variant variant = Variant::Baseline;
    std::string data_dir = "data";
    std::string out_dir = "runs/run";
    bool allow_network = false;
    bool dump_features = false;  // persist features.csv + schema per run

    bool synthetic = false;  // replace ingestion with the generator
    std::size_t synthetic_hours = 0;
    std::uint64_t synthetic_seed = 20190101;

    preprocess::PreprocessConfig prep;
    stl::StlConfig stl;
    SpectralConfig spectral;
    FeatureConfig features;
    model::ModelConfig model;

    std::string to_json() const;
    // Rejects unknown keys at every level; missing keys keep defaults.
    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig load(const std::string& path);
    std::string hash() const;
    Timestamp boundary() const;
};

// Variant-independent pipeline state: ingested rows, the scaled clean table,
// decompositions, and spectral features of both the residual and raw series.
struct PreparedData {
    ndbc::TimeSeriesTable raw;
    preprocess::Preprocessed prep;
    std::size_t train_rows = 0;
    std::map<std::string, stl::StlDecomposition> decomposition;
    std::map<std::string, features::SpectralFeatures> spectral_residual;
    std::map<std::string, features::SpectralFeatures> spectral_raw;
};

// With a non-empty cache_dir, the ingested table and the per-column
// decompositions persist across invocations (keyed by the relevant config
// fields), so repeated stage commands skip the expensive steps.
PreparedData prepare_data(const PipelineConfig& cfg, const std::string& cache_dir = "");

features::FeatureMatrix build_variant_features(const PreparedData& data,
                                               const PipelineConfig& cfg, Variant variant);

struct RunResult {
    model::TrainReport report;
    metrics::MetricsBlock test_scaled;
    metrics::MetricsBlock test_meters;
    metrics::MetricsBlock persistence_scaled;
    std::vector<Timestamp> test_timestamps;
    std::vector<double> test_truth;   // scaled
    std::vector<double> test_pred;    // scaled
    std::string run_dir;
    std::string config_hash;
};

// Full pipeline: ingest -> preprocess -> decompose -> spectra -> features ->
// train -> evaluate, with artifacts persisted under cfg.out_dir.
RunResult run_pipeline(const PipelineConfig& cfg);

// Variant of run_pipeline that reuses prepared data (the ablation driver).
RunResult run_variant(const PreparedData& data, const PipelineConfig& cfg, Variant variant,
                      const std::string& run_dir);

struct ComparisonReport {
    std::vector<Variant> variants;
    std::vector<metrics::MetricsBlock> blocks;       // scaled space, per variant
    std::vector<double> mae_delta_vs_baseline;
    metrics::MetricsBlock persistence;
    std::vector<Timestamp> test_timestamps;
    std::vector<double> test_truth;
    std::vector<std::vector<double>> predictions;    // per variant
    std::string config_hash;
    std::uint64_t seed = 0;

    std::string to_json() const;
};

ComparisonReport run_ablation_suite(const PipelineConfig& base_cfg);

// scatter.csv, series.csv, metrics_long.csv, error_distribution.csv under
// `out_dir` — the plot-ready data files.
void emit_plot_data(const ComparisonReport& report, const std::string& out_dir);

// Stage helpers shared with the CLI.
ndbc::TimeSeriesTable ingest(const PipelineConfig& cfg);
void write_decomposition_csv(const std::string& path, const std::vector<Timestamp>& ts,
                             const std::vector<double>& original,
                             const stl::StlDecomposition& d);
void write_spectrum_csv(const std::string& path, const spectral::Spectrum& spec);
void write_spectrogram_csv(const std::string& path, const spectral::Spectrogram& sg);

}  // namespace wavecast::experiment
