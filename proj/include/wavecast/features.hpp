#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavecast/preprocess.hpp"
#include "wavecast/spectral.hpp"
#include "wavecast/stl.hpp"
#include "wavecast/time_utils.hpp"

namespace wavecast::features {

// Spectral features of one base column: global dominant periods/amplitudes
// plus the per-sample dominant STFT frequency.
struct SpectralFeatures {
    spectral::GlobalSpectralFeatures global;
    std::vector<double> dominant_frequency;  // aligned to table rows
};

struct FeatureMatrix {
    std::vector<Timestamp> timestamps;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;  // columns[c][row]
    // Secondary min-max fitted on training rows; inverting it recovers the
    // raw component values.
    preprocess::ScalerParams secondary;

    std::size_t rows() const { return timestamps.size(); }
    std::size_t cols() const { return names.size(); }
    int column_index(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
};

struct FeatureBuildOptions {
    std::size_t k_periods = 3;       // retained dominant periods per feature
    bool include_decomposition = true;  // *_trend / *_seasonal / *_residual
    bool include_raw = false;           // the scaled base column itself
    bool include_global_spectrum = true;  // *_gsf_period_i / *_gsf_amp_i
    bool include_dominant_frequency = true;  // *_domfreq
    std::size_t secondary_fit_rows = 0;      // 0 = all rows
};

// Concatenates the requested component columns for every clean-table column
// and re-scales each to [0,1] with a secondary scaler fitted on the training
// rows. Constant columns (the broadcast global features) map to zero.
FeatureMatrix build_feature_matrix(
    const preprocess::CleanTable& clean,
    const std::map<std::string, stl::StlDecomposition>& decomposition,
    const std::map<std::string, SpectralFeatures>& spectral_features,
    const FeatureBuildOptions& options);

// Supervised windows: inputs[i] covers L consecutive rows, the target is the
// scaled forecast column h rows past the window end.
struct SampleSet {
    std::size_t lookback = 0;
    std::size_t horizon = 0;
    std::size_t feature_count = 0;
    std::vector<double> inputs;              // [num_samples, L, C] row-major
    std::vector<double> targets;             // [num_samples]
    std::vector<Timestamp> sample_timestamps;  // target instants
    std::vector<double> last_observed;       // target column at each window end

    std::size_t num_samples() const { return targets.size(); }
    std::span<const double> sample_input(std::size_t i) const;

    void save(const std::string& inputs_path, const std::string& meta_path) const;
};

// Windows never span a recorded gap larger than `max_gap_hours`.
SampleSet make_windows(const FeatureMatrix& fm, std::span<const double> target,
                       std::size_t lookback, std::size_t horizon, double max_gap_hours = 3.0);

std::pair<SampleSet, SampleSet> split_train_test(const SampleSet& samples, Timestamp boundary);

// Row-level chronological split of a feature matrix (all rows with timestamp
// strictly before the boundary go left).
std::pair<std::size_t, std::size_t> split_rows(const std::vector<Timestamp>& timestamps,
                                               Timestamp boundary);

struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;   // symmetric, unit diagonal
    std::vector<bool> zero_variance;

    void write_csv(const std::string& path) const;
};

CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns);
CorrelationMatrix correlation_matrix(const FeatureMatrix& fm);

// Persist the matrix as CSV (timestamp + named columns) plus a JSON schema
// sidecar carrying the column list and the secondary-scaler parameters.
void write_feature_matrix(const FeatureMatrix& fm, const std::string& csv_path,
                          const std::string& schema_path);

// Simple binary tensor container: magic 'WTNS', little-endian u32 version and
// rank, u64 dims, zero padding to a 32-byte boundary, float64 payload.
void write_tensor_file(const std::string& path, const std::vector<std::size_t>& shape,
                       std::span<const double> data);
std::pair<std::vector<std::size_t>, std::vector<double>> read_tensor_file(
    const std::string& path);

}  // namespace wavecast::features
