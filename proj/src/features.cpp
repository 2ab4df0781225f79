#include "wavecast/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "wavecast/csv.hpp"

namespace wavecast::features {

int FeatureMatrix::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

const std::vector<double>& FeatureMatrix::column(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) {
        throw std::invalid_argument("FeatureMatrix: unknown column '" + name + "'");
    }
    return columns[static_cast<std::size_t>(idx)];
}

FeatureMatrix build_feature_matrix(
    const preprocess::CleanTable& clean,
    const std::map<std::string, stl::StlDecomposition>& decomposition,
    const std::map<std::string, SpectralFeatures>& spectral_features,
    const FeatureBuildOptions& options) {
    const std::size_t n = clean.rows();
    if (n == 0) {
        throw std::invalid_argument("build_feature_matrix: empty table");
    }

    FeatureMatrix fm;
    fm.timestamps = clean.timestamps;

    auto push_column = [&](const std::string& name, std::vector<double> column) {
        if (column.size() != n) {
            throw std::invalid_argument("build_feature_matrix: column '" + name +
                                        "' is not aligned to the table timestamps");
        }
        fm.names.push_back(name);
        fm.columns.push_back(std::move(column));
    };

    for (std::size_t c = 0; c < clean.cols(); ++c) {
        const std::string& base = clean.names[c];
        if (options.include_raw) {
            push_column(base, clean.values[c]);
        }
        if (options.include_decomposition) {
            const auto it = decomposition.find(base);
            if (it == decomposition.end()) {
                throw std::invalid_argument("build_feature_matrix: missing decomposition for '" +
                                            base + "'");
            }
            push_column(base + "_trend", it->second.trend);
            push_column(base + "_seasonal", it->second.seasonal);
            push_column(base + "_residual", it->second.residual);
        }
        if (options.include_global_spectrum || options.include_dominant_frequency) {
            const auto it = spectral_features.find(base);
            if (it == spectral_features.end()) {
                throw std::invalid_argument(
                    "build_feature_matrix: missing spectral features for '" + base + "'");
            }
            if (options.include_global_spectrum) {
                for (std::size_t i = 0; i < options.k_periods; ++i) {
                    const auto& gsf = it->second.global;
                    const double period =
                        i < gsf.dominant_periods.size() ? gsf.dominant_periods[i] : 0.0;
                    const double amp =
                        i < gsf.dominant_amplitudes.size() ? gsf.dominant_amplitudes[i] : 0.0;
                    push_column(base + "_gsf_period_" + std::to_string(i),
                                std::vector<double>(n, period));
                    push_column(base + "_gsf_amp_" + std::to_string(i),
                                std::vector<double>(n, amp));
                }
            }
            if (options.include_dominant_frequency) {
                push_column(base + "_domfreq", it->second.dominant_frequency);
            }
        }
    }

    // Secondary scaling to [0,1]; constant columns carry no signal and map
    // to zero instead of failing the fit.
    const std::size_t fit_rows =
        options.secondary_fit_rows == 0 ? n : std::min(options.secondary_fit_rows, n);
    fm.secondary.names = fm.names;
    fm.secondary.mins.resize(fm.cols());
    fm.secondary.maxs.resize(fm.cols());
    fm.secondary.apply_minmax.assign(fm.cols(), true);
    for (std::size_t c = 0; c < fm.cols(); ++c) {
        double lo = fm.columns[c][0];
        double hi = lo;
        for (std::size_t r = 0; r < fit_rows; ++r) {
            lo = std::min(lo, fm.columns[c][r]);
            hi = std::max(hi, fm.columns[c][r]);
        }
        fm.secondary.mins[c] = lo;
        fm.secondary.maxs[c] = hi;
        if (hi == lo) {
            fm.secondary.apply_minmax[c] = false;
            std::fill(fm.columns[c].begin(), fm.columns[c].end(), 0.0);
            fm.secondary.mins[c] = 0.0;
            fm.secondary.maxs[c] = 0.0;
            continue;
        }
        for (double& v : fm.columns[c]) {
            v = (v - lo) / (hi - lo);
        }
    }
    return fm;
}

std::span<const double> SampleSet::sample_input(std::size_t i) const {
    const std::size_t stride = lookback * feature_count;
    return {inputs.data() + i * stride, stride};
}

SampleSet make_windows(const FeatureMatrix& fm, std::span<const double> target,
                       std::size_t lookback, std::size_t horizon, double max_gap_hours) {
    if (lookback < 1 || horizon < 1) {
        throw std::invalid_argument("make_windows: lookback and horizon must be >= 1");
    }
    const std::size_t n = fm.rows();
    if (target.size() != n) {
        throw std::invalid_argument("make_windows: target length does not match the matrix");
    }
    if (n < lookback + horizon) {
        throw std::invalid_argument("make_windows: not enough rows for one window (need " +
                                    std::to_string(lookback + horizon) + ", have " +
                                    std::to_string(n) + ")");
    }
    const std::size_t cols = fm.cols();
    const double max_gap_seconds = max_gap_hours * static_cast<double>(kSecondsPerHour);

    SampleSet set;
    set.lookback = lookback;
    set.horizon = horizon;
    set.feature_count = cols;

    const std::size_t candidates = n - lookback - horizon + 1;
    set.inputs.reserve(candidates * lookback * cols);
    for (std::size_t start = 0; start < candidates; ++start) {
        const std::size_t window_end = start + lookback - 1;
        const std::size_t target_row = window_end + horizon;
        bool crosses_gap = false;
        for (std::size_t r = start + 1; r <= target_row; ++r) {
            if (static_cast<double>(fm.timestamps[r] - fm.timestamps[r - 1]) > max_gap_seconds) {
                crosses_gap = true;
                break;
            }
        }
        if (crosses_gap) {
            continue;
        }
        for (std::size_t r = start; r <= window_end; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                set.inputs.push_back(fm.columns[c][r]);
            }
        }
        set.targets.push_back(target[target_row]);
        set.sample_timestamps.push_back(fm.timestamps[target_row]);
        set.last_observed.push_back(target[window_end]);
    }
    return set;
}

std::pair<SampleSet, SampleSet> split_train_test(const SampleSet& samples, Timestamp boundary) {
    if (samples.num_samples() == 0) {
        throw std::invalid_argument("split_train_test: empty sample set");
    }
    if (boundary < samples.sample_timestamps.front() ||
        boundary > samples.sample_timestamps.back()) {
        throw std::invalid_argument("split_train_test: boundary " + format_iso8601(boundary) +
                                    " outside the covered range [" +
                                    format_iso8601(samples.sample_timestamps.front()) + ", " +
                                    format_iso8601(samples.sample_timestamps.back()) + "]");
    }

    SampleSet train, test;
    for (SampleSet* part : {&train, &test}) {
        part->lookback = samples.lookback;
        part->horizon = samples.horizon;
        part->feature_count = samples.feature_count;
    }
    const std::size_t stride = samples.lookback * samples.feature_count;
    for (std::size_t i = 0; i < samples.num_samples(); ++i) {
        SampleSet& part = samples.sample_timestamps[i] < boundary ? train : test;
        const auto input = samples.sample_input(i);
        part.inputs.insert(part.inputs.end(), input.begin(), input.end());
        part.targets.push_back(samples.targets[i]);
        part.sample_timestamps.push_back(samples.sample_timestamps[i]);
        part.last_observed.push_back(samples.last_observed[i]);
        (void)stride;
    }
    if (test.num_samples() == 0) {
        std::cerr << "split_train_test: warning: test split is empty (boundary at the series "
                     "end)\n";
    }
    return {std::move(train), std::move(test)};
}

std::pair<std::size_t, std::size_t> split_rows(const std::vector<Timestamp>& timestamps,
                                               Timestamp boundary) {
    if (timestamps.empty() || boundary < timestamps.front() || boundary > timestamps.back()) {
        throw std::invalid_argument("split_rows: boundary outside the covered range");
    }
    const auto it = std::lower_bound(timestamps.begin(), timestamps.end(), boundary);
    const std::size_t left = static_cast<std::size_t>(it - timestamps.begin());
    return {left, timestamps.size() - left};
}

CorrelationMatrix correlation_matrix(const std::vector<std::string>& names,
                                     const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || columns.front().size() < 2) {
        throw std::invalid_argument("correlation_matrix: need at least 2 rows");
    }
    const std::size_t cols = columns.size();
    const std::size_t n = columns.front().size();

    std::vector<double> mean(cols, 0.0), sd(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        for (double v : columns[c]) {
            mean[c] += v;
        }
        mean[c] /= static_cast<double>(n);
        for (double v : columns[c]) {
            sd[c] += (v - mean[c]) * (v - mean[c]);
        }
        sd[c] = std::sqrt(sd[c]);
    }

    CorrelationMatrix cm;
    cm.names = names;
    cm.zero_variance.resize(cols);
    cm.values.assign(cols, std::vector<double>(cols, 0.0));
    for (std::size_t c = 0; c < cols; ++c) {
        cm.zero_variance[c] = sd[c] == 0.0;
        cm.values[c][c] = 1.0;
    }
    for (std::size_t a = 0; a < cols; ++a) {
        for (std::size_t b = a + 1; b < cols; ++b) {
            double r = 0.0;
            if (!cm.zero_variance[a] && !cm.zero_variance[b]) {
                double cov = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    cov += (columns[a][i] - mean[a]) * (columns[b][i] - mean[b]);
                }
                r = cov / (sd[a] * sd[b]);
            }
            cm.values[a][b] = r;
            cm.values[b][a] = r;
        }
    }
    return cm;
}

CorrelationMatrix correlation_matrix(const FeatureMatrix& fm) {
    return correlation_matrix(fm.names, fm.columns);
}

void CorrelationMatrix::write_csv(const std::string& path) const {
    csv::Table t;
    t.header.push_back("feature");
    for (const auto& n : names) {
        t.header.push_back(n);
    }
    for (std::size_t r = 0; r < names.size(); ++r) {
        std::vector<std::string> row;
        row.push_back(names[r]);
        for (std::size_t c = 0; c < names.size(); ++c) {
            row.push_back(csv::format_double(values[r][c]));
        }
        t.rows.push_back(std::move(row));
    }
    csv::write_file(path, t);
}

void write_feature_matrix(const FeatureMatrix& fm, const std::string& csv_path,
                          const std::string& schema_path) {
    csv::Table t;
    t.header.push_back("timestamp");
    for (const auto& name : fm.names) {
        t.header.push_back(name);
    }
    t.rows.reserve(fm.rows());
    for (std::size_t r = 0; r < fm.rows(); ++r) {
        std::vector<std::string> row;
        row.reserve(fm.cols() + 1);
        row.push_back(format_iso8601(fm.timestamps[r]));
        for (std::size_t c = 0; c < fm.cols(); ++c) {
            row.push_back(csv::format_double(fm.columns[c][r]));
        }
        t.rows.push_back(std::move(row));
    }
    csv::write_file(csv_path, t);

    std::ofstream schema(schema_path);
    if (!schema) {
        throw std::runtime_error("write_feature_matrix: cannot write '" + schema_path + "'");
    }
    schema << "{\n  \"rows\": " << fm.rows() << ",\n  \"columns\": [";
    for (std::size_t c = 0; c < fm.cols(); ++c) {
        schema << (c ? ", " : "") << '"' << fm.names[c] << '"';
    }
    schema << "],\n  \"secondary_scaler\": " << fm.secondary.to_json() << "\n}\n";
}

namespace {
constexpr char kTensorMagic[4] = {'W', 'T', 'N', 'S'};
constexpr std::uint32_t kTensorVersion = 1;
}  // namespace

void write_tensor_file(const std::string& path, const std::vector<std::size_t>& shape,
                       std::span<const double> data) {
    std::size_t expected = 1;
    for (std::size_t d : shape) {
        expected *= d;
    }
    if (expected != data.size()) {
        throw std::invalid_argument("write_tensor_file: shape does not match data size");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("write_tensor_file: cannot write '" + path + "'");
    }
    out.write(kTensorMagic, 4);
    const std::uint32_t version = kTensorVersion;
    const std::uint32_t rank = static_cast<std::uint32_t>(shape.size());
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&rank), 4);
    for (std::size_t d : shape) {
        const std::uint64_t v = d;
        out.write(reinterpret_cast<const char*>(&v), 8);
    }
    const std::size_t header = 12 + 8 * shape.size();
    const std::size_t padded = (header + 31) / 32 * 32;
    for (std::size_t i = header; i < padded; ++i) {
        out.put('\0');
    }
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!out) {
        throw std::runtime_error("write_tensor_file: write failed for '" + path + "'");
    }
}

std::pair<std::vector<std::size_t>, std::vector<double>> read_tensor_file(
    const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("read_tensor_file: cannot open '" + path + "'");
    }
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, kTensorMagic, 4) != 0) {
        throw std::runtime_error("read_tensor_file: bad magic in '" + path + "'");
    }
    std::uint32_t version = 0, rank = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&rank), 4);
    if (version != kTensorVersion) {
        throw std::runtime_error("read_tensor_file: unsupported version");
    }
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        d = static_cast<std::size_t>(v);
    }
    const std::size_t header = 12 + 8 * rank;
    const std::size_t padded = (header + 31) / 32 * 32;
    in.seekg(static_cast<std::streamoff>(padded));
    std::size_t count = 1;
    for (std::size_t d : shape) {
        count *= d;
    }
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) {
        throw std::runtime_error("read_tensor_file: truncated payload in '" + path + "'");
    }
    return {std::move(shape), std::move(data)};
}

void SampleSet::save(const std::string& inputs_path, const std::string& meta_path) const {
    write_tensor_file(inputs_path, {num_samples(), lookback, feature_count}, inputs);
    csv::Table t;
    t.header = {"timestamp", "target", "last_observed"};
    for (std::size_t i = 0; i < num_samples(); ++i) {
        t.rows.push_back({format_iso8601(sample_timestamps[i]), csv::format_double(targets[i]),
                          csv::format_double(last_observed[i])});
    }
    csv::write_file(meta_path, t);
}

}  // namespace wavecast::features
