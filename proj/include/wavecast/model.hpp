#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavecast/features.hpp"
#include "wavecast/metrics.hpp"
#include "wavecast/nn/adam.hpp"
#include "wavecast/nn/layers.hpp"

namespace wavecast::model {

struct ModelConfig {
    std::size_t kernel = 3;
    std::size_t channels = 32;
    std::vector<int> dilations = {1, 2, 4};
    double dropout = 0.2;
    bool canonical_residual = false;
    std::size_t lstm_hidden = 64;
    double lr = 0.001;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    std::size_t patience = 10;
    double val_fraction = 0.1;
    std::uint64_t seed = 42;

    void validate() const;
};

// TCN blocks (one per dilation) -> LSTM -> dense(1).
struct TcnLstmModel {
    ModelConfig config;
    std::size_t input_dim = 0;
    std::vector<nn::TcnBlock> blocks;
    nn::LstmCell lstm;
    nn::Dense head;

    std::vector<nn::Tensor> parameters() const;
    std::size_t parameter_count() const;
};

TcnLstmModel build_model(const ModelConfig& config, std::size_t input_dim);

// Total trainable scalars for the layer graph, in closed form.
std::size_t expected_parameter_count(const ModelConfig& config, std::size_t input_dim);

// x: [B, L, C] -> predictions [B].
nn::Tensor model_forward(TcnLstmModel& m, const nn::Tensor& x, bool training,
                         std::mt19937& rng);

struct TrainReport {
    std::vector<double> train_loss;  // per epoch, mean batch MSE
    std::vector<double> val_loss;    // per epoch MSE
    std::vector<double> val_mae;     // per epoch, the early-stopping signal
    std::size_t best_epoch = 0;      // 1-based
    std::size_t epochs_run = 0;
    std::size_t parameter_count = 0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    std::string config_hash;
    metrics::MetricsBlock final_metrics;        // scaled space
    metrics::MetricsBlock final_metrics_meters; // after scaler inversion

    std::string to_json() const;
};

// Mini-batch Adam with a chronological validation tail, early stopping on
// validation MAE, and best-epoch restoration. Deterministic given the seed.
TrainReport train(TcnLstmModel& m, const features::SampleSet& train_set);

std::vector<double> predict(TcnLstmModel& m, const features::SampleSet& samples);
std::vector<double> predict_batch(TcnLstmModel& m, std::span<const double> inputs,
                                  std::size_t count);

// The last observed value of the target column repeats as the forecast.
std::vector<double> persistence_baseline(const features::SampleSet& samples);

struct ForecastPoint {
    Timestamp timestamp;
    std::optional<double> wvht_meters;
    std::optional<double> scaled;
};

// Sliding forecasts over a feature matrix; windows crossing data gaps are
// reported absent. The primary scaler inverts predictions to meters.
std::vector<ForecastPoint> forecast_series(TcnLstmModel& m, const features::FeatureMatrix& fm,
                                           std::span<const double> target_scaled,
                                           const preprocess::ScalerParams& primary_scaler,
                                           const std::string& target_name,
                                           std::size_t lookback, std::size_t horizon,
                                           double max_gap_hours = 3.0);

// Checkpoint: JSON manifest (shapes, layer graph, seed, config hash) plus a
// little-endian float64 payload of parameters and batch-norm running stats.
void save_checkpoint(const TcnLstmModel& m, const std::string& manifest_path,
                     const std::string& payload_path, const std::string& config_hash);
TcnLstmModel load_checkpoint(const std::string& manifest_path, const std::string& payload_path);

std::string config_hash(const ModelConfig& config, std::size_t input_dim);

}  // namespace wavecast::model
