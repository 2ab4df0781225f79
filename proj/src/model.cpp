#include "wavecast/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wavecast/csv.hpp"

namespace wavecast::model {

namespace {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
    return json{{"kernel", c.kernel},
                {"channels", c.channels},
                {"dilations", c.dilations},
                {"dropout", c.dropout},
                {"canonical_residual", c.canonical_residual},
                {"lstm_hidden", c.lstm_hidden},
                {"lr", c.lr},
                {"batch_size", c.batch_size},
                {"max_epochs", c.max_epochs},
                {"patience", c.patience},
                {"val_fraction", c.val_fraction},
                {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.kernel = j.at("kernel").get<std::size_t>();
    c.channels = j.at("channels").get<std::size_t>();
    c.dilations = j.at("dilations").get<std::vector<int>>();
    c.dropout = j.at("dropout").get<double>();
    c.canonical_residual = j.at("canonical_residual").get<bool>();
    c.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.val_fraction = j.at("val_fraction").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Named views over every trainable tensor and batch-norm state buffer, in a
// stable order shared by save and load.
struct NamedBuffer {
    std::string name;
    std::vector<double>* data;
    std::vector<std::size_t> shape;
};

std::vector<NamedBuffer> named_buffers(TcnLstmModel& m) {
    std::vector<NamedBuffer> out;
    auto add_tensor = [&out](const std::string& name, nn::Tensor& t) {
        out.push_back({name, &t.values(), t.shape()});
    };
    auto add_state = [&out](const std::string& name, std::vector<double>& v) {
        out.push_back({name, &v, {v.size()}});
    };
    for (std::size_t i = 0; i < m.blocks.size(); ++i) {
        nn::TcnBlock& b = m.blocks[i];
        const std::string prefix = "block" + std::to_string(i) + ".";
        add_tensor(prefix + "conv1.kernel", b.conv1.kernel);
        add_tensor(prefix + "conv1.bias", b.conv1.bias);
        add_tensor(prefix + "bn1.gamma", b.bn1.gamma);
        add_tensor(prefix + "bn1.beta", b.bn1.beta);
        add_state(prefix + "bn1.running_mean", b.bn1.running_mean);
        add_state(prefix + "bn1.running_var", b.bn1.running_var);
        add_tensor(prefix + "conv2.kernel", b.conv2.kernel);
        add_tensor(prefix + "conv2.bias", b.conv2.bias);
        add_tensor(prefix + "bn2.gamma", b.bn2.gamma);
        add_tensor(prefix + "bn2.beta", b.bn2.beta);
        add_state(prefix + "bn2.running_mean", b.bn2.running_mean);
        add_state(prefix + "bn2.running_var", b.bn2.running_var);
        if (b.projection) {
            add_tensor(prefix + "projection.kernel", b.projection->kernel);
            add_tensor(prefix + "projection.bias", b.projection->bias);
        }
    }
    add_tensor("lstm.w_f", m.lstm.w_f);
    add_tensor("lstm.w_i", m.lstm.w_i);
    add_tensor("lstm.w_c", m.lstm.w_c);
    add_tensor("lstm.w_o", m.lstm.w_o);
    add_tensor("lstm.b_f", m.lstm.b_f);
    add_tensor("lstm.b_i", m.lstm.b_i);
    add_tensor("lstm.b_c", m.lstm.b_c);
    add_tensor("lstm.b_o", m.lstm.b_o);
    add_tensor("head.weight", m.head.weight);
    add_tensor("head.bias", m.head.bias);
    return out;
}

nn::Tensor batch_tensor(std::span<const double> inputs, const std::vector<std::size_t>& idx,
                        std::size_t lookback, std::size_t cols) {
    const std::size_t stride = lookback * cols;
    std::vector<double> buf(idx.size() * stride);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        std::copy_n(inputs.data() + idx[i] * stride, stride, buf.data() + i * stride);
    }
    return nn::Tensor::from_values({idx.size(), lookback, cols}, std::move(buf));
}

}  // namespace

void ModelConfig::validate() const {
    if (dilations.empty()) {
        throw std::invalid_argument("ModelConfig: dilations must be non-empty");
    }
    for (std::size_t i = 0; i < dilations.size(); ++i) {
        if (dilations[i] < 1 || (i > 0 && dilations[i] <= dilations[i - 1])) {
            throw std::invalid_argument("ModelConfig: dilations must be ascending and >= 1");
        }
    }
    if (!(lr > 0.0)) {
        throw std::invalid_argument("ModelConfig: learning rate must be positive");
    }
    if (kernel < 1 || channels < 1 || lstm_hidden < 1 || batch_size < 1 || max_epochs < 1) {
        throw std::invalid_argument("ModelConfig: sizes must be >= 1");
    }
    if (dropout < 0.0 || dropout >= 1.0) {
        throw std::invalid_argument("ModelConfig: dropout must lie in [0, 1)");
    }
    if (val_fraction < 0.0 || val_fraction >= 1.0) {
        throw std::invalid_argument("ModelConfig: val_fraction must lie in [0, 1)");
    }
}

TcnLstmModel build_model(const ModelConfig& config, std::size_t input_dim) {
    config.validate();
    if (input_dim < 1) {
        throw std::invalid_argument("build_model: input dimension must be >= 1");
    }
    std::mt19937 rng(static_cast<std::uint32_t>(config.seed));
    TcnLstmModel m;
    m.config = config;
    m.input_dim = input_dim;
    std::size_t cin = input_dim;
    for (int d : config.dilations) {
        m.blocks.push_back(nn::make_tcn_block(cin, config.channels, config.kernel, d,
                                              config.dropout, config.canonical_residual, rng));
        cin = config.channels;
    }
    m.lstm = nn::make_lstm(config.channels, config.lstm_hidden, rng);
    m.head = nn::make_dense(config.lstm_hidden, 1, rng);
    return m;
}

std::vector<nn::Tensor> TcnLstmModel::parameters() const {
    std::vector<nn::Tensor> out;
    for (const auto& b : blocks) {
        nn::collect_parameters(b, out);
    }
    nn::collect_parameters(lstm, out);
    nn::collect_parameters(head, out);
    return out;
}

std::size_t TcnLstmModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : parameters()) {
        n += p.size();
    }
    return n;
}

std::size_t expected_parameter_count(const ModelConfig& c, std::size_t input_dim) {
    std::size_t total = 0;
    std::size_t cin = input_dim;
    const std::size_t ch = c.channels;
    for (std::size_t i = 0; i < c.dilations.size(); ++i) {
        total += c.kernel * cin * ch + ch;  // conv1
        total += 2 * ch;                    // bn1
        total += c.kernel * ch * ch + ch;   // conv2
        total += 2 * ch;                    // bn2
        if (cin != ch) {
            total += cin * ch + ch;         // 1x1 projection
        }
        cin = ch;
    }
    const std::size_t h = c.lstm_hidden;
    total += 4 * (h * (h + ch) + h);        // gate matrices and biases
    total += h + 1;                         // dense head
    return total;
}

nn::Tensor model_forward(TcnLstmModel& m, const nn::Tensor& x, bool training,
                         std::mt19937& rng) {
    if (x.shape().size() != 3 || x.dim(2) != m.input_dim) {
        throw std::invalid_argument("model_forward: expected [B, L, " +
                                    std::to_string(m.input_dim) + "]");
    }
    nn::Tensor h = x;
    for (auto& block : m.blocks) {
        h = nn::tcn_block_forward(block, h, training, rng);
    }
    const auto lstm_out = nn::lstm_forward(m.lstm, h);
    return nn::linear(lstm_out.h_last, m.head.weight, m.head.bias);  // [B, 1]
}

std::vector<double> predict_batch(TcnLstmModel& m, std::span<const double> inputs,
                                  std::size_t count) {
    if (count == 0) {
        return {};
    }
    const std::size_t stride = inputs.size() / count;
    const std::size_t lookback = stride / m.input_dim;
    if (stride * count != inputs.size() || lookback * m.input_dim != stride || lookback == 0) {
        throw std::invalid_argument("predict_batch: input layout does not match the model");
    }
    std::mt19937 rng(0);  // unused in inference
    std::vector<double> out;
    out.reserve(count);
    const std::size_t chunk = std::max<std::size_t>(m.config.batch_size, 1);
    for (std::size_t begin = 0; begin < count; begin += chunk) {
        const std::size_t end = std::min(count, begin + chunk);
        std::vector<double> buf(inputs.begin() + static_cast<std::ptrdiff_t>(begin * stride),
                                inputs.begin() + static_cast<std::ptrdiff_t>(end * stride));
        nn::Tensor x =
            nn::Tensor::from_values({end - begin, lookback, m.input_dim}, std::move(buf));
        const nn::Tensor y = model_forward(m, x, false, rng);
        out.insert(out.end(), y.values().begin(), y.values().end());
    }
    return out;
}

std::vector<double> predict(TcnLstmModel& m, const features::SampleSet& samples) {
    if (samples.feature_count != m.input_dim) {
        throw std::invalid_argument("predict: sample feature count does not match the model");
    }
    return predict_batch(m, samples.inputs, samples.num_samples());
}

std::vector<double> persistence_baseline(const features::SampleSet& samples) {
    return samples.last_observed;
}

TrainReport train(TcnLstmModel& m, const features::SampleSet& train_set) {
    const auto t0 = std::chrono::steady_clock::now();
    const ModelConfig& cfg = m.config;
    const std::size_t n = train_set.num_samples();
    if (n == 0) {
        throw std::invalid_argument("train: empty training set");
    }
    if (train_set.feature_count != m.input_dim) {
        throw std::invalid_argument("train: sample feature count does not match the model");
    }
    const double first = train_set.targets.front();
    bool constant_target = true;
    for (double t : train_set.targets) {
        if (t != first) {
            constant_target = false;
            break;
        }
    }
    if (constant_target) {
        throw std::runtime_error("train: degenerate target (zero variance)");
    }

    // Chronological validation tail; samples arrive time-ordered.
    const std::size_t n_val =
        cfg.val_fraction > 0.0
            ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                           cfg.val_fraction * static_cast<double>(n))))
            : 0;
    if (n_val >= n) {
        throw std::invalid_argument("train: validation fraction leaves no training samples");
    }
    const std::size_t n_train = n - n_val;

    std::mt19937 rng(static_cast<std::uint32_t>(cfg.seed ^ 0x9e3779b9u));
    nn::Adam optimizer(m.parameters(), {.lr = cfg.lr});

    const std::size_t stride = train_set.lookback * train_set.feature_count;
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainReport report;
    report.seed = cfg.seed;
    report.config_hash = config_hash(cfg, m.input_dim);
    report.parameter_count = m.parameter_count();

    auto snapshot = [&m]() {
        std::vector<std::vector<double>> state;
        for (const auto& buf : named_buffers(m)) {
            state.push_back(*buf.data);
        }
        return state;
    };
    auto restore = [&m](const std::vector<std::vector<double>>& state) {
        auto buffers = named_buffers(m);
        for (std::size_t i = 0; i < buffers.size(); ++i) {
            *buffers[i].data = state[i];
        }
    };

    std::vector<std::vector<double>> best_state = snapshot();
    double best_val_mae = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t since_best = 0;

    std::span<const double> val_truth(train_set.targets.data() + n_train, n_val);

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t begin = 0; begin < n_train; begin += cfg.batch_size) {
            const std::size_t end = std::min(n_train, begin + cfg.batch_size);
            if (end - begin < 2 && n_train > 2) {
                continue;  // skip a trailing one-sample batch, BN degenerates
            }
            std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                         order.begin() + static_cast<std::ptrdiff_t>(end));
            nn::Tensor x = batch_tensor(train_set.inputs, idx, train_set.lookback,
                                        train_set.feature_count);
            std::vector<double> tv(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                tv[i] = train_set.targets[idx[i]];
            }
            nn::Tensor y = model_forward(m, x, true, rng);
            nn::Tensor target = nn::Tensor::from_values({idx.size(), 1}, std::move(tv));
            nn::Tensor loss = nn::mse_loss(y, target);
            const double loss_value = loss.values()[0];
            if (!std::isfinite(loss_value)) {
                throw std::runtime_error(
                    "train: non-finite loss at epoch " + std::to_string(epoch) + " (lr=" +
                    std::to_string(cfg.lr) + ", batch_size=" + std::to_string(cfg.batch_size) +
                    ", batch_start=" + std::to_string(begin) + ")");
            }
            optimizer.zero_grad();
            loss.backward();
            optimizer.step();
            epoch_loss += loss_value * static_cast<double>(idx.size());
            seen += idx.size();
        }
        report.train_loss.push_back(epoch_loss / static_cast<double>(std::max<std::size_t>(seen, 1)));

        if (n_val > 0) {
            std::span<const double> val_inputs(train_set.inputs.data() + n_train * stride,
                                               n_val * stride);
            const auto val_pred = predict_batch(m, val_inputs, n_val);
            const double val_rmse = metrics::rmse(val_pred, val_truth);
            report.val_loss.push_back(val_rmse * val_rmse);
            const double vmae = metrics::mae(val_pred, val_truth);
            report.val_mae.push_back(vmae);
            if (vmae < best_val_mae) {
                best_val_mae = vmae;
                best_epoch = epoch;
                best_state = snapshot();
                since_best = 0;
            } else {
                ++since_best;
                if (cfg.patience > 0 && since_best >= cfg.patience) {
                    report.epochs_run = epoch;
                    break;
                }
            }
        } else {
            best_epoch = epoch;
        }
        report.epochs_run = epoch;
    }

    if (n_val > 0) {
        restore(best_state);
    }
    report.best_epoch = best_epoch;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::vector<ForecastPoint> forecast_series(TcnLstmModel& m, const features::FeatureMatrix& fm,
                                           std::span<const double> target_scaled,
                                           const preprocess::ScalerParams& primary_scaler,
                                           const std::string& target_name, std::size_t lookback,
                                           std::size_t horizon, double max_gap_hours) {
    if (target_scaled.size() != fm.rows()) {
        throw std::invalid_argument("forecast_series: target length mismatch");
    }
    if (fm.cols() != m.input_dim) {
        throw std::invalid_argument("forecast_series: feature count does not match the model");
    }
    const std::size_t n = fm.rows();
    if (n < lookback + horizon) {
        return {};
    }
    const double max_gap_seconds = max_gap_hours * static_cast<double>(kSecondsPerHour);

    std::vector<ForecastPoint> points;
    std::vector<double> valid_inputs;
    std::vector<std::size_t> valid_index;
    const std::size_t candidates = n - lookback - horizon + 1;
    for (std::size_t start = 0; start < candidates; ++start) {
        const std::size_t target_row = start + lookback - 1 + horizon;
        ForecastPoint p;
        p.timestamp = fm.timestamps[target_row];
        bool crosses_gap = false;
        for (std::size_t r = start + 1; r <= target_row; ++r) {
            if (static_cast<double>(fm.timestamps[r] - fm.timestamps[r - 1]) > max_gap_seconds) {
                crosses_gap = true;
                break;
            }
        }
        if (!crosses_gap) {
            valid_index.push_back(points.size());
            for (std::size_t r = start; r < start + lookback; ++r) {
                for (std::size_t c = 0; c < fm.cols(); ++c) {
                    valid_inputs.push_back(fm.columns[c][r]);
                }
            }
        }
        points.push_back(p);
    }

    const auto predictions = predict_batch(m, valid_inputs, valid_index.size());
    for (std::size_t i = 0; i < valid_index.size(); ++i) {
        points[valid_index[i]].scaled = predictions[i];
        points[valid_index[i]].wvht_meters = primary_scaler.invert(target_name, predictions[i]);
    }
    return points;
}

std::string config_hash(const ModelConfig& config, std::size_t input_dim) {
    json j = config_to_json(config);
    j["input_dim"] = input_dim;
    return hex64(fnv1a64(j.dump()));
}

std::string TrainReport::to_json() const {
    json j;
    j["train_loss"] = train_loss;
    j["val_loss"] = val_loss;
    j["val_mae"] = val_mae;
    j["best_epoch"] = best_epoch;
    j["epochs_run"] = epochs_run;
    j["parameter_count"] = parameter_count;
    j["wall_seconds"] = wall_seconds;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["metrics_scaled"] = json::parse(final_metrics.to_json());
    j["metrics_meters"] = json::parse(final_metrics_meters.to_json());
    return j.dump(2);
}

void save_checkpoint(const TcnLstmModel& m, const std::string& manifest_path,
                     const std::string& payload_path, const std::string& hash) {
    auto& mutable_model = const_cast<TcnLstmModel&>(m);
    const auto buffers = named_buffers(mutable_model);

    json manifest;
    manifest["format"] = "wavecast-checkpoint";
    manifest["version"] = 1;
    manifest["byte_order"] = "little-endian";
    manifest["dtype"] = "float64";
    manifest["seed"] = m.config.seed;
    manifest["config_hash"] = hash;
    manifest["input_dim"] = m.input_dim;
    manifest["parameter_count"] = m.parameter_count();
    manifest["config"] = config_to_json(m.config);
    json layers = json::array();
    for (const auto& buf : buffers) {
        layers.push_back({{"name", buf.name}, {"shape", buf.shape}});
    }
    manifest["layers"] = layers;

    std::ofstream mout(manifest_path);
    if (!mout) {
        throw std::runtime_error("save_checkpoint: cannot write '" + manifest_path + "'");
    }
    mout << manifest.dump(2) << '\n';

    std::ofstream pout(payload_path, std::ios::binary);
    if (!pout) {
        throw std::runtime_error("save_checkpoint: cannot write '" + payload_path + "'");
    }
    for (const auto& buf : buffers) {
        pout.write(reinterpret_cast<const char*>(buf.data->data()),
                   static_cast<std::streamsize>(buf.data->size() * sizeof(double)));
    }
    if (!pout) {
        throw std::runtime_error("save_checkpoint: payload write failed");
    }
}

TcnLstmModel load_checkpoint(const std::string& manifest_path, const std::string& payload_path) {
    std::ifstream min(manifest_path);
    if (!min) {
        throw std::runtime_error("load_checkpoint: cannot open '" + manifest_path + "'");
    }
    json manifest;
    min >> manifest;
    if (manifest.at("format") != "wavecast-checkpoint") {
        throw std::runtime_error("load_checkpoint: unrecognized manifest format");
    }
    const ModelConfig cfg = config_from_json(manifest.at("config"));
    const std::size_t input_dim = manifest.at("input_dim").get<std::size_t>();
    TcnLstmModel m = build_model(cfg, input_dim);

    std::ifstream pin(payload_path, std::ios::binary);
    if (!pin) {
        throw std::runtime_error("load_checkpoint: cannot open '" + payload_path + "'");
    }
    auto buffers = named_buffers(m);
    const auto& layers = manifest.at("layers");
    if (layers.size() != buffers.size()) {
        throw std::runtime_error("load_checkpoint: layer count mismatch");
    }
    for (std::size_t i = 0; i < buffers.size(); ++i) {
        if (layers[i].at("name") != buffers[i].name) {
            throw std::runtime_error("load_checkpoint: layer order mismatch at '" +
                                     buffers[i].name + "'");
        }
        pin.read(reinterpret_cast<char*>(buffers[i].data->data()),
                 static_cast<std::streamsize>(buffers[i].data->size() * sizeof(double)));
    }
    if (!pin) {
        throw std::runtime_error("load_checkpoint: truncated payload");
    }
    return m;
}

}  // namespace wavecast::model
