#include "wavecast/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wavecast::preprocess {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

AngleEncoding encode_angle(double x, double period) {
    if (!(period > 0.0)) {
        throw std::invalid_argument("encode_angle: period must be positive");
    }
    if (!std::isfinite(x)) {
        throw std::invalid_argument("encode_angle: non-finite angle");
    }
    double reduced = std::fmod(x, period);
    if (reduced < 0.0) {
        reduced += period;
    }
    AngleEncoding enc;
    enc.x_new = -0.5 * std::cos(2.0 * kPi * reduced / period) + 0.5;
    enc.x_sign = reduced > 0.5 * period ? 1 : 0;
    return enc;
}

double decode_angle(const AngleEncoding& enc, double period) {
    if (enc.x_new < 0.0 || enc.x_new > 1.0) {
        throw std::invalid_argument("decode_angle: x_new outside [0, 1]");
    }
    // cos(2*pi*x/T) = 1 - 2*x_new; the sign bit picks between the two
    // preimages of the cosine.
    const double c = std::clamp(1.0 - 2.0 * enc.x_new, -1.0, 1.0);
    const double base = std::acos(c) * period / (2.0 * kPi);  // in [0, T/2]
    double x = enc.x_sign == 1 ? period - base : base;
    if (x >= period) {
        x -= period;
    }
    return x;
}

std::vector<double> interpolate_missing(const std::vector<std::optional<double>>& column,
                                        const std::vector<double>& positions,
                                        const std::string& feature) {
    if (column.size() != positions.size()) {
        throw std::invalid_argument("interpolate_missing: column/position length mismatch");
    }
    const std::size_t n = column.size();
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < n; ++i) {
        if (column[i].has_value()) {
            valid.push_back(i);
        }
    }
    if (valid.empty()) {
        throw std::runtime_error("interpolate_missing: feature '" +
                                 (feature.empty() ? std::string("<unnamed>") : feature) +
                                 "' has no valid values");
    }

    std::vector<double> out(n);
    std::size_t next_valid = 0;  // index into `valid` of the first valid >= i
    for (std::size_t i = 0; i < n; ++i) {
        if (column[i].has_value()) {
            out[i] = *column[i];
            if (valid[next_valid] == i && next_valid + 1 < valid.size()) {
                ++next_valid;
            }
            continue;
        }
        // nearest valid neighbours before and after i
        const auto it = std::lower_bound(valid.begin(), valid.end(), i);
        if (it == valid.begin()) {
            out[i] = *column[valid.front()];  // leading gap: extend forward
        } else if (it == valid.end()) {
            out[i] = *column[valid.back()];   // trailing gap: extend backward
        } else {
            const std::size_t prev = *(it - 1);
            const std::size_t next = *it;
            const double t_prev = positions[prev];
            const double t_next = positions[next];
            const double t_miss = positions[i];
            const double w_prev = (t_next - t_miss) / (t_next - t_prev);
            const double w_next = (t_miss - t_prev) / (t_next - t_prev);
            out[i] = w_prev * *column[prev] + w_next * *column[next];
        }
    }
    return out;
}

int ScalerParams::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

double ScalerParams::scale(std::size_t idx, double x) const {
    if (!apply_minmax[idx]) {
        return x;
    }
    return (x - mins[idx]) / (maxs[idx] - mins[idx]);
}

double ScalerParams::invert(std::size_t idx, double scaled) const {
    if (!apply_minmax[idx]) {
        return scaled;
    }
    return scaled * (maxs[idx] - mins[idx]) + mins[idx];
}

double ScalerParams::scale(const std::string& name, double x) const {
    const int idx = column_index(name);
    if (idx < 0) {
        throw std::invalid_argument("scaler: unknown feature '" + name + "'");
    }
    return scale(static_cast<std::size_t>(idx), x);
}

double ScalerParams::invert(const std::string& name, double scaled) const {
    const int idx = column_index(name);
    if (idx < 0) {
        throw std::invalid_argument("scaler: unknown feature '" + name + "'");
    }
    return invert(static_cast<std::size_t>(idx), scaled);
}

std::string ScalerParams::to_json() const {
    nlohmann::json j;
    for (std::size_t i = 0; i < names.size(); ++i) {
        j[names[i]] = {{"min", mins[i]}, {"max", maxs[i]}, {"minmax", bool(apply_minmax[i])}};
    }
    return j.dump(2);
}

ScalerParams ScalerParams::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ScalerParams p;
    for (const auto& [key, value] : j.items()) {
        p.names.push_back(key);
        p.mins.push_back(value.at("min").get<double>());
        p.maxs.push_back(value.at("max").get<double>());
        p.apply_minmax.push_back(value.at("minmax").get<bool>());
    }
    return p;
}

void ScalerParams::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("scaler: cannot write '" + path + "'");
    }
    out << to_json() << '\n';
}

ScalerParams ScalerParams::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("scaler: cannot open '" + path + "'");
    }
    std::ostringstream body;
    body << in.rdbuf();
    return from_json(body.str());
}

int CleanTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

const std::vector<double>& CleanTable::column(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) {
        throw std::invalid_argument("CleanTable: unknown column '" + name + "'");
    }
    return values[static_cast<std::size_t>(idx)];
}

ScalerParams fit_scaler(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& columns, std::size_t fit_begin,
                        std::size_t fit_end, const std::vector<bool>& apply_minmax) {
    if (fit_begin >= fit_end) {
        throw std::invalid_argument("fit_scaler: empty fitting range");
    }
    ScalerParams p;
    p.names = names;
    p.apply_minmax = apply_minmax;
    p.mins.resize(names.size());
    p.maxs.resize(names.size());
    for (std::size_t c = 0; c < names.size(); ++c) {
        double lo = columns[c][fit_begin];
        double hi = lo;
        for (std::size_t r = fit_begin; r < fit_end; ++r) {
            lo = std::min(lo, columns[c][r]);
            hi = std::max(hi, columns[c][r]);
        }
        if (apply_minmax[c] && hi == lo) {
            throw std::runtime_error("fit_scaler: feature '" + names[c] +
                                     "' is constant over the fitting range");
        }
        p.mins[c] = lo;
        p.maxs[c] = hi;
    }
    return p;
}

Preprocessed preprocess_table(const ndbc::TimeSeriesTable& raw, Timestamp train_boundary,
                              const PreprocessConfig& config) {
    if (raw.rows() == 0) {
        throw std::invalid_argument("preprocess: empty table");
    }
    const std::size_t n = raw.rows();

    std::vector<double> positions(n);
    for (std::size_t i = 0; i < n; ++i) {
        positions[i] = hours_between(raw.timestamps.front(), raw.timestamps[i]);
    }

    auto is_angle = [&](const std::string& name) {
        return std::find(config.angle_features.begin(), config.angle_features.end(), name) !=
               config.angle_features.end();
    };
    auto selected = [&](const std::string& name) {
        if (config.base_features.empty()) {
            return true;
        }
        return std::find(config.base_features.begin(), config.base_features.end(), name) !=
               config.base_features.end();
    };

    CleanTable table;
    table.timestamps = raw.timestamps;
    std::vector<bool> apply_minmax;
    for (std::size_t f = 0; f < ndbc::kFeatureNames.size(); ++f) {
        const std::string name = ndbc::kFeatureNames[f];
        if (!selected(name)) {
            continue;
        }
        std::vector<double> filled = interpolate_missing(raw.columns[f], positions, name);
        if (is_angle(name)) {
            std::vector<double> news(n), signs(n);
            for (std::size_t i = 0; i < n; ++i) {
                const AngleEncoding enc = encode_angle(filled[i], config.angle_period);
                news[i] = enc.x_new;
                signs[i] = static_cast<double>(enc.x_sign);
            }
            table.names.push_back(name + "_new");
            table.values.push_back(std::move(news));
            apply_minmax.push_back(true);
            table.names.push_back(name + "_sign");
            table.values.push_back(std::move(signs));
            apply_minmax.push_back(false);
        } else {
            table.names.push_back(name);
            table.values.push_back(std::move(filled));
            apply_minmax.push_back(true);
        }
    }

    std::size_t fit_end = n;
    if (!config.scale_on_full_series) {
        const auto it = std::lower_bound(raw.timestamps.begin(), raw.timestamps.end(),
                                         train_boundary);
        fit_end = static_cast<std::size_t>(it - raw.timestamps.begin());
        if (fit_end == 0) {
            throw std::invalid_argument("preprocess: no rows before the train boundary");
        }
    }
    ScalerParams scaler = fit_scaler(table.names, table.values, 0, fit_end, apply_minmax);

    for (std::size_t c = 0; c < table.cols(); ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            table.values[c][r] = scaler.scale(c, table.values[c][r]);
        }
    }
    return {std::move(table), std::move(scaler)};
}

}  // namespace wavecast::preprocess
