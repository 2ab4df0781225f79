#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavecast/ndbc.hpp"
#include "wavecast/time_utils.hpp"

namespace wavecast::preprocess {

// Reversible encoding of a periodic angle: x_new = -0.5*cos(2*pi*x/T) + 0.5,
// x_sign = 1 iff the angle (reduced into [0,T)) lies past the half period.
struct AngleEncoding {
    double x_new = 0.0;   // in [0, 1]
    int x_sign = 0;       // {0, 1}
};

AngleEncoding encode_angle(double x_degrees, double period_degrees = 360.0);
double decode_angle(const AngleEncoding& enc, double period_degrees = 360.0);

// Weighted linear interpolation over time positions. Interior gaps use the
// nearest valid neighbours on both sides; leading/trailing gaps extend the
// nearest valid value. `feature` only labels error messages.
std::vector<double> interpolate_missing(const std::vector<std::optional<double>>& column,
                                        const std::vector<double>& positions,
                                        const std::string& feature = "");

// Per-column min-max parameters. Binary *_sign columns bypass scaling (they
// are already {0,1} and may be constant on the fitting range).
struct ScalerParams {
    std::vector<std::string> names;
    std::vector<double> mins;
    std::vector<double> maxs;
    std::vector<bool> apply_minmax;

    int column_index(const std::string& name) const;  // -1 if unknown
    double scale(std::size_t idx, double x) const;
    double invert(std::size_t idx, double scaled) const;
    double scale(const std::string& name, double x) const;
    double invert(const std::string& name, double scaled) const;

    std::string to_json() const;
    static ScalerParams from_json(const std::string& text);
    void save(const std::string& path) const;
    static ScalerParams load(const std::string& path);
};

// Dense expanded feature table: no missing cells, angle features split into
// (_new, _sign) pairs, every non-sign column min-max scaled.
struct CleanTable {
    std::vector<Timestamp> timestamps;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;  // values[c][row]

    std::size_t rows() const { return timestamps.size(); }
    std::size_t cols() const { return names.size(); }
    int column_index(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;
};

struct PreprocessConfig {
    // WDIR/MWD are genuinely periodic. Temperatures can be added to reproduce
    // the variant that treats ATMP/WTMP/DEWP as angular.
    std::vector<std::string> angle_features = {"WDIR", "MWD"};
    double angle_period = 360.0;
    // true: fit the scaler over the whole series (paper-faithful);
    // false: fit on rows strictly before the train/test boundary.
    bool scale_on_full_series = false;
    // Restrict processing to a subset of the 11 base features (empty = all).
    std::vector<std::string> base_features;
};

// Generic column min-max fit over rows [fit_begin, fit_end).
ScalerParams fit_scaler(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& columns, std::size_t fit_begin,
                        std::size_t fit_end, const std::vector<bool>& apply_minmax);

struct Preprocessed {
    CleanTable table;
    ScalerParams scaler;
};

// Full preprocessing stage: interpolate gaps, encode angles, scale.
// `train_boundary` bounds the scaler fit in strict mode.
Preprocessed preprocess_table(const ndbc::TimeSeriesTable& raw, Timestamp train_boundary,
                              const PreprocessConfig& config = {});

}  // namespace wavecast::preprocess
