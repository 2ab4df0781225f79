#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace wavecast::metrics {

// Forecast-quality summary. `cc` uses the truth mean for both centerings,
// `cc_pearson` centers each series by its own mean; the two diverge when the
// prediction is biased, so reports carry both.
struct MetricsBlock {
    double rmse = 0.0;
    double mae = 0.0;
    double smape = 0.0;  // percent, in [0, 200]
    double r2 = 0.0;
    double cc = 0.0;
    double cc_pearson = 0.0;
    std::size_t n = 0;

    std::string to_json() const;
};

// Terms with |pred|+|truth| == 0 have an undefined symmetric percentage
// error. Strict mode rejects them (listing the indices); SkipUndefined
// averages over the remaining terms, which matters for series that saturate
// at the scaled minimum (both sides exactly zero).
enum class SmapePolicy { Strict, SkipUndefined };

double rmse(std::span<const double> pred, std::span<const double> truth);
double mae(std::span<const double> pred, std::span<const double> truth);
double smape(std::span<const double> pred, std::span<const double> truth,
             SmapePolicy policy = SmapePolicy::Strict);
double r2(std::span<const double> pred, std::span<const double> truth);
double cc(std::span<const double> pred, std::span<const double> truth);
double cc_pearson(std::span<const double> pred, std::span<const double> truth);

MetricsBlock evaluate(std::span<const double> pred, std::span<const double> truth,
                      SmapePolicy policy = SmapePolicy::Strict);

}  // namespace wavecast::metrics
