#include "wavecast/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wavecast/csv.hpp"

namespace wavecast::metrics {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) {
        throw std::invalid_argument("metrics: length mismatch (" + std::to_string(pred.size()) +
                                    " vs " + std::to_string(truth.size()) + ")");
    }
    if (pred.empty()) {
        throw std::invalid_argument("metrics: empty input");
    }
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

double truth_variance_sum(std::span<const double> truth, double mean) {
    double s = 0.0;
    for (double y : truth) {
        s += (y - mean) * (y - mean);
    }
    return s;
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - truth[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        s += std::abs(pred[i] - truth[i]);
    }
    return s / static_cast<double>(pred.size());
}

double smape(std::span<const double> pred, std::span<const double> truth, SmapePolicy policy) {
    check_lengths(pred, truth);
    std::string bad;
    std::size_t defined = 0;
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double denom = (std::abs(pred[i]) + std::abs(truth[i])) / 2.0;
        if (denom == 0.0) {
            bad += (bad.empty() ? "" : ",") + std::to_string(i);
            continue;
        }
        s += std::abs(pred[i] - truth[i]) / denom;
        ++defined;
    }
    if (!bad.empty() && policy == SmapePolicy::Strict) {
        throw std::invalid_argument("smape: zero |pred|+|truth| at indices [" + bad + "]");
    }
    if (defined == 0) {
        throw std::invalid_argument("smape: no term has a nonzero denominator");
    }
    return 100.0 * s / static_cast<double>(defined);
}

double r2(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    const double ybar = mean_of(truth);
    const double ss_tot = truth_variance_sum(truth, ybar);
    if (ss_tot == 0.0) {
        throw std::invalid_argument("r2: truth series has zero variance");
    }
    double ss_res = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = truth[i] - pred[i];
        ss_res += e * e;
    }
    return 1.0 - ss_res / ss_tot;
}

// Correlation with the truth mean used for both centerings.
double cc(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    const double ybar = mean_of(truth);
    if (truth_variance_sum(truth, ybar) == 0.0) {
        throw std::invalid_argument("cc: truth series has zero variance");
    }
    double num = 0.0, dp = 0.0, dt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double a = pred[i] - ybar;
        const double b = truth[i] - ybar;
        num += a * b;
        dp += a * a;
        dt += b * b;
    }
    if (dp == 0.0) {
        throw std::invalid_argument("cc: prediction series equals the truth mean everywhere");
    }
    return num / std::sqrt(dp * dt);
}

double cc_pearson(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    const double pbar = mean_of(pred);
    const double ybar = mean_of(truth);
    if (truth_variance_sum(truth, ybar) == 0.0) {
        throw std::invalid_argument("cc_pearson: truth series has zero variance");
    }
    double num = 0.0, dp = 0.0, dt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double a = pred[i] - pbar;
        const double b = truth[i] - ybar;
        num += a * b;
        dp += a * a;
        dt += b * b;
    }
    if (dp == 0.0) {
        throw std::invalid_argument("cc_pearson: prediction series has zero variance");
    }
    return num / std::sqrt(dp * dt);
}

MetricsBlock evaluate(std::span<const double> pred, std::span<const double> truth,
                      SmapePolicy policy) {
    MetricsBlock b;
    b.rmse = rmse(pred, truth);
    b.mae = mae(pred, truth);
    b.smape = smape(pred, truth, policy);
    b.r2 = r2(pred, truth);
    b.cc = cc(pred, truth);
    b.cc_pearson = cc_pearson(pred, truth);
    b.n = pred.size();
    return b;
}

std::string MetricsBlock::to_json() const {
    std::ostringstream os;
    os << "{\"rmse\":" << csv::format_double(rmse) << ",\"mae\":" << csv::format_double(mae)
       << ",\"smape\":" << csv::format_double(smape) << ",\"r2\":" << csv::format_double(r2)
       << ",\"cc\":" << csv::format_double(cc)
       << ",\"cc_pearson\":" << csv::format_double(cc_pearson) << ",\"n\":" << n << "}";
    return os.str();
}

}  // namespace wavecast::metrics
