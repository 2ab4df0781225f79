#include "wavecast/stl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavecast::stl {

namespace {

int next_odd_at_least(double x) {
    int v = static_cast<int>(std::ceil(x));
    if (v < 3) {
        v = 3;
    }
    return v % 2 == 0 ? v + 1 : v;
}

double tricube(double u) {
    if (u >= 1.0) {
        return 0.0;
    }
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

// LOESS evaluated at arbitrary sorted positions. Window is the `span`
// nearest data points; when span exceeds the data size the bandwidth is
// inflated by (span - n)/2 as in the reference STL smoother.
std::vector<double> loess_eval(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>* rw,
                               const std::vector<double>& eval_at, int span, int degree) {
    const std::size_t n = xs.size();
    const std::size_t window = std::min<std::size_t>(static_cast<std::size_t>(span), n);
    std::vector<double> out(eval_at.size());

    std::size_t lo = 0;
    for (std::size_t e = 0; e < eval_at.size(); ++e) {
        const double x0 = eval_at[e];
        while (lo + window < n && x0 - xs[lo] > xs[lo + window] - x0) {
            ++lo;
        }
        const std::size_t hi = lo + window;  // window is [lo, hi)
        double h = std::max(x0 - xs[lo], xs[hi - 1] - x0);
        if (static_cast<std::size_t>(span) > n) {
            h += static_cast<double>(static_cast<std::size_t>(span) - n) / 2.0;
        }

        double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            double w = h > 0.0 ? tricube(std::abs(xs[j] - x0) / h) : 1.0;
            if (rw) {
                w *= (*rw)[j];
            }
            const double dx = xs[j] - x0;
            sw += w;
            swx += w * dx;
            swy += w * ys[j];
            swxx += w * dx * dx;
            swxy += w * dx * ys[j];
        }

        if (sw <= 0.0) {
            // every point zero-weighted: fall back to the plain window mean
            double s = 0.0;
            for (std::size_t j = lo; j < hi; ++j) {
                s += ys[j];
            }
            out[e] = s / static_cast<double>(window);
            continue;
        }
        if (degree == 1) {
            const double denom = sw * swxx - swx * swx;
            if (denom > 1e-12 * sw * swxx && swxx > 0.0) {
                out[e] = (swxx * swy - swx * swxy) / denom;
                continue;
            }
        }
        out[e] = swy / sw;  // degree 0 (also the singular-fit fallback)
    }
    return out;
}

std::vector<double> moving_average(const std::vector<double>& x, std::size_t len) {
    if (x.size() < len) {
        throw std::runtime_error("stl: series too short for moving average");
    }
    std::vector<double> out(x.size() - len + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        acc += x[i];
    }
    out[0] = acc / static_cast<double>(len);
    for (std::size_t i = len; i < x.size(); ++i) {
        acc += x[i] - x[i - len];
        out[i - len + 1] = acc / static_cast<double>(len);
    }
    return out;
}

std::vector<double> index_positions(std::size_t n, double offset = 0.0) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = static_cast<double>(i) + offset;
    }
    return xs;
}

}  // namespace

StlConfig StlConfig::resolved() const {
    StlConfig c = *this;
    if (c.period < 2) {
        throw std::invalid_argument("stl: period must be >= 2");
    }
    if (c.inner_iters < 1 || c.outer_iters < 0) {
        throw std::invalid_argument("stl: iteration counts out of range");
    }
    if (c.loess_degree != 0 && c.loess_degree != 1) {
        throw std::invalid_argument("stl: loess degree must be 0 or 1");
    }
    if (c.lowpass_span == 0) {
        c.lowpass_span = next_odd_at_least(c.period);
    }
    if (c.trend_span == 0) {
        const double ratio = 1.0 - 1.5 / static_cast<double>(c.seasonal_span);
        c.trend_span = next_odd_at_least(1.5 * c.period / ratio);
    }
    for (int span : {c.seasonal_span, c.trend_span, c.lowpass_span}) {
        if (span < 3 || span % 2 == 0) {
            throw std::invalid_argument("stl: spans must be odd and >= 3");
        }
    }
    if (c.trend_span <= c.period) {
        throw std::invalid_argument("stl: trend span must exceed the period");
    }
    return c;
}

std::vector<double> loess_smooth(const std::vector<double>& positions,
                                 const std::vector<double>& values, int span, int degree,
                                 const std::vector<double>* robustness) {
    if (positions.size() != values.size()) {
        throw std::invalid_argument("loess_smooth: positions/values length mismatch");
    }
    if (span < 3 || span % 2 == 0) {
        throw std::invalid_argument("loess_smooth: span must be odd and >= 3");
    }
    if (static_cast<std::size_t>(span) > values.size()) {
        throw std::invalid_argument("loess_smooth: span exceeds series length");
    }
    if (degree != 0 && degree != 1) {
        throw std::invalid_argument("loess_smooth: degree must be 0 or 1");
    }
    if (robustness && robustness->size() != values.size()) {
        throw std::invalid_argument("loess_smooth: robustness weight length mismatch");
    }
    if (!std::is_sorted(positions.begin(), positions.end())) {
        throw std::invalid_argument("loess_smooth: positions must be sorted");
    }
    return loess_eval(positions, values, robustness, positions, span, degree);
}

std::vector<double> robustness_weights(const std::vector<double>& residuals) {
    if (residuals.empty()) {
        throw std::invalid_argument("robustness_weights: empty residuals");
    }
    std::vector<double> abs_r(residuals.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        abs_r[i] = std::abs(residuals[i]);
    }
    std::vector<double> sorted = abs_r;
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    double median = sorted[mid];
    if (sorted.size() % 2 == 0) {
        const double upper = median;
        std::nth_element(sorted.begin(), sorted.begin() + (mid - 1), sorted.end());
        median = (sorted[mid - 1] + upper) / 2.0;
    }

    const double cutoff = 6.0 * median;
    std::vector<double> w(residuals.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        if (cutoff == 0.0) {
            w[i] = abs_r[i] == 0.0 ? 1.0 : 0.0;
            continue;
        }
        const double u = abs_r[i] / cutoff;
        if (u >= 1.0) {
            w[i] = 0.0;
        } else {
            const double t = 1.0 - u * u;
            w[i] = t * t;
        }
    }
    return w;
}

StlDecomposition stl_decompose(const std::vector<double>& series, const StlConfig& config) {
    const StlConfig cfg = config.resolved();
    const std::size_t n = series.size();
    const std::size_t p = static_cast<std::size_t>(cfg.period);
    if (n < 2 * p) {
        throw std::invalid_argument("stl_decompose: series shorter than two periods");
    }
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("stl_decompose: non-finite value in input");
        }
    }

    std::vector<double> trend(n, 0.0);
    std::vector<double> seasonal(n, 0.0);
    std::vector<double> rw(n, 1.0);
    const std::vector<double> xs = index_positions(n);

    std::vector<double> detrended(n), extended(n + 2 * p), deseason(n);
    std::vector<double> prev_trend, prev_seasonal;

    for (int outer = 0; outer <= cfg.outer_iters; ++outer) {
        for (int inner = 0; inner < cfg.inner_iters; ++inner) {
            // 1. detrend
            for (std::size_t i = 0; i < n; ++i) {
                detrended[i] = series[i] - trend[i];
            }

            // 2. cycle-subseries smoothing, extended one cycle on each side
            for (std::size_t q = 0; q < p; ++q) {
                std::vector<double> sub_x, sub_y, sub_w;
                for (std::size_t i = q; i < n; i += p) {
                    sub_x.push_back(static_cast<double>(sub_x.size()));
                    sub_y.push_back(detrended[i]);
                    sub_w.push_back(rw[i]);
                }
                std::vector<double> eval(sub_x.size() + 2);
                for (std::size_t c = 0; c < eval.size(); ++c) {
                    eval[c] = static_cast<double>(c) - 1.0;
                }
                const auto smoothed = loess_eval(sub_x, sub_y, &sub_w, eval,
                                                 cfg.seasonal_span, cfg.loess_degree);
                for (std::size_t c = 0; c < smoothed.size(); ++c) {
                    extended[q + c * p] = smoothed[c];
                }
            }

            // 3. low-pass filter the extended seasonal
            auto low = moving_average(extended, p);
            low = moving_average(low, p);
            low = moving_average(low, 3);
            const auto lowpass =
                loess_eval(xs, low, nullptr, xs, cfg.lowpass_span, 1);

            // 4. deseasonalized seasonal
            for (std::size_t i = 0; i < n; ++i) {
                seasonal[i] = extended[i + p] - lowpass[i];
            }

            // 5.–6. remove seasonal, smooth the trend
            for (std::size_t i = 0; i < n; ++i) {
                deseason[i] = series[i] - seasonal[i];
            }
            trend = loess_eval(xs, deseason, &rw, xs, cfg.trend_span, cfg.loess_degree);
        }

        if (cfg.convergence_tol > 0.0 && !prev_trend.empty()) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                num = std::max(num, std::abs(trend[i] - prev_trend[i]) +
                                        std::abs(seasonal[i] - prev_seasonal[i]));
                den = std::max(den, std::abs(trend[i]) + std::abs(seasonal[i]));
            }
            if (den > 0.0 && num / den < cfg.convergence_tol) {
                break;
            }
        }
        prev_trend = trend;
        prev_seasonal = seasonal;

        if (outer < cfg.outer_iters) {
            std::vector<double> residual(n);
            for (std::size_t i = 0; i < n; ++i) {
                residual[i] = series[i] - trend[i] - seasonal[i];
            }
            rw = robustness_weights(residual);
        }
    }

    StlDecomposition d;
    d.trend = std::move(trend);
    d.seasonal = std::move(seasonal);
    d.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.residual[i] = series[i] - d.trend[i] - d.seasonal[i];
    }
    return d;
}

StlDecomposition stl_decompose_causal(const std::vector<double>& series, std::size_t train_len,
                                      const StlConfig& config) {
    const StlConfig cfg = config.resolved();
    if (train_len > series.size()) {
        throw std::invalid_argument("stl_decompose_causal: train length exceeds series");
    }
    const std::size_t window = 8 * static_cast<std::size_t>(cfg.period);

    std::vector<double> head(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(train_len));
    StlDecomposition out = stl_decompose(head, cfg);
    out.trend.resize(series.size());
    out.seasonal.resize(series.size());
    out.residual.resize(series.size());

    std::vector<double> buf;
    for (std::size_t t = train_len; t < series.size(); ++t) {
        const std::size_t w = std::min(window, t + 1);
        buf.assign(series.begin() + static_cast<std::ptrdiff_t>(t + 1 - w),
                   series.begin() + static_cast<std::ptrdiff_t>(t + 1));
        const StlDecomposition local = stl_decompose(buf, cfg);
        out.trend[t] = local.trend.back();
        out.seasonal[t] = local.seasonal.back();
        out.residual[t] = local.residual.back();
    }
    return out;
}

}  // namespace wavecast::stl
