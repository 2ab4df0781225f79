#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace wavecast::stl {

struct StlConfig {
    int period = 24;          // samples per seasonal cycle
    int seasonal_span = 35;   // odd, >= 3
    int trend_span = 0;       // 0 = derive from period and seasonal_span
    int lowpass_span = 0;     // 0 = smallest odd >= period
    int inner_iters = 2;
    int outer_iters = 1;
    int loess_degree = 1;     // 0 or 1
    // Optional early stop: relative change of trend+seasonal below this ends
    // the outer loop (0 disables).
    double convergence_tol = 0.0;

    StlConfig resolved() const;  // fills derived spans, validates
};

// Additive decomposition aligned to the input: input == trend + seasonal +
// residual elementwise.
struct StlDecomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> residual;
};

// Tricube-weighted local regression of degree 0/1 evaluated at every input
// position. `robustness`, when present, multiplies the distance weights.
std::vector<double> loess_smooth(const std::vector<double>& positions,
                                 const std::vector<double>& values, int span, int degree,
                                 const std::vector<double>* robustness = nullptr);

// Bisquare weights from residuals: w = (1 - (|r| / (6 median|r|))^2)^2,
// clamped to zero outside. All-zero residuals give unit weights.
std::vector<double> robustness_weights(const std::vector<double>& residuals);

StlDecomposition stl_decompose(const std::vector<double>& series, const StlConfig& config);

// Decompose [0, train_len) once, then extend causally: each later index gets
// the tail point of a re-decomposition over a trailing window of
// 8 * period samples ending at that index.
StlDecomposition stl_decompose_causal(const std::vector<double>& series, std::size_t train_len,
                                      const StlConfig& config);

}  // namespace wavecast::stl
