#include "wavecast/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wavecast::spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

// In-place recursion over strided views of the input.
void fft_recurse(const Complex* in, Complex* out, std::size_t n, std::size_t stride) {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t half = n / 2;
    fft_recurse(in, out, half, 2 * stride);                  // even indices
    fft_recurse(in + stride, out + half, half, 2 * stride);  // odd indices
    for (std::size_t k = 0; k < half; ++k) {
        const Complex twiddle =
            std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
        const Complex t = twiddle * out[k + half];
        const Complex even = out[k];
        out[k] = even + t;
        out[k + half] = even - t;
    }
}

}  // namespace

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

std::vector<Complex> fft(const std::vector<Complex>& x) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("fft: length must be a power of two (got " +
                                    std::to_string(n) + "); pad the input first");
    }
    std::vector<Complex> out(n);
    fft_recurse(x.data(), out.data(), n, 1);
    return out;
}

std::vector<Complex> dft_naive(const std::vector<Complex>& x) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double angle =
                -2.0 * kPi * static_cast<double>(k) * static_cast<double>(j) /
                static_cast<double>(n);
            acc += x[j] * std::polar(1.0, angle);
        }
        out[k] = acc;
    }
    return out;
}

Spectrum global_spectrum(const std::vector<double>& signal, double sample_rate) {
    if (signal.empty()) {
        throw std::invalid_argument("global_spectrum: empty input");
    }
    for (double v : signal) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("global_spectrum: non-finite value in input");
        }
    }
    const std::size_t padded = next_power_of_two(signal.size());
    std::vector<Complex> buf(padded, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < signal.size(); ++i) {
        buf[i] = Complex{signal[i], 0.0};
    }
    const auto transformed = fft(buf);

    Spectrum spec;
    spec.n = signal.size();
    const std::size_t bins = padded / 2 + 1;
    spec.frequencies.resize(bins);
    spec.amplitudes.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        spec.frequencies[k] =
            sample_rate * static_cast<double>(k) / static_cast<double>(padded);
        spec.amplitudes[k] = std::abs(transformed[k]);
    }
    return spec;
}

GlobalSpectralFeatures significant_periods(const Spectrum& spec, double threshold,
                                           std::size_t k) {
    if (spec.amplitudes.size() < 2) {
        throw std::invalid_argument("significant_periods: spectrum has no non-DC bins");
    }
    // Min-max normalization over non-DC bins; the residual is near zero-mean
    // after decomposition, so DC carries no period information.
    double lo = spec.amplitudes[1];
    double hi = lo;
    for (std::size_t i = 1; i < spec.amplitudes.size(); ++i) {
        lo = std::min(lo, spec.amplitudes[i]);
        hi = std::max(hi, spec.amplitudes[i]);
    }
    if (hi == 0.0) {
        throw std::invalid_argument("significant_periods: all-zero spectrum");
    }
    const double range = hi - lo;

    struct Peak {
        double amplitude_norm;
        double period;
    };
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i < spec.amplitudes.size(); ++i) {
        const double norm = range > 0.0 ? (spec.amplitudes[i] - lo) / range : 1.0;
        if (norm > threshold && spec.frequencies[i] > 0.0) {
            peaks.push_back({norm, 1.0 / spec.frequencies[i]});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        return a.amplitude_norm > b.amplitude_norm;
    });
    if (peaks.size() > k) {
        peaks.resize(k);
    }

    GlobalSpectralFeatures out;
    for (const Peak& p : peaks) {
        out.dominant_periods.push_back(p.period);
        out.dominant_amplitudes.push_back(p.amplitude_norm);
    }
    return out;
}

Spectrogram stft(const std::vector<double>& signal, std::size_t nperseg, std::size_t noverlap,
                 double sample_rate) {
    if (nperseg == 0 || signal.size() < nperseg) {
        throw std::invalid_argument("stft: input shorter than one window");
    }
    if (noverlap >= nperseg) {
        throw std::invalid_argument("stft: noverlap must be smaller than nperseg");
    }
    const std::size_t hop = nperseg - noverlap;
    const std::size_t frames = (signal.size() - nperseg) / hop + 1;
    const std::size_t nfft = next_power_of_two(nperseg);
    const std::size_t bins = nfft / 2 + 1;

    std::vector<double> window(nperseg);
    if (nperseg == 1) {
        window[0] = 1.0;
    } else {
        for (std::size_t i = 0; i < nperseg; ++i) {
            window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                              static_cast<double>(nperseg - 1)));
        }
    }

    Spectrogram sg;
    sg.window_len = nperseg;
    sg.hop = hop;
    sg.frequencies.resize(bins);
    for (std::size_t kbin = 0; kbin < bins; ++kbin) {
        sg.frequencies[kbin] =
            sample_rate * static_cast<double>(kbin) / static_cast<double>(nfft);
    }
    sg.frame_times.resize(frames);
    sg.magnitudes.resize(frames);

    std::vector<Complex> buf(nfft);
    for (std::size_t m = 0; m < frames; ++m) {
        const std::size_t start = m * hop;
        std::fill(buf.begin(), buf.end(), Complex{0.0, 0.0});
        for (std::size_t i = 0; i < nperseg; ++i) {
            buf[i] = Complex{signal[start + i] * window[i], 0.0};
        }
        const auto transformed = fft(buf);
        auto& row = sg.magnitudes[m];
        row.resize(bins);
        for (std::size_t kbin = 0; kbin < bins; ++kbin) {
            row[kbin] = std::abs(transformed[kbin]);
        }
        sg.frame_times[m] = (static_cast<double>(start) +
                             static_cast<double>(nperseg - 1) / 2.0) /
                            sample_rate;
    }
    return sg;
}

DominantFrequencies dominant_frequency_sequence(const Spectrogram& sg, std::size_t num_samples) {
    if (sg.frames() == 0) {
        throw std::invalid_argument("dominant_frequency_sequence: empty spectrogram");
    }
    DominantFrequencies out;
    out.per_frame.resize(sg.frames());
    for (std::size_t m = 0; m < sg.frames(); ++m) {
        const auto& row = sg.magnitudes[m];
        std::size_t best = 1;
        double best_mag = -1.0;
        for (std::size_t kbin = 1; kbin < row.size(); ++kbin) {
            if (row[kbin] > best_mag) {  // ties keep the lower frequency
                best_mag = row[kbin];
                best = kbin;
            }
        }
        if (best_mag <= 0.0) {
            out.per_frame[m] = 0.0;
            out.has_degenerate_frame = true;
        } else {
            out.per_frame[m] = sg.frequencies[best];
        }
    }

    out.per_sample.resize(num_samples);
    std::size_t frame = 0;
    for (std::size_t i = 0; i < num_samples; ++i) {
        const double t = static_cast<double>(i);
        while (frame + 1 < sg.frames() && sg.frame_times[frame + 1] <= t) {
            ++frame;
        }
        out.per_sample[i] = out.per_frame[frame];
    }
    return out;
}

}  // namespace wavecast::spectral
