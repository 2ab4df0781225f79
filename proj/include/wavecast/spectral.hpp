#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace wavecast::spectral {

using Complex = std::complex<double>;

// Radix-2 Cooley-Tukey transform via recursive even/odd splitting.
// Length must be a power of two (callers pad).
std::vector<Complex> fft(const std::vector<Complex>& x);

// Direct O(N^2) transform of any length; reference implementation used by
// the test oracles.
std::vector<Complex> dft_naive(const std::vector<Complex>& x);

std::size_t next_power_of_two(std::size_t n);

// One-sided amplitude spectrum of a real signal (DC bin included).
struct Spectrum {
    std::vector<double> frequencies;  // cycles/hour, 0 .. Nyquist
    std::vector<double> amplitudes;   // |X[k]|
    std::size_t n = 0;                // original (un-padded) sample count
};

// Zero-pads to the next power of two and transforms. sample_rate is in
// samples per hour (the buoy cadence fixes it at 1).
Spectrum global_spectrum(const std::vector<double>& signal, double sample_rate = 1.0);

// Dominant periods kept by the 20%-of-maximum rule, strongest first.
struct GlobalSpectralFeatures {
    std::vector<double> dominant_periods;     // hours
    std::vector<double> dominant_amplitudes;  // min-max normalized, (threshold, 1]
};

GlobalSpectralFeatures significant_periods(const Spectrum& spec, double threshold = 0.2,
                                           std::size_t k = 3);

// Hann-windowed short-time transform. Frames hop by nperseg - noverlap.
struct Spectrogram {
    std::vector<double> frame_times;          // hour offset of each frame center
    std::vector<double> frequencies;          // cycles/hour
    std::vector<std::vector<double>> magnitudes;  // [frame][bin]
    std::size_t window_len = 0;
    std::size_t hop = 0;

    std::size_t frames() const { return magnitudes.size(); }
};

Spectrogram stft(const std::vector<double>& signal, std::size_t nperseg = 128,
                 std::size_t noverlap = 64, double sample_rate = 1.0);

// Per-frame argmax over non-DC bins plus a per-sample zero-order-hold
// alignment between frame centers.
struct DominantFrequencies {
    std::vector<double> per_frame;   // cycles/hour
    std::vector<double> per_sample;  // aligned to the original samples
    bool has_degenerate_frame = false;  // some frame had an all-zero spectrum
};

DominantFrequencies dominant_frequency_sequence(const Spectrogram& sg, std::size_t num_samples);

}  // namespace wavecast::spectral
