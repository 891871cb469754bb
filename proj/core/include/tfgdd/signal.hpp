#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace tfgdd {

// Uniformly sampled (possibly complex analytic) time-domain signal.
struct SampledSignal {
    std::vector<std::complex<double>> samples;
    double dt = 1.0; // seconds per sample
    double t0 = 0.0; // time of samples[0], seconds

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double duration() const { return static_cast<double>(samples.size()) * dt; }
};

// One-sided frequency grid eta_j = j * d_eta, j = 0 .. bins.size()-1. Bins
// describe an analytic signal: the implied negative-frequency content is zero,
// so inverse_transform does not mirror conjugate bins.
struct Spectrum {
    std::vector<std::complex<double>> bins;
    double d_eta = 1.0; // Hz per bin

    std::size_t size() const { return bins.size(); }
    double eta_at(std::size_t j) const { return static_cast<double>(j) * d_eta; }
};

// One signal mode described in the frequency domain:
//   mode spectrum = amplitude(eta) * e^{-i 2 pi phase(eta)}.
// phase_d1 is the group delay (seconds) and phase_d2 the group delay
// dispersion (seconds per Hz).
struct ModeSpec {
    std::function<double(double)> amplitude;
    std::function<double(double)> phase;
    std::function<double(double)> phase_d1;
    std::function<double(double)> phase_d2;
};

// Frequency-domain linear chirp: x_hat(eta) = e^{-(p eta + q eta^2 / 2)}
// e^{-i 2 pi (c eta + r eta^2 / 2)}, so the group delay is c + r eta and the
// group delay dispersion is the constant r.
struct LinearFDChirpSpec {
    double p = 0.0;
    double q = 0.0;
    double c = 0.0; // seconds
    double r = 0.0; // seconds per Hz
};

ModeSpec make_mode(const LinearFDChirpSpec& spec);

// Bundled two-mode benchmark signals (the CLI names them paper-x and
// paper-y). The x benchmark uses Gaussian spectral amplitudes centred on
// 256 Hz with quadratic phases whose group delays cross at (0.2536 s,
// 256 Hz); by default the second chirp rate is -0.0002 so the stated crossing
// is reproduced, while literal_second_rate keeps the printed +0.0002 variant.
// The y benchmark uses sinusoidal phases with group delays crossing at
// (0.25 s, 128 Hz) and group delay dispersions crossing zero at 256 Hz.
std::vector<ModeSpec> paper_x_modes(bool literal_second_rate = false);
std::vector<ModeSpec> paper_y_modes();

// Evaluates the mode sum on the grid eta_j = j * d_eta:
//   bins[j] = sum_k amplitude_k(eta_j) e^{-i 2 pi phase_k(eta_j)}.
// Rejects n_bins < 2 and non-positive amplitudes on the grid.
Spectrum synth_spectrum(const std::vector<ModeSpec>& modes, std::size_t n_bins,
                        double d_eta);

// synth_spectrum applied to paper_y_modes().
Spectrum synth_paper_y(std::size_t n_bins, double d_eta);

// Unnormalized DFT pair between a length-N signal and an N-bin spectrum:
//   forward: bins[j] = sum_k samples[k] e^{-i 2 pi j k / N}
//   inverse: samples[k] = (1/N) sum_j bins[j] e^{+i 2 pi j k / N}
// with d_eta = 1 / (N dt) and t0 = 0. inverse(forward(s)) == s to 1e-12.
Spectrum forward_transform(const SampledSignal& signal);
SampledSignal inverse_transform(const Spectrum& spectrum);

// Anti-aliased integer decimation: windowed-sinc low-pass with cutoff at
// 0.45x the output Nyquist rate (Hamming window, 8*factor+1 taps,
// zero-phase), then keep every factor-th sample. factor == 1 returns the
// signal unchanged.
SampledSignal decimate(const SampledSignal& signal, std::size_t factor);

// Half-open time slice [t_start, t_end); keeps samples with
// t_start <= t < t_end and re-bases t0. An empty result is an error.
SampledSignal slice_time(const SampledSignal& signal, double t_start, double t_end);

} // namespace tfgdd
