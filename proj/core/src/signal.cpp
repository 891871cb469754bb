#include "tfgdd/signal.hpp"

#include <cmath>

#include "tfgdd/errors.hpp"
#include "tfgdd/fft.hpp"

namespace tfgdd {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

ModeSpec make_mode(const LinearFDChirpSpec& spec) {
    const double p = spec.p;
    const double q = spec.q;
    const double c = spec.c;
    const double r = spec.r;
    ModeSpec mode;
    mode.amplitude = [p, q](double eta) { return std::exp(-(p * eta + 0.5 * q * eta * eta)); };
    mode.phase = [c, r](double eta) { return c * eta + 0.5 * r * eta * eta; };
    mode.phase_d1 = [c, r](double eta) { return c + r * eta; };
    mode.phase_d2 = [r](double) { return r; };
    return mode;
}

std::vector<ModeSpec> paper_x_modes(bool literal_second_rate) {
    const double rate2 = literal_second_rate ? 2e-4 : -2e-4;
    std::vector<ModeSpec> modes(2);
    modes[0].amplitude = [](double eta) {
        return std::exp(-2e-5 * (eta - 256.0) * (eta - 256.0));
    };
    modes[0].phase = [](double eta) { return 3e-4 * eta * eta + 0.1 * eta; };
    modes[0].phase_d1 = [](double eta) { return 6e-4 * eta + 0.1; };
    modes[0].phase_d2 = [](double) { return 6e-4; };

    modes[1].amplitude = [](double eta) {
        return std::exp(-3e-5 * (eta - 256.0) * (eta - 256.0));
    };
    modes[1].phase = [rate2](double eta) { return rate2 * eta * eta + 0.356 * eta; };
    modes[1].phase_d1 = [rate2](double eta) { return 2.0 * rate2 * eta + 0.356; };
    modes[1].phase_d2 = [rate2](double) { return 2.0 * rate2; };
    return modes;
}

std::vector<ModeSpec> paper_y_modes() {
    // theta_1 = -(51.2/pi) sin(pi eta / 256) + 0.25 eta
    // theta_2 = +(51.2/pi) sin(pi eta / 256) + 0.25 eta
    // Group delays 0.25 -+ 0.2 cos(pi eta / 256) cross at 0.25 s (eta = 128,
    // 384 Hz); dispersions +-(pi/1280) sin(pi eta / 256) vanish together at
    // eta = 256 Hz.
    constexpr double kScale = 51.2 / kPi;
    constexpr double kRate = kPi / 256.0;
    std::vector<ModeSpec> modes(2);
    modes[0].amplitude = [](double eta) {
        return std::exp(-3.2e-4 * (eta - 256.0) * (eta - 256.0));
    };
    modes[0].phase = [](double eta) { return -kScale * std::sin(kRate * eta) + 0.25 * eta; };
    modes[0].phase_d1 = [](double eta) { return -0.2 * std::cos(kRate * eta) + 0.25; };
    modes[0].phase_d2 = [](double eta) { return (kPi / 1280.0) * std::sin(kRate * eta); };

    modes[1].amplitude = [](double eta) {
        return std::exp(-2.5e-4 * (eta - 256.0) * (eta - 256.0));
    };
    modes[1].phase = [](double eta) { return kScale * std::sin(kRate * eta) + 0.25 * eta; };
    modes[1].phase_d1 = [](double eta) { return 0.2 * std::cos(kRate * eta) + 0.25; };
    modes[1].phase_d2 = [](double eta) { return -(kPi / 1280.0) * std::sin(kRate * eta); };
    return modes;
}

Spectrum synth_spectrum(const std::vector<ModeSpec>& modes, std::size_t n_bins,
                        double d_eta) {
    if (n_bins < 2) throw ConfigError("synth_spectrum requires at least 2 bins");
    if (!(d_eta > 0.0)) throw ConfigError("synth_spectrum requires d_eta > 0");

    Spectrum out;
    out.d_eta = d_eta;
    out.bins.assign(n_bins, {0.0, 0.0});
    for (const ModeSpec& mode : modes) {
        if (!mode.amplitude || !mode.phase)
            throw ConfigError("mode must define amplitude and phase");
        for (std::size_t j = 0; j < n_bins; ++j) {
            const double eta = static_cast<double>(j) * d_eta;
            const double b = mode.amplitude(eta);
            if (!(b > 0.0))
                throw ConfigError("mode amplitude must be positive on the grid");
            const double theta = mode.phase(eta);
            out.bins[j] += b * std::exp(std::complex<double>(0.0, -kTwoPi * theta));
        }
    }
    return out;
}

Spectrum synth_paper_y(std::size_t n_bins, double d_eta) {
    return synth_spectrum(paper_y_modes(), n_bins, d_eta);
}

Spectrum forward_transform(const SampledSignal& signal) {
    if (signal.samples.empty()) throw ConfigError("cannot transform an empty signal");
    Spectrum out;
    out.bins = signal.samples;
    dft_forward(out.bins);
    out.d_eta = 1.0 / (static_cast<double>(signal.samples.size()) * signal.dt);
    return out;
}

SampledSignal inverse_transform(const Spectrum& spectrum) {
    if (spectrum.bins.empty()) throw ConfigError("cannot transform an empty spectrum");
    SampledSignal out;
    out.samples = spectrum.bins;
    dft_inverse(out.samples);
    const double n = static_cast<double>(out.samples.size());
    for (auto& v : out.samples) v /= n;
    out.dt = 1.0 / (n * spectrum.d_eta);
    out.t0 = 0.0;
    return out;
}

SampledSignal decimate(const SampledSignal& signal, std::size_t factor) {
    if (factor == 0) throw ConfigError("decimation factor must be >= 1");
    if (factor == 1) return signal;
    if (signal.samples.empty()) throw ConfigError("cannot decimate an empty signal");

    // Zero-phase windowed-sinc low-pass at 0.45x the output Nyquist rate,
    // i.e. normalized cutoff 0.45 / (2 factor) cycles per input sample.
    const std::size_t half = 4 * factor;
    const std::size_t taps = 2 * half + 1;
    const double fc = 0.45 / (2.0 * static_cast<double>(factor));
    std::vector<double> h(taps);
    double sum = 0.0;
    for (std::size_t i = 0; i < taps; ++i) {
        const double m = static_cast<double>(i) - static_cast<double>(half);
        const double sinc = (m == 0.0) ? 2.0 * fc : std::sin(kTwoPi * fc * m) / (kPi * m);
        const double hamming =
            0.54 - 0.46 * std::cos(kTwoPi * static_cast<double>(i) /
                                   static_cast<double>(taps - 1));
        h[i] = sinc * hamming;
        sum += h[i];
    }
    for (double& v : h) v /= sum; // unit DC gain

    const std::size_t n = signal.samples.size();
    SampledSignal out;
    out.dt = signal.dt * static_cast<double>(factor);
    out.t0 = signal.t0;
    const std::size_t n_out = (n - 1) / factor + 1;
    out.samples.resize(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(k * factor);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < taps; ++i) {
            const std::ptrdiff_t idx =
                center + static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(half);
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
            acc += h[i] * signal.samples[static_cast<std::size_t>(idx)];
        }
        out.samples[k] = acc;
    }
    return out;
}

SampledSignal slice_time(const SampledSignal& signal, double t_start, double t_end) {
    if (signal.samples.empty()) throw ConfigError("cannot slice an empty signal");
    if (!(t_end > t_start)) throw ConfigError("slice requires t_end > t_start");
    const double extent = signal.t0 + signal.duration();
    const double tol = 1e-9 * signal.dt;
    if (t_start < signal.t0 - tol || t_end > extent + tol)
        throw ConfigError("slice exceeds the signal extent");

    // First index with t0 + k dt >= t_start, last index strictly below t_end;
    // the dt-relative tolerance keeps exact boundary samples stable under
    // floating-point division.
    const auto first = static_cast<std::ptrdiff_t>(
        std::ceil((t_start - signal.t0) / signal.dt - 1e-9));
    const auto last = static_cast<std::ptrdiff_t>(
        std::ceil((t_end - signal.t0) / signal.dt - 1e-9)); // exclusive
    const auto n = static_cast<std::ptrdiff_t>(signal.samples.size());
    const std::ptrdiff_t begin = std::max<std::ptrdiff_t>(first, 0);
    const std::ptrdiff_t end = std::min(last, n);
    if (end <= begin) throw ConfigError("time slice selects no samples");

    SampledSignal out;
    out.dt = signal.dt;
    out.t0 = signal.t0 + static_cast<double>(begin) * signal.dt;
    out.samples.assign(signal.samples.begin() + begin, signal.samples.begin() + end);
    return out;
}

} // namespace tfgdd
