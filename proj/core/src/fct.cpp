#include "tfgdd/fct.hpp"

#include <algorithm>
#include <cmath>

#include "tfgdd/errors.hpp"
#include "tfgdd/fft.hpp"
#include "tfgdd/parallel.hpp"
#include "tfgdd/quadrature.hpp"

namespace tfgdd {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

GammaGrid::GammaGrid(double half_range, std::size_t bins) : r0(half_range), l_bins(bins) {
    if (l_bins % 2 == 0) throw ConfigError("gamma axis needs an odd bin count");
    if (l_bins > 1 && !(r0 > 0.0))
        throw ConfigError("gamma half-range must be positive");
    if (!(r0 >= 0.0)) throw ConfigError("gamma half-range must be non-negative");
}

double default_gamma_half_range(const std::vector<ModeSpec>& modes, double eta_max) {
    double worst = 0.0;
    for (const ModeSpec& mode : modes) {
        if (!mode.phase_d2) continue;
        for (int i = 0; i <= 256; ++i) {
            const double eta = eta_max * static_cast<double>(i) / 256.0;
            worst = std::max(worst, std::abs(mode.phase_d2(eta)));
        }
    }
    if (!(worst > 0.0)) throw ConfigError("modes declare no usable dispersion");
    return 4.0 * worst;
}

double default_gamma_half_range(const SampledSignal& signal) {
    return signal.dt * static_cast<double>(signal.size()) / 8.0;
}

bool TFGDDGrid::axes_match(const TFGDDGrid& other) const {
    return n_t == other.n_t && n_eta == other.n_eta && n_gamma == other.n_gamma &&
           t_start == other.t_start && dt == other.dt &&
           eta_start == other.eta_start && d_eta == other.d_eta &&
           gamma_start == other.gamma_start && d_gamma == other.d_gamma &&
           sigma == other.sigma;
}

void fct_slice(const SampledSignal& signal, const GaussianWindow& window,
               double gamma, int m, bool full_bins,
               std::complex<double>* slice_out) {
    const std::size_t n_samp = signal.size();
    if (n_samp < 4) throw ConfigError("transform needs at least 4 samples");
    const std::size_t n_eta = full_bins ? n_samp : n_samp / 2 + 1;
    const double d_eta = 1.0 / (static_cast<double>(n_samp) * signal.dt);

    // kernel_C depends on t_n - tau_k = (n - k) dt only, so one table of
    // 2N - 1 values serves the whole slice.
    std::vector<std::complex<double>> kernel(2 * n_samp - 1);
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        const double lag =
            (static_cast<double>(i) - static_cast<double>(n_samp - 1)) * signal.dt;
        kernel[i] = std::conj(kernel_C(m, lag, gamma, window));
    }

    // The DFT over k supplies e^{-i 2 pi j k / N}; a record starting at
    // t0 != 0 needs the remaining exact phase e^{-i 2 pi eta_j t0} per bin.
    std::vector<std::complex<double>> t0_phase;
    if (signal.t0 != 0.0) {
        t0_phase.resize(n_eta);
        for (std::size_t j = 0; j < n_eta; ++j) {
            const double eta = static_cast<double>(j) * d_eta;
            t0_phase[j] = std::exp(std::complex<double>(0.0, -kTwoPi * eta * signal.t0));
        }
    }

    std::vector<std::complex<double>> column(n_samp);
    for (std::size_t n = 0; n < n_samp; ++n) {
        // kernel[base - k] = conj(kernel_C(m, (n - k) dt, gamma)) for k = 0..N-1.
        const std::size_t base = n_samp - 1 + n;
        for (std::size_t k = 0; k < n_samp; ++k)
            column[k] = signal.samples[k] * kernel[base - k];
        dft_forward(column);
        std::complex<double>* out = slice_out + n * n_eta;
        if (t0_phase.empty()) {
            std::copy(column.begin(), column.begin() + n_eta, out);
        } else {
            for (std::size_t j = 0; j < n_eta; ++j) out[j] = column[j] * t0_phase[j];
        }
    }
}

TFGDDGrid fct_grid(const SampledSignal& signal, const GaussianWindow& window,
                   const GammaGrid& ggrid, int m, const FctOptions& options) {
    const std::size_t n_samp = signal.size();
    if (n_samp < 4) throw ConfigError("transform needs at least 4 samples");
    const std::size_t n_eta = options.full_bins ? n_samp : n_samp / 2 + 1;
    const std::size_t n_gamma = ggrid.l_bins;
    const std::size_t cells = n_samp * n_eta * n_gamma;
    if (cells / n_samp / n_eta != n_gamma || cells > options.max_cells)
        throw ConfigError("requested transform grid exceeds the memory cap");

    TFGDDGrid grid;
    grid.n_t = n_samp;
    grid.n_eta = n_eta;
    grid.n_gamma = n_gamma;
    grid.t_start = signal.t0;
    grid.dt = signal.dt;
    grid.eta_start = 0.0;
    grid.d_eta = 1.0 / (static_cast<double>(n_samp) * signal.dt);
    grid.gamma_start = ggrid.gamma_start();
    grid.d_gamma = ggrid.d_gamma();
    grid.window_power = m;
    grid.sigma = window.sigma;
    grid.values.resize(cells);

    parallel_for(n_gamma, [&](std::size_t l) {
        std::vector<std::complex<double>> slice(n_samp * n_eta);
        fct_slice(signal, window, ggrid.gamma_at(l), m, options.full_bins, slice.data());
        for (std::size_t n = 0; n < n_samp; ++n)
            for (std::size_t j = 0; j < n_eta; ++j)
                grid.at(n, j, l) = slice[n * n_eta + j];
    });
    return grid;
}

std::complex<double> fct_point(const SampledSignal& signal, double t, double eta,
                               double gamma, const GaussianWindow& window, int m) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < signal.size(); ++k) {
        const double tau = signal.time_at(k);
        acc += signal.samples[k] * std::conj(kernel_C(m, t - tau, gamma, window)) *
               std::exp(std::complex<double>(0.0, -kTwoPi * eta * tau));
    }
    return acc;
}

double duality_check(const SampledSignal& signal, const GaussianWindow& window,
                     const std::vector<DualityPoint>& sample_points) {
    // The frequency-window transform of x equals the time-style chirplet
    // transform of its spectrum with swapped/negated arguments:
    //   D_x(t, eta, gamma) = Q_{X}(eta, -t, -gamma)
    //                      = integral X(xi + eta) g(xi) e^{i2pi t xi} e^{i pi gamma xi^2} dxi,
    // with X(nu) = sum_k x_k e^{-i2pi nu tau_k} the record's exponential-sum
    // spectrum. fct_point evaluates the left side through the closed-form
    // chirped kernel; here the right side is integrated numerically against
    // the raw window function, so the two routes share only the record.
    const double sigma = window.sigma;
    const auto spectrum = [&](double nu) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < signal.size(); ++k)
            acc += signal.samples[k] *
                   std::exp(std::complex<double>(0.0, -kTwoPi * nu * signal.time_at(k)));
        return acc;
    };
    double worst = 0.0;
    for (const DualityPoint& p : sample_points) {
        const std::complex<double> d = fct_point(signal, p.t, p.eta, p.gamma, window, 0);
        const std::complex<double> q = integrate(
            [&](double xi) {
                return spectrum(xi + p.eta) * window_value(window, xi) *
                       std::exp(std::complex<double>(
                           0.0, kTwoPi * p.t * xi + kPi * p.gamma * xi * xi));
            },
            -8.0 * sigma, 8.0 * sigma, 1e-10);
        worst = std::max(worst, std::abs(d - q));
    }
    return worst;
}

double boundary_band(const GaussianWindow& window) { return 3.0 * time_scale(window); }

double boundary_band(const GaussianWindow& window, double gamma) {
    const double s2g = 2.0 * kPi * window.sigma * window.sigma * gamma;
    return 3.0 * std::sqrt(1.0 + s2g * s2g) * time_scale(window);
}

} // namespace tfgdd
