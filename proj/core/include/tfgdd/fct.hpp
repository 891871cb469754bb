#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "tfgdd/signal.hpp"
#include "tfgdd/window.hpp"

namespace tfgdd {

// Symmetric group-delay-dispersion axis: l_bins odd, gamma_l = (l - mid) *
// d_gamma with mid = (l_bins - 1) / 2, so the middle sample is exactly zero
// and the axis spans [-r0, r0].
struct GammaGrid {
    double r0 = 0.0;      // half-range, s/Hz
    std::size_t l_bins = 1;

    GammaGrid() = default;
    GammaGrid(double half_range, std::size_t bins);

    double d_gamma() const {
        return l_bins > 1 ? 2.0 * r0 / static_cast<double>(l_bins - 1) : 0.0;
    }
    double gamma_at(std::size_t l) const {
        const auto mid = static_cast<std::ptrdiff_t>((l_bins - 1) / 2);
        return static_cast<double>(static_cast<std::ptrdiff_t>(l) - mid) * d_gamma();
    }
    double gamma_start() const { return gamma_at(0); }
};

// Default gamma half-range: 4x the largest |group delay dispersion| of the
// modes when truth is known, else dt*N/8 (largest dispersion resolvable at
// this record length).
double default_gamma_half_range(const std::vector<ModeSpec>& modes, double eta_max);
double default_gamma_half_range(const SampledSignal& signal);

// Dense transform values over (time n, frequency j, gamma l), stored
// n-fastest: value(n, j, l) = values[((j * n_gamma) + l) * n_t + n] — the
// same order as the binary container.
struct TFGDDGrid {
    std::vector<std::complex<double>> values;
    std::size_t n_t = 0;
    std::size_t n_eta = 0;
    std::size_t n_gamma = 0;
    double t_start = 0.0;
    double dt = 0.0;
    double eta_start = 0.0;
    double d_eta = 0.0;
    double gamma_start = 0.0;
    double d_gamma = 0.0;
    int window_power = 0;
    double sigma = 0.0;

    std::size_t index(std::size_t n, std::size_t j, std::size_t l) const {
        return (j * n_gamma + l) * n_t + n;
    }
    std::complex<double>& at(std::size_t n, std::size_t j, std::size_t l) {
        return values[index(n, j, l)];
    }
    const std::complex<double>& at(std::size_t n, std::size_t j, std::size_t l) const {
        return values[index(n, j, l)];
    }
    double time_at(std::size_t n) const { return t_start + static_cast<double>(n) * dt; }
    double eta_at(std::size_t j) const {
        return eta_start + static_cast<double>(j) * d_eta;
    }
    double gamma_at(std::size_t l) const {
        return gamma_start + static_cast<double>(l) * d_gamma;
    }
    bool axes_match(const TFGDDGrid& other) const;
};

struct FctOptions {
    // Keep all N frequency bins instead of the non-negative half [0, N/2].
    bool full_bins = false;
    // Refuse to allocate grids larger than this many complex values.
    std::size_t max_cells = 120'000'000; // ~1.9 GB of complex128
};

// Dense discrete transform of the record on the (t_n, eta_j, gamma_l) grid:
//   D(t_n, eta_j, gamma_l) =
//     sum_k x(tau_k) conj(kernel_C(m, t_n - tau_k, gamma_l)) e^{-i 2 pi eta_j tau_k},
// evaluated as one length-N FFT per (n -> all j) column per gamma slice.
// Frequency bins cover j in [0, floor(N/2)] (all N with options.full_bins);
// for records starting at t0 != 0 the exact e^{-i 2 pi eta_j t0} column phase
// is applied so on-grid values agree with fct_point.
TFGDDGrid fct_grid(const SampledSignal& signal, const GaussianWindow& window,
                   const GammaGrid& ggrid, int m, const FctOptions& options = {});

// One gamma slice of fct_grid: values (n, j) for gamma fixed, written to
// slice_out[n * n_eta + j] (j-fastest). Shared by the dense builder and the
// streaming pipelines. n_eta = floor(N/2)+1 (or N when full_bins).
void fct_slice(const SampledSignal& signal, const GaussianWindow& window,
               double gamma, int m, bool full_bins,
               std::complex<double>* slice_out);

// Direct O(N) summation at an arbitrary (t, eta, gamma), eta evaluated as
// e^{-i 2 pi eta tau_k} without bin rounding.
std::complex<double> fct_point(const SampledSignal& signal, double t, double eta,
                               double gamma, const GaussianWindow& window, int m);

// Max |D_x(t, eta, gamma) - Q_X(eta, -t, -gamma)| over the sample points,
// where Q is the time-style chirplet transform of the record's spectrum,
// evaluated by adaptive quadrature against the raw window function instead of
// the closed-form kernel.
struct DualityPoint {
    double t;
    double eta;
    double gamma;
};
double duality_check(const SampledSignal& signal, const GaussianWindow& window,
                     const std::vector<DualityPoint>& sample_points);

// Width of the low-confidence band near each record edge: 3 sigma_t with the
// time-domain window scale sigma_t = 1 / (2 pi sigma). (The gamma-broadened
// kernel is wider still, but the reported band deliberately uses the
// gamma = 0 scale; dispersion-broadened edge effects show up as reduced
// kernel magnitude, which the determinant mask already suppresses.)
double boundary_band(const GaussianWindow& window);

// Dispersion-aware variant: the kernel at chirp rate gamma has time scale
// sqrt(1 + (2 pi sigma^2 gamma)^2) * sigma_t, so cells closer than three of
// those widths to a record edge see a truncated analysis window. Estimator
// quality statements should be restricted to cells outside this band.
double boundary_band(const GaussianWindow& window, double gamma);

} // namespace tfgdd
