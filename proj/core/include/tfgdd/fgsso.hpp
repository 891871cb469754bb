#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tfgdd/ridges.hpp"
#include "tfgdd/signal.hpp"
#include "tfgdd/window.hpp"

namespace tfgdd {

// Per-frequency mode-mixing system. Entry (k, l) is the amount a unit mode
// concentrated on ridge l contributes to the transform evaluated at ridge k's
// coordinates,
//   a_{k,l} = kernel_C(0, tau_l - tau_k, gamma_l - gamma_k)
//           = (1 + i 2 pi sigma^2 (gamma_l - gamma_k))^{-1/2}
//             exp(-2 pi^2 sigma^2 (tau_l - tau_k)^2
//                 / (1 + i 2 pi sigma^2 (gamma_l - gamma_k))),
// so the diagonal is exactly 1 and the matrix is Hermitian. inverse holds
// A^{-1} computed by closed-form inversion for up to 4 modes and LU beyond,
// or the Moore-Penrose pseudo-inverse (pseudo set) when the smallest singular
// value drops below 1e-10 of the largest.
struct MixingMatrix {
    std::size_t k_modes = 0;
    std::vector<std::complex<double>> entries;  // row-major, a(k, l)
    std::vector<std::complex<double>> inverse;  // row-major, b(l, k)
    double inf_norm_inv = 0.0;  // max row sum of |inverse|
    double cond2 = 1.0;         // sigma_max / sigma_min (inf when singular)
    bool pseudo = false;

    std::complex<double> a(std::size_t k, std::size_t l) const {
        return entries[k * k_modes + l];
    }
    // Coefficient of the measurement at ridge l in recovered mode k, i.e.
    // entry (k, l) of the stored inverse.
    std::complex<double> b(std::size_t l, std::size_t k) const {
        return inverse[k * k_modes + l];
    }
};

// Mixing system at frequency eta, built from the ridge coordinates there.
// eta must land on the set's frequency grid (within 1e-6 of a cell) and lie
// inside every ridge's support; ConfigError otherwise.
MixingMatrix assemble_A(const RidgeSet& ridges, double eta,
                        const GaussianWindow& window);

// Output of the per-frequency unmixing. spectra[k][j] is mode k's recovered
// complex spectrum on the ridge set's frequency grid; columns outside the
// recovery band hold exact zeros. time_modes[k] is the inverse DFT of
// spectrum k placed in the non-negative half of a record-length bin vector
// (the negative-frequency half stays zero), so it is sampled like the
// analyzed record. diagnostics holds the solved system of every column of
// the common ridge support, diagnostics[i] at frequency
// eta_start + (support_lo + i) * d_eta.
struct RecoveredModes {
    std::vector<std::vector<std::complex<double>>> spectra;
    std::vector<SampledSignal> time_modes;
    std::vector<MixingMatrix> diagnostics;
    std::size_t support_lo = 0;        // common ridge support, inclusive
    std::size_t support_hi = 0;
    // Per support column: 1 when the solution entered the spectra, 0 on
    // columns suppressed because some ridge sits in its record-edge band.
    std::vector<std::uint8_t> in_band;
    double eta_start = 0.0;
    double d_eta = 0.0;

    double eta_at(std::size_t j) const {
        return eta_start + static_cast<double>(j) * d_eta;
    }
};

// Recovers the K mode spectra from the record by inverting the per-frequency
// mixing system: at every column of the common ridge support the transform is
// evaluated with the recovery window at each ridge's exact (tau, gamma)
// coordinates by direct summation, and A x = d is solved with A assembled
// from the same window. The recovery band is the common support minus the
// columns where any ridge carries the record-edge flag; spectra are zero
// outside it. analysis_window must match the width the ridges were extracted
// with (ConfigError on mismatch); a narrower recovery_window trades
// cross-mode leakage against the accuracy of the local model. Singular
// columns fall back to the pseudo-inverse and keep their flag in
// diagnostics; if every column is singular the unmixing failed and a
// NumericalError is thrown. Columns are processed in parallel and the result
// is independent of the worker count.
RecoveredModes recover_modes(const SampledSignal& signal, const RidgeSet& ridges,
                             const GaussianWindow& analysis_window,
                             const GaussianWindow& recovery_window);
// Same, with the recovery window equal to the analysis window.
RecoveredModes recover_modes(const SampledSignal& signal, const RidgeSet& ridges,
                             const GaussianWindow& analysis_window);

// Conditioning curves of the solved systems, one point per column of the
// common ridge support.
struct DiagnosticsProfile {
    std::vector<double> eta;           // Hz
    std::vector<double> inf_norm_inv;
    std::vector<double> cond2;
    std::vector<std::uint8_t> pseudo;
};
DiagnosticsProfile diagnostics_profile(const RecoveredModes& modes);

// Plot-ready exports. Spectra rows cover the common support per mode:
//   mode_id,eta_hz,re,im
// Diagnostics rows cover the common support:
//   eta_hz,inf_norm_inv,cond2,pseudo_flag
void write_recovered_csv(const RecoveredModes& modes, const std::string& path);
void write_diagnostics_csv(const DiagnosticsProfile& profile, const std::string& path);

} // namespace tfgdd
