#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "tfgdd/fgsso.hpp"
#include "tfgdd/reassign.hpp"
#include "tfgdd/ridges.hpp"
#include "tfgdd/signal.hpp"
#include "tfgdd/window.hpp"

namespace tfgdd {

// Regularity constants of the analyzed signal family over a frequency band:
// amplitude-derivative bound eps1, third-phase-derivative bound eps2, and the
// half-separations (delta1 in group delay, delta2 in dispersion) that keep the
// per-mode boxes Z_k = {|t - gd_k| < delta1, |gamma - gdd_k| < delta2}
// disjoint. eps0 is the reciprocal floor of |det E0| over the cells a bound
// is asserted on; it is measured from an actual field (measure_eps0), never
// assumed.
struct ClassParams {
    double eps1 = 0.0;   // sup |B_k'|
    double eps2 = 0.0;   // sup |theta_k'''|
    double delta1 = 0.0; // group-delay half-separation, s
    double delta2 = 0.0; // dispersion half-separation, s/Hz
    double eps0 = 0.0;   // 1 / min |det E0|, measured a posteriori
};

// Measures eps1, eps2, delta1, delta2 over [eta_lo, eta_hi] by dense sampling
// (2048 points, derivatives by central differences) with three-point
// parabolic refinement at each extremum. The separations are the largest pair
// (delta1, delta2) of the form s * (half sup separation per axis) such that
// every frequency and mode pair clears at least one of the two: this follows
// the class requirement, which allows the separating derivative to change
// along the band. With a single mode both separations are +infinity
// (unconstrained). eps0 is left 0. Throws ConfigError when some amplitude is
// not strictly positive on the band.
ClassParams measure_class_params(const std::vector<ModeSpec>& modes,
                                 double eta_lo, double eta_hi);

// 1 / min |det E0| over the masked cells of the field inside mode k's box
// Z_k. Throws NumericalError when no masked cell falls inside the box.
double measure_eps0(const ReassignmentField& field,
                    const std::vector<ModeSpec>& modes, std::size_t k,
                    double delta1, double delta2);

// The bound ingredients at one frequency, everything indexed as in the
// estimates they feed:
//   pi_ml[m][l]   = eps1 I_{m+1} + eps2 (pi/3) B_l I_{m+3}        (m = 0..3)
//   pi_m[m]       = sum_l pi_ml[m][l]                             (m = 0..3)
//   gamma_m[m][k] = B_k I_m + sum_{l != k} B_l Y_m + pi_m[m]      (m = 0..2)
//   lambda_m[m][k] = eps1 K I_m + eps1 eps2 pi K I_{m+3}
//                  + eps2 pi M I_{m+2}
//                  + sum_{l != k} 2 pi ( |gd_k - gd_l| (B_l Y_m + pi_ml[m][l])
//                      + |gdd_k - gdd_l| (B_l Y_{m+1} + pi_ml[m+1][l]) )
//                                                                 (m = 0..1)
// with I_m the window's absolute moments, Y_m the kernel tail bound outside
// the (delta1, delta2) box, and M = m_eta = sum_l B_l.
struct LemmaQuantities {
    std::vector<std::vector<double>> pi_ml;
    std::vector<double> pi_m;
    std::vector<std::vector<double>> gamma_m;
    std::vector<std::vector<double>> lambda_m;
    double m_eta = 0.0;
};
// Requires finite positive separations when more than one mode is present
// (the tail bound needs a box); eps1, eps2 must be non-negative.
LemmaQuantities lemma_quantities(const ClassParams& params,
                                 const std::vector<ModeSpec>& modes,
                                 const GaussianWindow& window, double eta);

// Worst-case estimate errors inside Z_k for the masked cells the
// determinant floor eps0 was measured over:
//   bound_t[k] = (eps0 / 2 pi) (lambda_0k gamma_2k + lambda_1k gamma_1k)
//   bound_r[k] = (eps0 / 2 pi) (lambda_0k gamma_1k + lambda_1k gamma_0k).
// Requires params.eps0 > 0 (measure it first).
struct Theorem1Bounds {
    std::vector<double> bound_t; // seconds, per mode
    std::vector<double> bound_r; // s/Hz, per mode
};
Theorem1Bounds theorem1_rhs(const ClassParams& params, const LemmaQuantities& lq);

// Worst-case per-frequency measurement error of the unmixing inputs and the
// induced per-mode recovery bounds:
//   omega0 = eps1 K I_1 + eps2 (pi/3) M I_3
//          + sum_l B_l (2 pi |tau_l - gd_l| I_1 + pi |gamma_l - gdd_l| I_2)
//   per_mode[k] = omega0 * sum_l |b(l, k)|.
// ridges[l] must describe modes[l] (same order); eta must land on the ridge
// grid inside every support, as in assemble_A.
struct RecoveryBound {
    double omega0 = 0.0;
    std::vector<double> per_mode;
};
RecoveryBound recovery_bound(const ClassParams& params,
                             const std::vector<ModeSpec>& modes,
                             const RidgeSet& ridges, double eta,
                             const GaussianWindow& window,
                             const MixingMatrix& mixing);

// One row of the bound-versus-measurement report. The measured_* fields are
// NaN until a joint run fills them; the remaining ingredients are kept so a
// report can be audited without re-deriving them.
struct BoundRow {
    double eta_hz = 0.0;
    std::size_t mode = 0;
    double bound_t = 0.0;
    double bound_r = 0.0;
    double omega0 = 0.0;
    double recovery_bound = 0.0;
    double measured_t_err = std::numeric_limits<double>::quiet_NaN();
    double measured_r_err = std::numeric_limits<double>::quiet_NaN();
    double measured_recovery_err = std::numeric_limits<double>::quiet_NaN();
    // Ingredients (not exported): pi_m, gamma_m, lambda_m at this eta for
    // this mode, and the amplitude sum.
    double pi_0 = 0.0, pi_1 = 0.0;
    double gamma_0 = 0.0, gamma_1 = 0.0, gamma_2 = 0.0;
    double lambda_0 = 0.0, lambda_1 = 0.0;
    double m_eta = 0.0;
};
struct BoundReport {
    std::vector<BoundRow> rows;
};

// eta_hz,mode,bound_t,bound_r,omega0,recovery_bound,measured_t_err,
// measured_r_err,measured_recovery_err — one row per (eta, mode), NaN
// rendered as nan.
void write_bound_csv(const BoundReport& report, const std::string& path);

} // namespace tfgdd
