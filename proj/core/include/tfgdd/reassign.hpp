#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tfgdd/fct.hpp"
#include "tfgdd/signal.hpp"
#include "tfgdd/window.hpp"

namespace tfgdd {

// Group-delay / group-delay-dispersion reference functions over the same
// (t_n, eta_j, gamma_l) axes as the source grids. Cells whose determinant
// fails the threshold carry NaN estimates and mask = 0.
struct ReassignmentField {
    std::vector<double> t_hat;      // seconds; NaN where unmasked
    std::vector<double> r_hat;      // s/Hz;   NaN where unmasked
    std::vector<double> det_e0_mag; // |D0 D2 - D1^2|
    std::vector<std::uint8_t> mask; // det_e0_mag > epsilon_used
    double epsilon_used = 0.0;

    std::size_t n_t = 0;
    std::size_t n_eta = 0;
    std::size_t n_gamma = 0;
    double t_start = 0.0;
    double dt = 0.0;
    double eta_start = 0.0;
    double d_eta = 0.0;
    double gamma_start = 0.0;
    double d_gamma = 0.0;
    double sigma = 0.0;

    std::size_t index(std::size_t n, std::size_t j, std::size_t l) const {
        return (j * n_gamma + l) * n_t + n;
    }
    double time_at(std::size_t n) const { return t_start + static_cast<double>(n) * dt; }
    double eta_at(std::size_t j) const {
        return eta_start + static_cast<double>(j) * d_eta;
    }
    double gamma_at(std::size_t l) const {
        return gamma_start + static_cast<double>(l) * d_gamma;
    }
    std::size_t cells() const { return n_t * n_eta * n_gamma; }
    bool axes_match(const TFGDDGrid& grid) const;
};

// Single-cell estimate from the three window powers at one (t, gamma):
//   t_hat = t + (1/2pi) Im[(D2 Dg' - D1 Dxg' - D1 D0) / (D2 D0 - D1^2)]
//   r_hat = gamma + (1/2pi) Im[(D0 Dxg' - D1 Dg' + D0^2) / (D2 D0 - D1^2)]
// with the Gaussian derivative-window reductions Dg' = -D1/sigma^2 and
// Dxg' = -D2/sigma^2. Estimates are NaN when |det| <= det_floor.
struct CellEstimate {
    double t_hat;
    double r_hat;
    double det_mag;
};
CellEstimate reassign_cell(std::complex<double> d0, std::complex<double> d1,
                           std::complex<double> d2, double t, double gamma,
                           double sigma, double det_floor);

// Field over full grids of window powers m = 0, 1, 2 (same signal and
// window). The mask threshold is relative: epsilon_used =
// epsilon_rel * max |det|.
ReassignmentField reference_functions(const TFGDDGrid& d0, const TFGDDGrid& d1,
                                      const TFGDDGrid& d2, const GaussianWindow& window,
                                      double epsilon_rel = 1e-3);

// Order-N estimates from the window powers m = 0..2N-2 (grids[m] must carry
// power m). The N x N determinant system generalizes the base formulas;
// derivative-window transforms are reduced in place via the Gaussian
// identity D^{xi^j g'} = -D^{xi^{j+1} g} / sigma^2, so no separate
// derivative grids are needed. N = 2 reproduces reference_functions.
ReassignmentField high_order_reference(const std::vector<const TFGDDGrid*>& grids,
                                       const GaussianWindow& window, int order,
                                       double epsilon_rel = 1e-3);

// Masked-cell estimation errors inside each mode's separation box
//   Z_k = { |t - gd_k(eta)| < delta1  and  |gamma - gdd_k(eta)| < delta2 }.
// `empty` flags a Z_k that misses the grid entirely (no cell inside the box,
// masked or not).
struct ZkResiduals {
    std::size_t mode = 0;
    bool empty = false;
    struct Cell {
        std::size_t n, j, l;
        double t_err; // |t_hat - gd_k(eta_j)|
        double r_err; // |r_hat - gdd_k(eta_j)|
    };
    std::vector<Cell> cells;
};
std::vector<ZkResiduals> theorem1_residuals(const ReassignmentField& field,
                                            const std::vector<ModeSpec>& truth,
                                            double delta1, double delta2);

// Binary container round trip: three float64 planes (t_hat, r_hat,
// det_e0_mag) in grid order, a mask byte-plane, then epsilon_used as a
// trailing float64.
void save_field(const ReassignmentField& field, const std::string& path);
ReassignmentField load_field(const std::string& path);

} // namespace tfgdd
