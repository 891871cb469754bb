#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfgdd/tsfct.hpp"

namespace tfgdd {

// One extracted curve through the squeezed (t, eta, gamma) volume: per eta
// column a group-delay / dispersion coordinate pair with the modulus found
// there. Cell indices are the dynamic-programming choices before sub-cell
// refinement; tau/gamma carry the refined (and, on boundary columns,
// extrapolated) coordinates.
struct Ridge {
    std::vector<double> tau;         // seconds, one entry per eta column
    std::vector<double> gamma;       // s/Hz, one entry per eta column
    std::vector<double> amplitude;   // |D| at the chosen cell
    std::vector<int> t_cells;        // chosen time-bin index per column
    std::vector<int> g_cells;        // chosen gamma-bin index per column
    // 1 where the group delay sits within the record-edge band (width three
    // dispersion-broadened window time scales); such columns are replaced by
    // linear extrapolation from the trusted interior rather than measured.
    std::vector<std::uint8_t> boundary;
    // Inclusive eta-index support: the first and last columns whose modulus
    // rises above the grid's noise floor (the whole band when none does).
    // Outside the support the curve continues wherever the dynamic program
    // parked it and carries no information.
    std::size_t j_lo = 0;
    std::size_t j_hi = 0;
    double total_amplitude = 0.0;    // sum of |D| over all columns
    // Set when the median modulus along the curve does not rise above the
    // grid's noise floor, i.e. the requested mode count likely exceeds the
    // number of distinguishable ridges.
    bool low_confidence = false;
};

// Extraction output plus the axis metadata needed to interpret the curves
// without the originating grid.
struct RidgeSet {
    std::vector<Ridge> ridges;       // ordered by descending total amplitude
    double t_start = 0.0;
    double dt = 0.0;
    double eta_start = 0.0;
    double d_eta = 0.0;
    double gamma_start = 0.0;
    double d_gamma = 0.0;
    double sigma = 0.0;
    // Median of the nonzero cell moduli before any peeling; the reference
    // level for the low-confidence flag.
    double noise_floor = 0.0;

    double eta_at(std::size_t j) const {
        return eta_start + static_cast<double>(j) * d_eta;
    }
};

struct RidgeConfig {
    int k_modes = 1;      // number of peeling passes
    int jump_t = 2;       // max per-column step along the time axis, cells
    int jump_g = 2;       // max per-column step along the gamma axis, cells
    int clear_radius = 2; // half-width of the square zeroed around each curve
    // Step penalty per squared cell of movement, in log-amplitude units: a
    // one-cell step is forgiven when the destination is at least e^(penalty/2)
    // times brighter than staying put. Stiff enough to damp interference
    // wobble near crossings, soft enough to follow slopes of a few cells per
    // column.
    double penalty = 1.0;
};

// Peel k_modes curves off the squeezed volume. Each pass runs a dynamic
// program over the eta columns that maximizes the summed log squared modulus
// (floored at 1e-12 of the field peak) minus penalty per squared cell of
// movement, then zeroes a (2*clear_radius+1)^2 neighborhood of the chosen
// cells in every column before the next pass. Coordinates are refined
// off-grid by three-point parabolic interpolation of |D| along each axis
// independently. Throws ConfigError for k_modes < 1, negative jump limits or
// clear radius, a gamma-squeezed input (window_power != 0), or an all-zero
// grid.
RidgeSet extract_ridges(const SqueezedGrid& squeezed, const RidgeConfig& cfg = {});

// Plot-ready export, one row per (ridge, eta) pair:
// ridge_id,eta_hz,tau_s,gamma_s_per_hz,amplitude
void write_ridge_csv(const RidgeSet& set, const std::string& path);

} // namespace tfgdd
