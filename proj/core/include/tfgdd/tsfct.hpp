#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfgdd/fct.hpp"
#include "tfgdd/reassign.hpp"

namespace tfgdd {

// Result of synchrosqueezing a transform grid along the estimated
// (group delay, dispersion) coordinates at fixed frequency. The value grid
// reuses the source axes: output cell (p, j, q) holds the complex sum of all
// masked source cells (n, j, l) whose estimates fall within half a cell of
// (tau_p, u_q). Estimates landing outside an output axis are dropped, never
// clamped; each counter tallies the points that violated that axis (a point
// off both axes increments both).
struct SqueezedGrid {
    TFGDDGrid grid;
    std::uint64_t dropped_time = 0;
    std::uint64_t dropped_gamma = 0;
};

// Time-frequency projection of a squeezed grid: real non-negative energy
// surface over (tau_p, eta_j). Values are stored tau-fastest per frequency
// column: values[j * n_t + p].
struct TFRGrid {
    std::size_t n_t = 0;
    std::size_t n_eta = 0;
    double t_start = 0.0;
    double dt = 0.0;
    double eta_start = 0.0;
    double d_eta = 0.0;
    double sigma = 0.0;
    std::vector<double> values;

    std::size_t index(std::size_t p, std::size_t j) const { return j * n_t + p; }
    double at(std::size_t p, std::size_t j) const { return values[index(p, j)]; }
    double time_at(std::size_t p) const {
        return t_start + static_cast<double>(p) * dt;
    }
    double eta_at(std::size_t j) const {
        return eta_start + static_cast<double>(j) * d_eta;
    }
};

// Scatters every masked cell of d0 to the nearest (tau, u) bin of its
// estimates, summing complex values. Mass never crosses frequency columns;
// each column is accumulated in a fixed serial order, so the result is
// byte-identical for every thread count. Bin selection rounds half-cell ties
// to the even index. Requires d0 to be an unweighted (window power 0) grid
// sharing axes with the field.
SqueezedGrid squeeze(const TFGDDGrid& d0, const ReassignmentField& field);

// T(tau_p, eta_j) = sum_q |value(p, j, q)|^2 * d_gamma.
TFRGrid project_tfr(const SqueezedGrid& squeezed);

// TFR container I/O (binary single-plane file) and CSV export. The CSV is a
// labeled matrix: first row lists eta in Hz, first column lists tau in
// seconds, cells hold the energy values.
void save_tfr(const TFRGrid& tfr, const std::string& path);
TFRGrid load_tfr(const std::string& path);
void write_tfr_csv(const TFRGrid& tfr, const std::string& path);

} // namespace tfgdd
