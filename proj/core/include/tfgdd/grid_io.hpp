#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tfgdd/fct.hpp"

namespace tfgdd {

// What a container file holds. Raw and squeezed grids are complex payloads;
// TFR projections and reassignment fields are sequences of float64 planes
// (the field adds a trailing mask byte-plane).
enum class GridKind : std::uint8_t {
    raw_fct = 0,
    squeezed = 1,
    tfr = 2,
    field = 3,
};

// Header echo of a container file. dtype: 0 = complex64, 1 = complex128,
// 2 = float64 planes.
struct GridFileInfo {
    GridKind kind = GridKind::raw_fct;
    std::uint8_t dtype = 1;
    std::size_t n_t = 0;
    std::size_t n_eta = 0;
    std::size_t n_gamma = 0;
    int window_power = 0;
    double sigma = 0.0;
    double t_start = 0.0;
    double dt = 0.0;
    double eta_start = 0.0;
    double d_eta = 0.0;
    double gamma_start = 0.0;
    double d_gamma = 0.0;
};

// Binary grid container ("TFGD", version 1): header then a little-endian
// payload in n-fastest order, offset = ((j*N_gamma) + l)*N_t + n. float32
// stores complex64 (lossy) instead of complex128.
void save_grid(const TFGDDGrid& grid, const std::string& path,
               GridKind kind = GridKind::raw_fct, bool float32 = false);
TFGDDGrid load_grid(const std::string& path, GridKind* kind_out = nullptr);

// Header only, payload untouched.
GridFileInfo peek_grid(const std::string& path);

// Real-payload containers (dtype 2): `planes` float64 planes in sequence,
// each in the same n-fastest order, then an optional byte plane (mask),
// then optional trailing float64 scalars. Plane count, mask presence and
// footer length are fixed by the kind, not recorded.
void save_real_planes(const GridFileInfo& info,
                      const std::vector<const double*>& planes,
                      const std::uint8_t* mask, const std::string& path,
                      const std::vector<double>& footer = {});
struct RealPlanesFile {
    GridFileInfo info;
    std::vector<std::vector<double>> planes;
    std::vector<std::uint8_t> mask;
    std::vector<double> footer;
};
RealPlanesFile load_real_planes(const std::string& path, std::size_t n_planes,
                                bool with_mask, std::size_t n_footer = 0);

} // namespace tfgdd
