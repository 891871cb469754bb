#include "tfgdd/tsfct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "tfgdd/errors.hpp"
#include "tfgdd/grid_io.hpp"
#include "tfgdd/parallel.hpp"

namespace tfgdd {

SqueezedGrid squeeze(const TFGDDGrid& d0, const ReassignmentField& field) {
    if (d0.window_power != 0)
        throw ConfigError("squeeze expects the window-power-0 grid, got power " +
                          std::to_string(d0.window_power));
    if (!field.axes_match(d0))
        throw ConfigError("squeeze: field and grid axes differ");

    SqueezedGrid out;
    out.grid = d0;
    std::fill(out.grid.values.begin(), out.grid.values.end(),
              std::complex<double>(0.0, 0.0));

    const std::size_t n_t = d0.n_t, n_gamma = d0.n_gamma;
    const double t_start = d0.t_start, dt = d0.dt;
    const double g_start = d0.gamma_start, dg = d0.d_gamma;
    std::vector<std::uint64_t> drop_t(d0.n_eta, 0), drop_g(d0.n_eta, 0);

    // One worker owns a whole frequency column: reads and writes stay inside
    // the column's contiguous block and accumulate in fixed (l, n) order.
    parallel_for(d0.n_eta, [&](std::size_t j) {
        const std::size_t col = j * n_gamma * n_t;
        for (std::size_t l = 0; l < n_gamma; ++l)
            for (std::size_t n = 0; n < n_t; ++n) {
                const std::size_t i = col + l * n_t + n;
                if (!field.mask[i]) continue;
                // nearbyint under the default rounding mode resolves
                // half-cell ties to the even bin index.
                const double pb = std::nearbyint((field.t_hat[i] - t_start) / dt);
                const double qb =
                    std::nearbyint((field.r_hat[i] - g_start) / dg);
                bool keep = true;
                if (!(pb >= 0.0 && pb < static_cast<double>(n_t))) {
                    ++drop_t[j];
                    keep = false;
                }
                if (!(qb >= 0.0 && qb < static_cast<double>(n_gamma))) {
                    ++drop_g[j];
                    keep = false;
                }
                if (keep)
                    out.grid.values[col + static_cast<std::size_t>(qb) * n_t +
                                    static_cast<std::size_t>(pb)] +=
                        d0.values[i];
            }
    });
    for (std::size_t j = 0; j < d0.n_eta; ++j) {
        out.dropped_time += drop_t[j];
        out.dropped_gamma += drop_g[j];
    }
    return out;
}

TFRGrid project_tfr(const SqueezedGrid& squeezed) {
    const TFGDDGrid& g = squeezed.grid;
    TFRGrid tfr;
    tfr.n_t = g.n_t;
    tfr.n_eta = g.n_eta;
    tfr.t_start = g.t_start;
    tfr.dt = g.dt;
    tfr.eta_start = g.eta_start;
    tfr.d_eta = g.d_eta;
    tfr.sigma = g.sigma;
    tfr.values.assign(g.n_t * g.n_eta, 0.0);
    parallel_for(g.n_eta, [&](std::size_t j) {
        for (std::size_t l = 0; l < g.n_gamma; ++l)
            for (std::size_t p = 0; p < g.n_t; ++p) {
                const double m = std::abs(g.values[g.index(p, j, l)]);
                tfr.values[tfr.index(p, j)] += m * m * g.d_gamma;
            }
    });
    return tfr;
}

void save_tfr(const TFRGrid& tfr, const std::string& path) {
    GridFileInfo info;
    info.kind = GridKind::tfr;
    info.dtype = 2; // real plane
    info.n_t = tfr.n_t;
    info.n_eta = tfr.n_eta;
    info.n_gamma = 1;
    info.window_power = 0;
    info.sigma = tfr.sigma;
    info.t_start = tfr.t_start;
    info.dt = tfr.dt;
    info.eta_start = tfr.eta_start;
    info.d_eta = tfr.d_eta;
    info.gamma_start = 0.0;
    info.d_gamma = 0.0;
    save_real_planes(info, {tfr.values.data()}, nullptr, path);
}

TFRGrid load_tfr(const std::string& path) {
    RealPlanesFile file = load_real_planes(path, 1, false);
    if (file.info.kind != GridKind::tfr)
        throw IoError(path + ": not a time-frequency projection file");
    TFRGrid tfr;
    tfr.n_t = file.info.n_t;
    tfr.n_eta = file.info.n_eta;
    tfr.t_start = file.info.t_start;
    tfr.dt = file.info.dt;
    tfr.eta_start = file.info.eta_start;
    tfr.d_eta = file.info.d_eta;
    tfr.sigma = file.info.sigma;
    tfr.values = std::move(file.planes[0]);
    return tfr;
}

void write_tfr_csv(const TFRGrid& tfr, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fputs("tau_s", f);
    for (std::size_t j = 0; j < tfr.n_eta; ++j)
        std::fprintf(f, ",%.17g", tfr.eta_at(j));
    std::fputc('\n', f);
    for (std::size_t p = 0; p < tfr.n_t; ++p) {
        std::fprintf(f, "%.17g", tfr.time_at(p));
        for (std::size_t j = 0; j < tfr.n_eta; ++j)
            std::fprintf(f, ",%.17g", tfr.at(p, j));
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw IoError(path + ": write failed");
}

} // namespace tfgdd
