#include "tfgdd/reassign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "tfgdd/errors.hpp"
#include "tfgdd/grid_io.hpp"
#include "tfgdd/parallel.hpp"

namespace tfgdd {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Small complex matrix with stack storage; the estimator orders are <= 4x4.
using SmallMatrix =
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

ReassignmentField field_like(const TFGDDGrid& grid) {
    ReassignmentField f;
    f.n_t = grid.n_t;
    f.n_eta = grid.n_eta;
    f.n_gamma = grid.n_gamma;
    f.t_start = grid.t_start;
    f.dt = grid.dt;
    f.eta_start = grid.eta_start;
    f.d_eta = grid.d_eta;
    f.gamma_start = grid.gamma_start;
    f.d_gamma = grid.d_gamma;
    f.sigma = grid.sigma;
    const std::size_t cells = f.cells();
    f.t_hat.assign(cells, kNaN);
    f.r_hat.assign(cells, kNaN);
    f.det_e0_mag.assign(cells, 0.0);
    f.mask.assign(cells, 0);
    return f;
}

// Relative threshold with a machine-tiny defensive floor; max_det == 0
// (zero signal) leaves every cell unmasked.
double resolve_epsilon(double epsilon_rel, double max_det) {
    if (!(epsilon_rel > 0.0) || !(epsilon_rel < 1.0))
        throw ConfigError("mask threshold fraction must lie in (0, 1)");
    return epsilon_rel * max_det;
}

double mask_floor(double epsilon_used) {
    return std::max(epsilon_used, std::numeric_limits<double>::min());
}

void check_inputs(const TFGDDGrid& d0, const TFGDDGrid& d1, const TFGDDGrid& d2,
                  const GaussianWindow& window) {
    if (d0.window_power != 0 || d1.window_power != 1 || d2.window_power != 2)
        throw ConfigError("reference functions need window powers 0, 1, 2 in order");
    if (!d0.axes_match(d1) || !d0.axes_match(d2))
        throw ConfigError("window-power grids disagree on their axes");
    if (d0.sigma != window.sigma)
        throw ConfigError("window width disagrees with the grids");
    const std::size_t cells = d0.n_t * d0.n_eta * d0.n_gamma;
    if (d0.values.size() != cells || d1.values.size() != cells ||
        d2.values.size() != cells)
        throw ConfigError("grid value counts disagree with their axes");
}

} // namespace

bool ReassignmentField::axes_match(const TFGDDGrid& grid) const {
    return n_t == grid.n_t && n_eta == grid.n_eta && n_gamma == grid.n_gamma &&
           t_start == grid.t_start && dt == grid.dt &&
           eta_start == grid.eta_start && d_eta == grid.d_eta &&
           gamma_start == grid.gamma_start && d_gamma == grid.d_gamma &&
           sigma == grid.sigma;
}

CellEstimate reassign_cell(std::complex<double> d0, std::complex<double> d1,
                           std::complex<double> d2, double t, double gamma,
                           double sigma, double det_floor) {
    const std::complex<double> det = d2 * d0 - d1 * d1;
    CellEstimate out{kNaN, kNaN, std::abs(det)};
    if (!(out.det_mag > mask_floor(det_floor))) return out;
    const double inv_s2 = 1.0 / (sigma * sigma);
    const std::complex<double> dg1 = -d1 * inv_s2;  // D^{g'}
    const std::complex<double> dxg1 = -d2 * inv_s2; // D^{xi g'}
    const std::complex<double> num_t = d2 * dg1 - d1 * dxg1 - d1 * d0;
    const std::complex<double> num_r = d0 * dxg1 - d1 * dg1 + d0 * d0;
    out.t_hat = t + (num_t / det).imag() / kTwoPi;
    out.r_hat = gamma + (num_r / det).imag() / kTwoPi;
    return out;
}

ReassignmentField reference_functions(const TFGDDGrid& d0, const TFGDDGrid& d1,
                                      const TFGDDGrid& d2, const GaussianWindow& window,
                                      double epsilon_rel) {
    if (!(epsilon_rel > 0.0) || !(epsilon_rel < 1.0))
        throw ConfigError("mask threshold fraction must lie in (0, 1)");
    check_inputs(d0, d1, d2, window);
    ReassignmentField field = field_like(d0);

    // Pass 1: determinant magnitudes and their global maximum.
    std::vector<double> column_max(field.n_eta, 0.0);
    parallel_for(field.n_eta, [&](std::size_t j) {
        double local = 0.0;
        for (std::size_t l = 0; l < field.n_gamma; ++l)
            for (std::size_t n = 0; n < field.n_t; ++n) {
                const std::size_t i = field.index(n, j, l);
                const std::complex<double> det =
                    d2.values[i] * d0.values[i] - d1.values[i] * d1.values[i];
                field.det_e0_mag[i] = std::abs(det);
                local = std::max(local, field.det_e0_mag[i]);
            }
        column_max[j] = local;
    });
    const double max_det = *std::max_element(column_max.begin(), column_max.end());
    field.epsilon_used = resolve_epsilon(epsilon_rel, max_det);

    // Pass 2: estimates on the cells that clear the threshold.
    parallel_for(field.n_eta, [&](std::size_t j) {
        for (std::size_t l = 0; l < field.n_gamma; ++l) {
            const double gamma = field.gamma_at(l);
            for (std::size_t n = 0; n < field.n_t; ++n) {
                const std::size_t i = field.index(n, j, l);
                const CellEstimate est =
                    reassign_cell(d0.values[i], d1.values[i], d2.values[i],
                                  field.time_at(n), gamma, window.sigma,
                                  field.epsilon_used);
                if (std::isnan(est.t_hat)) continue;
                field.t_hat[i] = est.t_hat;
                field.r_hat[i] = est.r_hat;
                field.mask[i] = 1;
            }
        }
    });
    return field;
}

ReassignmentField high_order_reference(const std::vector<const TFGDDGrid*>& grids,
                                       const GaussianWindow& window, int order,
                                       double epsilon_rel) {
    if (order < 2 || order > 4)
        throw ConfigError("estimator order must lie in [2, 4]");
    if (!(epsilon_rel > 0.0) || !(epsilon_rel < 1.0))
        throw ConfigError("mask threshold fraction must lie in (0, 1)");
    const std::size_t need = static_cast<std::size_t>(2 * order - 1); // m = 0..2N-2
    if (grids.size() < need)
        throw ConfigError("order " + std::to_string(order) + " needs window powers 0.." +
                          std::to_string(2 * order - 2));
    for (std::size_t m = 0; m < need; ++m) {
        if (!grids[m]) throw ConfigError("missing window-power grid");
        if (grids[m]->window_power != static_cast<int>(m))
            throw ConfigError("window-power grids must be supplied in order 0..2N-2");
        if (m > 0 && !grids[0]->axes_match(*grids[m]))
            throw ConfigError("window-power grids disagree on their axes");
    }
    if (grids[0]->sigma != window.sigma)
        throw ConfigError("window width disagrees with the grids");

    const int N = order;
    ReassignmentField field = field_like(*grids[0]);

    // Pass 1: |det E0| (Hankel matrix of the window powers) and its maximum.
    std::vector<double> column_max(field.n_eta, 0.0);
    parallel_for(field.n_eta, [&](std::size_t j) {
        SmallMatrix e0(N, N);
        double local = 0.0;
        for (std::size_t l = 0; l < field.n_gamma; ++l)
            for (std::size_t n = 0; n < field.n_t; ++n) {
                const std::size_t i = field.index(n, j, l);
                for (int row = 0; row < N; ++row)
                    for (int col = 0; col < N; ++col)
                        e0(row, col) = grids[static_cast<std::size_t>(row + col)]->values[i];
                field.det_e0_mag[i] = std::abs(e0.determinant());
                local = std::max(local, field.det_e0_mag[i]);
            }
        column_max[j] = local;
    });
    const double max_det = *std::max_element(column_max.begin(), column_max.end());
    field.epsilon_used = resolve_epsilon(epsilon_rel, max_det);
    const double floor = mask_floor(field.epsilon_used);

    // Pass 2: determinant ratios. Column 0 substitutions feed the GD
    // estimate, column 1 substitutions the GDD estimate; each uses the
    // derivative column (Gaussian reduction) plus the counting column.
    const double inv_s2 = 1.0 / (window.sigma * window.sigma);
    parallel_for(field.n_eta, [&](std::size_t j) {
        SmallMatrix e0(N, N), work(N, N);
        Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1, 0, 4, 1> deriv(N),
            counting(N);
        for (std::size_t l = 0; l < field.n_gamma; ++l) {
            const double gamma = field.gamma_at(l);
            for (std::size_t n = 0; n < field.n_t; ++n) {
                const std::size_t i = field.index(n, j, l);
                if (!(field.det_e0_mag[i] > floor)) continue;
                for (int row = 0; row < N; ++row) {
                    for (int col = 0; col < N; ++col)
                        work(row, col) =
                            grids[static_cast<std::size_t>(row + col)]->values[i];
                    deriv(row) =
                        -grids[static_cast<std::size_t>(row + 1)]->values[i] * inv_s2;
                    counting(row) =
                        row == 0 ? std::complex<double>{0.0, 0.0}
                                 : static_cast<double>(row) *
                                       grids[static_cast<std::size_t>(row - 1)]->values[i];
                }
                e0 = work;
                const std::complex<double> det0 = e0.determinant();

                work.col(0) = deriv;
                std::complex<double> num_t = work.determinant();
                work.col(0) = counting;
                num_t += work.determinant();
                work.col(0) = e0.col(0);

                work.col(1) = deriv;
                std::complex<double> num_r = work.determinant();
                work.col(1) = counting;
                num_r += work.determinant();

                field.t_hat[i] = field.time_at(n) + (num_t / det0).imag() / kTwoPi;
                field.r_hat[i] = gamma + (num_r / det0).imag() / kTwoPi;
                field.mask[i] = 1;
            }
        }
    });
    return field;
}

std::vector<ZkResiduals> theorem1_residuals(const ReassignmentField& field,
                                            const std::vector<ModeSpec>& truth,
                                            double delta1, double delta2) {
    if (!(delta1 > 0.0) || !(delta2 > 0.0))
        throw ConfigError("separation box half-widths must be positive");
    std::vector<ZkResiduals> out(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const ModeSpec& mode = truth[k];
        if (!mode.phase_d1 || !mode.phase_d2)
            throw ConfigError("mode truth needs first and second phase derivatives");
        ZkResiduals& res = out[k];
        res.mode = k;
        std::size_t inside = 0;
        for (std::size_t j = 0; j < field.n_eta; ++j) {
            const double gd = mode.phase_d1(field.eta_at(j));
            const double gdd = mode.phase_d2(field.eta_at(j));
            for (std::size_t l = 0; l < field.n_gamma; ++l) {
                if (!(std::abs(field.gamma_at(l) - gdd) < delta2)) continue;
                for (std::size_t n = 0; n < field.n_t; ++n) {
                    if (!(std::abs(field.time_at(n) - gd) < delta1)) continue;
                    ++inside;
                    const std::size_t i = field.index(n, j, l);
                    if (!field.mask[i]) continue;
                    res.cells.push_back({n, j, l, std::abs(field.t_hat[i] - gd),
                                         std::abs(field.r_hat[i] - gdd)});
                }
            }
        }
        res.empty = inside == 0;
    }
    return out;
}

void save_field(const ReassignmentField& field, const std::string& path) {
    const std::size_t cells = field.cells();
    if (field.t_hat.size() != cells || field.r_hat.size() != cells ||
        field.det_e0_mag.size() != cells || field.mask.size() != cells)
        throw ConfigError("field plane sizes disagree with its axes");
    GridFileInfo info;
    info.kind = GridKind::field;
    info.n_t = field.n_t;
    info.n_eta = field.n_eta;
    info.n_gamma = field.n_gamma;
    info.window_power = 0;
    info.sigma = field.sigma;
    info.t_start = field.t_start;
    info.dt = field.dt;
    info.eta_start = field.eta_start;
    info.d_eta = field.d_eta;
    info.gamma_start = field.gamma_start;
    info.d_gamma = field.d_gamma;
    save_real_planes(info,
                     {field.t_hat.data(), field.r_hat.data(), field.det_e0_mag.data()},
                     field.mask.data(), path, {field.epsilon_used});
}

ReassignmentField load_field(const std::string& path) {
    RealPlanesFile file = load_real_planes(path, 3, true, 1);
    if (file.info.kind != GridKind::field)
        throw IoError("container does not hold a reassignment field: " + path);
    ReassignmentField field;
    field.n_t = file.info.n_t;
    field.n_eta = file.info.n_eta;
    field.n_gamma = file.info.n_gamma;
    field.t_start = file.info.t_start;
    field.dt = file.info.dt;
    field.eta_start = file.info.eta_start;
    field.d_eta = file.info.d_eta;
    field.gamma_start = file.info.gamma_start;
    field.d_gamma = file.info.d_gamma;
    field.sigma = file.info.sigma;
    field.t_hat = std::move(file.planes[0]);
    field.r_hat = std::move(file.planes[1]);
    field.det_e0_mag = std::move(file.planes[2]);
    field.mask = std::move(file.mask);
    field.epsilon_used = file.footer[0];
    return field;
}

} // namespace tfgdd
