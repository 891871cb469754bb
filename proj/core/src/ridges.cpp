#include "tfgdd/ridges.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tfgdd/errors.hpp"
#include "tfgdd/fct.hpp"
#include "tfgdd/parallel.hpp"

namespace tfgdd {

namespace {

// Candidate steps ordered by increasing magnitude so that exact ties (empty
// columns score every candidate identically) keep the path where it is
// instead of drifting toward one end of the scan window.
std::vector<int> step_order(int limit) {
    std::vector<int> order;
    order.reserve(2 * static_cast<std::size_t>(limit) + 1);
    order.push_back(0);
    for (int d = 1; d <= limit; ++d) {
        order.push_back(-d);
        order.push_back(d);
    }
    return order;
}

// Vertex offset of the parabola through (-1, ym), (0, y0), (1, yp), clamped
// to half a cell; zero when the three points are collinear or the vertex is
// not a maximum between the neighbors.
double parabolic_offset(double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (denom >= 0.0) return 0.0;
    const double delta = 0.5 * (ym - yp) / denom;
    return std::clamp(delta, -0.5, 0.5);
}

void check_config(const RidgeConfig& cfg) {
    if (cfg.k_modes < 1)
        throw ConfigError("ridge extraction requires k_modes >= 1");
    if (cfg.jump_t < 0 || cfg.jump_g < 0)
        throw ConfigError("ridge jump limits must be non-negative");
    if (cfg.jump_t > 100 || cfg.jump_g > 100)
        throw ConfigError("ridge jump limits above 100 cells are not supported");
    if (cfg.clear_radius < 0)
        throw ConfigError("ridge clear radius must be non-negative");
    if (!(cfg.penalty >= 0.0))
        throw ConfigError("ridge step penalty must be non-negative");
}

struct DpPath {
    std::vector<int> t_cells;
    std::vector<int> g_cells;
};

// Maximize sum_j 2 ln(max(|D(cell_j)|, floor)) - penalty * sum_{j>=1}
// ((dp_j)^2 + (dq_j)^2) over column-to-column paths with |dp| <= jump_t,
// |dq| <= jump_g. Log amplitude makes the choice scale-free within each
// column, so a weak ridge is tracked as faithfully as a bright one, and the
// floor (1e-12 of the field's peak modulus) turns empty cells into a large
// but finite deficit: a path parks on silence only when nothing brighter is
// reachable. The quadratic penalty is separable, so each transition is two
// one-dimensional max-convolutions.
DpPath run_dp(const std::vector<double>& mod, std::size_t n_t, std::size_t n_eta,
              std::size_t n_gamma, int jump_t, int jump_g, double penalty) {
    const std::size_t col_cells = n_t * n_gamma;
    const std::vector<int> order_t = step_order(jump_t);
    const std::vector<int> order_g = step_order(jump_g);

    double peak = 0.0;
    for (double v : mod) peak = std::max(peak, v);
    const double floor_mod = std::max(peak, std::numeric_limits<double>::min()) * 1e-12;
    const auto gain = [floor_mod](double v) { return 2.0 * std::log(std::max(v, floor_mod)); };

    std::vector<double> score_prev(col_cells);
    std::vector<double> score_cur(col_cells);
    std::vector<double> along_t(col_cells);
    // Transition choices into each column; column 0 has none.
    std::vector<std::int8_t> back_dp(n_eta * col_cells, 0);
    std::vector<std::int8_t> back_dq(n_eta * col_cells, 0);

    for (std::size_t c = 0; c < col_cells; ++c) score_prev[c] = gain(mod[c]);

    for (std::size_t j = 1; j < n_eta; ++j) {
        const double* col_mod = mod.data() + j * col_cells;
        const double w = penalty;
        std::int8_t* bp = back_dp.data() + j * col_cells;
        std::int8_t* bq = back_dq.data() + j * col_cells;

        // Pass 1: maximize over the time step at fixed gamma row.
        parallel_for(n_gamma, [&](std::size_t q) {
            const double* prev_row = score_prev.data() + q * n_t;
            double* out_row = along_t.data() + q * n_t;
            std::int8_t* bp_row = bp + q * n_t;
            for (std::size_t p = 0; p < n_t; ++p) {
                double best = -std::numeric_limits<double>::infinity();
                int best_dp = 0;
                for (int dp : order_t) {
                    const long src = static_cast<long>(p) - dp;
                    if (src < 0 || src >= static_cast<long>(n_t)) continue;
                    const double cand = prev_row[src] - w * static_cast<double>(dp) * dp;
                    if (cand > best) {
                        best = cand;
                        best_dp = dp;
                    }
                }
                out_row[p] = best;
                bp_row[p] = static_cast<std::int8_t>(best_dp);
            }
        });

        // Pass 2: maximize over the gamma step at fixed time bin and add the
        // column's scores.
        parallel_for(n_t, [&](std::size_t p) {
            for (std::size_t q = 0; q < n_gamma; ++q) {
                double best = -std::numeric_limits<double>::infinity();
                int best_dq = 0;
                for (int dq : order_g) {
                    const long src = static_cast<long>(q) - dq;
                    if (src < 0 || src >= static_cast<long>(n_gamma)) continue;
                    const double cand =
                        along_t[static_cast<std::size_t>(src) * n_t + p] -
                        w * static_cast<double>(dq) * dq;
                    if (cand > best) {
                        best = cand;
                        best_dq = dq;
                    }
                }
                score_cur[q * n_t + p] = gain(col_mod[q * n_t + p]) + best;
                bq[q * n_t + p] = static_cast<std::int8_t>(best_dq);
            }
        });

        score_prev.swap(score_cur);
    }

    // Backtrack from the best terminal cell (first maximum in layout order).
    std::size_t best_cell = 0;
    double best_score = score_prev[0];
    for (std::size_t c = 1; c < col_cells; ++c) {
        if (score_prev[c] > best_score) {
            best_score = score_prev[c];
            best_cell = c;
        }
    }

    DpPath path;
    path.t_cells.resize(n_eta);
    path.g_cells.resize(n_eta);
    int p = static_cast<int>(best_cell % n_t);
    int q = static_cast<int>(best_cell / n_t);
    for (std::size_t j = n_eta; j-- > 1;) {
        path.t_cells[j] = p;
        path.g_cells[j] = q;
        const std::int8_t dq = back_dq[j * col_cells + static_cast<std::size_t>(q) * n_t +
                                       static_cast<std::size_t>(p)];
        q -= dq;
        const std::int8_t dp = back_dp[j * col_cells + static_cast<std::size_t>(q) * n_t +
                                       static_cast<std::size_t>(p)];
        p -= dp;
    }
    path.t_cells[0] = p;
    path.g_cells[0] = q;
    return path;
}

// Replace untrusted columns by the line through the two nearest trusted
// points: interpolation inside gaps, extrapolation past the ends. With fewer
// than two trusted columns there is nothing to anchor to and the measured
// values stay.
void straighten_untrusted(std::vector<double>& curve, const std::vector<std::uint8_t>& bad) {
    const std::size_t n = curve.size();
    std::vector<std::size_t> good;
    for (std::size_t j = 0; j < n; ++j)
        if (!bad[j]) good.push_back(j);
    if (good.size() < 2) return;
    for (std::size_t j = 0; j < n; ++j) {
        if (!bad[j]) continue;
        const auto it = std::lower_bound(good.begin(), good.end(), j);
        std::size_t a, b;
        if (it == good.begin()) {
            a = good[0];
            b = good[1];
        } else if (it == good.end()) {
            a = good[good.size() - 2];
            b = good[good.size() - 1];
        } else {
            a = *(it - 1);
            b = *it;
        }
        const double slope = (curve[b] - curve[a]) / static_cast<double>(b - a);
        curve[j] = curve[a] + slope * (static_cast<double>(j) - static_cast<double>(a));
    }
}

} // namespace

RidgeSet extract_ridges(const SqueezedGrid& squeezed, const RidgeConfig& cfg) {
    check_config(cfg);
    const TFGDDGrid& g = squeezed.grid;
    if (g.window_power != 0)
        throw ConfigError("ridge extraction expects a window-power-0 squeezed grid");
    if (g.values.empty() || g.n_t == 0 || g.n_eta == 0 || g.n_gamma == 0)
        throw ConfigError("ridge extraction requires a non-empty grid");

    const std::size_t n_t = g.n_t;
    const std::size_t n_eta = g.n_eta;
    const std::size_t n_gamma = g.n_gamma;
    const std::size_t col_cells = n_t * n_gamma;

    std::vector<double> mod(g.values.size());
    parallel_for(g.values.size(), [&](std::size_t i) { mod[i] = std::abs(g.values[i]); });

    std::vector<double> nonzero;
    for (double v : mod)
        if (v > 0.0) nonzero.push_back(v);
    if (nonzero.empty())
        throw ConfigError("ridge extraction requires a grid with nonzero mass");
    const std::size_t mid = nonzero.size() / 2;
    std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<long>(mid), nonzero.end());
    const double noise_floor = nonzero[mid];
    nonzero.clear();
    nonzero.shrink_to_fit();

    const GaussianWindow window{g.sigma > 0.0 ? g.sigma : 1.0};
    const double t_end = g.t_start + static_cast<double>(n_t - 1) * g.dt;

    RidgeSet set;
    set.t_start = g.t_start;
    set.dt = g.dt;
    set.eta_start = g.eta_start;
    set.d_eta = g.d_eta;
    set.gamma_start = g.gamma_start;
    set.d_gamma = g.d_gamma;
    set.sigma = g.sigma;
    set.noise_floor = noise_floor;

    for (int pass = 0; pass < cfg.k_modes; ++pass) {
        const DpPath path = run_dp(mod, n_t, n_eta, n_gamma, cfg.jump_t, cfg.jump_g, cfg.penalty);

        Ridge ridge;
        ridge.t_cells = path.t_cells;
        ridge.g_cells = path.g_cells;
        ridge.tau.resize(n_eta);
        ridge.gamma.resize(n_eta);
        ridge.amplitude.resize(n_eta);
        ridge.boundary.assign(n_eta, 0);
        ridge.j_lo = 0;
        ridge.j_hi = n_eta - 1;

        for (std::size_t j = 0; j < n_eta; ++j) {
            const std::size_t p = static_cast<std::size_t>(path.t_cells[j]);
            const std::size_t q = static_cast<std::size_t>(path.g_cells[j]);
            const double* col = mod.data() + j * col_cells;
            const double center = col[q * n_t + p];
            ridge.amplitude[j] = center;
            ridge.total_amplitude += center;

            double dp = 0.0;
            if (p > 0 && p + 1 < n_t)
                dp = parabolic_offset(col[q * n_t + p - 1], center, col[q * n_t + p + 1]);
            double dq = 0.0;
            if (q > 0 && q + 1 < n_gamma)
                dq = parabolic_offset(col[(q - 1) * n_t + p], center, col[(q + 1) * n_t + p]);
            ridge.tau[j] = g.t_start + (static_cast<double>(p) + dp) * g.dt;
            ridge.gamma[j] = g.gamma_start + (static_cast<double>(q) + dq) * g.d_gamma;
        }

        // A column is untrusted when its group delay falls within the
        // dispersion-broadened window band of a record edge.
        for (std::size_t j = 0; j < n_eta; ++j) {
            const double band = boundary_band(window, ridge.gamma[j]);
            if (ridge.tau[j] < g.t_start + band || ridge.tau[j] > t_end - band)
                ridge.boundary[j] = 1;
        }
        straighten_untrusted(ridge.tau, ridge.boundary);
        straighten_untrusted(ridge.gamma, ridge.boundary);

        std::vector<double> amps = ridge.amplitude;
        const std::size_t amid = amps.size() / 2;
        std::nth_element(amps.begin(), amps.begin() + static_cast<long>(amid), amps.end());
        ridge.low_confidence = amps[amid] <= noise_floor;

        std::size_t lo = 0;
        while (lo < n_eta && ridge.amplitude[lo] <= noise_floor) ++lo;
        if (lo == n_eta) {
            ridge.j_lo = 0;
            ridge.j_hi = n_eta - 1;
        } else {
            std::size_t hi = n_eta - 1;
            while (hi > lo && ridge.amplitude[hi] <= noise_floor) --hi;
            ridge.j_lo = lo;
            ridge.j_hi = hi;
        }

        for (std::size_t j = 0; j < n_eta; ++j) {
            double* col = mod.data() + j * col_cells;
            const int p0 = path.t_cells[j];
            const int q0 = path.g_cells[j];
            for (int q = std::max(0, q0 - cfg.clear_radius);
                 q <= std::min(static_cast<int>(n_gamma) - 1, q0 + cfg.clear_radius); ++q)
                for (int p = std::max(0, p0 - cfg.clear_radius);
                     p <= std::min(static_cast<int>(n_t) - 1, p0 + cfg.clear_radius); ++p)
                    col[static_cast<std::size_t>(q) * n_t + static_cast<std::size_t>(p)] = 0.0;
        }

        set.ridges.push_back(std::move(ridge));
    }

    std::stable_sort(set.ridges.begin(), set.ridges.end(), [](const Ridge& a, const Ridge& b) {
        if (a.total_amplitude != b.total_amplitude) return a.total_amplitude > b.total_amplitude;
        return a.j_lo < b.j_lo;
    });
    return set;
}

void write_ridge_csv(const RidgeSet& set, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fputs("ridge_id,eta_hz,tau_s,gamma_s_per_hz,amplitude\n", f);
    for (std::size_t k = 0; k < set.ridges.size(); ++k) {
        const Ridge& r = set.ridges[k];
        for (std::size_t j = r.j_lo; j <= r.j_hi; ++j) {
            std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g\n", k, set.eta_at(j), r.tau[j],
                         r.gamma[j], r.amplitude[j]);
        }
    }
    if (std::fclose(f) != 0) throw IoError(path + ": write failed");
}

} // namespace tfgdd
