#include "tfgdd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "tfgdd/errors.hpp"

namespace tfgdd {

namespace {
constexpr double kPi = 3.14159265358979312;
constexpr std::size_t kDenseSamples = 2048;

void check_modes(const std::vector<ModeSpec>& modes) {
    if (modes.empty()) throw ConfigError("mode list is empty");
    for (const ModeSpec& m : modes)
        if (!m.amplitude || !m.phase_d1 || !m.phase_d2)
            throw ConfigError("mode is missing amplitude or phase derivatives");
}

// Three-point parabolic refinement of an extremum of f sampled at uniformly
// spaced points: evaluates f at the parabola's vertex and keeps the better
// value. `sign` +1 seeks a maximum, -1 a minimum.
double refine_extremum(const std::function<double(double)>& f, double x_prev,
                       double x_mid, double x_next, double f_prev, double f_mid,
                       double f_next, int sign) {
    const double denom = f_prev - 2.0 * f_mid + f_next;
    double best = f_mid;
    if (sign * denom < 0.0) {
        double off = 0.5 * (f_prev - f_next) / denom;
        off = std::clamp(off, -1.0, 1.0);
        const double x = x_mid + off * 0.5 * (x_next - x_prev);
        const double v = f(x);
        best = sign > 0 ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

// Dense scan of f over [lo, hi] with parabolic refinement at the argmax
// (sign +1) or argmin (sign -1).
double scan_extremum(const std::function<double(double)>& f, double lo, double hi,
                     int sign) {
    const double step = (hi - lo) / static_cast<double>(kDenseSamples - 1);
    std::vector<double> vals(kDenseSamples);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < kDenseSamples; ++i) {
        vals[i] = f(lo + step * static_cast<double>(i));
        if (sign * (vals[i] - vals[arg]) > 0.0) arg = i;
    }
    if (arg == 0 || arg + 1 == kDenseSamples) return vals[arg];
    const double x_mid = lo + step * static_cast<double>(arg);
    return refine_extremum(f, x_mid - step, x_mid, x_mid + step, vals[arg - 1],
                           vals[arg], vals[arg + 1], sign);
}

std::size_t eta_to_column(const RidgeSet& set, double eta) {
    if (set.ridges.empty()) throw ConfigError("ridge set is empty");
    if (!(set.d_eta > 0.0)) throw ConfigError("ridge set has no frequency step");
    const double pos = (eta - set.eta_start) / set.d_eta;
    const double rounded = std::nearbyint(pos);
    const std::size_t n_eta = set.ridges[0].tau.size();
    if (std::abs(pos - rounded) > 1e-6 || rounded < 0.0 ||
        rounded >= static_cast<double>(n_eta))
        throw ConfigError("eta = " + std::to_string(eta) +
                          " Hz does not land on the ridge set's frequency grid");
    const auto j = static_cast<std::size_t>(rounded);
    for (std::size_t k = 0; k < set.ridges.size(); ++k)
        if (j < set.ridges[k].j_lo || j > set.ridges[k].j_hi)
            throw ConfigError("ridge " + std::to_string(k) + " is undefined at eta = " +
                              std::to_string(eta) + " Hz (outside its support)");
    return j;
}
} // namespace

ClassParams measure_class_params(const std::vector<ModeSpec>& modes,
                                 double eta_lo, double eta_hi) {
    check_modes(modes);
    if (!(eta_hi > eta_lo)) throw ConfigError("frequency band must be non-empty");
    const double span = eta_hi - eta_lo;
    // Step for the central-difference derivatives; also keeps the sampled
    // points one step inside the band so the stencils stay in range.
    const double h = span / (static_cast<double>(kDenseSamples) * 16.0);

    ClassParams out;
    for (const ModeSpec& m : modes) {
        const auto amp_deriv = [&](double eta) {
            return std::abs(m.amplitude(eta + h) - m.amplitude(eta - h)) / (2.0 * h);
        };
        const auto phase_d3 = [&](double eta) {
            return std::abs(m.phase_d2(eta + h) - m.phase_d2(eta - h)) / (2.0 * h);
        };
        const auto amp = [&](double eta) { return m.amplitude(eta); };
        if (scan_extremum(amp, eta_lo + h, eta_hi - h, -1) <= 0.0)
            throw ConfigError("mode amplitude must stay positive on the band");
        out.eps1 = std::max(out.eps1, scan_extremum(amp_deriv, eta_lo + h, eta_hi - h, 1));
        out.eps2 = std::max(out.eps2, scan_extremum(phase_d3, eta_lo + h, eta_hi - h, 1));
    }

    if (modes.size() < 2) {
        out.delta1 = std::numeric_limits<double>::infinity();
        out.delta2 = std::numeric_limits<double>::infinity();
        return out;
    }

    // Half-separations: largest (s * ref1, s * ref2) such that every eta and
    // pair clears one of the axes, refs being the half sup separations.
    double ref1 = 0.0;
    double ref2 = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k + 1 < modes.size(); ++k)
        for (std::size_t l = k + 1; l < modes.size(); ++l) pairs.emplace_back(k, l);
    for (const auto& [k, l] : pairs) {
        const auto gd_sep = [&](double eta) {
            return 0.5 * std::abs(modes[k].phase_d1(eta) - modes[l].phase_d1(eta));
        };
        const auto gdd_sep = [&](double eta) {
            return 0.5 * std::abs(modes[k].phase_d2(eta) - modes[l].phase_d2(eta));
        };
        ref1 = std::max(ref1, scan_extremum(gd_sep, eta_lo, eta_hi, 1));
        ref2 = std::max(ref2, scan_extremum(gdd_sep, eta_lo, eta_hi, 1));
    }
    double s = std::numeric_limits<double>::infinity();
    for (const auto& [k, l] : pairs) {
        const auto clearance = [&](double eta) {
            const double u = 0.5 * std::abs(modes[k].phase_d1(eta) - modes[l].phase_d1(eta));
            const double v = 0.5 * std::abs(modes[k].phase_d2(eta) - modes[l].phase_d2(eta));
            return std::max(ref1 > 0.0 ? u / ref1 : 0.0, ref2 > 0.0 ? v / ref2 : 0.0);
        };
        s = std::min(s, scan_extremum(clearance, eta_lo, eta_hi, -1));
    }
    s *= 1.0 - 1e-9; // the class requires strict clearance
    out.delta1 = s * ref1;
    out.delta2 = s * ref2;
    return out;
}

double measure_eps0(const ReassignmentField& field,
                    const std::vector<ModeSpec>& modes, std::size_t k,
                    double delta1, double delta2) {
    check_modes(modes);
    if (k >= modes.size()) throw ConfigError("mode index out of range");
    if (!(delta1 > 0.0) || !(delta2 > 0.0))
        throw ConfigError("separations must be positive");

    double min_det = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < field.n_eta; ++j) {
        const double eta = field.eta_at(j);
        const double gd = modes[k].phase_d1(eta);
        const double gdd = modes[k].phase_d2(eta);
        for (std::size_t l = 0; l < field.n_gamma; ++l) {
            if (std::abs(field.gamma_at(l) - gdd) >= delta2) continue;
            for (std::size_t n = 0; n < field.n_t; ++n) {
                if (std::abs(field.time_at(n) - gd) >= delta1) continue;
                const std::size_t idx = field.index(n, j, l);
                if (!field.mask[idx]) continue;
                min_det = std::min(min_det, field.det_e0_mag[idx]);
            }
        }
    }
    if (!std::isfinite(min_det))
        throw NumericalError("no masked cell falls inside the mode's separation box");
    return 1.0 / min_det;
}

LemmaQuantities lemma_quantities(const ClassParams& params,
                                 const std::vector<ModeSpec>& modes,
                                 const GaussianWindow& window, double eta) {
    check_modes(modes);
    if (params.eps1 < 0.0 || params.eps2 < 0.0)
        throw ConfigError("regularity constants must be non-negative");
    const std::size_t k_modes = modes.size();
    if (k_modes > 1 &&
        (!(params.delta1 > 0.0) || !std::isfinite(params.delta1) ||
         !(params.delta2 > 0.0) || !std::isfinite(params.delta2)))
        throw ConfigError("multi-mode bounds need finite positive separations");

    double i_m[7];
    for (int m = 0; m <= 6; ++m) i_m[m] = moment_I(m, window);
    double y_m[3] = {0.0, 0.0, 0.0};
    if (k_modes > 1)
        for (int m = 0; m <= 2; ++m)
            y_m[m] = upsilon(m, window, params.delta1, params.delta2);

    std::vector<double> amp(k_modes), gd(k_modes), gdd(k_modes);
    for (std::size_t l = 0; l < k_modes; ++l) {
        amp[l] = modes[l].amplitude(eta);
        gd[l] = modes[l].phase_d1(eta);
        gdd[l] = modes[l].phase_d2(eta);
    }

    LemmaQuantities lq;
    lq.m_eta = 0.0;
    for (double a : amp) lq.m_eta += a;

    lq.pi_ml.assign(4, std::vector<double>(k_modes, 0.0));
    lq.pi_m.assign(4, 0.0);
    for (int m = 0; m <= 3; ++m) {
        for (std::size_t l = 0; l < k_modes; ++l) {
            lq.pi_ml[m][l] =
                params.eps1 * i_m[m + 1] + params.eps2 * (kPi / 3.0) * amp[l] * i_m[m + 3];
            lq.pi_m[m] += lq.pi_ml[m][l];
        }
    }

    lq.gamma_m.assign(3, std::vector<double>(k_modes, 0.0));
    for (int m = 0; m <= 2; ++m) {
        for (std::size_t k = 0; k < k_modes; ++k) {
            double tail = 0.0;
            for (std::size_t l = 0; l < k_modes; ++l)
                if (l != k) tail += amp[l] * y_m[m];
            lq.gamma_m[m][k] = amp[k] * i_m[m] + tail + lq.pi_m[m];
        }
    }

    lq.lambda_m.assign(2, std::vector<double>(k_modes, 0.0));
    const auto kd = static_cast<double>(k_modes);
    for (int m = 0; m <= 1; ++m) {
        const double common = params.eps1 * kd * i_m[m] +
                              params.eps1 * params.eps2 * kPi * kd * i_m[m + 3] +
                              params.eps2 * kPi * lq.m_eta * i_m[m + 2];
        for (std::size_t k = 0; k < k_modes; ++k) {
            double sep = 0.0;
            for (std::size_t l = 0; l < k_modes; ++l) {
                if (l == k) continue;
                sep += 2.0 * kPi *
                       (std::abs(gd[k] - gd[l]) * (amp[l] * y_m[m] + lq.pi_ml[m][l]) +
                        std::abs(gdd[k] - gdd[l]) *
                            (amp[l] * y_m[m + 1] + lq.pi_ml[m + 1][l]));
            }
            lq.lambda_m[m][k] = common + sep;
        }
    }
    return lq;
}

Theorem1Bounds theorem1_rhs(const ClassParams& params, const LemmaQuantities& lq) {
    if (!(params.eps0 > 0.0))
        throw ConfigError("eps0 must be positive; measure it from a field first");
    const std::size_t k_modes = lq.gamma_m.empty() ? 0 : lq.gamma_m[0].size();
    Theorem1Bounds out;
    out.bound_t.resize(k_modes);
    out.bound_r.resize(k_modes);
    for (std::size_t k = 0; k < k_modes; ++k) {
        out.bound_t[k] = params.eps0 / (2.0 * kPi) *
                         (lq.lambda_m[0][k] * lq.gamma_m[2][k] +
                          lq.lambda_m[1][k] * lq.gamma_m[1][k]);
        out.bound_r[k] = params.eps0 / (2.0 * kPi) *
                         (lq.lambda_m[0][k] * lq.gamma_m[1][k] +
                          lq.lambda_m[1][k] * lq.gamma_m[0][k]);
    }
    return out;
}

RecoveryBound recovery_bound(const ClassParams& params,
                             const std::vector<ModeSpec>& modes,
                             const RidgeSet& ridges, double eta,
                             const GaussianWindow& window,
                             const MixingMatrix& mixing) {
    check_modes(modes);
    if (ridges.ridges.size() != modes.size())
        throw ConfigError("one ridge per mode is required, in the same order");
    if (mixing.k_modes != modes.size())
        throw ConfigError("mixing system size does not match the mode count");
    if (params.eps1 < 0.0 || params.eps2 < 0.0)
        throw ConfigError("regularity constants must be non-negative");
    const std::size_t j = eta_to_column(ridges, eta);

    const std::size_t k_modes = modes.size();
    const double i1 = moment_I(1, window);
    const double i2 = moment_I(2, window);
    const double i3 = moment_I(3, window);

    double m_eta = 0.0;
    for (const ModeSpec& m : modes) m_eta += m.amplitude(eta);

    RecoveryBound out;
    out.omega0 = params.eps1 * static_cast<double>(k_modes) * i1 +
                 params.eps2 * (kPi / 3.0) * m_eta * i3;
    for (std::size_t l = 0; l < k_modes; ++l) {
        const double tau_err = std::abs(ridges.ridges[l].tau[j] - modes[l].phase_d1(eta));
        const double gamma_err =
            std::abs(ridges.ridges[l].gamma[j] - modes[l].phase_d2(eta));
        out.omega0 += modes[l].amplitude(eta) *
                      (2.0 * kPi * tau_err * i1 + kPi * gamma_err * i2);
    }

    out.per_mode.resize(k_modes);
    for (std::size_t k = 0; k < k_modes; ++k) {
        double row = 0.0;
        for (std::size_t l = 0; l < k_modes; ++l) row += std::abs(mixing.b(l, k));
        out.per_mode[k] = out.omega0 * row;
    }
    return out;
}

void write_bound_csv(const BoundReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fputs(
        "eta_hz,mode,bound_t,bound_r,omega0,recovery_bound,measured_t_err,"
        "measured_r_err,measured_recovery_err\n",
        f);
    for (const BoundRow& r : report.rows) {
        std::fprintf(f, "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     r.eta_hz, r.mode, r.bound_t, r.bound_r, r.omega0,
                     r.recovery_bound, r.measured_t_err, r.measured_r_err,
                     r.measured_recovery_err);
    }
    if (std::fclose(f) != 0) throw IoError(path + ": write failed");
}

} // namespace tfgdd
