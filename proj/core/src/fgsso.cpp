#include "tfgdd/fgsso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "tfgdd/errors.hpp"
#include "tfgdd/fct.hpp"
#include "tfgdd/parallel.hpp"

namespace tfgdd {

namespace {
// Relative singular-value cutoff below which the system counts as singular
// and the pseudo-inverse takes over.
constexpr double kSingularRatio = 1e-10;

void check_ridges(const RidgeSet& set) {
    if (set.ridges.empty()) throw ConfigError("ridge set is empty");
    if (!(set.d_eta > 0.0))
        throw ConfigError("ridge set frequency step must be positive, got " +
                          std::to_string(set.d_eta));
    const std::size_t n_eta = set.ridges[0].tau.size();
    if (n_eta == 0) throw ConfigError("ridge curves are empty");
    for (const Ridge& r : set.ridges) {
        if (r.tau.size() != n_eta || r.gamma.size() != n_eta ||
            r.boundary.size() != n_eta)
            throw ConfigError("ridge curves disagree on the frequency band length");
        if (r.j_hi >= n_eta || r.j_lo > r.j_hi)
            throw ConfigError("ridge support indices out of range");
    }
}

void check_window(const GaussianWindow& w, const char* role) {
    if (!(w.sigma > 0.0))
        throw ConfigError(std::string(role) + " window width must be positive, got " +
                          std::to_string(w.sigma));
}

Eigen::MatrixXcd to_matrix(const std::vector<std::complex<double>>& a, std::size_t k) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a[r * k + c];
    return m;
}

// Cofactor-formula inverse for the fixed sizes Eigen special-cases.
template <int K>
Eigen::MatrixXcd closed_form_inverse(const Eigen::MatrixXcd& a) {
    Eigen::Matrix<std::complex<double>, K, K> fixed = a;
    Eigen::Matrix<std::complex<double>, K, K> inv = fixed.inverse();
    return inv;
}

// Entries at column j; the diagonal is pinned to exactly 1 (the kernel at
// zero offset evaluates to 1 up to rounding anyway).
std::vector<std::complex<double>> entries_at(const RidgeSet& set, std::size_t j,
                                             const GaussianWindow& window) {
    const std::size_t k_modes = set.ridges.size();
    std::vector<std::complex<double>> a(k_modes * k_modes);
    for (std::size_t k = 0; k < k_modes; ++k) {
        for (std::size_t l = 0; l < k_modes; ++l) {
            if (k == l) {
                a[k * k_modes + l] = 1.0;
                continue;
            }
            const double d_tau = set.ridges[l].tau[j] - set.ridges[k].tau[j];
            const double d_gamma = set.ridges[l].gamma[j] - set.ridges[k].gamma[j];
            a[k * k_modes + l] = kernel_C(0, d_tau, d_gamma, window);
        }
    }
    return a;
}

// Fills inverse, conditioning and the pseudo flag from the entries.
void invert_system(MixingMatrix& mm) {
    const auto k = static_cast<Eigen::Index>(mm.k_modes);
    const Eigen::MatrixXcd a = to_matrix(mm.entries, mm.k_modes);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double s_max = sv(0);
    const double s_min = sv(k - 1);
    mm.cond2 = s_min > 0.0 ? s_max / s_min : std::numeric_limits<double>::infinity();
    mm.pseudo = s_min < kSingularRatio * s_max;

    Eigen::MatrixXcd b;
    if (mm.pseudo) {
        Eigen::VectorXd inv_sv(k);
        for (Eigen::Index i = 0; i < k; ++i)
            inv_sv(i) = sv(i) >= kSingularRatio * s_max ? 1.0 / sv(i) : 0.0;
        b = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
    } else if (k == 1) {
        b = Eigen::MatrixXcd::Ones(1, 1);
    } else if (k == 2) {
        b = closed_form_inverse<2>(a);
    } else if (k == 3) {
        b = closed_form_inverse<3>(a);
    } else if (k == 4) {
        b = closed_form_inverse<4>(a);
    } else {
        b = Eigen::PartialPivLU<Eigen::MatrixXcd>(a).inverse();
    }

    mm.inverse.resize(mm.k_modes * mm.k_modes);
    mm.inf_norm_inv = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) {
        double row_sum = 0.0;
        for (Eigen::Index c = 0; c < k; ++c) {
            const std::complex<double> v = b(r, c);
            mm.inverse[static_cast<std::size_t>(r) * mm.k_modes +
                       static_cast<std::size_t>(c)] = v;
            row_sum += std::abs(v);
        }
        mm.inf_norm_inv = std::max(mm.inf_norm_inv, row_sum);
    }
}

MixingMatrix assemble_at(const RidgeSet& set, std::size_t j,
                         const GaussianWindow& window) {
    MixingMatrix mm;
    mm.k_modes = set.ridges.size();
    mm.entries = entries_at(set, j, window);
    invert_system(mm);
    return mm;
}
} // namespace

MixingMatrix assemble_A(const RidgeSet& ridges, double eta,
                        const GaussianWindow& window) {
    check_ridges(ridges);
    check_window(window, "mixing");
    const double pos = (eta - ridges.eta_start) / ridges.d_eta;
    const double rounded = std::nearbyint(pos);
    const std::size_t n_eta = ridges.ridges[0].tau.size();
    if (std::abs(pos - rounded) > 1e-6 || rounded < 0.0 ||
        rounded >= static_cast<double>(n_eta))
        throw ConfigError("eta = " + std::to_string(eta) +
                          " Hz does not land on the ridge set's frequency grid");
    const auto j = static_cast<std::size_t>(rounded);
    for (std::size_t k = 0; k < ridges.ridges.size(); ++k) {
        const Ridge& r = ridges.ridges[k];
        if (j < r.j_lo || j > r.j_hi)
            throw ConfigError("ridge " + std::to_string(k) + " is undefined at eta = " +
                              std::to_string(eta) + " Hz (outside its support)");
    }
    return assemble_at(ridges, j, window);
}

RecoveredModes recover_modes(const SampledSignal& signal, const RidgeSet& ridges,
                             const GaussianWindow& analysis_window,
                             const GaussianWindow& recovery_window) {
    check_ridges(ridges);
    check_window(analysis_window, "analysis");
    check_window(recovery_window, "recovery");
    if (signal.samples.empty()) throw ConfigError("signal is empty");
    if (ridges.sigma > 0.0 &&
        std::abs(analysis_window.sigma - ridges.sigma) > 1e-9 * ridges.sigma)
        throw ConfigError("analysis window width " +
                          std::to_string(analysis_window.sigma) +
                          " does not match the width the ridges were extracted with (" +
                          std::to_string(ridges.sigma) + ")");

    const std::size_t k_modes = ridges.ridges.size();
    const std::size_t n_eta = ridges.ridges[0].tau.size();
    if (n_eta > signal.samples.size())
        throw ConfigError("ridge band has more frequency columns than the record has bins");

    std::size_t lo = 0;
    std::size_t hi = n_eta - 1;
    for (const Ridge& r : ridges.ridges) {
        lo = std::max(lo, r.j_lo);
        hi = std::min(hi, r.j_hi);
    }
    if (lo > hi) throw ConfigError("ridge supports share no frequency column");

    RecoveredModes out;
    out.support_lo = lo;
    out.support_hi = hi;
    out.eta_start = ridges.eta_start;
    out.d_eta = ridges.d_eta;
    out.spectra.assign(k_modes, std::vector<std::complex<double>>(n_eta, 0.0));
    out.diagnostics.assign(hi - lo + 1, MixingMatrix{});
    out.in_band.assign(hi - lo + 1, 0);

    parallel_for(hi - lo + 1, [&](std::size_t i) {
        const std::size_t j = lo + i;
        const double eta = ridges.eta_at(j);
        MixingMatrix mm = assemble_at(ridges, j, recovery_window);

        Eigen::VectorXcd d(static_cast<Eigen::Index>(k_modes));
        bool edge = false;
        for (std::size_t k = 0; k < k_modes; ++k) {
            const Ridge& r = ridges.ridges[k];
            edge = edge || r.boundary[j] != 0;
            d(static_cast<Eigen::Index>(k)) =
                fct_point(signal, r.tau[j], eta, r.gamma[j], recovery_window, 0);
        }
        if (!edge) {
            out.in_band[i] = 1;
            const Eigen::MatrixXcd b = to_matrix(mm.inverse, k_modes);
            const Eigen::VectorXcd x = b * d;
            for (std::size_t k = 0; k < k_modes; ++k)
                out.spectra[k][j] = x(static_cast<Eigen::Index>(k));
        }
        out.diagnostics[i] = std::move(mm);
    });

    std::size_t n_pseudo = 0;
    for (const MixingMatrix& mm : out.diagnostics) n_pseudo += mm.pseudo ? 1 : 0;
    if (n_pseudo == out.diagnostics.size())
        throw NumericalError(
            "mixing matrix is singular at every frequency column of the common "
            "ridge support; the ridges do not separate the modes");

    for (std::size_t k = 0; k < k_modes; ++k) {
        Spectrum sp;
        sp.d_eta = ridges.d_eta;
        sp.bins.assign(signal.samples.size(), 0.0);
        std::copy(out.spectra[k].begin(), out.spectra[k].end(), sp.bins.begin());
        SampledSignal mode = inverse_transform(sp);
        mode.t0 = signal.t0;
        out.time_modes.push_back(std::move(mode));
    }
    return out;
}

RecoveredModes recover_modes(const SampledSignal& signal, const RidgeSet& ridges,
                             const GaussianWindow& analysis_window) {
    return recover_modes(signal, ridges, analysis_window, analysis_window);
}

DiagnosticsProfile diagnostics_profile(const RecoveredModes& modes) {
    DiagnosticsProfile p;
    const std::size_t n = modes.diagnostics.size();
    p.eta.reserve(n);
    p.inf_norm_inv.reserve(n);
    p.cond2.reserve(n);
    p.pseudo.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const MixingMatrix& mm = modes.diagnostics[i];
        p.eta.push_back(modes.eta_at(modes.support_lo + i));
        p.inf_norm_inv.push_back(mm.inf_norm_inv);
        p.cond2.push_back(mm.cond2);
        p.pseudo.push_back(mm.pseudo ? 1 : 0);
    }
    return p;
}

void write_recovered_csv(const RecoveredModes& modes, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fputs("mode_id,eta_hz,re,im\n", f);
    for (std::size_t k = 0; k < modes.spectra.size(); ++k) {
        for (std::size_t j = modes.support_lo; j <= modes.support_hi; ++j) {
            const std::complex<double> v = modes.spectra[k][j];
            std::fprintf(f, "%zu,%.17g,%.17g,%.17g\n", k, modes.eta_at(j), v.real(),
                         v.imag());
        }
    }
    if (std::fclose(f) != 0) throw IoError(path + ": write failed");
}

void write_diagnostics_csv(const DiagnosticsProfile& profile, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fputs("eta_hz,inf_norm_inv,cond2,pseudo_flag\n", f);
    for (std::size_t i = 0; i < profile.eta.size(); ++i) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%d\n", profile.eta[i],
                     profile.inf_norm_inv[i], profile.cond2[i],
                     static_cast<int>(profile.pseudo[i]));
    }
    if (std::fclose(f) != 0) throw IoError(path + ": write failed");
}

} // namespace tfgdd
