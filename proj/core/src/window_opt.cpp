#include "tfgdd/window_opt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tfgdd/errors.hpp"
#include "tfgdd/parallel.hpp"
#include "tfgdd/window.hpp"

namespace tfgdd {

namespace {
void check_order(double order) {
    if (!(order > 1.0))
        throw ConfigError("entropy order must exceed 1, got " +
                          std::to_string(order));
}

double derived_cell_volume(const TFGDDGrid& grid) {
    const double dg = grid.n_gamma > 1 ? grid.d_gamma : 1.0;
    return grid.dt * grid.d_eta * dg;
}
} // namespace

EntropyAccumulator::EntropyAccumulator(double order) : order_(order) {
    check_order(order);
}

void EntropyAccumulator::add_modulus(double p) {
    const double p2 = p * p;
    sum_p2_ += p2;
    sum_p2l_ += std::pow(p2, order_);
}

void EntropyAccumulator::merge(const EntropyAccumulator& other) {
    sum_p2_ += other.sum_p2_;
    sum_p2l_ += other.sum_p2l_;
}

double EntropyAccumulator::entropy(double cell_volume) const {
    if (!(cell_volume > 0.0))
        throw ConfigError("entropy cell volume must be positive");
    if (!(sum_p2_ > 0.0))
        throw NumericalError("entropy of a zero-energy grid is undefined");
    const double log_num = std::log2(sum_p2l_ * cell_volume);
    const double log_den = order_ * std::log2(sum_p2_ * cell_volume);
    return (log_num - log_den) / (1.0 - order_);
}

double renyi_entropy(const TFGDDGrid& grid, const EntropyConfig& cfg) {
    check_order(cfg.order);
    if (cfg.cell_volume < 0.0)
        throw ConfigError("entropy cell volume must not be negative");
    const double volume =
        cfg.cell_volume > 0.0 ? cfg.cell_volume : derived_cell_volume(grid);
    EntropyAccumulator acc(cfg.order);
    for (const std::complex<double>& v : grid.values) acc.add(v);
    return acc.entropy(volume);
}

namespace {
// Entropy of the full power-0 transform grid at one window width, streamed
// one gamma slice at a time in fixed slice order.
double entropy_at_sigma(const SampledSignal& signal, const GammaGrid& ggrid,
                        double sigma, double order, double volume) {
    const GaussianWindow window{sigma};
    const std::size_t n = signal.samples.size();
    const std::size_t n_eta = n / 2 + 1;
    std::vector<std::complex<double>> slice(n * n_eta);
    EntropyAccumulator acc(order);
    for (std::size_t l = 0; l < ggrid.l_bins; ++l) {
        fct_slice(signal, window, ggrid.gamma_at(l), 0, false, slice.data());
        for (const std::complex<double>& v : slice) acc.add(v);
    }
    return acc.entropy(volume);
}
} // namespace

SigmaScanResult optimize_sigma(const SampledSignal& signal, const GammaGrid& ggrid,
                               double sigma_lo, double sigma_hi,
                               const EntropyConfig& cfg, int n_coarse) {
    check_order(cfg.order);
    if (!(sigma_lo > 0.0) || !(sigma_hi > sigma_lo))
        throw ConfigError("sigma search range must satisfy 0 < lo < hi");
    if (n_coarse < 8)
        throw ConfigError("sigma search needs at least 8 coarse candidates");
    if (cfg.cell_volume < 0.0)
        throw ConfigError("entropy cell volume must not be negative");
    if (signal.samples.size() < 4)
        throw ConfigError("sigma search needs at least 4 samples");

    const double d_eta = 1.0 / (signal.dt * static_cast<double>(signal.samples.size()));
    const double derived_dg = ggrid.l_bins > 1 ? ggrid.d_gamma() : 1.0;
    const double volume = cfg.cell_volume > 0.0
                              ? cfg.cell_volume
                              : signal.dt * d_eta * derived_dg;

    SigmaScanResult result;
    const double log_lo = std::log(sigma_lo), log_hi = std::log(sigma_hi);
    std::vector<SigmaScanPoint> coarse(static_cast<std::size_t>(n_coarse));
    parallel_for(coarse.size(), [&](std::size_t i) {
        const double f = static_cast<double>(i) / static_cast<double>(n_coarse - 1);
        const double sigma = std::exp(log_lo + f * (log_hi - log_lo));
        coarse[i] = {sigma, entropy_at_sigma(signal, ggrid, sigma,
                                             cfg.order, volume)};
    });
    result.curve = coarse;

    std::size_t best = 0;
    for (std::size_t i = 1; i < coarse.size(); ++i)
        if (coarse[i].entropy < coarse[best].entropy) best = i;

    // Golden-section refinement in log(sigma), bracketing the coarse
    // minimizer by its neighbors (or the range edge).
    double a = best == 0 ? log_lo : std::log(coarse[best - 1].sigma);
    double b = best + 1 == coarse.size() ? log_hi : std::log(coarse[best + 1].sigma);
    constexpr double kInvPhi = 0.6180339887498949;
    const double tol = 1e-3;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    const auto eval = [&](double log_sigma) {
        const double sigma = std::exp(log_sigma);
        const double e = entropy_at_sigma(signal, ggrid, sigma, cfg.order, volume);
        result.curve.push_back({sigma, e});
        return e;
    };
    double fc = eval(c), fd = eval(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = eval(d);
        }
    }

    std::sort(result.curve.begin(), result.curve.end(),
              [](const SigmaScanPoint& x, const SigmaScanPoint& y) {
                  return x.sigma < y.sigma;
              });
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < result.curve.size(); ++i)
        if (result.curve[i].entropy < result.curve[argmin].entropy) argmin = i;
    result.sigma_opt = result.curve[argmin].sigma;
    result.entropy_opt = result.curve[argmin].entropy;
    return result;
}

void write_entropy_csv(const std::vector<SigmaScanPoint>& curve,
                       const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError(path + ": cannot open for writing");
    std::fputs("sigma,entropy\n", f);
    for (const SigmaScanPoint& p : curve)
        std::fprintf(f, "%.17g,%.17g\n", p.sigma, p.entropy);
    if (std::fclose(f) != 0) throw IoError(path + ": write failed");
}

} // namespace tfgdd
