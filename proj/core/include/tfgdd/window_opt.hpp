#pragma once

#include <complex>
#include <string>
#include <vector>

#include "tfgdd/fct.hpp"
#include "tfgdd/signal.hpp"

namespace tfgdd {

// Parameters of the concentration measure. cell_volume 0 means "derive from
// the grid axes" (dt * d_eta * d_gamma; a degenerate single-slice gamma
// axis contributes factor 1). The volume shifts the entropy by a constant at
// fixed axes and never changes which window minimizes it.
struct EntropyConfig {
    double order = 2.5;
    double cell_volume = 0.0;
};

// Streaming accumulator for the Renyi concentration measure
//   E = 1/(1-l) * log2[ (sum P^(2l) V) / (sum P^2 V)^l ],  P = |value|.
// Feed moduli (or complex values) in any order; entropy() is a pure function
// of the two partial sums, so chunked accumulation stays deterministic as
// long as chunk boundaries are fixed.
class EntropyAccumulator {
public:
    explicit EntropyAccumulator(double order);

    void add_modulus(double p);
    void add(std::complex<double> v) { add_modulus(std::abs(v)); }
    // Merge partials accumulated over disjoint cell ranges.
    void merge(const EntropyAccumulator& other);

    // Throws NumericalError when no energy was accumulated.
    double entropy(double cell_volume) const;

private:
    double order_;
    double sum_p2_ = 0.0;
    double sum_p2l_ = 0.0;
};

double renyi_entropy(const TFGDDGrid& grid, const EntropyConfig& cfg = {});

// One evaluated point of the window search and the search result. The curve
// contains every evaluated sigma (coarse scan plus refinement), sorted by
// sigma; sigma_opt is the argmin of the curve by construction.
struct SigmaScanPoint {
    double sigma = 0.0;
    double entropy = 0.0;
};
struct SigmaScanResult {
    double sigma_opt = 0.0;
    double entropy_opt = 0.0;
    std::vector<SigmaScanPoint> curve;
};

// Minimizes the concentration entropy of the unweighted transform grid over
// the window width: log-spaced coarse scan of n_coarse candidates across
// [sigma_lo, sigma_hi] (evaluated in parallel, reduced by candidate index),
// then golden-section refinement in log(sigma) around the coarse minimizer.
// Unimodality of the curve is assumed for the refinement; the full curve is
// returned so a caller can detect when that assumption failed. Each
// evaluation streams the grid one gamma slice at a time, so memory stays at
// one slice per worker regardless of the gamma axis size.
SigmaScanResult optimize_sigma(const SampledSignal& signal, const GammaGrid& ggrid,
                               double sigma_lo, double sigma_hi,
                               const EntropyConfig& cfg = {}, int n_coarse = 12);

// CSV export of an entropy curve: header "sigma,entropy", one row per point.
void write_entropy_csv(const std::vector<SigmaScanPoint>& curve,
                       const std::string& path);

} // namespace tfgdd
