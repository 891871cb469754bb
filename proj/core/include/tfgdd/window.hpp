#pragma once

#include <complex>

namespace tfgdd {

// Unit-mass frequency-domain Gaussian window
//   g_sigma(xi) = exp(-xi^2 / (2 sigma^2)) / (sqrt(2 pi) sigma),
// where sigma is measured in Hz.
struct GaussianWindow {
    double sigma = 1.0;
};

// Window value g_sigma(xi).
double window_value(const GaussianWindow& w, double xi);

// Chirp-modulated window transform
//   kernel_C(m, t, gamma) = integral xi^m g_sigma(xi) e^{-i 2 pi xi t} e^{-i pi gamma xi^2} dxi.
// Closed form for m = 0, 1, 2; higher m (up to 8) follow from the recurrence
//   C_{m+1} = sigma^2 (m C_{m-1} - i 2 pi t C_m) / (1 + i 2 pi sigma^2 gamma).
std::complex<double> kernel_C(int m, double t, double gamma, const GaussianWindow& w);

// Absolute moment I_m = integral |xi|^m g_sigma(xi) dxi for m in [0, 8]:
//   I_m = sigma^m 2^{(m+1)/2} Gamma((m+1)/2) / sqrt(2 pi).
double moment_I(int m, const GaussianWindow& w);

// Upper bound on sup |kernel_C(m, t, gamma)| over the complement of the open
// box {|t| < delta1 and |gamma| < delta2}; the two branches bound the suprema
// over {|t| >= delta1} and {|gamma| >= delta2} respectively. m in {0, 1, 2},
// delta1 > 0, delta2 >= 0.
double upsilon(int m, const GaussianWindow& w, double delta1, double delta2);

// Coefficient c with C(g') = c * C(xi g) and C(xi g') = c * C(xi^2 g), i.e.
// the derivative window reduces to higher moment windows: c = -1 / sigma^2.
double derivative_window_reduction(const GaussianWindow& w);

// Time-domain scale of the gamma = 0 kernel: kernel_C(0, t, 0) =
// exp(-t^2 / (2 sigma_t^2)) with sigma_t = 1 / (2 pi sigma).
double time_scale(const GaussianWindow& w);

} // namespace tfgdd
