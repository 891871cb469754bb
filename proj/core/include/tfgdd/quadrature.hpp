#pragma once

#include <complex>
#include <functional>

namespace tfgdd {

// Adaptive Gauss-Kronrod 15(7) integration of a complex-valued integrand over
// [a, b]. The panel with the worst Kronrod-Gauss discrepancy is bisected until
// the summed discrepancy drops below abs_tol (or below a small multiple of the
// accumulated |integrand| mass, the attainable roundoff floor for
// large-magnitude integrands). Throws NumericalError when the panel budget is
// exhausted without converging.
std::complex<double> integrate(const std::function<std::complex<double>(double)>& f,
                               double a, double b,
                               double abs_tol = 1e-12,
                               int max_panels = 20000);

double integrate_real(const std::function<double(double)>& f,
                      double a, double b,
                      double abs_tol = 1e-12,
                      int max_panels = 20000);

} // namespace tfgdd
