#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tfgdd {

// Unnormalized complex DFT pair:
//   forward:  X[j] = sum_k x[k] e^{-i 2 pi j k / N}
//   inverse:  x[k] = sum_j X[j] e^{+i 2 pi j k / N}   (caller divides by N)
// Plans are cached per (size, direction) and selected deterministically, so
// repeated runs and different calling threads produce identical bits. The
// transforms may be called concurrently; in and out may alias.
void dft_forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);
void dft_inverse(const std::complex<double>* in, std::complex<double>* out, std::size_t n);

void dft_forward(std::vector<std::complex<double>>& data);
void dft_inverse(std::vector<std::complex<double>>& data);

} // namespace tfgdd
