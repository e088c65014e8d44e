#pragma once

#include <complex>
#include <span>

namespace wgfocus::detail {

// In-place unnormalized complex DFTs backed by FFTW. Plans are cached per
// length and shared between threads; only plan creation is serialized.
//
// forward:  X_j = sum_n x_n exp(-2 pi i j n / N)
// backward: x_n = sum_j X_j exp(+2 pi i j n / N)
void fft_forward(std::span<std::complex<double>> data);
void fft_backward(std::span<std::complex<double>> data);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace wgfocus::detail
