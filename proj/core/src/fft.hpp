#pragma once

// FFTW-backed transforms on one scalar component. Plans are created once
// per (dim, n) and shared; execution uses the new-array interface so any
// buffer of the right length works.

#include <complex>
#include <span>

namespace qdnls::detail {

/// out = (1 / n^dim) * DFT(in). In-place (in == out) is allowed.
void fft_forward(int dim, int n, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out);
/// Inverse of fft_forward (no normalization).
void fft_backward(int dim, int n, std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out);

}  // namespace qdnls::detail
