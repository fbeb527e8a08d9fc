#pragma once

#include <complex>
#include <span>

namespace vsheet::detail {

// Unnormalized DFTs of length n. Forward: X_m = sum_j x_j exp(-2 pi i m j / n).
// Plans are created once per length and shared; execution is thread-safe.
void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace vsheet::detail
