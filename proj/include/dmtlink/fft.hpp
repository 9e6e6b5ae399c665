#pragma once

#include "dmtlink/common.hpp"

#include <span>

namespace dmtlink {

// Unitary discrete Fourier transforms of arbitrary length, backed by FFTW.
//   forward:  X[k] = 1/sqrt(N) * sum_n x[n] e^{-j2pi kn/N}
//   inverse:  x[n] = 1/sqrt(N) * sum_k X[k] e^{+j2pi kn/N}
// Plans are cached per (length, direction) and shared between threads.
void fft_forward(std::span<const Complex> in, std::span<Complex> out);
void fft_inverse(std::span<const Complex> in, std::span<Complex> out);

std::vector<Complex> fft_forward(std::span<const Complex> in);
std::vector<Complex> fft_inverse(std::span<const Complex> in);

// Frequency (Hz) of FFT bin k for an N-point transform at sample_rate, in
// the signed range [-fs/2, fs/2).
double fft_bin_frequency(std::size_t k, std::size_t n, double sample_rate);

// Applies a frequency response to a complex baseband block (circular).
// response(f) is evaluated on the signed bin frequencies.
template <typename Response>
void apply_frequency_response(std::span<Complex> block, double sample_rate, Response&& response);

// Band-limited periodic interpolation by an integer factor (spectral zero padding).
std::vector<double> upsample_periodic(std::span<const double> x, int factor);

} // namespace dmtlink

#include "dmtlink/kernels.hpp"

namespace dmtlink {

template <typename Response>
void apply_frequency_response(std::span<Complex> block, double sample_rate, Response&& response) {
  const std::size_t n = block.size();
  std::vector<Complex> spectrum(n);
  fft_forward(block, spectrum);
  std::vector<Complex> h(n);
  for (std::size_t k = 0; k < n; ++k) h[k] = response(fft_bin_frequency(k, n, sample_rate));
  kernels::complex_multiply(spectrum, h);
  fft_inverse(spectrum, block);
}

} // namespace dmtlink
