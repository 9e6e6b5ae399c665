#include "dmtlink/kernels.hpp"

#include <algorithm>

namespace dmtlink::kernels {
namespace {

void complex_multiply_scalar(std::span<Complex> x, std::span<const Complex> h) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double hr = h[i].real(), hi = h[i].imag();
    x[i] = Complex(xr * hr - xi * hi, xr * hi + xi * hr);
  }
}

void abs2_scaled_scalar(std::span<const Complex> x, std::span<double> out, double scale) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double re = x[i].real(), im = x[i].imag();
    out[i] = scale * (re * re + im * im);
  }
}

std::size_t clip_scalar(std::span<double> x, double limit) {
  std::size_t changed = 0;
  for (double& v : x) {
    const double c = std::clamp(v, -limit, limit);
    changed += (c != v);
    v = c;
  }
  return changed;
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_scalar(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

} // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", complex_multiply_scalar, abs2_scaled_scalar,
                                 clip_scalar, dot_scalar, sum_squares_scalar};
  return table;
}

} // namespace dmtlink::kernels
