#pragma once

// Data-parallel inner loops of the link simulator. Each kernel has a scalar
// reference implementation and, where the CPU supports it, an AVX2 variant.
// The active table is chosen once at first use; DMTLINK_SIMD=scalar in the
// environment forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace dmtlink::kernels {

using Complex = std::complex<double>;

struct KernelTable {
  std::string_view name;
  // x[i] *= h[i]
  void (*complex_multiply)(std::span<Complex> x, std::span<const Complex> h);
  // out[i] = scale * |x[i]|^2
  void (*abs2_scaled)(std::span<const Complex> x, std::span<double> out, double scale);
  // x[i] = clamp(x[i], -limit, limit); returns number of samples changed
  std::size_t (*clip)(std::span<double> x, double limit);
  // sum a[i]*b[i]
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // sum x[i]^2
  double (*sum_squares)(std::span<const double> x);
};

const KernelTable& scalar_table();
// nullptr when not compiled in.
const KernelTable* avx2_table();
bool cpu_has_avx2();

// Table used by the library.
const KernelTable& active();

inline void complex_multiply(std::span<Complex> x, std::span<const Complex> h) {
  active().complex_multiply(x, h);
}
inline void abs2_scaled(std::span<const Complex> x, std::span<double> out, double scale) {
  active().abs2_scaled(x, out, scale);
}
inline std::size_t clip(std::span<double> x, double limit) { return active().clip(x, limit); }
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a, b);
}
inline double sum_squares(std::span<const double> x) { return active().sum_squares(x); }

} // namespace dmtlink::kernels
