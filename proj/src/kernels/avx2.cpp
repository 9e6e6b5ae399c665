#include "dmtlink/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

namespace dmtlink::kernels {
namespace {

// std::complex<double> is two contiguous doubles; one __m256d holds two values.
void complex_multiply_avx2(std::span<Complex> x, std::span<const Complex> h) {
  auto* xp = reinterpret_cast<double*>(x.data());
  const auto* hp = reinterpret_cast<const double*>(h.data());
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(xp + 2 * i);
    const __m256d b = _mm256_loadu_pd(hp + 2 * i);
    const __m256d b_re = _mm256_movedup_pd(b);         // hr hr
    const __m256d b_im = _mm256_permute_pd(b, 0b1111); // hi hi
    const __m256d a_sw = _mm256_permute_pd(a, 0b0101); // ai ar
    // (ar*hr - ai*hi, ai*hr + ar*hi)
    const __m256d r = _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
    _mm256_storeu_pd(xp + 2 * i, r);
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double hr = h[i].real(), hi = h[i].imag();
    x[i] = Complex(xr * hr - xi * hi, xr * hi + xi * hr);
  }
}

void abs2_scaled_avx2(std::span<const Complex> x, std::span<double> out, double scale) {
  const auto* xp = reinterpret_cast<const double*>(x.data());
  const std::size_t n = x.size();
  const __m256d s = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(xp + 2 * i);     // r0 i0 r1 i1
    const __m256d b = _mm256_loadu_pd(xp + 2 * i + 4); // r2 i2 r3 i3
    const __m256d a2 = _mm256_mul_pd(a, a);
    const __m256d b2 = _mm256_mul_pd(b, b);
    const __m256d h = _mm256_hadd_pd(a2, b2); // |x0|^2 |x2|^2 |x1|^2 |x3|^2
    const __m256d ordered = _mm256_permute4x64_pd(h, 0b11011000);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(ordered, s));
  }
  for (; i < n; ++i) {
    const double re = x[i].real(), im = x[i].imag();
    out[i] = scale * (re * re + im * im);
  }
}

std::size_t clip_avx2(std::span<double> x, double limit) {
  const __m256d hi = _mm256_set1_pd(limit);
  const __m256d lo = _mm256_set1_pd(-limit);
  const std::size_t n = x.size();
  std::size_t changed = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    const __m256d c = _mm256_max_pd(lo, _mm256_min_pd(hi, v));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(c, v, _CMP_NEQ_UQ));
    changed += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
    _mm256_storeu_pd(x.data() + i, c);
  }
  for (; i < n; ++i) {
    const double c = std::clamp(x[i], -limit, limit);
    changed += (c != x[i]);
    x[i] = c;
  }
  return changed;
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4),
                           acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_avx2(std::span<const double> x) { return dot_avx2(x, x); }

} // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", complex_multiply_avx2, abs2_scaled_avx2, clip_avx2,
                                 dot_avx2, sum_squares_avx2};
  return &table;
}

} // namespace dmtlink::kernels
