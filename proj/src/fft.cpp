#include "dmtlink/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace dmtlink {
namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(n, 1)))),
        size(n) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
  std::size_t size;
};

struct Plan {
  fftw_plan handle = nullptr;
  ~Plan() {
    if (handle) fftw_destroy_plan(handle);
  }
};

// The FFTW planner is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(std::size_t n, int sign) {
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<Plan>> cache;
  std::lock_guard lock(planner_mutex());
  auto& slot = cache[{n, sign}];
  if (!slot) {
    FftwBuffer in(n), out(n);
    slot = std::make_unique<Plan>();
    slot->handle = fftw_plan_dft_1d(static_cast<int>(n), in.data, out.data, sign, FFTW_ESTIMATE);
    if (!slot->handle) throw Error("FFTW failed to create a plan of length " + std::to_string(n));
  }
  return slot->handle;
}

// Per-thread aligned scratch so every execution sees the same alignment as the planner.
struct Scratch {
  std::unique_ptr<FftwBuffer> in, out;
  void reserve(std::size_t n) {
    if (!in || in->size < n) {
      in = std::make_unique<FftwBuffer>(n);
      out = std::make_unique<FftwBuffer>(n);
    }
  }
};

void transform(std::span<const Complex> in, std::span<Complex> out, int sign) {
  const std::size_t n = in.size();
  if (out.size() != n) throw InvalidArgument("fft: output length mismatch");
  if (n == 0) return;
  thread_local Scratch scratch;
  scratch.reserve(n);
  std::memcpy(scratch.in->data, in.data(), n * sizeof(Complex));
  fftw_execute_dft(get_plan(n, sign), scratch.in->data, scratch.out->data);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const auto* src = reinterpret_cast<const Complex*>(scratch.out->data);
  for (std::size_t i = 0; i < n; ++i) out[i] = src[i] * scale;
}

} // namespace

void fft_forward(std::span<const Complex> in, std::span<Complex> out) {
  transform(in, out, FFTW_FORWARD);
}

void fft_inverse(std::span<const Complex> in, std::span<Complex> out) {
  transform(in, out, FFTW_BACKWARD);
}

std::vector<Complex> fft_forward(std::span<const Complex> in) {
  std::vector<Complex> out(in.size());
  fft_forward(in, out);
  return out;
}

std::vector<Complex> fft_inverse(std::span<const Complex> in) {
  std::vector<Complex> out(in.size());
  fft_inverse(in, out);
  return out;
}

double fft_bin_frequency(std::size_t k, std::size_t n, double sample_rate) {
  const auto ki = static_cast<long long>(k);
  const auto ni = static_cast<long long>(n);
  const long long signed_k = (2 * ki < ni) ? ki : ki - ni;
  return static_cast<double>(signed_k) * sample_rate / static_cast<double>(n);
}

std::vector<double> upsample_periodic(std::span<const double> x, int factor) {
  if (factor < 1) throw InvalidArgument("upsample factor must be >= 1");
  if (factor == 1) return {x.begin(), x.end()};
  const std::size_t n = x.size();
  const std::size_t m = n * static_cast<std::size_t>(factor);
  std::vector<Complex> in(x.begin(), x.end());
  std::vector<Complex> spec = fft_forward(in);
  std::vector<Complex> padded(m);
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k < half; ++k) padded[k] = spec[k];
  for (std::size_t k = half + 1; k < n; ++k) padded[m - n + k] = spec[k];
  if (n % 2 == 0) {
    // Split the Nyquist bin across both sides to keep the output real.
    padded[half] = 0.5 * spec[half];
    padded[m - half] = 0.5 * spec[half];
  } else {
    padded[half] = spec[half];
  }
  std::vector<Complex> y = fft_inverse(padded);
  const double gain = std::sqrt(static_cast<double>(factor));
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = y[i].real() * gain;
  return out;
}

} // namespace dmtlink
