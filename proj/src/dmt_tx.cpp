#include "dmtlink/dmt_tx.hpp"

#include "dmtlink/fft.hpp"
#include "dmtlink/kernels.hpp"
#include "dmtlink/qam.hpp"
#include "dmtlink/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace dmtlink {

void DmtConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("DmtConfig: " + what); };
  if (n_fft < 4 || !std::has_single_bit(static_cast<unsigned>(n_fft)))
    fail("n_fft must be a power of two >= 4");
  if (cp_num < 0 || cp_den <= 0 || (n_fft * cp_num) % cp_den != 0 || cp_len() <= 0)
    fail("n_fft * cp_fraction must be a positive integer");
  if (n_ts < 1) fail("n_ts must be >= 1");
  if (n_data < 1) fail("n_data must be >= 1");
  if (!(sample_rate > 0.0)) fail("sample_rate must be positive");
  if (std::isnan(clip_ratio_db)) fail("clip_ratio_db must not be NaN");
  if (dac_bits < 1 || dac_bits > 16 || adc_bits < 1 || adc_bits > 16)
    fail("converter resolution must be in 1..16 bits");
  if (!(full_scale_sigmas > 0.0)) fail("full_scale_sigmas must be positive");
  if (band_first < 1 || band_last > n_fft / 2 - 1 || band_first > band_last)
    fail("active band must lie within 1..n_fft/2-1");
}

int LoadingPlan::total_bits() const { return std::accumulate(bits.begin(), bits.end(), 0); }

int LoadingPlan::loaded_count() const {
  return static_cast<int>(std::count_if(bits.begin(), bits.end(), [](int b) { return b > 0; }));
}

LoadingPlan LoadingPlan::uniform(int n_subcarriers, int order) {
  LoadingPlan plan;
  plan.bits.assign(static_cast<std::size_t>(n_subcarriers), order);
  plan.power.assign(static_cast<std::size_t>(n_subcarriers), order > 0 ? 1.0 : 0.0);
  return plan;
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(kernels::sum_squares(x) / static_cast<double>(x.size()));
}

Bits generate_payload(std::uint64_t seed, std::size_t n_bits) {
  Rng rng(seed);
  Bits bits(n_bits);
  for (std::size_t i = 0; i < n_bits; i += 64) {
    const std::uint64_t word = rng.next_u64();
    const std::size_t m = std::min<std::size_t>(64, n_bits - i);
    for (std::size_t j = 0; j < m; ++j) bits[i + j] = static_cast<std::uint8_t>((word >> j) & 1u);
  }
  return bits;
}

Grid make_training_symbols(const DmtConfig& config, std::uint64_t seed) {
  const int cols = config.n_active();
  Grid ts(config.n_ts, cols);
  const auto& qpsk = constellation(2);
  Rng rng(seed);
  for (int c = 0; c < cols; ++c) {
    const Complex v = qpsk[rng.next_u64() >> 62];
    for (int r = 0; r < config.n_ts; ++r) ts.at(r, c) = v;
  }
  return ts;
}

FrequencyFrame build_frame(const Bits& payload, const LoadingPlan& plan, const Grid& ts,
                           const DmtConfig& config) {
  const int cols = config.n_active();
  if (static_cast<int>(plan.bits.size()) != cols || static_cast<int>(plan.power.size()) != cols)
    throw InvalidArgument("build_frame: plan does not match the active band");
  if (ts.rows != config.n_ts || ts.cols != cols)
    throw InvalidArgument("build_frame: training grid has the wrong shape");
  const std::size_t bits_per_symbol = static_cast<std::size_t>(plan.total_bits());
  if (payload.size() != bits_per_symbol * static_cast<std::size_t>(config.n_data))
    throw InvalidArgument("build_frame: payload length " + std::to_string(payload.size()) +
                          " != n_data * sum(bits) = " +
                          std::to_string(bits_per_symbol * config.n_data));

  FrequencyFrame frame;
  frame.plan = plan;
  frame.payload_bits = payload;
  frame.symbols = Grid(config.n_symbols(), cols);
  std::copy(ts.data.begin(), ts.data.end(), frame.symbols.data.begin());

  std::size_t pos = 0;
  for (int s = 0; s < config.n_data; ++s) {
    auto row = frame.symbols.row(config.n_ts + s);
    for (int n = 0; n < cols; ++n) {
      const int b = plan.bits[n];
      if (b == 0) continue;
      row[n] = std::sqrt(plan.power[n]) *
               qam_map(std::span<const std::uint8_t>(payload.data() + pos, static_cast<std::size_t>(b)), b);
      pos += static_cast<std::size_t>(b);
    }
  }
  return frame;
}

Modulated modulate_checked(const Grid& symbols, const DmtConfig& config) {
  const int n = config.n_fft;
  const int cp = config.cp_len();
  const int sym_len = config.symbol_len();
  if (symbols.cols != config.n_active())
    throw InvalidArgument("modulate: grid width does not match the active band");

  Modulated out;
  out.wave.sample_rate = config.sample_rate;
  out.wave.samples.resize(static_cast<std::size_t>(symbols.rows) * sym_len);
  std::vector<Complex> bins(static_cast<std::size_t>(n));
  std::vector<Complex> time(static_cast<std::size_t>(n));
  for (int r = 0; r < symbols.rows; ++r) {
    std::fill(bins.begin(), bins.end(), Complex{});
    auto row = symbols.row(r);
    for (int c = 0; c < symbols.cols; ++c) {
      const int k = config.band_first + c;
      bins[k] = row[c];
      bins[n - k] = std::conj(row[c]);
    }
    fft_inverse(bins, time);
    double* dst = out.wave.samples.data() + static_cast<std::size_t>(r) * sym_len;
    for (int i = 0; i < n; ++i) {
      out.max_imag_residual = std::max(out.max_imag_residual, std::abs(time[i].imag()));
      dst[cp + i] = time[i].real();
    }
    std::copy(dst + n, dst + n + cp, dst);
  }
  out.wave.reference_rms = rms(out.wave.samples);
  return out;
}

RealWaveform modulate(const Grid& symbols, const DmtConfig& config) {
  return modulate_checked(symbols, config).wave;
}

RealWaveform training_waveform(const DmtConfig& config) {
  return modulate(make_training_symbols(config), config);
}

RealWaveform clip(const RealWaveform& wave, double clip_ratio_db) {
  RealWaveform out = wave;
  const double sigma = wave.reference_rms.value_or(rms(wave.samples));
  out.reference_rms = sigma;
  if (std::isinf(clip_ratio_db) && clip_ratio_db > 0) return out;
  const double limit = sigma * std::pow(10.0, clip_ratio_db / 20.0);
  kernels::clip(out.samples, limit);
  return out;
}

RealWaveform quantize(const RealWaveform& wave, int bits, double full_scale) {
  if (bits < 1 || bits > 16) throw InvalidArgument("quantize: bits must be in 1..16");
  if (!(full_scale > 0.0)) throw InvalidArgument("quantize: full_scale must be positive");
  RealWaveform out = wave;
  const double levels = std::ldexp(1.0, bits);
  const double lsb = 2.0 * full_scale / levels;
  const double top = levels / 2.0 - 1.0;
  for (double& v : out.samples) {
    const double idx = std::clamp(std::floor(v / lsb), -levels / 2.0, top);
    v = (idx + 0.5) * lsb;
  }
  return out;
}

} // namespace dmtlink
