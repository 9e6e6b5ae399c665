#pragma once

// Data types shared by the transmitter, loader and receiver.

#include "dmtlink/common.hpp"

#include <optional>
#include <span>

namespace dmtlink {

// Frame geometry and converter parameters.
struct DmtConfig {
  int n_fft = 512;
  int cp_num = 1; // cyclic prefix = n_fft * cp_num / cp_den
  int cp_den = 64;
  int n_ts = 5;
  int n_data = 123;
  double sample_rate = 80e9;
  double clip_ratio_db = 10.0; // +inf disables clipping
  int dac_bits = 8;
  int adc_bits = 8;
  double full_scale_sigmas = 4.0; // converter full scale in units of the unclipped RMS
  int band_first = 1;             // active data subcarriers, inclusive
  int band_last = 255;
  std::uint64_t ts_seed = 0x5EED0001;

  int cp_len() const { return n_fft * cp_num / cp_den; }
  int symbol_len() const { return n_fft + cp_len(); }
  int n_symbols() const { return n_ts + n_data; }
  int frame_len() const { return n_symbols() * symbol_len(); }
  int n_active() const { return band_last - band_first + 1; }
  double subcarrier_spacing() const { return sample_rate / n_fft; }
  double subcarrier_frequency(int column) const {
    return (band_first + column) * subcarrier_spacing();
  }

  // Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

// Row-major complex matrix: rows are DMT symbols, columns active subcarriers.
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<Complex> data;

  Grid() = default;
  Grid(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}
  Complex& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const Complex& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::span<Complex> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
  std::span<const Complex> row(int r) const { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
};

// Per-active-subcarrier linear SNR.
struct SnrProfile {
  std::vector<double> snr_linear;
  int n_symbols_used = 0;
};

// Output of bit/power loading. bits[n] in 0..6, power[n] >= 0, power[n] == 0
// exactly when bits[n] == 0, and the loaded powers sum to the loaded count.
struct LoadingPlan {
  std::vector<int> bits;
  std::vector<double> power;
  double gap_db = 6.0;
  double margin_db = 0.0;
  int iterations = 0;

  int total_bits() const;
  int loaded_count() const;
  // Uniform plan: every subcarrier carries `order` bits at unit power.
  static LoadingPlan uniform(int n_subcarriers, int order);
};

struct FrequencyFrame {
  Grid symbols; // (n_ts + n_data) x n_active; training rows first
  LoadingPlan plan;
  Bits payload_bits;
};

struct RealWaveform {
  std::vector<double> samples;
  double sample_rate = 0.0;
  // RMS of the waveform before clipping; set by modulate() and clip().
  std::optional<double> reference_rms;
};

} // namespace dmtlink
