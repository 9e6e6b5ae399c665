#pragma once

#include "dmtlink/common.hpp"
#include "dmtlink/types.hpp"

#include <span>

namespace dmtlink {

Bits generate_payload(std::uint64_t seed, std::size_t n_bits);

// n_ts identical rows of unit-modulus pseudo-random QPSK.
Grid make_training_symbols(const DmtConfig& config, std::uint64_t seed);
inline Grid make_training_symbols(const DmtConfig& config) {
  return make_training_symbols(config, config.ts_seed);
}

// Bits are consumed in ascending subcarrier order within each data symbol;
// each cell is scaled by sqrt(power weight).
FrequencyFrame build_frame(const Bits& payload, const LoadingPlan& plan, const Grid& ts,
                           const DmtConfig& config);

struct Modulated {
  RealWaveform wave;
  double max_imag_residual = 0.0;
};

Modulated modulate_checked(const Grid& symbols, const DmtConfig& config);
RealWaveform modulate(const Grid& symbols, const DmtConfig& config);
inline RealWaveform modulate(const FrequencyFrame& frame, const DmtConfig& config) {
  return modulate(frame.symbols, config);
}

// Time-domain training sequence (n_ts symbols with CP) used as the sync reference.
RealWaveform training_waveform(const DmtConfig& config);

// Limits samples to +-A with A = sigma * 10^(ratio/20). sigma is the
// waveform's reference RMS when present, else the input RMS (which is then
// recorded as the reference, so repeated clipping is idempotent).
RealWaveform clip(const RealWaveform& wave, double clip_ratio_db);

// Mid-rise uniform quantizer with 2^bits levels spanning [-full_scale, full_scale];
// inputs beyond full scale saturate to the outermost level.
RealWaveform quantize(const RealWaveform& wave, int bits, double full_scale);

double rms(std::span<const double> x);

} // namespace dmtlink
