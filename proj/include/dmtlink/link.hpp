#pragma once

#include "dmtlink/dmt_rx.hpp"
#include "dmtlink/loading.hpp"
#include "dmtlink/optics.hpp"

namespace dmtlink {

// Physical and DSP parameters of one link realization.
struct LinkConfig {
  DmtConfig dmt;
  VcselParams vcsel;
  FilterParams filter;
  FiberParams fiber;
  RxParams rx;
  ChowOptions chow;
  int oversample = 2;   // optical simulation rate = oversample * DAC rate
  double dd_mu = kDefaultDdStep;
  int sync_backoff = 2; // samples the FFT window is moved into the CP after sync
  int lead_min = 32;    // idle samples ahead of the frame: lead_min + [0, lead_span)
  int lead_span = 512;
  int tail = 64;        // idle samples after the frame

  void validate() const;
};

struct ChannelTrace {
  OpticalField launched;   // after the laser, carrier at 0 Hz
  OpticalField received;   // at the photodiode
  bool laser_clipped = false;
};

// DAC output for a frame: clip, quantize at full_scale_sigmas * unclipped RMS.
RealWaveform dac_output(const FrequencyFrame& frame, const DmtConfig& config);

// Drives the laser with the DAC waveform (preceded by `lead` idle samples) and
// returns the ADC output sampled at the DAC rate.
RealWaveform propagate(const RealWaveform& dac, const LinkConfig& link, std::size_t lead,
                       std::uint64_t noise_seed, ChannelTrace* trace = nullptr);

struct ReceivedFrame {
  SyncResult sync;
  std::size_t window_start = 0;
  EqualizerOutput eq;
  Bits bits;
};

ReceivedFrame receive(const RealWaveform& adc, const LoadingPlan& plan, const LinkConfig& link);

} // namespace dmtlink
