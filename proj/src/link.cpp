#include "dmtlink/link.hpp"

#include "dmtlink/dmt_tx.hpp"
#include "dmtlink/fft.hpp"

#include <algorithm>
#include <cmath>

namespace dmtlink {

void LinkConfig::validate() const {
  dmt.validate();
  vcsel.validate();
  filter.validate();
  fiber.validate();
  rx.validate();
  if (oversample < 1 || oversample > 16) throw InvalidArgument("oversample must be in 1..16");
  if (!(dd_mu >= 0.0 && dd_mu <= 1.0)) throw InvalidArgument("dd_mu must be in [0, 1]");
  if (sync_backoff < 0 || sync_backoff >= dmt.cp_len())
    throw InvalidArgument("sync_backoff must be in [0, cp_len)");
  if (lead_min < 0 || lead_span < 1 || tail < 0) throw InvalidArgument("invalid lead/tail lengths");
}

RealWaveform dac_output(const FrequencyFrame& frame, const DmtConfig& config) {
  const RealWaveform wave = modulate(frame, config);
  const double sigma = wave.reference_rms.value_or(0.0);
  RealWaveform clipped = clip(wave, config.clip_ratio_db);
  if (!(sigma > 0.0)) return clipped;
  return quantize(clipped, config.dac_bits, config.full_scale_sigmas * sigma);
}

RealWaveform propagate(const RealWaveform& dac, const LinkConfig& link, std::size_t lead,
                       std::uint64_t noise_seed, ChannelTrace* trace) {
  const int os = link.oversample;
  const double sigma = dac.reference_rms.value_or(rms(dac.samples));
  const double scale = sigma > 0.0 ? link.vcsel.drive_rms_ma / sigma : 0.0;

  std::vector<double> drive(lead + dac.samples.size() + static_cast<std::size_t>(link.tail), 0.0);
  for (std::size_t i = 0; i < dac.samples.size(); ++i) drive[lead + i] = dac.samples[i] * scale;

  RealWaveform drive_os{upsample_periodic(drive, os), dac.sample_rate * os, std::nullopt};
  VcselOutput laser = vcsel_modulate(drive_os, link.vcsel);
  OpticalField field = recenter(set_power(laser.field, link.vcsel.p_out_dbm));
  if (trace) {
    trace->launched = field;
    trace->laser_clipped = laser.clipped_at_threshold;
  }

  field = mux_filter(field, link.filter);
  field = fiber_propagate(field, link.fiber);
  // Variable attenuator ahead of the receiver; it cannot add power.
  const double arriving = mean_power_w(field);
  if (arriving > dbm_to_watt(link.rx.input_power_dbm)) field = set_power(field, link.rx.input_power_dbm);
  if (trace) trace->received = field;

  const RealWaveform detected = photodetect(field, link.rx, noise_seed);
  RealWaveform adc;
  adc.sample_rate = dac.sample_rate;
  adc.samples.resize(drive.size());
  for (std::size_t i = 0; i < drive.size(); ++i)
    adc.samples[i] = detected.samples[i * static_cast<std::size_t>(os)];
  const double adc_rms = rms(adc.samples);
  if (adc_rms > 0.0)
    adc = quantize(adc, link.dmt.adc_bits, link.dmt.full_scale_sigmas * adc_rms);
  return adc;
}

ReceivedFrame receive(const RealWaveform& adc, const LoadingPlan& plan, const LinkConfig& link) {
  const DmtConfig& cfg = link.dmt;
  static thread_local struct {
    DmtConfig key;
    bool valid = false;
    RealWaveform ts_wave;
    Grid ts_grid;
  } cache;
  auto same = [](const DmtConfig& a, const DmtConfig& b) {
    return a.n_fft == b.n_fft && a.cp_num == b.cp_num && a.cp_den == b.cp_den &&
           a.n_ts == b.n_ts && a.band_first == b.band_first && a.band_last == b.band_last &&
           a.ts_seed == b.ts_seed && a.sample_rate == b.sample_rate;
  };
  if (!cache.valid || !same(cache.key, cfg)) {
    cache.key = cfg;
    cache.ts_grid = make_training_symbols(cfg);
    cache.ts_wave = modulate(cache.ts_grid, cfg);
    cache.valid = true;
  }

  const std::size_t frame_len = static_cast<std::size_t>(cfg.frame_len());
  if (adc.samples.size() < frame_len) throw InvalidArgument("receive: capture shorter than a frame");
  ReceivedFrame out;
  out.sync = synchronize(adc, cache.ts_wave, adc.samples.size() - frame_len);
  out.window_start = out.sync.offset >= static_cast<std::size_t>(link.sync_backoff)
                         ? out.sync.offset - static_cast<std::size_t>(link.sync_backoff)
                         : 0;
  const DemodulatedFrame grids = demodulate(adc, out.window_start, cfg);
  const ChannelEstimate est = estimate_channel(grids.ts, cache.ts_grid);
  out.eq = equalize_dd(grids.data, est, plan, link.dd_mu);
  out.bits = demap_frame(out.eq, plan);
  return out;
}

} // namespace dmtlink
