#include "dmtlink/dmt_rx.hpp"

#include "dmtlink/fft.hpp"
#include "dmtlink/kernels.hpp"
#include "dmtlink/qam.hpp"

#include <algorithm>
#include <cmath>

namespace dmtlink {

SyncResult synchronize(const RealWaveform& rx, const RealWaveform& ts_ref,
                       std::optional<std::size_t> max_lag, double threshold) {
  const std::size_t len = ts_ref.samples.size();
  if (len == 0 || rx.samples.size() < len)
    throw InvalidArgument("synchronize: received waveform shorter than the training sequence");
  std::size_t last = rx.samples.size() - len;
  if (max_lag) last = std::min(last, *max_lag);

  const std::span<const double> ref(ts_ref.samples);
  const double ref_norm = std::sqrt(kernels::sum_squares(ref));
  SyncResult best;
  if (ref_norm > 0.0) {
    for (std::size_t k = 0; k <= last; ++k) {
      const std::span<const double> win(rx.samples.data() + k, len);
      const double e = kernels::sum_squares(win);
      if (!(e > 0.0)) continue;
      const double c = kernels::dot(win, ref) / (std::sqrt(e) * ref_norm);
      if (c > best.peak) {
        best.peak = c;
        best.offset = k;
      }
    }
  }
  if (best.peak < threshold) throw SyncFailure(best.peak);
  return best;
}

DemodulatedFrame demodulate(const RealWaveform& rx, std::size_t offset, const DmtConfig& config) {
  const std::size_t need = offset + static_cast<std::size_t>(config.frame_len());
  if (rx.samples.size() < need)
    throw InvalidArgument("demodulate: insufficient samples (" + std::to_string(rx.samples.size()) +
                          " < " + std::to_string(need) + ")");
  const int n = config.n_fft;
  const int cols = config.n_active();
  DemodulatedFrame out{Grid(config.n_ts, cols), Grid(config.n_data, cols)};
  std::vector<Complex> time(static_cast<std::size_t>(n)), bins(static_cast<std::size_t>(n));
  for (int s = 0; s < config.n_symbols(); ++s) {
    const double* src = rx.samples.data() + offset +
                        static_cast<std::size_t>(s) * config.symbol_len() + config.cp_len();
    for (int i = 0; i < n; ++i) time[i] = src[i];
    fft_forward(time, bins);
    Grid& g = s < config.n_ts ? out.ts : out.data;
    const int row = s < config.n_ts ? s : s - config.n_ts;
    for (int c = 0; c < cols; ++c) g.at(row, c) = bins[config.band_first + c];
  }
  return out;
}

ChannelEstimate estimate_channel(const Grid& ts_rx, const Grid& ts_known) {
  if (ts_rx.rows != ts_known.rows || ts_rx.cols != ts_known.cols || ts_rx.rows == 0)
    throw InvalidArgument("estimate_channel: training grids differ in shape");
  ChannelEstimate est;
  est.h.assign(static_cast<std::size_t>(ts_rx.cols), Complex{});
  for (int c = 0; c < ts_rx.cols; ++c) {
    Complex acc{};
    for (int r = 0; r < ts_rx.rows; ++r) {
      const Complex x = ts_known.at(r, c);
      if (x == Complex{}) throw InvalidArgument("estimate_channel: zero training value");
      acc += ts_rx.at(r, c) / x;
    }
    est.h[c] = acc / static_cast<double>(ts_rx.rows);
  }
  return est;
}

EqualizerOutput equalize_dd(const Grid& data, const ChannelEstimate& estimate,
                            const LoadingPlan& plan, double mu) {
  if (!(mu >= 0.0 && mu < 1.0 + 1e-15)) throw InvalidArgument("equalize_dd: mu must be in [0, 1]");
  const int cols = data.cols;
  if (static_cast<int>(estimate.h.size()) != cols || static_cast<int>(plan.bits.size()) != cols)
    throw InvalidArgument("equalize_dd: estimate or plan does not match the grid width");

  EqualizerOutput out{Grid(data.rows, cols), Grid(data.rows, cols),
                      std::vector<bool>(static_cast<std::size_t>(cols), false), estimate};
  std::vector<Complex>& h = out.final_estimate.h;
  double h_max = 0.0;
  for (const Complex& v : h) h_max = std::max(h_max, std::abs(v));
  for (int c = 0; c < cols; ++c)
    out.dead[c] = !(std::abs(h[c]) > 1e-9 * h_max) || !std::isfinite(std::abs(h[c]));

  for (int s = 0; s < data.rows; ++s) {
    for (int c = 0; c < cols; ++c) {
      if (out.dead[c]) continue;
      const Complex y = data.at(s, c);
      const Complex x = y / h[c];
      out.equalized.at(s, c) = x;
      const int b = plan.bits[c];
      if (b == 0) continue;
      const Complex d = qam_decide_point(x, b, plan.power[c]);
      out.decisions.at(s, c) = d;
      if (mu > 0.0) h[c] = (1.0 - mu) * h[c] + mu * (y / d);
    }
  }
  if (mu > 0.0) out.final_estimate.source = EstimateSource::DecisionUpdated;
  return out;
}

Bits demap_frame(const EqualizerOutput& eq, const LoadingPlan& plan) {
  const int bits_per_symbol = plan.total_bits();
  Bits out(static_cast<std::size_t>(bits_per_symbol) * eq.equalized.rows, 0);
  std::size_t pos = 0;
  for (int s = 0; s < eq.equalized.rows; ++s) {
    for (int c = 0; c < eq.equalized.cols; ++c) {
      const int b = plan.bits[c];
      if (b == 0) continue;
      if (!eq.dead[c])
        qam_demap(eq.equalized.at(s, c), b, plan.power[c],
                  std::span<std::uint8_t>(out.data() + pos, static_cast<std::size_t>(b)));
      pos += static_cast<std::size_t>(b);
    }
  }
  return out;
}

BerCount count_ber(const Bits& tx, const Bits& rx) {
  if (tx.size() != rx.size()) throw InvalidArgument("count_ber: length mismatch");
  BerCount r;
  r.bits_counted = tx.size();
  for (std::size_t i = 0; i < tx.size(); ++i) r.bit_errors += ((tx[i] ^ rx[i]) & 1u);
  r.ber = r.bits_counted ? static_cast<double>(r.bit_errors) / r.bits_counted : 0.0;
  r.pass_fec = r.ber <= kFecBerLimit;
  return r;
}

BerCount merge(const BerCount& a, const BerCount& b) {
  BerCount r;
  r.bit_errors = a.bit_errors + b.bit_errors;
  r.bits_counted = a.bits_counted + b.bits_counted;
  r.ber = r.bits_counted ? static_cast<double>(r.bit_errors) / r.bits_counted : 0.0;
  r.pass_fec = r.ber <= kFecBerLimit;
  return r;
}

} // namespace dmtlink
