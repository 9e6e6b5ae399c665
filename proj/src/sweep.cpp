#include "dmtlink/sweep.hpp"

#include "dmtlink/dmt_tx.hpp"
#include "dmtlink/fft.hpp"
#include "dmtlink/random.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

namespace dmtlink {
namespace {

enum SeedStream : std::uint64_t {
  kProbePayload = 1,
  kProbeLead = 2,
  kProbeNoise = 3,
  kFrameBase = 1000,
};

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFFu;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::size_t draw_lead(const LinkConfig& link, std::uint64_t seed) {
  return static_cast<std::size_t>(link.lead_min) +
         static_cast<std::size_t>(mix_seed(seed) % static_cast<std::uint64_t>(link.lead_span));
}

struct FrameRun {
  FrequencyFrame frame;
  ReceivedFrame rx;
  bool laser_clipped = false;
};

FrameRun run_frame(const LinkConfig& link, const LoadingPlan& plan, const Grid& ts,
                   std::uint64_t payload_seed, std::uint64_t lead_seed, std::uint64_t noise_seed) {
  const DmtConfig& cfg = link.dmt;
  FrameRun run;
  const std::size_t n_bits = static_cast<std::size_t>(plan.total_bits()) * cfg.n_data;
  run.frame = build_frame(generate_payload(payload_seed, n_bits), plan, ts, cfg);
  ChannelTrace trace;
  const RealWaveform adc =
      propagate(dac_output(run.frame, cfg), link, draw_lead(link, lead_seed), noise_seed, &trace);
  run.laser_clipped = trace.laser_clipped;
  run.rx = receive(adc, plan, link);
  return run;
}

} // namespace

void ExperimentConfig::validate() const {
  link.validate();
  if (rates_gbps.empty() || reaches_km.empty() || filter_states.empty() || offsets_nm.empty())
    throw InvalidArgument("sweep lists must be non-empty");
  if (n_frames < 1) throw InvalidArgument("n_frames must be >= 1");
  for (double r : rates_gbps)
    if (!(r > 0.0)) throw InvalidArgument("rates must be positive");
  for (double l : reaches_km)
    if (!(l >= 0.0)) throw InvalidArgument("reaches must be >= 0");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
}

std::uint64_t point_seed(std::uint64_t base_seed, const SweepPoint& p) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  h = fnv1a(h, std::bit_cast<std::uint64_t>(p.rate_gbps));
  h = fnv1a(h, std::bit_cast<std::uint64_t>(p.reach_km));
  h = fnv1a(h, p.filter_on ? 1u : 0u);
  h = fnv1a(h, std::bit_cast<std::uint64_t>(p.offset_nm));
  return base_seed ^ mix_seed(h);
}

LinkConfig configure_point(const ExperimentConfig& cfg, const SweepPoint& point) {
  LinkConfig link = cfg.link;
  link.fiber.length_km = point.reach_km;
  link.filter.enabled = point.filter_on;
  link.filter.offset_nm = point.offset_nm;
  return link;
}

ProbeResult run_probe(const LinkConfig& link, std::uint64_t seed) {
  link.validate();
  const DmtConfig& cfg = link.dmt;
  const LoadingPlan plan = LoadingPlan::uniform(cfg.n_active(), 4);
  const Grid ts = make_training_symbols(cfg);
  FrameRun run = run_frame(link, plan, ts, derive_seed(seed, kProbePayload),
                           derive_seed(seed, kProbeLead), derive_seed(seed, kProbeNoise));
  ProbeResult out;
  out.snr = estimate_snr(run.frame, run.rx.eq.equalized, cfg);
  out.frame = std::move(run.frame);
  out.rx = std::move(run.rx);
  return out;
}

LinkMetrics run_link(const LinkConfig& link, double rate_gbps, int n_frames, std::uint64_t seed) {
  const DmtConfig& cfg = link.dmt;
  const ProbeResult probe = run_probe(link, seed);
  const int target = RateTarget{rate_gbps * 1e9}.bits_per_symbol(cfg);

  LinkMetrics m;
  m.snr_profile = probe.snr;
  m.plan = chow_load(probe.snr, target, link.chow);
  m.achieved_rate = achieved_rate(m.plan, cfg);
  m.sync_offset = probe.rx.sync.offset;
  m.sync_peak = probe.rx.sync.peak;

  const Grid ts = make_training_symbols(cfg);
  const auto cols = static_cast<std::size_t>(cfg.n_active());
  std::vector<double> sig(cols, 0.0), err(cols, 0.0);
  BerCount total;
  for (int f = 0; f < n_frames; ++f) {
    const std::uint64_t fs = derive_seed(seed, kFrameBase + static_cast<std::uint64_t>(f));
    const FrameRun run = run_frame(link, m.plan, ts, derive_seed(fs, 1), derive_seed(fs, 2),
                                   derive_seed(fs, 3));
    total = merge(total, count_ber(run.frame.payload_bits, run.rx.bits));
    m.laser_clipped = m.laser_clipped || run.laser_clipped;
    for (int s = 0; s < cfg.n_data; ++s)
      for (std::size_t c = 0; c < cols; ++c) {
        const Complex x = run.frame.symbols.at(cfg.n_ts + s, static_cast<int>(c));
        sig[c] += std::norm(x);
        err[c] += std::norm(run.rx.eq.equalized.at(s, static_cast<int>(c)) - x);
      }
    if (f == 0) {
      int dead = 0;
      for (bool d : run.rx.eq.dead) dead += d;
      m.dead_subcarriers = dead;
    }
  }
  m.bit_errors = total.bit_errors;
  m.bits_counted = total.bits_counted;
  m.ber = total.ber;
  m.pass_fec = total.pass_fec;
  m.evm_db.resize(cols);
  for (std::size_t c = 0; c < cols; ++c)
    m.evm_db[c] = sig[c] > 0.0 ? linear_to_db(std::max(err[c], 1e-300) / sig[c])
                               : std::numeric_limits<double>::quiet_NaN();
  return m;
}

LinkMetrics run_link(const ExperimentConfig& cfg, const SweepPoint& point) {
  return run_link(configure_point(cfg, point), point.rate_gbps, cfg.n_frames,
                  point_seed(cfg.seed, point));
}

double mean_snr_db(const SnrProfile& snr) {
  if (snr.snr_linear.empty()) return 0.0;
  double acc = 0.0;
  for (double v : snr.snr_linear) acc += linear_to_db(std::max(v, 1e-30));
  return acc / static_cast<double>(snr.snr_linear.size());
}

std::vector<SweepPoint> grid_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (double rate : cfg.rates_gbps)
    for (double reach : cfg.reaches_km)
      for (bool filter : cfg.filter_states)
        for (double offset : cfg.offsets_nm) pts.push_back({rate, reach, filter, offset});
  return pts;
}

ResultRow evaluate_point(const ExperimentConfig& cfg, const SweepPoint& point, LinkMetrics* metrics) {
  ResultRow row;
  row.rate_gbps = point.rate_gbps;
  row.reach_km = point.reach_km;
  row.filter_on = point.filter_on;
  row.offset_nm = point.offset_nm;
  row.seed = point_seed(cfg.seed, point);
  const LinkConfig link = configure_point(cfg, point);
  try {
    LinkMetrics m = run_link(link, point.rate_gbps, cfg.n_frames, row.seed);
    row.ber = m.ber;
    row.pass_fec = m.pass_fec;
    row.achieved_rate_gbps = m.achieved_rate / 1e9;
    row.mean_snr_db = mean_snr_db(m.snr_profile);
    if (metrics) *metrics = std::move(m);
  } catch (const InfeasibleLoading&) {
    row.failure = "infeasible";
    // The probe itself succeeded; report its SNR.
    row.mean_snr_db = mean_snr_db(run_probe(link, row.seed).snr);
  } catch (const SyncFailure&) {
    row.failure = "sync_failure";
  }
  return row;
}

std::vector<ResultRow> sweep_grid(const ExperimentConfig& cfg, const RowSink& on_row,
                                  std::vector<LinkMetrics>* metrics) {
  cfg.validate();
  const std::vector<SweepPoint> pts = grid_points(cfg);
  std::vector<ResultRow> rows(pts.size());
  std::vector<char> done(pts.size(), 0);
  if (metrics) metrics->assign(pts.size(), LinkMetrics{});

  std::mutex mu;
  std::size_t emitted = 0;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pts.size()) return;
      try {
        LinkMetrics m;
        ResultRow row = evaluate_point(cfg, pts[i], metrics ? &m : nullptr);
        std::lock_guard lock(mu);
        rows[i] = std::move(row);
        if (metrics) (*metrics)[i] = std::move(m);
        done[i] = 1;
        while (emitted < pts.size() && done[emitted]) {
          if (on_row) on_row(rows[emitted]);
          ++emitted;
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next.store(pts.size());
        return;
      }
    }
  };

  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(std::max<std::size_t>(pts.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

OffsetSweep sweep_offset(const ExperimentConfig& cfg, const std::vector<double>& offsets_nm) {
  ExperimentConfig c = cfg;
  c.filter_states = {true};
  c.offsets_nm = offsets_nm;
  OffsetSweep out;
  out.rows = sweep_grid(c);
  const ResultRow* best = nullptr;
  for (const ResultRow& r : out.rows) {
    if (!r.ber) continue;
    if (!best || *r.ber < *best->ber || (*r.ber == *best->ber && r.mean_snr_db > best->mean_snr_db))
      best = &r;
  }
  if (best) out.best_offset_nm = best->offset_nm;
  return out;
}

SpectrumTable dump_spectrum(const OpticalField& field, double resolution_hz,
                            const FilterParams& filter) {
  if (!(resolution_hz > 0.0)) throw InvalidArgument("dump_spectrum: resolution must be positive");
  const double fs = field.sample_rate;
  std::size_t seg = std::bit_ceil(static_cast<std::size_t>(std::ceil(fs / resolution_hz)));
  seg = std::min(seg, std::bit_floor(std::max<std::size_t>(field.samples.size(), 1)));
  std::vector<double> window(seg);
  for (std::size_t i = 0; i < seg; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(seg));

  std::vector<double> acc(seg, 0.0);
  std::vector<Complex> buf(seg), spec(seg);
  const std::size_t hop = std::max<std::size_t>(seg / 2, 1);
  std::size_t count = 0;
  for (std::size_t start = 0; start + seg <= field.samples.size(); start += hop) {
    for (std::size_t i = 0; i < seg; ++i) buf[i] = field.samples[start + i] * window[i];
    fft_forward(buf, spec);
    for (std::size_t i = 0; i < seg; ++i) acc[i] += std::norm(spec[i]);
    ++count;
  }

  SpectrumTable t;
  const double peak = count ? *std::max_element(acc.begin(), acc.end()) : 0.0;
  for (std::size_t j = 0; j < seg; ++j) {
    const std::size_t k = (j + seg / 2) % seg; // ascending frequency
    const double f = fft_bin_frequency(k, seg, fs);
    t.freq_hz.push_back(f);
    t.psd_db.push_back(peak > 0.0 ? 10.0 * std::log10(std::max(acc[k] / peak, 1e-30)) : -300.0);
    const double h = std::abs(mux_response(f - field.carrier_offset_hz, filter, field.lambda_nm));
    t.filter_db.push_back(20.0 * std::log10(std::max(h, 1e-15)));
  }
  return t;
}

OpticalField launched_field(const LinkConfig& link, std::uint64_t seed) {
  link.validate();
  const DmtConfig& cfg = link.dmt;
  const LoadingPlan plan = LoadingPlan::uniform(cfg.n_active(), 4);
  const FrequencyFrame frame = build_frame(
      generate_payload(derive_seed(seed, kProbePayload),
                       static_cast<std::size_t>(plan.total_bits()) * cfg.n_data),
      plan, make_training_symbols(cfg), cfg);
  ChannelTrace trace;
  propagate(dac_output(frame, cfg), link, static_cast<std::size_t>(link.lead_min),
            derive_seed(seed, kProbeNoise), &trace);
  return trace.launched;
}

} // namespace dmtlink
