#include "doctest.h"

#include "dmtlink/dmt_tx.hpp"
#include "dmtlink/loading.hpp"
#include "dmtlink/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace dmtlink;

namespace {

SnrProfile profile(std::vector<double> v) {
  SnrProfile p;
  p.snr_linear = std::move(v);
  return p;
}

// uniform 16QAM probe frame (n_data rows) and a received grid X + noise
struct Probe {
  FrequencyFrame frame;
  Grid rx;
};

Probe noisy_probe(const DmtConfig& cfg, double noise_var, std::uint64_t seed) {
  const LoadingPlan plan = LoadingPlan::uniform(cfg.n_active(), 4);
  Probe p;
  p.frame = build_frame(generate_payload(seed, static_cast<std::size_t>(plan.total_bits()) * cfg.n_data), plan,
                        make_training_symbols(cfg), cfg);
  p.rx = Grid(cfg.n_data, cfg.n_active());
  Rng rng(seed ^ 0xABCDEF);
  for (int s = 0; s < cfg.n_data; ++s)
    for (int n = 0; n < cfg.n_active(); ++n)
      p.rx.at(s, n) = p.frame.symbols.at(cfg.n_ts + s, n) + rng.complex_gaussian(noise_var);
  return p;
}

} // namespace

TEST_SUITE("loading") {

TEST_CASE("rate targets and achieved rate") {
  DmtConfig cfg;
  CHECK(RateTarget{56e9}.bits_per_symbol(cfg) == 364);
  CHECK(RateTarget{64e9}.bits_per_symbol(cfg) == 416);
  CHECK(RateTarget{74.7e9}.bits_per_symbol(cfg) == 486); // 485.55 rounded up
  CHECK(RateTarget{89.6e9}.bits_per_symbol(cfg) == 583); // 582.4 rounded up
  CHECK(RateTarget{1.0}.bits_per_symbol(cfg) == 1);

  LoadingPlan plan;
  plan.bits.assign(255, 0);
  CHECK(achieved_rate(plan, cfg) == 0.0);
  std::fill(plan.bits.begin(), plan.bits.begin() + 182, 2);
  CHECK(plan.total_bits() == 364);
  CHECK(achieved_rate(plan, cfg) == doctest::Approx(56e9));
  CHECK(net_rate(plan, cfg) == doctest::Approx(56e9 * 123.0 / 128.0));
  plan.bits.assign(255, 0);
  std::fill(plan.bits.begin(), plan.bits.begin() + 208, 2);
  CHECK(achieved_rate(plan, cfg) == doctest::Approx(64e9));
}

TEST_CASE("chow: documented examples") {
  LoadingPlan a = chow_load(profile({100, 100, 100, 100}), 8);
  CHECK(a.bits == std::vector<int>{2, 2, 2, 2});
  for (double p : a.power) CHECK(p == doctest::Approx(1.0));

  LoadingPlan b = chow_load(profile({1e6, 0, 1e6, 0}), 12);
  CHECK(b.bits == std::vector<int>{6, 0, 6, 0});
  CHECK(b.power[1] == 0.0);
  CHECK(b.power[3] == 0.0);
}

TEST_CASE("chow: 56 Gb/s on a decaying profile sums exactly") {
  DmtConfig cfg;
  std::vector<double> snr(255);
  for (int i = 0; i < 255; ++i) snr[i] = db_to_linear(20.0 - 20.0 * i / 254.0);
  const int target = RateTarget{56e9}.bits_per_symbol(cfg);
  const LoadingPlan plan = chow_load(profile(snr), target);
  CHECK(plan.total_bits() == 364);
  for (int b : plan.bits) {
    CHECK(b >= 0);
    CHECK(b <= 6);
  }
}

TEST_CASE("chow: infeasible targets are typed") {
  CHECK_THROWS_AS(chow_load(profile({1e3, 1e3}), 13), InfeasibleLoading);
  CHECK_THROWS_AS(chow_load(profile({0, 0, 0}), 1), InfeasibleLoading);
  try {
    chow_load(profile({1e3, 0, 1e3}), 20);
    FAIL("expected InfeasibleLoading");
  } catch (const InfeasibleLoading& e) {
    CHECK(e.requested_bits() == 20);
    CHECK(e.max_achievable_bits() == 12);
  }
}

TEST_CASE("chow: random profiles, exact sums, rounding bound, power normalization") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 8 + static_cast<int>(rng.uniform() * 248);
    std::vector<double> snr(n);
    for (double& s : snr) s = rng.uniform() < 0.05 ? 0.0 : db_to_linear(-5.0 + 35.0 * rng.uniform());
    const int target = 1 + static_cast<int>(rng.uniform() * 6 * n);
    try {
      const ChowResult r = chow_load_detailed(profile(snr), target);
      CHECK(r.plan.total_bits() == target);
      if (r.converged)
        for (int i = 0; i < n; ++i) CHECK(std::abs(r.bhat[i] - r.rounded_bits[i]) <= 0.5 + 1e-9);
      const double psum = std::accumulate(r.plan.power.begin(), r.plan.power.end(), 0.0);
      CHECK(std::abs(psum - r.plan.loaded_count()) <= 1e-12 * std::max(1, r.plan.loaded_count()));
      for (int i = 0; i < n; ++i) CHECK((r.plan.power[i] == 0.0) == (r.plan.bits[i] == 0));
    } catch (const InfeasibleLoading& e) {
      CHECK(target > e.max_achievable_bits());
    }
  }
}

TEST_CASE("chow: scaling the SNR keeps the ordering of bhat") {
  Rng rng(3);
  std::vector<double> snr(64);
  for (double& s : snr) s = db_to_linear(30.0 * rng.uniform());
  std::vector<double> scaled = snr;
  for (double& s : scaled) s *= 3.7;
  ChowOptions opt;
  opt.max_iter = 1; // one pass: margin 0 dB in both cases
  const auto a = chow_load_detailed(profile(snr), 100, opt);
  const auto b = chow_load_detailed(profile(scaled), 100, opt);
  const auto best = std::max_element(snr.begin(), snr.end()) - snr.begin();
  CHECK(a.bhat[best] == *std::max_element(a.bhat.begin(), a.bhat.end()));
  CHECK(b.bhat[best] == *std::max_element(b.bhat.begin(), b.bhat.end()));
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      if (snr[i] < snr[j]) CHECK(b.bhat[i] <= b.bhat[j]);
  const LoadingPlan pa = chow_load(profile(snr), 100), pb = chow_load(profile(scaled), 100);
  CHECK(pa.margin_db != pb.margin_db);
}

TEST_CASE("power loading") {
  LoadingPlan plan;
  plan.bits = {4, 4};
  const LoadingPlan p = power_load(plan, profile({200, 100}), 6.0);
  CHECK(p.power[1] / p.power[0] == doctest::Approx(2.0));
  CHECK(p.power[0] + p.power[1] == doctest::Approx(2.0));

  LoadingPlan flat;
  flat.bits = {3, 3, 3};
  for (double v : power_load(flat, profile({50, 50, 50}), 6.0).power) CHECK(v == doctest::Approx(1.0));

  // equal margin: p * SNR / (2^b - 1) is the same on every loaded subcarrier, so
  // the predicted symbol error rate (gap approximation) is equal too
  Rng rng(8);
  std::vector<double> snr(100);
  LoadingPlan any;
  for (int i = 0; i < 100; ++i) {
    snr[i] = db_to_linear(30.0 * rng.uniform());
    any.bits.push_back(static_cast<int>(rng.uniform() * 7));
  }
  const LoadingPlan q = power_load(any, profile(snr), 6.0);
  double ref = -1;
  for (int i = 0; i < 100; ++i) {
    if (any.bits[i] == 0) continue;
    const double m = q.power[i] * snr[i] / (std::ldexp(1.0, any.bits[i]) - 1.0);
    if (ref < 0) ref = m;
    CHECK(std::abs(m / ref - 1.0) < 1e-9);
  }
}

TEST_CASE("estimate_snr") {
  DmtConfig cfg;
  cfg.band_last = 32;
  Probe clean = noisy_probe(cfg, 0.0, 1);
  Grid exact(cfg.n_data, cfg.n_active());
  for (int s = 0; s < cfg.n_data; ++s)
    for (int n = 0; n < cfg.n_active(); ++n) exact.at(s, n) = clean.frame.symbols.at(cfg.n_ts + s, n);
  for (double v : estimate_snr(clean.frame, exact, cfg).snr_linear) CHECK(v == kSnrCap);

  Probe p = noisy_probe(cfg, 0.1, 2);
  const SnrProfile est = estimate_snr(p.frame, p.rx, cfg);
  CHECK(est.n_symbols_used == 123);
  for (double v : est.snr_linear) CHECK(v == doctest::Approx(10.0).epsilon(0.3));

  // subcarrier wiped out by the channel: only the residual error remains
  for (int s = 0; s < cfg.n_data; ++s) p.rx.at(s, 5) = 0.0;
  CHECK(estimate_snr(p.frame, p.rx, cfg).snr_linear[5] == doctest::Approx(1.0));
}

TEST_CASE("estimate_snr is unbiased at 10 dB") {
  DmtConfig cfg;
  cfg.band_last = 20;
  double mean = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const Probe p = noisy_probe(cfg, 0.1, 100 + t);
    const SnrProfile est = estimate_snr(p.frame, p.rx, cfg);
    for (double v : est.snr_linear) mean += v;
  }
  mean /= trials * cfg.n_active();
  CHECK(mean == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("loading CSV round trip") {
  DmtConfig cfg;
  cfg.band_first = 3;
  cfg.band_last = 6;
  SnrProfile snr = profile({100.0, 10.0, 1.0, 0.5});
  LoadingPlan plan = chow_load(snr, 6);
  std::stringstream ss;
  write_loading_csv(ss, cfg, snr, plan);
  const std::string text = ss.str();
  CHECK(text.rfind("subcarrier,snr_db,bits,power\n3,20,", 0) == 0);
  const LoadingTable t = read_loading_csv(ss);
  CHECK(t.subcarrier == std::vector<int>{3, 4, 5, 6});
  CHECK(t.plan.bits == plan.bits);
  for (int i = 0; i < 4; ++i) {
    CHECK(t.snr.snr_linear[i] == doctest::Approx(snr.snr_linear[i]).epsilon(1e-5));
    CHECK(t.plan.power[i] == doctest::Approx(plan.power[i]).epsilon(1e-5));
  }
  std::istringstream bad("a,b\n");
  CHECK_THROWS_AS(read_loading_csv(bad), InvalidArgument);
}

}
