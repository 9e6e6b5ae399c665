#include "doctest.h"

#include "dmtlink/config.hpp"
#include "dmtlink/report.hpp"
#include "dmtlink/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace dmtlink;

namespace {

ExperimentConfig small(int frames = 2) {
  ExperimentConfig c;
  c.rates_gbps = {56.0};
  c.reaches_km = {0.0};
  c.filter_states = {false};
  c.n_frames = frames;
  c.threads = 2;
  return c;
}

} // namespace

TEST_SUITE("sweep") {

TEST_CASE("grid enumeration order and seeds") {
  ExperimentConfig c;
  const auto pts = grid_points(c);
  REQUIRE(pts.size() == 48);
  CHECK(pts[0].rate_gbps == 56.0);
  CHECK(pts[0].reach_km == 0.0);
  CHECK_FALSE(pts[0].filter_on);
  CHECK(pts[1].filter_on);
  CHECK(pts[2].reach_km == 2.5);
  CHECK(pts[47].rate_gbps == 89.6);

  std::set<std::uint64_t> seeds;
  for (const auto& p : pts) seeds.insert(point_seed(1, p));
  CHECK(seeds.size() == 48);
  CHECK(point_seed(1, pts[3]) == point_seed(1, pts[3]));
  CHECK(point_seed(1, pts[3]) != point_seed(2, pts[3]));
  CHECK((point_seed(1, pts[3]) ^ point_seed(2, pts[3])) == 3u);

  const LinkConfig l = configure_point(c, {64.0, 7.5, true, -0.02});
  CHECK(l.fiber.length_km == 7.5);
  CHECK(l.filter.enabled);
  CHECK(l.filter.offset_nm == -0.02);
}

TEST_CASE("single point sweep") {
  const ExperimentConfig c = small();
  std::vector<ResultRow> streamed;
  const auto rows = sweep_grid(c, [&](const ResultRow& r) { streamed.push_back(r); });
  REQUIRE(rows.size() == 1);
  CHECK(streamed == rows);
  CHECK(rows[0].ber.has_value());
  CHECK(rows[0].achieved_rate_gbps == doctest::Approx(56.0));
  CHECK(rows[0].seed == point_seed(c.seed, grid_points(c)[0]));
  CHECK(rows[0].mean_snr_db > 10.0);
}

TEST_CASE("noise-free back to back link is error free") {
  ExperimentConfig c = small(3);
  c.link.rx.noise_current_density = 0.0;
  LinkMetrics m;
  const ResultRow r = evaluate_point(c, grid_points(c)[0], &m);
  REQUIRE(r.ber.has_value());
  CHECK(*r.ber == 0.0);
  CHECK(r.pass_fec);
  CHECK(m.bits_counted == 3u * 364u * 123u);
  CHECK(m.plan.total_bits() == 364);
  CHECK(m.dead_subcarriers == 0);
  CHECK(m.snr_profile.snr_linear.size() == 255);
}

TEST_CASE("results are reproducible and independent of thread count") {
  ExperimentConfig c = small(1);
  c.rates_gbps = {56.0, 89.6};
  c.reaches_km = {5.0};
  c.filter_states = {false, true};
  c.threads = 1;
  const auto a = sweep_grid(c);
  c.threads = 4;
  const auto b = sweep_grid(c);
  CHECK(a == b);
  std::stringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  CHECK(sa.str() == sb.str());
  c.seed = 2;
  CHECK(sweep_grid(c) != a);
}

TEST_CASE("impossible rates fail with a typed result") {
  ExperimentConfig c = small(1);
  c.rates_gbps = {300.0};
  const auto rows = sweep_grid(c);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].ber.has_value());
  CHECK(rows[0].failure == "infeasible");
  CHECK_FALSE(rows[0].pass_fec);
  CHECK(format_row(rows[0]).find("infeasible") != std::string::npos);
  CHECK_THROWS_AS(run_link(configure_point(c, grid_points(c)[0]), 300.0, 1, 1), InfeasibleLoading);
}

TEST_CASE("a filter far from the carrier breaks the link") {
  ExperimentConfig c = small(1);
  c.filter_states = {true};
  c.offsets_nm = {0.5};
  const ResultRow r = sweep_grid(c)[0];
  CHECK((!r.ber.has_value() || *r.ber > kFecBerLimit));
}

TEST_CASE("offset sweep picks the best passing offset") {
  ExperimentConfig c = small(1);
  c.reaches_km = {5.0};
  const OffsetSweep s = sweep_offset(c, {0.07, 0.5});
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].filter_on);
  CHECK(s.best_offset_nm == 0.07);
}

TEST_CASE("launched spectrum") {
  const ExperimentConfig c = small();
  const OpticalField f = launched_field(c.link, 1);
  CHECK(f.carrier_offset_hz == 0.0);
  CHECK(mean_power_dbm(f) == doctest::Approx(c.link.vcsel.p_out_dbm));
  const SpectrumTable t = dump_spectrum(f, 100e6, c.link.filter);
  REQUIRE(!t.freq_hz.empty());
  CHECK(std::is_sorted(t.freq_hz.begin(), t.freq_hz.end()));
  CHECK(*std::max_element(t.psd_db.begin(), t.psd_db.end()) == 0.0);
  // carrier dominates at 0 Hz
  const auto peak = std::max_element(t.psd_db.begin(), t.psd_db.end()) - t.psd_db.begin();
  CHECK(std::abs(t.freq_hz[static_cast<std::size_t>(peak)]) < 200e6);
  CHECK(*std::max_element(t.filter_db.begin(), t.filter_db.end()) == doctest::Approx(-4.0).epsilon(1e-3));
  CHECK_THROWS_AS(dump_spectrum(f, 0.0, c.link.filter), InvalidArgument);
}

TEST_CASE("launched spectrum is confined to the modulation band") {
  const ExperimentConfig c = small();
  const SpectrumTable t = dump_spectrum(launched_field(c.link, 3), 500e6, c.link.filter);
  double in_band = -1e9, far = -1e9;
  for (std::size_t i = 0; i < t.freq_hz.size(); ++i) {
    const double f = std::abs(t.freq_hz[i]);
    if (f > 5e9 && f < 35e9) in_band = std::max(in_band, t.psd_db[i]);
    if (f > 60e9) far = std::max(far, t.psd_db[i]);
  }
  CHECK(in_band - far > 25.0);
}

TEST_CASE("without chirp or filter dispersion the offset sign does not matter") {
  ExperimentConfig c = small(2);
  c.rates_gbps = {64.0};
  c.filter_states = {true};
  c.link.vcsel.alpha = 0.0;
  c.link.filter.gd_slope_ps_per_ghz = 0.0;
  c.link.filter.gd_curvature_ps_per_ghz2 = 0.0;
  const ResultRow plus = evaluate_point(c, {64.0, 0.0, true, 0.07});
  const ResultRow minus = evaluate_point(c, {64.0, 0.0, true, -0.07});
  CHECK(std::abs(plus.mean_snr_db - minus.mean_snr_db) < 0.1);
}

}
