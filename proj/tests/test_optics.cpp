#include "doctest.h"

#include "dmtlink/fft.hpp"
#include "dmtlink/optics.hpp"

#include <cmath>

using namespace dmtlink;

namespace {

constexpr double kFs = 160e9;
constexpr std::size_t kN = 4096; // bin spacing 39.0625 MHz

RealWaveform tone_ma(double amp_ma, std::size_t bin) {
  RealWaveform w;
  w.sample_rate = kFs;
  w.samples.resize(kN);
  for (std::size_t k = 0; k < kN; ++k) w.samples[k] = amp_ma * std::cos(2.0 * kPi * bin * k / kN);
  return w;
}

// Chirp-free intensity-modulated field sqrt(P0 (1 + m cos wt)).
OpticalField im_field(double p0, double m, std::size_t bin) {
  OpticalField f;
  f.sample_rate = kFs;
  f.lambda_nm = 1522.0;
  f.samples.resize(kN);
  for (std::size_t k = 0; k < kN; ++k)
    f.samples[k] = std::sqrt(p0 * (1.0 + m * std::cos(2.0 * kPi * bin * k / kN)));
  return f;
}

double tone_amplitude(const std::vector<double>& x, std::size_t bin) {
  std::vector<Complex> c(x.begin(), x.end());
  return std::abs(fft_forward(c)[bin]);
}

OpticalField random_field(std::uint64_t seed) {
  OpticalField f;
  f.sample_rate = kFs;
  f.lambda_nm = 1550.0;
  f.samples.resize(kN);
  std::uint64_t s = seed;
  for (auto& v : f.samples) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    const double a = static_cast<double>(s >> 40) / (1 << 24) - 0.5;
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    v = {a, static_cast<double>(s >> 40) / (1 << 24) - 0.5};
  }
  return f;
}

} // namespace

TEST_SUITE("optics") {

TEST_CASE("vcsel small-signal response") {
  VcselParams p;
  CHECK(vcsel_bandwidth_3db(p) == doctest::Approx(18e9).epsilon(1e-3));
  CHECK(std::abs(vcsel_response(0.0, p)) == doctest::Approx(1.0));
  // damped second order: |H|^2 at f_r is 1 / (2 zeta)^2
  CHECK(std::norm(vcsel_response(p.f_r_hz, p)) == doctest::Approx(1.0));
  p.damping = 0.25;
  CHECK(std::norm(vcsel_response(p.f_r_hz, p)) == doctest::Approx(4.0));
}

TEST_CASE("vcsel without drive emits a constant carrier shifted by the adiabatic chirp") {
  VcselParams p;
  RealWaveform idle;
  idle.sample_rate = kFs;
  idle.samples.assign(1000, 0.0);
  const VcselOutput out = vcsel_modulate(idle, p);
  const double p0 = p.slope_w_per_a * 1e-3 * (p.bias_ma - p.i_th_ma);
  for (const Complex& v : out.field.samples) CHECK(std::norm(v) == doctest::Approx(p0).epsilon(1e-12));
  CHECK(out.field.carrier_offset_hz == doctest::Approx(p.alpha * p.kappa_hz_per_w * p0 / (4.0 * kPi)));
  CHECK_FALSE(out.clipped_at_threshold);

  // after recentering the field is a pure constant
  const OpticalField c = recenter(out.field);
  for (const Complex& v : c.samples) CHECK(std::abs(v - c.samples[0]) < 1e-9 * std::abs(c.samples[0]));

  p.alpha = 0.0;
  const VcselOutput flat = vcsel_modulate(tone_ma(1.0, 64), p);
  for (const Complex& v : flat.field.samples) CHECK(std::abs(std::arg(v)) < 1e-15);
  CHECK(flat.field.carrier_offset_hz == 0.0);
}

TEST_CASE("vcsel threshold clipping is reported") {
  VcselParams p;
  const VcselOutput out = vcsel_modulate(tone_ma(12.0, 64), p);
  CHECK(out.samples_below_threshold > 0);
  CHECK(out.clipped_at_threshold);
}

TEST_CASE("chirp makes the modulation sidebands asymmetric") {
  VcselParams p;
  const std::size_t bin = 128; // 5 GHz
  const double f = 5e9;
  const OpticalField e = recenter(vcsel_modulate(tone_ma(0.05, bin), p).field);
  const std::vector<Complex> spec = fft_forward(e.samples);
  const double upper = std::abs(spec[bin]), lower = std::abs(spec[kN - bin]);

  const double p0 = p.slope_w_per_a * 1e-3 * (p.bias_ma - p.i_th_ma);
  const double a = p.alpha * p.kappa_hz_per_w * p0 / (2.0 * kPi * f);
  const Complex j(0.0, 1.0);
  const double expected = std::abs(1.0 + j * p.alpha + a) / std::abs(1.0 + j * p.alpha - a);
  CHECK(upper / lower == doctest::Approx(expected).epsilon(0.01));
  CHECK(expected > 1.2);

  // transient chirp only: symmetric sidebands
  p.kappa_hz_per_w = 0.0;
  const std::vector<Complex> s2 = fft_forward(vcsel_modulate(tone_ma(0.05, bin), p).field.samples);
  CHECK(std::abs(s2[bin]) / std::abs(s2[kN - bin]) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("mux passband") {
  FilterParams f;
  const double lambda = 1522.0;
  CHECK(filter_bandwidth_hz(f, lambda) == doctest::Approx(38.82e9).epsilon(1e-3));
  CHECK(filter_offset_hz(f, lambda) == doctest::Approx(9.06e9).epsilon(1e-3));
  const double c = filter_offset_hz(f, lambda), half = filter_bandwidth_hz(f, lambda) / 2.0;
  CHECK(20.0 * std::log10(std::abs(mux_response(c, f, lambda))) == doctest::Approx(-4.0));
  CHECK(20.0 * std::log10(std::abs(mux_response(c + half, f, lambda))) ==
        doctest::Approx(-4.0 - 10.0 * std::log10(2.0)));
  CHECK(20.0 * std::log10(std::abs(mux_response(c - half, f, lambda))) ==
        doctest::Approx(-4.0 - 10.0 * std::log10(2.0)));
  // carrier below the passband centre: the upper sideband is favoured
  CHECK(std::abs(mux_response(20e9, f, lambda)) > std::abs(mux_response(-20e9, f, lambda)));

  FilterParams off = f;
  off.enabled = false;
  const OpticalField x = random_field(1);
  CHECK(mux_filter(x, off).samples == x.samples);
}

TEST_CASE("mux in-band dispersion parameterizations") {
  FilterParams f;
  const double lambda = 1522.0;
  const double half = filter_bandwidth_hz(f, lambda) / 2.0;
  set_inband_dispersion_ps_per_nm(f, -60.0, -10.0, lambda);
  CHECK(inband_dispersion_ps_per_nm(f, -half, lambda) == doctest::Approx(-60.0));
  CHECK(inband_dispersion_ps_per_nm(f, half, lambda) == doctest::Approx(-10.0));
  CHECK(inband_dispersion_ps_per_nm(f, 0.0, lambda) == doctest::Approx(-35.0));

  set_inband_delay_ps(f, -60.0, -10.0, lambda);
  const double a = f.gd_slope_ps_per_ghz * 1e-21, b = f.gd_curvature_ps_per_ghz2 * 1e-30;
  auto tau_ps = [&](double d) { return (a * d + b * d * d) * 1e12; };
  CHECK(tau_ps(-half) == doctest::Approx(-60.0));
  CHECK(tau_ps(half) == doctest::Approx(-10.0));

  // the group delay of the response is the derivative of -phase / 2pi
  const double d = 3e9, h = 1e6, c = filter_offset_hz(f, lambda);
  const double dphi = std::arg(mux_response(c + d + h, f, lambda) / mux_response(c + d - h, f, lambda));
  CHECK(-dphi / (2.0 * kPi * 2.0 * h) * 1e12 == doctest::Approx(tau_ps(d)).epsilon(1e-4));
}

TEST_CASE("fiber") {
  FiberParams p;
  const OpticalField x = random_field(2);
  CHECK(fiber_propagate(x, p).samples == x.samples);

  p.length_km = 10.0;
  p.attenuation_db_km = 0.0;
  const OpticalField y = fiber_propagate(x, p);
  CHECK(mean_power_w(y) == doctest::Approx(mean_power_w(x)).epsilon(1e-12));

  p.attenuation_db_km = 0.2;
  CHECK(mean_power_dbm(fiber_propagate(x, p)) == doctest::Approx(mean_power_dbm(x) - 2.0));

  // first intensity-modulation null of a chirp-free carrier after 10 km
  const double lambda_m = 1522e-9;
  const double null = std::sqrt(kSpeedOfLight / (2.0 * lambda_m * lambda_m * 17e-6 * 1e4));
  CHECK(null == doctest::Approx(19.5e9).epsilon(0.005));
  CHECK(fiber_phase(null, p, 1522.0) == doctest::Approx(kPi / 2.0));
  CHECK(fiber_phase(-null, p, 1522.0) == doctest::Approx(kPi / 2.0));
}

TEST_CASE("fiber fading of a detected tone follows |cos(theta)|") {
  FiberParams p;
  p.length_km = 10.0;
  p.attenuation_db_km = 0.0;
  for (std::size_t bin : {64u, 256u, 400u, 499u, 520u}) {
    const OpticalField e = im_field(1e-3, 0.01, bin);
    const double ref = tone_amplitude(square_law(e, 1.0), bin);
    const double got = tone_amplitude(square_law(fiber_propagate(e, p), 1.0), bin);
    const double f = fft_bin_frequency(bin, kN, kFs);
    CHECK(std::abs(got / ref - std::abs(std::cos(fiber_phase(f, p, 1522.0)))) < 2e-3);
  }
}

TEST_CASE("filter and fiber are linear in the field") {
  FilterParams f;
  FiberParams p;
  p.length_km = 7.5;
  const OpticalField a = random_field(3), b = random_field(4);
  OpticalField sum = a;
  const Complex ca(0.3, -1.2), cb(2.0, 0.5);
  for (std::size_t k = 0; k < kN; ++k) sum.samples[k] = ca * a.samples[k] + cb * b.samples[k];
  for (int which = 0; which < 2; ++which) {
    auto op = [&](const OpticalField& x) { return which ? fiber_propagate(x, p) : mux_filter(x, f); };
    const OpticalField ya = op(a), yb = op(b), ys = op(sum);
    double worst = 0.0;
    for (std::size_t k = 0; k < kN; ++k)
      worst = std::max(worst, std::abs(ys.samples[k] - ca * ya.samples[k] - cb * yb.samples[k]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("power setting and budget") {
  OpticalField x = random_field(5);
  CHECK(mean_power_dbm(set_power(x, -6.0)) == doctest::Approx(-6.0));
  CHECK(mean_power_dbm(set_power(x, 3.0)) == doctest::Approx(3.0));
  OpticalField zero = x;
  for (auto& v : zero.samples) v = 0.0;
  CHECK_THROWS_AS(set_power(zero, 0.0), InvalidArgument);

  // 1 dBm launch, 4 dB mux loss, 10 km at 0.2 dB/km
  FilterParams f;
  f.offset_nm = 0.0;
  f.gd_slope_ps_per_ghz = f.gd_curvature_ps_per_ghz2 = 0.0;
  OpticalField cw;
  cw.sample_rate = kFs;
  cw.samples.assign(kN, std::sqrt(dbm_to_watt(1.0)));
  FiberParams p;
  p.length_km = 10.0;
  CHECK(mean_power_dbm(fiber_propagate(mux_filter(cw, f), p)) == doctest::Approx(-5.0));
}

TEST_CASE("bessel receiver filter") {
  CHECK(std::abs(bessel4_response(0.0, 30e9)) == doctest::Approx(1.0));
  CHECK(std::norm(bessel4_response(30e9, 30e9)) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::norm(bessel4_response(60e9, 30e9)) < 0.1);
}

TEST_CASE("photodetection") {
  RxParams rx;
  rx.noise_current_density = 0.0;
  OpticalField cw;
  cw.sample_rate = kFs;
  cw.samples.assign(kN, Complex(0.02, 0.01));
  for (double v : photodetect(cw, rx, 1).samples) CHECK(std::abs(v) < 1e-15);

  // square law: doubling the field quadruples the detected signal
  const OpticalField e = im_field(1e-3, 0.1, 100);
  OpticalField e2 = e;
  for (auto& v : e2.samples) v *= 2.0;
  const double a1 = tone_amplitude(photodetect(e, rx, 1).samples, 100);
  const double a2 = tone_amplitude(photodetect(e2, rx, 1).samples, 100);
  CHECK(a2 / a1 == doctest::Approx(4.0));

  // electrical signal rises 2 dB per dB of optical power
  OpticalField e3 = set_power(e, mean_power_dbm(e) + 1.0);
  const double a3 = tone_amplitude(photodetect(e3, rx, 1).samples, 100);
  CHECK(20.0 * std::log10(a3 / a1) == doctest::Approx(2.0));

  // noise variance after the low pass: sigma^2 times the noise-equivalent bandwidth fraction
  rx.noise_current_density = 30e-12;
  const RealWaveform n = photodetect(cw, rx, 7);
  double var = 0.0;
  for (double v : n.samples) var += v * v;
  var /= static_cast<double>(kN);
  double enbw = 0.0;
  for (std::size_t k = 0; k < kN; ++k) enbw += std::norm(bessel4_response(fft_bin_frequency(k, kN, kFs), 30e9));
  enbw /= static_cast<double>(kN);
  const double sigma2 = std::pow(30e-12, 2) * kFs / 2.0;
  CHECK(var == doctest::Approx(sigma2 * enbw).epsilon(0.1));
  CHECK(photodetect(cw, rx, 7).samples == n.samples);
}

}
