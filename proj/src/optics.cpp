#include "dmtlink/optics.hpp"

#include "dmtlink/fft.hpp"
#include "dmtlink/kernels.hpp"
#include "dmtlink/random.hpp"

#include <algorithm>
#include <cmath>

namespace dmtlink {
namespace {

constexpr double kMinPowerW = 1e-6;

double lambda_sq_over_c(double lambda_nm) {
  const double l = lambda_nm * 1e-9;
  return l * l / kSpeedOfLight;
}

// Bessel polynomial of order 4 with unit group delay at DC.
Complex bessel4_poly(Complex s) {
  return (((s + 10.0) * s + 45.0) * s + 105.0) * s + 105.0;
}

double bessel4_unit_3db() {
  static const double w = [] {
    double lo = 0.1, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double g = std::norm(105.0 / bessel4_poly({0.0, mid}));
      (g > 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return w;
}

} // namespace

void VcselParams::validate() const {
  if (!(bias_ma > i_th_ma)) throw InvalidArgument("vcsel: bias_ma must exceed i_th_ma");
  if (!(slope_w_per_a > 0.0)) throw InvalidArgument("vcsel: slope_w_per_a must be positive");
  if (!(f_r_hz > 0.0)) throw InvalidArgument("vcsel: f_r_hz must be positive");
  if (!(damping > 0.0)) throw InvalidArgument("vcsel: damping must be positive");
  if (!(lambda_nm > 0.0)) throw InvalidArgument("vcsel: lambda_nm must be positive");
  if (!(drive_rms_ma >= 0.0)) throw InvalidArgument("vcsel: drive_rms_ma must be >= 0");
  if (!std::isfinite(alpha) || !std::isfinite(kappa_hz_per_w) || !std::isfinite(p_out_dbm))
    throw InvalidArgument("vcsel: alpha, kappa and p_out must be finite");
}

void FilterParams::validate() const {
  if (!(bw_nm > 0.0)) throw InvalidArgument("filter: bw_nm must be positive");
  if (shape_order < 1) throw InvalidArgument("filter: shape_order must be >= 1");
  if (!std::isfinite(il_db) || !std::isfinite(offset_nm) || !std::isfinite(gd_slope_ps_per_ghz) ||
      !std::isfinite(gd_curvature_ps_per_ghz2))
    throw InvalidArgument("filter: parameters must be finite");
}

void FiberParams::validate() const {
  if (!(length_km >= 0.0)) throw InvalidArgument("fiber: length_km must be >= 0");
  if (!std::isfinite(d_ps_nm_km) || !(attenuation_db_km >= 0.0))
    throw InvalidArgument("fiber: invalid dispersion or attenuation");
}

void RxParams::validate() const {
  if (!(responsivity_a_per_w > 0.0)) throw InvalidArgument("rx: responsivity must be positive");
  if (!(elec_bw_hz > 0.0)) throw InvalidArgument("rx: elec_bw_hz must be positive");
  if (!(noise_current_density >= 0.0)) throw InvalidArgument("rx: noise density must be >= 0");
  if (!std::isfinite(input_power_dbm)) throw InvalidArgument("rx: input_power_dbm must be finite");
}

void set_inband_dispersion_ps_per_nm(FilterParams& f, double low_edge, double high_edge,
                                     double lambda_nm) {
  // dtau/df = -D * lambda^2 / c with D in s/m; linear in d across the passband.
  const double k = lambda_sq_over_c(lambda_nm);
  const double bw = filter_bandwidth_hz(f, lambda_nm);
  const double lo = low_edge * 1e-3, hi = high_edge * 1e-3;
  const double a = -k * (lo + hi) / 2.0;
  const double b = -k * (hi - lo) / (2.0 * bw);
  f.gd_slope_ps_per_ghz = a * 1e21;
  f.gd_curvature_ps_per_ghz2 = b * 1e30;
}

void set_inband_delay_ps(FilterParams& f, double low_edge, double high_edge, double lambda_nm) {
  const double bw = filter_bandwidth_hz(f, lambda_nm);
  const double lo = low_edge * 1e-12, hi = high_edge * 1e-12;
  const double a = (hi - lo) / bw;
  const double b = 2.0 * (lo + hi) / (bw * bw);
  f.gd_slope_ps_per_ghz = a * 1e21;
  f.gd_curvature_ps_per_ghz2 = b * 1e30;
}

double inband_dispersion_ps_per_nm(const FilterParams& f, double d_hz, double lambda_nm) {
  const double dtau_df = f.gd_slope_ps_per_ghz * 1e-21 + 2.0 * f.gd_curvature_ps_per_ghz2 * 1e-30 * d_hz;
  return -dtau_df / lambda_sq_over_c(lambda_nm) * 1e3;
}

Complex vcsel_response(double f_hz, const VcselParams& p) {
  const double fr2 = p.f_r_hz * p.f_r_hz;
  return fr2 / Complex(fr2 - f_hz * f_hz, 2.0 * p.damping * p.f_r_hz * f_hz);
}

double vcsel_bandwidth_3db(const VcselParams& p) {
  // |H| may peak above 1 before rolling off; search beyond the peak.
  double lo = 0.0, hi = 100.0 * p.f_r_hz;
  double peak_f = 0.0, peak = 1.0;
  for (int i = 1; i <= 2000; ++i) {
    const double f = p.f_r_hz * 3.0 * i / 2000.0;
    const double g = std::norm(vcsel_response(f, p));
    if (g > peak) {
      peak = g;
      peak_f = f;
    }
  }
  lo = peak_f;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::norm(vcsel_response(mid, p)) > 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

VcselOutput vcsel_modulate(const RealWaveform& drive_ma, const VcselParams& p) {
  p.validate();
  const std::size_t n = drive_ma.samples.size();
  const double fs = drive_ma.sample_rate;
  VcselOutput out;
  out.field.sample_rate = fs;
  out.field.lambda_nm = p.lambda_nm;
  if (n == 0) return out;

  std::vector<Complex> ac(n);
  for (std::size_t k = 0; k < n; ++k) {
    double i = p.bias_ma + drive_ma.samples[k];
    if (i < p.i_th_ma) {
      i = p.i_th_ma;
      ++out.samples_below_threshold;
    }
    ac[k] = i - p.bias_ma;
  }
  apply_frequency_response(ac, fs, [&](double f) { return vcsel_response(f, p); });

  std::vector<double> power(n);
  bool floored = false;
  for (std::size_t k = 0; k < n; ++k) {
    double w = p.slope_w_per_a * 1e-3 * (p.bias_ma + ac[k].real() - p.i_th_ma);
    if (w < kMinPowerW) {
      w = kMinPowerW;
      floored = true;
    }
    power[k] = w;
  }
  out.clipped_at_threshold = floored || out.samples_below_threshold > 0;

  // dphi/dt = (alpha/2) (d ln P/dt + kappa P), trapezoidal in time; the
  // transient term integrates exactly for piecewise-linear ln P.
  const double dt = 1.0 / fs;
  const double half_alpha = 0.5 * p.alpha;
  const double ln_p0 = std::log(power[0]);
  double adiabatic = 0.0;
  double mean_p = 0.0;
  out.field.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) adiabatic += 0.5 * (power[k] + power[k - 1]) * dt;
    const double phi = half_alpha * (std::log(power[k]) - ln_p0 + p.kappa_hz_per_w * adiabatic);
    out.field.samples[k] = std::polar(std::sqrt(power[k]), phi);
    mean_p += power[k];
  }
  mean_p /= static_cast<double>(n);
  out.field.carrier_offset_hz = p.alpha * p.kappa_hz_per_w * mean_p / (4.0 * kPi);
  return out;
}

OpticalField recenter(const OpticalField& field) {
  OpticalField out = field;
  const double w = -2.0 * kPi * field.carrier_offset_hz / field.sample_rate;
  for (std::size_t k = 0; k < out.samples.size(); ++k)
    out.samples[k] *= std::polar(1.0, w * static_cast<double>(k));
  out.carrier_offset_hz = 0.0;
  return out;
}

double filter_bandwidth_hz(const FilterParams& f, double lambda_nm) {
  return nm_span_to_hz(f.bw_nm, lambda_nm);
}

double filter_offset_hz(const FilterParams& f, double lambda_nm) {
  return nm_span_to_hz(f.offset_nm, lambda_nm);
}

Complex mux_response(double f_hz, const FilterParams& f, double lambda_nm) {
  const double d = f_hz - filter_offset_hz(f, lambda_nm);
  const double x = 2.0 * d / filter_bandwidth_hz(f, lambda_nm);
  const double amp = std::pow(10.0, -f.il_db / 20.0) *
                     std::exp(-0.5 * std::log(2.0) * std::pow(x * x, f.shape_order));
  const double a = f.gd_slope_ps_per_ghz * 1e-21;
  const double b = f.gd_curvature_ps_per_ghz2 * 1e-30;
  const double theta = -2.0 * kPi * (a * d * d / 2.0 + b * d * d * d / 3.0);
  return std::polar(amp, theta);
}

OpticalField mux_filter(const OpticalField& field, const FilterParams& f) {
  if (!f.enabled) return field;
  f.validate();
  OpticalField out = field;
  apply_frequency_response(out.samples, field.sample_rate, [&](double fb) {
    return mux_response(fb - field.carrier_offset_hz, f, field.lambda_nm);
  });
  return out;
}

double fiber_phase(double f_hz, const FiberParams& p, double lambda_nm) {
  const double d_si = p.d_ps_nm_km * 1e-6; // s/m^2
  return kPi * lambda_sq_over_c(lambda_nm) * d_si * p.length_km * 1e3 * f_hz * f_hz;
}

OpticalField fiber_propagate(const OpticalField& field, const FiberParams& p) {
  p.validate();
  OpticalField out = field;
  if (p.length_km == 0.0) return out;
  apply_frequency_response(out.samples, field.sample_rate, [&](double fb) {
    return std::polar(1.0, fiber_phase(fb, p, field.lambda_nm));
  });
  const double gain = std::pow(10.0, -p.attenuation_db_km * p.length_km / 20.0);
  for (Complex& v : out.samples) v *= gain;
  return out;
}

double mean_power_w(const OpticalField& field) {
  if (field.samples.empty()) return 0.0;
  double acc = 0.0;
  for (const Complex& v : field.samples) acc += std::norm(v);
  return acc / static_cast<double>(field.samples.size());
}

double mean_power_dbm(const OpticalField& field) { return watt_to_dbm(mean_power_w(field)); }

OpticalField set_power(const OpticalField& field, double target_dbm) {
  const double p = mean_power_w(field);
  if (!(p > 0.0)) throw InvalidArgument("set_power: field is all zero");
  OpticalField out = field;
  const double g = std::sqrt(dbm_to_watt(target_dbm) / p);
  for (Complex& v : out.samples) v *= g;
  return out;
}

Complex bessel4_response(double f_hz, double f3db_hz) {
  const Complex s(0.0, bessel4_unit_3db() * f_hz / f3db_hz);
  return 105.0 / bessel4_poly(s);
}

std::vector<double> square_law(const OpticalField& field, double responsivity_a_per_w) {
  std::vector<double> current(field.samples.size());
  kernels::abs2_scaled(field.samples, current, responsivity_a_per_w);
  return current;
}

RealWaveform photodetect(const OpticalField& field, const RxParams& rx, std::uint64_t seed) {
  rx.validate();
  const std::size_t n = field.samples.size();
  const std::vector<double> current = square_law(field, rx.responsivity_a_per_w);

  std::vector<Complex> block(n);
  const double sigma = rx.noise_current_density * std::sqrt(field.sample_rate / 2.0);
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k)
    block[k] = sigma > 0.0 ? current[k] + sigma * rng.gaussian() : current[k];
  apply_frequency_response(block, field.sample_rate,
                           [&](double f) { return bessel4_response(f, rx.elec_bw_hz); });

  RealWaveform out;
  out.sample_rate = field.sample_rate;
  out.samples.resize(n);
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += block[k].real();
  mean /= n > 0 ? static_cast<double>(n) : 1.0;
  for (std::size_t k = 0; k < n; ++k) out.samples[k] = block[k].real() - mean;
  return out;
}

} // namespace dmtlink
