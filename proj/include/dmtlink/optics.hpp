#pragma once

#include "dmtlink/types.hpp"

namespace dmtlink {

// Behavioural directly modulated VCSEL.
struct VcselParams {
  double bias_ma = 11.0;
  double i_th_ma = 2.0;
  double slope_w_per_a = 0.14;
  double f_r_hz = 14.1507e9; // with damping 0.5 the 3-dB bandwidth is 18 GHz
  double damping = 0.5;      // zeta in f_r^2 / (f_r^2 - f^2 + j 2 zeta f_r f)
  double alpha = 3.0;        // linewidth-enhancement factor
  double kappa_hz_per_w = 1e13;
  double p_out_dbm = 1.0;
  double lambda_nm = 1522.0;
  double drive_rms_ma = 2.8; // RMS of the AC modulation current (calibrated)

  void validate() const;
};

struct FilterParams {
  bool enabled = true;
  double bw_nm = 0.3;
  double il_db = 4.0;
  double offset_nm = 0.07; // passband centre minus carrier, positive toward higher optical frequency
  int shape_order = 2;
  // Group delay tau(d) = slope * d + curvature * d^2, d = f - passband centre.
  double gd_slope_ps_per_ghz = 0.270;
  double gd_curvature_ps_per_ghz2 = -0.00498;

  void validate() const;
};

// In-band group-delay polynomial from the dispersion (ps/nm) seen at the
// lower and upper 3-dB edges of the passband.
void set_inband_dispersion_ps_per_nm(FilterParams& f, double low_edge, double high_edge,
                                     double lambda_nm);
// Alternative reading: group delay (ps) at the lower and upper 3-dB edges
// relative to the passband centre.
void set_inband_delay_ps(FilterParams& f, double low_edge, double high_edge, double lambda_nm);
// Dispersion in ps/nm at offset d_hz from the passband centre.
double inband_dispersion_ps_per_nm(const FilterParams& f, double d_hz, double lambda_nm);

struct FiberParams {
  double length_km = 0.0;
  double d_ps_nm_km = 17.0;
  double attenuation_db_km = 0.2;

  void validate() const;
};

struct RxParams {
  double responsivity_a_per_w = 0.7;
  double elec_bw_hz = 30e9;
  double noise_current_density = 30e-12; // A/sqrt(Hz), input referred (calibrated)
  double input_power_dbm = -6.0;

  void validate() const;
};

// Complex baseband field envelope in sqrt(W). carrier_offset_hz is the mean
// optical frequency of the emission relative to the baseband origin.
struct OpticalField {
  std::vector<Complex> samples;
  double sample_rate = 0.0;
  double lambda_nm = 1550.0;
  double carrier_offset_hz = 0.0;
};

struct VcselOutput {
  OpticalField field;
  std::size_t samples_below_threshold = 0;
  bool clipped_at_threshold = false;
};

Complex vcsel_response(double f_hz, const VcselParams& p);
double vcsel_bandwidth_3db(const VcselParams& p);

// drive is the AC modulation current in mA.
VcselOutput vcsel_modulate(const RealWaveform& drive_ma, const VcselParams& p);

// Removes the carrier offset so the carrier sits at baseband 0 Hz.
OpticalField recenter(const OpticalField& field);

double filter_bandwidth_hz(const FilterParams& f, double lambda_nm);
double filter_offset_hz(const FilterParams& f, double lambda_nm);
// Transfer function at frequency f_hz relative to the carrier.
Complex mux_response(double f_hz, const FilterParams& f, double lambda_nm);
OpticalField mux_filter(const OpticalField& field, const FilterParams& f);

// Phase at baseband frequency f: pi * lambda^2 * D * L * f^2 / c.
double fiber_phase(double f_hz, const FiberParams& p, double lambda_nm);
OpticalField fiber_propagate(const OpticalField& field, const FiberParams& p);

double mean_power_w(const OpticalField& field);
double mean_power_dbm(const OpticalField& field);
OpticalField set_power(const OpticalField& field, double target_dbm);

// Normalized 4th-order Bessel low pass with its 3-dB point at f3db_hz.
Complex bessel4_response(double f_hz, double f3db_hz);

// Photocurrent R*|E|^2 in A, before noise and filtering.
std::vector<double> square_law(const OpticalField& field, double responsivity_a_per_w);

// Square law, additive receiver noise (seeded), Bessel low pass and DC removal.
RealWaveform photodetect(const OpticalField& field, const RxParams& rx, std::uint64_t seed);

} // namespace dmtlink
