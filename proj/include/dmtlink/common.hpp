#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmtlink {

using Complex = std::complex<double>;
using Bits = std::vector<std::uint8_t>;

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFecBerLimit = 3.8e-3;

// Error hierarchy. Every failure the link can produce is one of these.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  ConfigError(std::string key_path, const std::string& what)
      : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(std::move(key_path)) {}
  const std::string& key_path() const noexcept { return key_path_; }

private:
  std::string key_path_;
};

class InfeasibleLoading : public Error {
public:
  InfeasibleLoading(int requested_bits, int max_achievable_bits)
      : Error("infeasible loading: requested " + std::to_string(requested_bits) +
              " bits/symbol, at most " + std::to_string(max_achievable_bits) + " achievable"),
        requested_(requested_bits), max_achievable_(max_achievable_bits) {}
  int requested_bits() const noexcept { return requested_; }
  int max_achievable_bits() const noexcept { return max_achievable_; }

private:
  int requested_;
  int max_achievable_;
};

class SyncFailure : public Error {
public:
  explicit SyncFailure(double peak)
      : Error("synchronization failed: correlation peak " + std::to_string(peak) +
              " below threshold"),
        peak_(peak) {}
  double peak() const noexcept { return peak_; }

private:
  double peak_;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

// Wavelength span at a given carrier to an optical frequency span: df = c*dl/l^2.
inline double nm_span_to_hz(double span_nm, double lambda_nm) {
  const double lambda_m = lambda_nm * 1e-9;
  return kSpeedOfLight * span_nm * 1e-9 / (lambda_m * lambda_m);
}

} // namespace dmtlink
