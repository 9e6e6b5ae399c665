#pragma once

#include "dmtlink/types.hpp"

#include <iosfwd>

namespace dmtlink {

inline constexpr double kSnrCap = 1e12;
inline constexpr double kDefaultGapDb = 6.0;

struct RateTarget {
  double gross_rate = 56e9; // bits/s

  // B = ceil(rate * (n_fft + cp) / sample_rate), at least 1.
  int bits_per_symbol(const DmtConfig& config) const;
};

// Data-aided SNR per active subcarrier over the data rows:
// E|X|^2 / E|Y - X|^2, capped at kSnrCap when the error power is zero.
// `equalized` holds n_data rows of equalized receive symbols.
SnrProfile estimate_snr(const FrequencyFrame& tx_frame, const Grid& equalized,
                        const DmtConfig& config);

struct ChowOptions {
  double gap_db = kDefaultGapDb;
  int max_bits = 6;
  int max_iter = 10;
};

struct ChowResult {
  LoadingPlan plan;
  // State after the margin iteration, before bits are forced onto the target.
  std::vector<double> bhat;
  std::vector<int> rounded_bits;
  bool converged = false;
};

// Chow's margin-adaptive loading followed by equal-margin power allocation.
// Throws InfeasibleLoading when the target exceeds max_bits on every usable
// subcarrier.
ChowResult chow_load_detailed(const SnrProfile& snr, int target_bits, const ChowOptions& options = {});
LoadingPlan chow_load(const SnrProfile& snr, int target_bits, const ChowOptions& options = {});

// p_n proportional to (2^b_n - 1) * gap / SNR_n on loaded subcarriers,
// normalized so the loaded powers sum to the loaded count.
LoadingPlan power_load(const LoadingPlan& plan, const SnrProfile& snr, double gap_db);

// Gross line rate over data symbols: sum(b) * sample_rate / (n_fft + cp).
double achieved_rate(const LoadingPlan& plan, const DmtConfig& config);
// Same, discounted by the training-symbol share of the frame.
double net_rate(const LoadingPlan& plan, const DmtConfig& config);

// CSV with header `subcarrier,snr_db,bits,power`, one row per active subcarrier.
void write_loading_csv(std::ostream& os, const DmtConfig& config, const SnrProfile& snr,
                       const LoadingPlan& plan);
struct LoadingTable {
  std::vector<int> subcarrier;
  SnrProfile snr;
  LoadingPlan plan;
};
LoadingTable read_loading_csv(std::istream& is);

} // namespace dmtlink
