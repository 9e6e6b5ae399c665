#include "dmtlink/loading.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace dmtlink {
namespace {

// Subcarriers below this SNR are treated as carrying nothing.
constexpr double kUsableSnr = 1e-6;

} // namespace

int RateTarget::bits_per_symbol(const DmtConfig& config) const {
  const double exact = gross_rate * config.symbol_len() / config.sample_rate;
  return std::max(1, static_cast<int>(std::ceil(exact - 1e-9)));
}

SnrProfile estimate_snr(const FrequencyFrame& tx_frame, const Grid& equalized,
                        const DmtConfig& config) {
  const int cols = config.n_active();
  if (equalized.rows != config.n_data || equalized.cols != cols)
    throw InvalidArgument("estimate_snr: equalized grid must be n_data x n_active");
  SnrProfile profile;
  profile.n_symbols_used = config.n_data;
  profile.snr_linear.resize(static_cast<std::size_t>(cols));
  for (int n = 0; n < cols; ++n) {
    double sig = 0.0, err = 0.0;
    for (int s = 0; s < config.n_data; ++s) {
      const Complex x = tx_frame.symbols.at(config.n_ts + s, n);
      sig += std::norm(x);
      err += std::norm(equalized.at(s, n) - x);
    }
    double snr;
    if (sig == 0.0)
      snr = 0.0;
    else if (err == 0.0)
      snr = kSnrCap;
    else
      snr = std::min(kSnrCap, sig / err);
    profile.snr_linear[n] = snr;
  }
  return profile;
}

ChowResult chow_load_detailed(const SnrProfile& snr, int target_bits, const ChowOptions& options) {
  if (options.max_bits < 1 || options.max_bits > 6)
    throw InvalidArgument("chow_load: max_bits must be in 1..6");
  if (options.max_iter < 1) throw InvalidArgument("chow_load: max_iter must be >= 1");
  if (target_bits < 0) throw InvalidArgument("chow_load: negative target");

  const auto& g = snr.snr_linear;
  const std::size_t n = g.size();
  int usable = 0;
  for (double v : g) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("chow_load: SNR must be finite and >= 0");
    usable += (v > kUsableSnr);
  }
  const int max_total = usable * options.max_bits;
  if (target_bits > max_total) throw InfeasibleLoading(target_bits, max_total);

  const double gap = db_to_linear(options.gap_db);
  ChowResult result;
  result.bhat.assign(n, 0.0);
  result.rounded_bits.assign(n, 0);
  std::vector<double> diff(n, 0.0);
  double margin_db = 0.0;
  int total = 0;
  int iter = 0;
  for (iter = 1; iter <= options.max_iter; ++iter) {
    const double margin = db_to_linear(margin_db);
    total = 0;
    int on = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ideal = std::log2(1.0 + g[i] / (gap * margin));
      const double bhat = std::clamp(ideal, 0.0, static_cast<double>(options.max_bits));
      const int b = static_cast<int>(std::floor(bhat + 0.5));
      result.bhat[i] = bhat;
      result.rounded_bits[i] = b;
      diff[i] = bhat - b;
      total += b;
      on += (b > 0);
    }
    if (total == target_bits) {
      result.converged = true;
      break;
    }
    if (iter == options.max_iter) break;
    margin_db += 10.0 * std::log10(2.0) * (total - target_bits) / std::max(on, 1);
  }

  std::vector<int> bits = result.rounded_bits;
  // Force the exact target one bit at a time.
  while (total > target_bits) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i)
      if (bits[i] > 0 && (pick == n || diff[i] < diff[pick])) pick = i;
    --bits[pick];
    diff[pick] += 1.0;
    --total;
  }
  while (total < target_bits) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i)
      if (bits[i] < options.max_bits && g[i] > kUsableSnr && (pick == n || diff[i] > diff[pick]))
        pick = i;
    ++bits[pick];
    diff[pick] -= 1.0;
    ++total;
  }

  LoadingPlan plan;
  plan.bits = std::move(bits);
  plan.gap_db = options.gap_db;
  plan.margin_db = margin_db;
  plan.iterations = std::min(iter, options.max_iter);
  result.plan = power_load(plan, snr, options.gap_db);
  return result;
}

LoadingPlan chow_load(const SnrProfile& snr, int target_bits, const ChowOptions& options) {
  return chow_load_detailed(snr, target_bits, options).plan;
}

LoadingPlan power_load(const LoadingPlan& plan, const SnrProfile& snr, double gap_db) {
  if (plan.bits.size() != snr.snr_linear.size())
    throw InvalidArgument("power_load: plan and SNR profile lengths differ");
  const double gap = db_to_linear(gap_db);
  LoadingPlan out = plan;
  out.power.assign(plan.bits.size(), 0.0);
  double sum = 0.0;
  int on = 0;
  for (std::size_t i = 0; i < plan.bits.size(); ++i) {
    if (plan.bits[i] == 0) continue;
    const double s = snr.snr_linear[i];
    if (!(s > 0.0)) throw InvalidArgument("power_load: loaded subcarrier has zero SNR");
    out.power[i] = (std::ldexp(1.0, plan.bits[i]) - 1.0) * gap / s;
    sum += out.power[i];
    ++on;
  }
  if (on > 0)
    for (double& p : out.power) p *= on / sum;
  return out;
}

double achieved_rate(const LoadingPlan& plan, const DmtConfig& config) {
  return plan.total_bits() * config.sample_rate / config.symbol_len();
}

double net_rate(const LoadingPlan& plan, const DmtConfig& config) {
  return achieved_rate(plan, config) * config.n_data / config.n_symbols();
}

void write_loading_csv(std::ostream& os, const DmtConfig& config, const SnrProfile& snr,
                       const LoadingPlan& plan) {
  os << "subcarrier,snr_db,bits,power\n";
  char buf[128];
  for (std::size_t i = 0; i < snr.snr_linear.size(); ++i) {
    const int bits = i < plan.bits.size() ? plan.bits[i] : 0;
    const double power = i < plan.power.size() ? plan.power[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%d,%.6g,%d,%.6g\n", config.band_first + static_cast<int>(i),
                  linear_to_db(snr.snr_linear[i]), bits, power);
    os << buf;
  }
}

LoadingTable read_loading_csv(std::istream& is) {
  LoadingTable table;
  std::string line;
  if (!std::getline(is, line) || line != "subcarrier,snr_db,bits,power")
    throw InvalidArgument("loading CSV: unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[4];
    for (auto& field : f)
      if (!std::getline(ls, field, ',')) throw InvalidArgument("loading CSV: short row: " + line);
    table.subcarrier.push_back(std::stoi(f[0]));
    table.snr.snr_linear.push_back(db_to_linear(std::stod(f[1])));
    table.plan.bits.push_back(std::stoi(f[2]));
    table.plan.power.push_back(std::stod(f[3]));
  }
  return table;
}

} // namespace dmtlink
