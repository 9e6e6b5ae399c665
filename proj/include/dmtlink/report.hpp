#pragma once

#include "dmtlink/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace dmtlink {

inline constexpr const char* kResultCsvHeader =
    "rate_gbps,reach_km,filter_on,offset_nm,ber,pass_fec,achieved_rate_gbps,mean_snr_db,seed";

// One CSV line (no newline); floats with 6 significant digits. A failed
// point carries its failure kind in the ber column.
std::string format_row(const ResultRow& row);
ResultRow parse_row(const std::string& line);

void write_csv_header(std::ostream& os);
void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(std::istream& is);

// BER versus reach, one trace per (rate, filter state), log axis with the
// FEC limit drawn as a dashed line.
void emit_plot(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

struct SnrTrace {
  std::string label;
  SnrProfile snr;
};
// Estimated SNR (dB) against subcarrier frequency.
void emit_snr_plot(const std::vector<SnrTrace>& traces, const DmtConfig& config,
                   const std::filesystem::path& path);

void write_spectrum_csv(const SpectrumTable& table, std::ostream& os);

// Per-point diagnostics as a JSON object; snr_db and evm_db are per active
// subcarrier.
std::string metrics_json(const LinkMetrics& m, int indent = 2);

} // namespace dmtlink
