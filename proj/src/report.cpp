#include "dmtlink/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dmtlink {
namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Frame {
  double x0 = 70, y0 = 30, w = 560, h = 360;
  double xmin, xmax, ymin, ymax;
  bool logy = false;
  double x(double v) const { return x0 + (v - xmin) / (xmax - xmin) * w; }
  double y(double v) const {
    if (logy) v = std::log10(std::max(v, std::pow(10.0, ymin)));
    v = std::clamp(v, ymin, ymax);
    return y0 + h - (v - ymin) / (ymax - ymin) * h;
  }
};

void svg_axes(std::ostream& os, const Frame& f, const std::string& xlabel, const std::string& ylabel,
              const std::vector<double>& xticks, const std::vector<double>& yticks) {
  os << "<rect x='" << f.x0 << "' y='" << f.y0 << "' width='" << f.w << "' height='" << f.h
     << "' fill='none' stroke='black'/>\n";
  for (double t : xticks)
    os << "<text x='" << f.x(t) << "' y='" << f.y0 + f.h + 18 << "' font-size='12' text-anchor='middle'>"
       << fmt6(t) << "</text>\n";
  for (double t : yticks) {
    const double yy = f.logy ? f.y(std::pow(10.0, t)) : f.y(t);
    const std::string label = f.logy ? "1e" + fmt6(t) : fmt6(t);
    os << "<line x1='" << f.x0 << "' x2='" << f.x0 + f.w << "' y1='" << yy << "' y2='" << yy
       << "' stroke='#ddd'/>\n<text x='" << f.x0 - 6 << "' y='" << yy + 4
       << "' font-size='12' text-anchor='end'>" << label << "</text>\n";
  }
  os << "<text x='" << f.x0 + f.w / 2 << "' y='" << f.y0 + f.h + 38
     << "' font-size='14' text-anchor='middle'>" << xlabel << "</text>\n";
  os << "<text transform='translate(18," << f.y0 + f.h / 2
     << ") rotate(-90)' font-size='14' text-anchor='middle'>" << ylabel << "</text>\n";
}

} // namespace

std::string format_row(const ResultRow& r) {
  std::string s = fmt6(r.rate_gbps) + "," + fmt6(r.reach_km) + "," + (r.filter_on ? "true" : "false") +
                  "," + fmt6(r.offset_nm) + ",";
  s += r.ber ? fmt6(*r.ber) : r.failure;
  s += std::string(",") + (r.pass_fec ? "true" : "false") + "," + fmt6(r.achieved_rate_gbps) + "," +
       fmt6(r.mean_snr_db) + "," + std::to_string(r.seed);
  return s;
}

ResultRow parse_row(const std::string& line) {
  std::vector<std::string> f;
  std::istringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) f.push_back(field);
  if (f.size() != 9) throw InvalidArgument("result CSV: expected 9 fields in: " + line);
  auto parse_bool = [&](const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw InvalidArgument("result CSV: bad boolean '" + v + "'");
  };
  ResultRow r;
  try {
    r.rate_gbps = std::stod(f[0]);
    r.reach_km = std::stod(f[1]);
    r.filter_on = parse_bool(f[2]);
    r.offset_nm = std::stod(f[3]);
    if (f[4] == "infeasible" || f[4] == "sync_failure")
      r.failure = f[4];
    else
      r.ber = std::stod(f[4]);
    r.pass_fec = parse_bool(f[5]);
    r.achieved_rate_gbps = std::stod(f[6]);
    r.mean_snr_db = std::stod(f[7]);
    r.seed = std::stoull(f[8]);
  } catch (const std::logic_error& e) {
    throw InvalidArgument("result CSV: cannot parse '" + line + "': " + e.what());
  }
  return r;
}

void write_csv_header(std::ostream& os) { os << kResultCsvHeader << '\n'; }

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  write_csv_header(os);
  for (const ResultRow& r : rows) os << format_row(r) << '\n';
}

void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  write_csv(rows, out);
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kResultCsvHeader)
    throw InvalidArgument("result CSV: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(parse_row(line));
  return rows;
}

void emit_plot(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::map<std::pair<bool, double>, std::vector<const ResultRow*>> traces;
  double xmax = 1.0;
  for (const ResultRow& r : rows) {
    traces[{r.filter_on, r.rate_gbps}].push_back(&r);
    xmax = std::max(xmax, r.reach_km);
  }
  Frame f;
  f.xmin = 0.0;
  f.xmax = xmax;
  f.ymin = -6.0;
  f.ymax = 0.0;
  f.logy = true;
  std::ofstream os = open_out(path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='820' height='450' font-family='sans-serif'>\n";
  std::vector<double> xt;
  for (int i = 0; i <= 6; ++i) xt.push_back(xmax * i / 6.0);
  svg_axes(os, f, "reach (km)", "BER", xt, {-6, -5, -4, -3, -2, -1, 0});
  os << "<line x1='" << f.x0 << "' x2='" << f.x0 + f.w << "' y1='" << f.y(kFecBerLimit) << "' y2='"
     << f.y(kFecBerLimit) << "' stroke='black' stroke-dasharray='6,4'/>\n";
  int idx = 0;
  for (auto& [key, pts] : traces) {
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->reach_km < b->reach_km; });
    const char* color = kPalette[idx % 8];
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='2'"
       << (key.first ? "" : " stroke-dasharray='3,3'") << " points='";
    for (const ResultRow* r : pts)
      if (r->ber) os << f.x(r->reach_km) << "," << f.y(std::max(*r->ber, 1e-6)) << " ";
    os << "'/>\n";
    for (const ResultRow* r : pts)
      if (r->ber)
        os << "<circle cx='" << f.x(r->reach_km) << "' cy='" << f.y(std::max(*r->ber, 1e-6))
           << "' r='3.5' fill='" << (key.first ? color : "white") << "' stroke='" << color << "'/>\n";
    os << "<text x='" << f.x0 + f.w + 12 << "' y='" << f.y0 + 16 + 18 * idx << "' font-size='12' fill='"
       << color << "'>" << fmt6(key.second) << " Gb/s, filter " << (key.first ? "on" : "off")
       << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
}

void emit_snr_plot(const std::vector<SnrTrace>& traces, const DmtConfig& config,
                   const std::filesystem::path& path) {
  Frame f;
  f.xmin = 0.0;
  f.xmax = config.sample_rate / 2e9;
  f.ymin = -10.0;
  f.ymax = 30.0;
  std::ofstream os = open_out(path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='820' height='450' font-family='sans-serif'>\n";
  std::vector<double> xt;
  for (int i = 0; i <= 8; ++i) xt.push_back(f.xmax * i / 8.0);
  svg_axes(os, f, "subcarrier frequency (GHz)", "estimated SNR (dB)", xt, {-10, 0, 10, 20, 30});
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const char* color = kPalette[t % 8];
    os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    const auto& snr = traces[t].snr.snr_linear;
    for (std::size_t c = 0; c < snr.size(); ++c)
      os << f.x(config.subcarrier_frequency(static_cast<int>(c)) / 1e9) << ","
         << f.y(linear_to_db(std::max(snr[c], 1e-3))) << " ";
    os << "'/>\n<text x='" << f.x0 + f.w + 12 << "' y='" << f.y0 + 16 + 18 * t
       << "' font-size='12' fill='" << color << "'>" << traces[t].label << "</text>\n";
  }
  os << "</svg>\n";
}

void write_spectrum_csv(const SpectrumTable& t, std::ostream& os) {
  os << "freq_ghz,psd_db,filter_db\n";
  char buf[128];
  for (std::size_t i = 0; i < t.freq_hz.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g\n", t.freq_hz[i] / 1e9, t.psd_db[i], t.filter_db[i]);
    os << buf;
  }
}

std::string metrics_json(const LinkMetrics& m, int indent) {
  nlohmann::ordered_json j;
  j["ber"] = m.ber;
  j["bit_errors"] = m.bit_errors;
  j["bits_counted"] = m.bits_counted;
  j["pass_fec"] = m.pass_fec;
  j["achieved_rate_gbps"] = m.achieved_rate / 1e9;
  j["mean_snr_db"] = mean_snr_db(m.snr_profile);
  j["sync_offset"] = m.sync_offset;
  j["sync_peak"] = m.sync_peak;
  j["dead_subcarriers"] = m.dead_subcarriers;
  j["laser_clipped"] = m.laser_clipped;
  std::vector<double> snr_db;
  snr_db.reserve(m.snr_profile.snr_linear.size());
  for (double v : m.snr_profile.snr_linear) snr_db.push_back(10.0 * std::log10(std::max(v, 1e-30)));
  j["snr_db"] = snr_db;
  j["evm_db"] = m.evm_db;
  j["bits"] = m.plan.bits;
  j["power"] = m.plan.power;
  j["margin_db"] = m.plan.margin_db;
  return j.dump(indent);
}

} // namespace dmtlink
