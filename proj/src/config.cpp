#include "dmtlink/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dmtlink {
namespace {

using nlohmann::json;

// Reads typed keys out of one JSON object and rejects whatever is left over.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError(key_path(key), "expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!it->is_number()) throw ConfigError(key_path(key), "expected a number");
        if constexpr (std::is_integral_v<T>)
          if (!it->is_number_integer() && !it->is_number_unsigned())
            throw ConfigError(key_path(key), "expected an integer");
      }
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(key_path(key), e.what());
    }
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
void check(const std::string& path, Fn&& validate) {
  try {
    validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
}

void parse_cp_fraction(const json& v, DmtConfig& d, const std::string& path) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) throw std::invalid_argument("no slash");
      d.cp_num = std::stoi(s.substr(0, slash));
      d.cp_den = std::stoi(s.substr(slash + 1));
    } catch (const std::exception&) {
      throw ConfigError(path, "expected a fraction like \"1/64\"");
    }
  } else if (v.is_number()) {
    const double frac = v.get<double>();
    const double cp = frac * d.n_fft;
    if (!(cp > 0.0) || std::abs(cp - std::round(cp)) > 1e-9)
      throw ConfigError(path, "n_fft * cp_fraction must be a positive integer");
    d.cp_num = static_cast<int>(std::round(cp));
    d.cp_den = d.n_fft;
  } else {
    throw ConfigError(path, "expected a number or a fraction string");
  }
}

void parse_dmt(const json& j, DmtConfig& d) {
  Section s(j, "dmt");
  s.get("n_fft", d.n_fft);
  s.get("n_ts", d.n_ts);
  s.get("n_data", d.n_data);
  s.get("sample_rate", d.sample_rate);
  if (const json* v = s.raw("clip_ratio_db")) {
    if (v->is_string() && v->get<std::string>() == "off")
      d.clip_ratio_db = std::numeric_limits<double>::infinity();
    else if (v->is_number())
      d.clip_ratio_db = v->get<double>();
    else
      throw ConfigError(s.key_path("clip_ratio_db"), "expected a number or \"off\"");
  }
  s.get("dac_bits", d.dac_bits);
  s.get("adc_bits", d.adc_bits);
  s.get("full_scale_sigmas", d.full_scale_sigmas);
  if (const json* v = s.raw("active_band")) {
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() || !(*v)[1].is_number_integer())
      throw ConfigError(s.key_path("active_band"), "expected [first, last] subcarrier indices");
    d.band_first = (*v)[0].get<int>();
    d.band_last = (*v)[1].get<int>();
  }
  s.get("ts_seed", d.ts_seed);
  // After n_fft so a numeric fraction is resolved against the final size.
  if (const json* v = s.raw("cp_fraction")) parse_cp_fraction(*v, d, s.key_path("cp_fraction"));
  s.finish();
  check("dmt", [&] { d.validate(); });
}

void parse_vcsel(const json& j, VcselParams& v) {
  Section s(j, "vcsel");
  s.get("bias_ma", v.bias_ma);
  s.get("i_th_ma", v.i_th_ma);
  s.get("slope_w_per_a", v.slope_w_per_a);
  s.get("f_r_hz", v.f_r_hz);
  s.get("damping", v.damping);
  s.get("alpha", v.alpha);
  s.get("kappa_hz_per_w", v.kappa_hz_per_w);
  s.get("p_out_dbm", v.p_out_dbm);
  s.get("lambda_nm", v.lambda_nm);
  s.get("drive_rms_ma", v.drive_rms_ma);
  s.finish();
  check("vcsel", [&] { v.validate(); });
}

void parse_filter(const json& j, FilterParams& f, double lambda_nm) {
  Section s(j, "filter");
  s.get("enabled", f.enabled);
  s.get("bw_nm", f.bw_nm);
  s.get("il_db", f.il_db);
  s.get("offset_nm", f.offset_nm);
  s.get("shape_order", f.shape_order);
  s.get("gd_slope_ps_per_ghz", f.gd_slope_ps_per_ghz);
  s.get("gd_curvature_ps_per_ghz2", f.gd_curvature_ps_per_ghz2);
  const json* cd = s.raw("inband_cd");
  s.finish();
  check("filter", [&] { f.validate(); });
  if (cd) {
    if (j.contains("gd_slope_ps_per_ghz") || j.contains("gd_curvature_ps_per_ghz2"))
      throw ConfigError("filter.inband_cd", "give either inband_cd or the gd_* coefficients, not both");
    Section c(*cd, "filter.inband_cd");
    std::string unit = "ps_per_nm";
    double lo = -60.0, hi = -10.0;
    c.get("unit", unit);
    c.get("low_edge", lo);
    c.get("high_edge", hi);
    c.finish();
    if (unit == "ps_per_nm")
      set_inband_dispersion_ps_per_nm(f, lo, hi, lambda_nm);
    else if (unit == "ps")
      set_inband_delay_ps(f, lo, hi, lambda_nm);
    else
      throw ConfigError("filter.inband_cd.unit", "expected \"ps_per_nm\" or \"ps\"");
  }
}

void parse_fiber(const json& j, FiberParams& f) {
  Section s(j, "fiber");
  s.get("length_km", f.length_km);
  s.get("d_ps_nm_km", f.d_ps_nm_km);
  s.get("attenuation_db_km", f.attenuation_db_km);
  s.finish();
  check("fiber", [&] { f.validate(); });
}

void parse_rx(const json& j, RxParams& r) {
  Section s(j, "rx");
  s.get("responsivity_a_per_w", r.responsivity_a_per_w);
  s.get("elec_bw_hz", r.elec_bw_hz);
  s.get("noise_current_density", r.noise_current_density);
  s.get("input_power_dbm", r.input_power_dbm);
  s.finish();
  check("rx", [&] { r.validate(); });
}

std::vector<bool> parse_filter_states(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  std::vector<bool> out;
  for (const json& e : v) {
    if (e.is_boolean())
      out.push_back(e.get<bool>());
    else if (e.is_string() && (e == "on" || e == "off"))
      out.push_back(e == "on");
    else
      throw ConfigError(path, "entries must be \"on\", \"off\" or booleans");
  }
  return out;
}

std::vector<double> parse_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void parse_sweep(const json& j, ExperimentConfig& cfg) {
  Section s(j, "sweep");
  if (const json* v = s.raw("rates_gbps")) cfg.rates_gbps = parse_number_list(*v, "sweep.rates_gbps");
  if (const json* v = s.raw("reaches_km")) cfg.reaches_km = parse_number_list(*v, "sweep.reaches_km");
  if (const json* v = s.raw("offsets_nm")) cfg.offsets_nm = parse_number_list(*v, "sweep.offsets_nm");
  if (const json* v = s.raw("filter_states")) cfg.filter_states = parse_filter_states(*v, "sweep.filter_states");
  s.get("n_frames", cfg.n_frames);
  s.get("seed", cfg.seed);
  s.get("threads", cfg.threads);
  s.get("oversample", cfg.link.oversample);
  s.get("dd_mu", cfg.link.dd_mu);
  s.get("sync_backoff", cfg.link.sync_backoff);
  s.get("gap_db", cfg.link.chow.gap_db);
  s.get("max_bits", cfg.link.chow.max_bits);
  s.get("max_iter", cfg.link.chow.max_iter);
  s.finish();

  auto nonempty = [](const auto& list, const char* key) {
    if (list.empty()) throw ConfigError(std::string("sweep.") + key, "must be non-empty");
  };
  nonempty(cfg.rates_gbps, "rates_gbps");
  nonempty(cfg.reaches_km, "reaches_km");
  nonempty(cfg.offsets_nm, "offsets_nm");
  nonempty(cfg.filter_states, "filter_states");
  if (cfg.n_frames < 1) throw ConfigError("sweep.n_frames", "must be >= 1");
  for (double r : cfg.rates_gbps)
    if (!(r > 0.0)) throw ConfigError("sweep.rates_gbps", "rates must be positive");
  for (double l : cfg.reaches_km)
    if (!(l >= 0.0)) throw ConfigError("sweep.reaches_km", "reaches must be >= 0");
  if (cfg.link.chow.max_bits < 1 || cfg.link.chow.max_bits > 6)
    throw ConfigError("sweep.max_bits", "must be in 1..6");
  if (cfg.link.chow.max_iter < 1) throw ConfigError("sweep.max_iter", "must be >= 1");
  if (cfg.threads < 0) throw ConfigError("sweep.threads", "must be >= 0");
}

} // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  Section top(j, "");
  const json* dmt = top.raw("dmt");
  const json* vcsel = top.raw("vcsel");
  const json* filter = top.raw("filter");
  const json* fiber = top.raw("fiber");
  const json* rx = top.raw("rx");
  const json* sweep = top.raw("sweep");
  top.finish();
  if (dmt) parse_dmt(*dmt, cfg.link.dmt);
  if (vcsel) parse_vcsel(*vcsel, cfg.link.vcsel);
  if (filter) parse_filter(*filter, cfg.link.filter, cfg.link.vcsel.lambda_nm);
  if (fiber) parse_fiber(*fiber, cfg.link.fiber);
  if (rx) parse_rx(*rx, cfg.link.rx);
  if (sweep) parse_sweep(*sweep, cfg);
  check("sweep", [&] { cfg.link.validate(); });
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  const LinkConfig& l = cfg.link;
  json j;
  j["dmt"] = {{"n_fft", l.dmt.n_fft},
              {"cp_fraction", std::to_string(l.dmt.cp_num) + "/" + std::to_string(l.dmt.cp_den)},
              {"n_ts", l.dmt.n_ts},
              {"n_data", l.dmt.n_data},
              {"sample_rate", l.dmt.sample_rate},
              {"dac_bits", l.dmt.dac_bits},
              {"adc_bits", l.dmt.adc_bits},
              {"full_scale_sigmas", l.dmt.full_scale_sigmas},
              {"active_band", {l.dmt.band_first, l.dmt.band_last}},
              {"ts_seed", l.dmt.ts_seed}};
  if (std::isinf(l.dmt.clip_ratio_db))
    j["dmt"]["clip_ratio_db"] = "off";
  else
    j["dmt"]["clip_ratio_db"] = l.dmt.clip_ratio_db;
  j["vcsel"] = {{"bias_ma", l.vcsel.bias_ma},         {"i_th_ma", l.vcsel.i_th_ma},
                {"slope_w_per_a", l.vcsel.slope_w_per_a}, {"f_r_hz", l.vcsel.f_r_hz},
                {"damping", l.vcsel.damping},         {"alpha", l.vcsel.alpha},
                {"kappa_hz_per_w", l.vcsel.kappa_hz_per_w}, {"p_out_dbm", l.vcsel.p_out_dbm},
                {"lambda_nm", l.vcsel.lambda_nm},     {"drive_rms_ma", l.vcsel.drive_rms_ma}};
  j["filter"] = {{"enabled", l.filter.enabled},
                 {"bw_nm", l.filter.bw_nm},
                 {"il_db", l.filter.il_db},
                 {"offset_nm", l.filter.offset_nm},
                 {"shape_order", l.filter.shape_order},
                 {"gd_slope_ps_per_ghz", l.filter.gd_slope_ps_per_ghz},
                 {"gd_curvature_ps_per_ghz2", l.filter.gd_curvature_ps_per_ghz2}};
  j["fiber"] = {{"length_km", l.fiber.length_km},
                {"d_ps_nm_km", l.fiber.d_ps_nm_km},
                {"attenuation_db_km", l.fiber.attenuation_db_km}};
  j["rx"] = {{"responsivity_a_per_w", l.rx.responsivity_a_per_w},
             {"elec_bw_hz", l.rx.elec_bw_hz},
             {"noise_current_density", l.rx.noise_current_density},
             {"input_power_dbm", l.rx.input_power_dbm}};
  json states = json::array();
  for (bool b : cfg.filter_states) states.push_back(b ? "on" : "off");
  j["sweep"] = {{"rates_gbps", cfg.rates_gbps},
                {"reaches_km", cfg.reaches_km},
                {"filter_states", states},
                {"offsets_nm", cfg.offsets_nm},
                {"n_frames", cfg.n_frames},
                {"seed", cfg.seed},
                {"threads", cfg.threads},
                {"oversample", l.oversample},
                {"dd_mu", l.dd_mu},
                {"sync_backoff", l.sync_backoff},
                {"gap_db", l.chow.gap_db},
                {"max_bits", l.chow.max_bits},
                {"max_iter", l.chow.max_iter}};
  return j.dump(2);
}

} // namespace dmtlink
