// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace mmcell {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
  if (used != t.size()) throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
  }
  if (used != t.size()) throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
  return v;
}

inline bool is_auto(const std::string& text) {
  const std::string t = trim(text);
  return t == "auto" || t == "none" || t.empty();
}

struct Field {
  std::string key;
  std::string help;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

inline Field int_field(std::string key, std::string help, int ScenarioConfig::*m) {
  return {key, std::move(help),
          [key, m](ScenarioConfig& c, const std::string& v) {
            const long long x = parse_integer(key, v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
              throw ConfigError("'" + key + "' out of range");
            c.*m = static_cast<int>(x);
          },
          [m](const ScenarioConfig& c) { return std::to_string(c.*m); }};
}

inline Field double_field(std::string key, std::string help, double ScenarioConfig::*m) {
  return {key, std::move(help),
          [key, m](ScenarioConfig& c, const std::string& v) { c.*m = parse_double(key, v); },
          [m](const ScenarioConfig& c) { return format_double(c.*m); }};
}

inline Field optional_field(std::string key, std::string help, std::optional<double> ScenarioConfig::*m) {
  return {key, std::move(help),
          [key, m](ScenarioConfig& c, const std::string& v) {
            if (is_auto(v))
              c.*m = std::nullopt;
            else
              c.*m = parse_double(key, v);
          },
          [m](const ScenarioConfig& c) { return (c.*m) ? format_double(*(c.*m)) : std::string("auto"); }};
}

}  // namespace detail

inline std::string to_string(ContaminationMode m) {
  return m == ContaminationMode::explicit_xi_sq ? "explicit_xi_sq" : "geometric";
}

inline std::string to_string(LsErrorReference r) {
  return r == LsErrorReference::effective ? "effective" : "physical";
}

// Every ScenarioConfig field, in canonical order. The key is both the config
// file key and the CLI flag name.
inline const std::vector<detail::Field>& config_fields() {
  using namespace detail;
  using C = ScenarioConfig;
  static const std::vector<Field> fields = {
      int_field("L", "number of neighbouring cells", &C::L),
      int_field("N", "users per cell (= RF chains)", &C::N),
      int_field("M", "BS antennas per RF chain", &C::M),
      int_field("P", "user antennas", &C::P),
      optional_field("E_P", "pilot symbol energy [W] (auto: E_s/N)", &C::E_P),
      optional_field("E_s", "data symbol energy [W] (auto: from max_tx_power_dbm + antenna gain)", &C::E_s),
      double_field("max_tx_power_dbm", "maximum BS transmit power [dBm]", &C::max_tx_power_dbm),
      double_field("bs_antenna_gain_dbi", "BS antenna gain [dBi]", &C::bs_antenna_gain_dbi),
      double_field("varsigma_intra", "intra-cell strongest-path power ratio", &C::varsigma_intra),
      double_field("varsigma_inter_ul", "inter-cell uplink power ratio", &C::varsigma_inter_ul),
      double_field("varsigma_inter_dl", "inter-cell downlink power ratio", &C::varsigma_inter_dl),
      int_field("n_clusters", "scattering clusters per channel", &C::n_clusters),
      optional_field("xi_sq", "pilot contamination energy xi^2", &C::xi_sq),
      {"contamination_mode", "explicit_xi_sq | geometric",
       [](C& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "explicit_xi_sq" || t == "explicit")
           c.contamination_mode = ContaminationMode::explicit_xi_sq;
         else if (t == "geometric")
           c.contamination_mode = ContaminationMode::geometric;
         else
           throw ConfigError("'contamination_mode' must be explicit_xi_sq or geometric, got '" + v + "'");
       },
       [](const C& c) { return to_string(c.contamination_mode); }},
      double_field("alpha_pl", "path-loss slope", &C::alpha_pl),
      double_field("varrho_pl", "path-loss intercept coefficient", &C::varrho_pl),
      double_field("carrier_hz", "carrier frequency [Hz]", &C::carrier_hz),
      double_field("bandwidth_hz", "signal bandwidth [Hz]", &C::bandwidth_hz),
      double_field("temperature_k", "noise temperature [K]", &C::temperature_k),
      double_field("isd_m", "inter-site distance [m]", &C::isd_m),
      double_field("min_distance_m", "minimum user to serving BS distance [m]", &C::min_distance_m),
      optional_field("ref_distance_m", "power-control reference distance [m] (auto: isd_m/2)", &C::ref_distance_m),
      optional_field("noise_bs_w", "BS noise power [W] (auto: thermal)", &C::noise_bs_w),
      optional_field("noise_ms_w", "user noise power [W] (auto: thermal)", &C::noise_ms_w),
      double_field("aoa_error_std", "std of additive strongest-AoA cosine error (exploratory)", &C::aoa_error_std),
      {"ls_error_reference", "effective | physical (LS baseline cross-link scaling)",
       [](C& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "effective")
           c.ls_error_reference = LsErrorReference::effective;
         else if (t == "physical")
           c.ls_error_reference = LsErrorReference::physical;
         else
           throw ConfigError("'ls_error_reference' must be effective or physical, got '" + v + "'");
       },
       [](const C& c) { return to_string(c.ls_error_reference); }},
      int_field("trials", "Monte-Carlo trials per sweep point", &C::trials),
      {"seed", "64-bit master seed",
       [](C& c, const std::string& v) {
         const std::string t = trim(v);
         std::size_t used = 0;
         try {
           if (!t.empty() && t[0] == '-') throw std::invalid_argument("negative");
           c.seed = std::stoull(t, &used, 0);
         } catch (const std::exception&) {
           used = 0;
         }
         if (used == 0 || used != t.size()) throw ConfigError("'seed' expects an unsigned integer, got '" + v + "'");
       },
       [](const C& c) { return std::to_string(c.seed); }},
  };
  return fields;
}

inline std::string normalize_key(std::string key) {
  for (char& ch : key)
    if (ch == '-') ch = '_';
  return key;
}

inline void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const std::string k = normalize_key(detail::trim(key));
  for (const auto& f : config_fields())
    if (f.key == k) {
      f.set(cfg, value);
      return;
    }
  throw ConfigError("unknown config key '" + key + "'");
}

// key = value lines; '#' starts a comment.
inline void apply_config_text(ScenarioConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    set_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

inline void apply_config_file(ScenarioConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

inline std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& f : config_fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

// FNV-1a over the canonical serialization, seed excluded (it has its own column).
inline std::string config_fingerprint(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  c.seed = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mmcell
