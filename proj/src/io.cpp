#include "qmimo/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace qmimo {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double value) {
  if (!(value > 0)) throw std::invalid_argument("linear_to_db: value must be positive");
  return 10.0 * std::log10(value);
}

std::string format_g17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("format_g17: conversion failed");
  return std::string(buf, res.ptr);
}

std::string format_bits(AdcBits bits) { return bits ? std::to_string(*bits) : "inf"; }

AdcBits parse_bits(const std::string& text) {
  if (text == "inf" || text == "infinite") return kInfiniteBits;
  int value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError(ConfigViolation::kInvalidAdcBits,
                      "adc_bits must be an integer or \"inf\": got '" + text + "'");
  return value;
}

namespace {

ConfigError malformed(const std::string& what) {
  return ConfigError(ConfigViolation::kMalformedConfig, "config: " + what);
}

double get_number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw malformed(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

int get_int(const nlohmann::json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw malformed(std::string(key) + " must be an integer");
  return j.at(key).get<int>();
}

}  // namespace

LoadedConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw malformed("top level must be an object");
  const nlohmann::json& sys = j.contains("system") ? j.at("system") : j;
  if (!sys.is_object()) throw malformed("system must be an object");

  LoadedConfig out;
  SystemConfig<double> defaults;
  out.system.num_antennas = get_int(sys, "num_antennas", defaults.num_antennas);
  out.system.num_users = get_int(sys, "num_users", defaults.num_users);
  out.system.pilot_length = get_int(sys, "pilot_length", defaults.pilot_length);
  out.system.rf_scale_magnitude = get_number(sys, "rf_scale_magnitude", defaults.rf_scale_magnitude);
  out.system.rf_phase = get_number(sys, "rf_phase", defaults.rf_phase);
  out.system.rf_noise_var = get_number(sys, "rf_noise_var", defaults.rf_noise_var);
  out.system.pilot_power = get_number(sys, "pilot_power", defaults.pilot_power);
  out.system.data_power = get_number(sys, "data_power", defaults.data_power);

  if (sys.contains("adc_bits")) {
    const auto& b = sys.at("adc_bits");
    if (b.is_null())
      out.system.adc_bits = kInfiniteBits;
    else if (b.is_string())
      out.system.adc_bits = parse_bits(b.get<std::string>());
    else if (b.is_number_integer())
      out.system.adc_bits = b.get<int>();
    else
      throw malformed("adc_bits must be an integer, \"inf\" or null");
  } else {
    out.system.adc_bits = defaults.adc_bits;
  }

  if (sys.contains("large_scale")) {
    const auto& arr = sys.at("large_scale");
    if (!arr.is_array()) throw malformed("large_scale must be an array");
    out.system.large_scale.resize(static_cast<Index>(arr.size()));
    Index i = 0;
    for (const auto& v : arr) {
      if (!v.is_number()) throw malformed("large_scale entries must be numbers");
      out.system.large_scale[i++] = v.get<double>();
    }
  } else {
    out.system.large_scale = VectorR<double>::Ones(out.system.num_users);
  }

  if (j.contains("scenario")) {
    const auto& sc = j.at("scenario");
    if (!sc.is_object()) throw malformed("scenario must be an object");
    ScenarioSpec<double> spec;
    spec.cell_radius = get_number(sc, "cell_radius", spec.cell_radius);
    spec.hole_radius = get_number(sc, "hole_radius", spec.hole_radius);
    spec.shadow_std_db = get_number(sc, "shadow_std_db", spec.shadow_std_db);
    spec.path_loss_exp = get_number(sc, "path_loss_exp", spec.path_loss_exp);
    spec.num_users = get_int(sc, "num_users", out.system.num_users);
    out.scenario = spec;
  }
  return out;
}

nlohmann::json to_json(const SystemConfig<double>& cfg) {
  nlohmann::json j;
  j["num_antennas"] = cfg.num_antennas;
  j["num_users"] = cfg.num_users;
  j["pilot_length"] = cfg.pilot_length;
  if (cfg.adc_bits)
    j["adc_bits"] = *cfg.adc_bits;
  else
    j["adc_bits"] = "inf";
  j["rf_scale_magnitude"] = cfg.rf_scale_magnitude;
  j["rf_phase"] = cfg.rf_phase;
  j["rf_noise_var"] = cfg.rf_noise_var;
  j["pilot_power"] = cfg.pilot_power;
  j["data_power"] = cfg.data_power;
  j["large_scale"] = nlohmann::json::array();
  for (Index k = 0; k < cfg.large_scale.size(); ++k) j["large_scale"].push_back(cfg.large_scale[k]);
  return j;
}

nlohmann::json to_json(const ScenarioSpec<double>& spec) {
  return {{"cell_radius", spec.cell_radius},
          {"hole_radius", spec.hole_radius},
          {"shadow_std_db", spec.shadow_std_db},
          {"path_loss_exp", spec.path_loss_exp},
          {"num_users", spec.num_users}};
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(ConfigViolation::kMalformedConfig,
                      "config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::string join_csv_row(const std::vector<std::string>& cells) {
  std::ostringstream oss;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) oss << ',';
    oss << cells[i];
  }
  oss << '\n';
  return oss.str();
}

}  // namespace qmimo
