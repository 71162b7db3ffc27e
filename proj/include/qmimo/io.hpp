#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmimo/config.hpp"

namespace qmimo {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double db_to_linear(double db);
double linear_to_db(double value);  // throws std::invalid_argument for value <= 0

// Shortest decimal form with 17 significant digits: parses back bit-exact,
// independent of locale.
std::string format_g17(double v);

std::string format_bits(AdcBits bits);        // "inf" or the integer
AdcBits parse_bits(const std::string& text);  // accepts "inf", "infinite" or an integer

struct LoadedConfig {
  SystemConfig<double> system;
  std::optional<ScenarioSpec<double>> scenario;
};

// Field names mirror the structs. The system block may sit under a "system"
// key or at the top level; "scenario" is optional; large_scale defaults to
// all-ones. Malformed documents raise ConfigError.
LoadedConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SystemConfig<double>& cfg);
nlohmann::json to_json(const ScenarioSpec<double>& spec);

LoadedConfig load_config_file(const std::string& path);  // IoError when unreadable

void write_text_file(const std::string& path, const std::string& content);
std::string join_csv_row(const std::vector<std::string>& cells);  // newline-terminated

}  // namespace qmimo
