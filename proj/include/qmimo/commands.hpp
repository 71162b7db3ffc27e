#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmimo/quantization.hpp"

namespace qmimo {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;       // bad flags or invalid configuration
inline constexpr int kExitValidation = 2;  // validation suite reported a failure
inline constexpr int kExitIo = 3;          // filesystem problems

// Name of the environment variable supplying the default output directory.
inline constexpr const char* kOutDirEnvVar = "QMIMO_OUT_DIR";

struct CommonOptions {
  std::string config_path;  // empty: built-in defaults
  std::string out_dir;      // empty: $QMIMO_OUT_DIR, then "."
  std::uint64_t seed = 1;
  int trials = 2000;
  int threads = 1;
  // Scalar overrides applied on top of the loaded config.
  std::optional<double> rho_p_db;
  std::optional<double> rho_u_db;
  std::optional<double> shadow_db;
  std::optional<double> kappa;
  std::optional<double> sigma2;
};

struct MseSweepOptions {
  CommonOptions common;
  std::string rho_p_db_values = "-10:5:30";  // sweep axis, dB
  std::string bits_values = "1,2,3,inf";     // one curve per resolution
};

struct RateVsMOptions {
  CommonOptions common;
  std::string m_values = "32,64,96,128,160,192,224,256";
  std::string drop = "auto";  // auto | fixed | once | per-trial
};

struct CompensationOptions {
  CommonOptions common;
  std::string ref_bits = "1";
  double ref_scale = 0.95;
  std::string alt_bits = "2,3,5";
  std::string m_values = "32,64,96,128,160,192,224,256";
};

struct ValidateOptions {
  CommonOptions common;
};

// Numeric lists accept "a,b,c" or an inclusive "start:step:stop" range.
std::vector<double> parse_value_list(const std::string& text);
std::vector<AdcBits> parse_bits_list(const std::string& text);

int cmd_mse_sweep(const MseSweepOptions& opt);
int cmd_rate_vs_m(const RateVsMOptions& opt);
int cmd_compensation(const CompensationOptions& opt);
int cmd_validate(const ValidateOptions& opt);

}  // namespace qmimo
