#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qmimo/config.hpp"

namespace qmimo {

enum class SweepAxis { kPilotPowerDb, kDataPowerDb, kAntennas, kAdcBits, kRfScale };

SweepAxis parse_axis(const std::string& name);  // throws std::invalid_argument
std::string axis_name(SweepAxis axis);

// Returns base with the axis value applied. Power axes take dB values;
// antenna and bit axes require positive integers.
SystemConfig<double> apply_axis(const SystemConfig<double>& base, SweepAxis axis, double value);

// Same front end with every impairment removed: ideal converters, unit
// scale, zero phase, no additive distortion.
SystemConfig<double> perfect_hardware(SystemConfig<double> cfg);

struct SweepSpec {
  SystemConfig<double> base;
  SweepAxis axis = SweepAxis::kPilotPowerDb;
  std::vector<double> values;  // strictly increasing
  int trials = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::uint64_t trial_id_base = 0;  // offset for the first trial of the first point
  // Engaged: redraw large-scale gains per trial; analytic columns become
  // averages over the same draws.
  std::optional<ScenarioSpec<double>> scenario;
  bool mse_metrics = true;
  bool rate_metrics = false;
};

struct SweepPoint {
  double axis_value = 0;
  std::string error;  // non-empty: configuration rejected at this point, metrics unset
  double mse_analytic = std::numeric_limits<double>::quiet_NaN();
  double mse_floor = std::numeric_limits<double>::quiet_NaN();  // NaN unless pilot_length == num_users
  double mse_mc = std::numeric_limits<double>::quiet_NaN();
  double mse_ci95 = std::numeric_limits<double>::quiet_NaN();
  double rate_mc_sum = std::numeric_limits<double>::quiet_NaN();
  double rate_ci95 = std::numeric_limits<double>::quiet_NaN();
  double rate_approx_sum = std::numeric_limits<double>::quiet_NaN();
  double rate_perfect_csi_sum = std::numeric_limits<double>::quiet_NaN();
  double rate_perfect_hw_sum = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  SweepAxis axis;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<SweepPoint> points;
};

// Evaluate the requested metric groups at every axis value. Deterministic in
// (spec, seed): trials occupy disjoint id ranges per point, results reduce in
// trial order, and the thread count never changes values.
SweepResult run_sweep(const SweepSpec& spec);

}  // namespace qmimo
