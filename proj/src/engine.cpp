#include "qmimo/engine.hpp"

#include <cmath>
#include <functional>

#include "qmimo/estimation.hpp"
#include "qmimo/io.hpp"
#include "qmimo/rate.hpp"
#include "qmimo/scenario.hpp"

namespace qmimo {

SweepAxis parse_axis(const std::string& name) {
  if (name == "rho-p-db") return SweepAxis::kPilotPowerDb;
  if (name == "rho-u-db") return SweepAxis::kDataPowerDb;
  if (name == "antennas") return SweepAxis::kAntennas;
  if (name == "bits") return SweepAxis::kAdcBits;
  if (name == "rf-scale") return SweepAxis::kRfScale;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kPilotPowerDb: return "rho-p-db";
    case SweepAxis::kDataPowerDb: return "rho-u-db";
    case SweepAxis::kAntennas: return "antennas";
    case SweepAxis::kAdcBits: return "bits";
    case SweepAxis::kRfScale: return "rf-scale";
  }
  throw std::invalid_argument("unknown sweep axis");
}

namespace {

int as_positive_int(double value, ConfigViolation kind, const char* what) {
  if (!(value >= 1) || value != std::floor(value) || value > 1e9)
    throw ConfigError(kind, std::string(what) + " must be a positive integer");
  return static_cast<int>(value);
}

}  // namespace

SystemConfig<double> apply_axis(const SystemConfig<double>& base, SweepAxis axis, double value) {
  SystemConfig<double> cfg = base;
  switch (axis) {
    case SweepAxis::kPilotPowerDb: cfg.pilot_power = db_to_linear(value); break;
    case SweepAxis::kDataPowerDb: cfg.data_power = db_to_linear(value); break;
    case SweepAxis::kAntennas:
      cfg.num_antennas = as_positive_int(value, ConfigViolation::kNonPositiveCount, "antenna count");
      break;
    case SweepAxis::kAdcBits:
      cfg.adc_bits = as_positive_int(value, ConfigViolation::kInvalidAdcBits, "adc_bits");
      break;
    case SweepAxis::kRfScale: cfg.rf_scale_magnitude = value; break;
  }
  return cfg;
}

SystemConfig<double> perfect_hardware(SystemConfig<double> cfg) {
  cfg.adc_bits = kInfiniteBits;
  cfg.rf_scale_magnitude = 1.0;
  cfg.rf_phase = 0.0;
  cfg.rf_noise_var = 0.0;
  return cfg;
}

namespace {

// Average an analytic metric over the same per-trial user drops the Monte
// Carlo paths see.
double scenario_average(const SystemConfig<double>& base, const ScenarioSpec<double>& scenario,
                        int trials, std::uint64_t seed, std::uint64_t trial_base,
                        const std::function<double(const ValidatedConfig<double>&)>& metric) {
  SystemConfig<double> cfg = base;
  double acc = 0;
  for (int t = 0; t < trials; ++t) {
    RandomSource drop = substream(seed, trial_base + static_cast<std::uint64_t>(t), Stream::kUserDrop);
    cfg.large_scale = drop_users(scenario, drop);
    acc += metric(ValidatedConfig<double>(cfg));
  }
  return acc / trials;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("run_sweep: no axis values");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1]))
      throw std::invalid_argument("run_sweep: axis values must be strictly increasing");
  if (spec.trials < 2) throw std::invalid_argument("run_sweep: need at least two trials");
  if (spec.scenario) {
    validate_scenario(*spec.scenario);
    if (spec.scenario->num_users != spec.base.num_users)
      throw ConfigError(ConfigViolation::kLargeScaleSizeMismatch,
                        "scenario num_users must match the system config");
  }

  SweepResult result;
  result.axis = spec.axis;
  result.trials = spec.trials;
  result.seed = spec.seed;
  result.points.reserve(spec.values.size());

  const ScenarioSpec<double>* scenario = spec.scenario ? &*spec.scenario : nullptr;
  std::uint64_t trial_base = spec.trial_id_base;
  for (const double value : spec.values) {
    SweepPoint pt;
    pt.axis_value = value;
    try {
      const SystemConfig<double> cand = apply_axis(spec.base, spec.axis, value);
      const ValidatedConfig<double> cfg(cand);

      if (spec.mse_metrics) {
        if (scenario) {
          pt.mse_analytic = scenario_average(cand, *scenario, spec.trials, spec.seed, trial_base,
                                             [](const ValidatedConfig<double>& c) { return analytic_mse(c); });
          if (cand.pilot_length == cand.num_users)
            pt.mse_floor = scenario_average(cand, *scenario, spec.trials, spec.seed, trial_base,
                                            [](const ValidatedConfig<double>& c) { return mse_floor(c); });
        } else {
          pt.mse_analytic = analytic_mse(cfg);
          if (cand.pilot_length == cand.num_users) pt.mse_floor = mse_floor(cfg);
        }
        const auto mc = empirical_mse(cfg, spec.trials, spec.seed, spec.threads, scenario, trial_base);
        pt.mse_mc = mc.mean;
        pt.mse_ci95 = mc.ci95;
      }

      if (spec.rate_metrics) {
        const auto report =
            ergodic_rate_mc(cfg, spec.trials, spec.seed, spec.threads, scenario, trial_base);
        pt.rate_mc_sum = report.sum_mc;
        pt.rate_ci95 = report.sum_ci95;
        pt.rate_approx_sum = report.sum_approx;
        const auto csi_sum = [](const ValidatedConfig<double>& c) {
          return rate_perfect_csi_bound(c).sum();
        };
        const auto hw_sum = [](const ValidatedConfig<double>& c) {
          return rate_approx(ValidatedConfig<double>(perfect_hardware(c.base()))).sum();
        };
        if (scenario) {
          pt.rate_perfect_csi_sum =
              scenario_average(cand, *scenario, spec.trials, spec.seed, trial_base, csi_sum);
          pt.rate_perfect_hw_sum =
              scenario_average(cand, *scenario, spec.trials, spec.seed, trial_base, hw_sum);
        } else {
          pt.rate_perfect_csi_sum = csi_sum(cfg);
          pt.rate_perfect_hw_sum = hw_sum(cfg);
        }
      }
    } catch (const ConfigError& e) {
      pt.error = e.what();
    }
    result.points.push_back(std::move(pt));
    trial_base += static_cast<std::uint64_t>(spec.trials);
  }
  return result;
}

}  // namespace qmimo
