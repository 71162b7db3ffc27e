#include "qmimo/commands.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "qmimo/compensation.hpp"
#include "qmimo/engine.hpp"
#include "qmimo/io.hpp"
#include "qmimo/rate.hpp"
#include "qmimo/scenario.hpp"
#include "qmimo/validation.hpp"

namespace qmimo {
namespace {

double parse_double(const std::string& text) {
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

struct ResolvedSetup {
  SystemConfig<double> system;
  std::optional<ScenarioSpec<double>> scenario;
  std::filesystem::path out_dir;
};

ResolvedSetup resolve(const CommonOptions& c) {
  ResolvedSetup s;
  if (!c.config_path.empty()) {
    LoadedConfig loaded = load_config_file(c.config_path);
    s.system = loaded.system;
    s.scenario = loaded.scenario;
  } else {
    s.system.large_scale = VectorR<double>::Ones(s.system.num_users);
  }
  if (c.rho_p_db) s.system.pilot_power = db_to_linear(*c.rho_p_db);
  if (c.rho_u_db) s.system.data_power = db_to_linear(*c.rho_u_db);
  if (c.kappa) s.system.rf_scale_magnitude = *c.kappa;
  if (c.sigma2) s.system.rf_noise_var = *c.sigma2;
  if (c.shadow_db) {
    if (!s.scenario)
      throw ConfigError(ConfigViolation::kMalformedConfig,
                        "--shadow-db needs a scenario block in the config");
    s.scenario->shadow_std_db = *c.shadow_db;
  }
  if (c.trials < 2) throw std::invalid_argument("--trials must be at least 2");
  if (c.threads < 1) throw std::invalid_argument("--threads must be at least 1");

  std::string dir = c.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnvVar);
    dir = (env && *env) ? env : ".";
  }
  s.out_dir = dir;
  std::error_code ec;
  std::filesystem::create_directories(s.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
  return s;
}

std::string int_cell(long long v) { return std::to_string(v); }

constexpr const char* kMsePlotScript = R"PY(#!/usr/bin/env python3
"""Plot channel-estimation MSE against pilot SNR, one curve per resolution."""
import csv
import math
from collections import defaultdict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
curves = defaultdict(list)
with open(here / "mse_sweep.csv", newline="") as f:
    for row in csv.DictReader(f):
        curves[row["bits"]].append(row)

fig, ax = plt.subplots(figsize=(7, 5))
for bits, rows in curves.items():
    rows.sort(key=lambda r: float(r["rho_p_db"]))
    x = [float(r["rho_p_db"]) for r in rows]
    ana = [float(r["mse_analytic"]) for r in rows]
    mc = [float(r["mse_mc"]) for r in rows]
    ax.semilogy(x, ana, "-", label=f"analytic, b={bits}")
    ax.semilogy(x, mc, "o", markerfacecolor="none")
    floor = float(rows[-1]["mse_floor"])
    if math.isfinite(floor) and floor > 0:
        ax.axhline(floor, linestyle=":", linewidth=0.8)
ax.set_xlabel("pilot SNR [dB]")
ax.set_ylabel("MSE")
ax.grid(True, which="both", alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(here / "mse_sweep.png", dpi=150)
print("wrote", here / "mse_sweep.png")
)PY";

constexpr const char* kRatePlotScript = R"PY(#!/usr/bin/env python3
"""Plot sum rate against antenna count: Monte Carlo vs closed forms."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
rows = []
with open(here / "rate_vs_m.csv", newline="") as f:
    rows = sorted(csv.DictReader(f), key=lambda r: float(r["M"]))

x = [float(r["M"]) for r in rows]
fig, ax = plt.subplots(figsize=(7, 5))
ax.plot(x, [float(r["rate_approx_sum"]) for r in rows], "-", label="approximation")
ax.errorbar(x, [float(r["rate_mc_sum"]) for r in rows],
            yerr=[float(r["ci95"]) for r in rows], fmt="o",
            markerfacecolor="none", label="Monte Carlo")
ax.plot(x, [float(r["rate_perfect_csi_sum"]) for r in rows], "--", label="perfect CSI")
ax.plot(x, [float(r["rate_perfect_hw_sum"]) for r in rows], "-.", label="perfect hardware")
ax.set_xlabel("antennas M")
ax.set_ylabel("sum rate [bit/s/Hz]")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(here / "rate_vs_m.png", dpi=150)
print("wrote", here / "rate_vs_m.png")
)PY";

constexpr const char* kCompensationPlotScript = R"PY(#!/usr/bin/env python3
"""Plot sum-rate curves of front ends matched at a single antenna count."""
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
curves = defaultdict(list)
with open(here / "compensation_curves.csv", newline="") as f:
    for row in csv.DictReader(f):
        curves[(row["bits"], row["scale"])].append(row)

fig, ax = plt.subplots(figsize=(7, 5))
for (bits, scale), rows in curves.items():
    rows.sort(key=lambda r: float(r["M"]))
    x = [float(r["M"]) for r in rows]
    y = [float(r["sum_rate_approx"]) for r in rows]
    ax.plot(x, y, marker="o", markerfacecolor="none",
            label=f"b={bits}, |chi|={float(scale):.4g}")
ax.set_xlabel("antennas M")
ax.set_ylabel("sum rate [bit/s/Hz]")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(here / "compensation.png", dpi=150)
print("wrote", here / "compensation.png")
)PY";

}  // namespace

std::vector<double> parse_value_list(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty value list");
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("range must be start:step:stop, got '" + text + "'");
    const double start = parse_double(parts[0]);
    const double step = parse_double(parts[1]);
    const double stop = parse_double(parts[2]);
    if (!(step > 0) || stop < start)
      throw std::invalid_argument("range needs step > 0 and stop >= start");
    std::vector<double> values;
    for (double v = start; v <= stop + 1e-9 * step; v += step) values.push_back(v);
    return values;
  }
  std::vector<double> values;
  for (const auto& tok : split(text, ',')) values.push_back(parse_double(tok));
  return values;
}

std::vector<AdcBits> parse_bits_list(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty bits list");
  std::vector<AdcBits> bits;
  for (const auto& tok : split(text, ',')) bits.push_back(parse_bits(tok));
  return bits;
}

int cmd_mse_sweep(const MseSweepOptions& opt) {
  const ResolvedSetup setup = resolve(opt.common);
  const std::vector<double> rho_db = parse_value_list(opt.rho_p_db_values);
  const std::vector<AdcBits> bits_list = parse_bits_list(opt.bits_values);

  std::string csv = join_csv_row({"rho_p_db", "bits", "kappa", "sigma2", "mse_analytic",
                                  "mse_floor", "mse_mc", "ci95", "trials", "seed"});
  std::uint64_t trial_base = 0;
  for (const AdcBits bits : bits_list) {
    SweepSpec spec;
    spec.base = setup.system;
    spec.base.adc_bits = bits;
    spec.axis = SweepAxis::kPilotPowerDb;
    spec.values = rho_db;
    spec.trials = opt.common.trials;
    spec.seed = opt.common.seed;
    spec.threads = opt.common.threads;
    spec.scenario = setup.scenario;
    spec.trial_id_base = trial_base;
    spec.mse_metrics = true;
    spec.rate_metrics = false;
    const SweepResult result = run_sweep(spec);
    for (const SweepPoint& pt : result.points) {
      if (!pt.error.empty())
        std::cerr << "mse-sweep: skipped rho_p_db=" << pt.axis_value << ": " << pt.error << "\n";
      csv += join_csv_row({format_g17(pt.axis_value), format_bits(bits),
                           format_g17(setup.system.rf_scale_magnitude),
                           format_g17(setup.system.rf_noise_var), format_g17(pt.mse_analytic),
                           format_g17(pt.mse_floor), format_g17(pt.mse_mc),
                           format_g17(pt.mse_ci95), int_cell(opt.common.trials),
                           int_cell(static_cast<long long>(opt.common.seed))});
    }
    trial_base += static_cast<std::uint64_t>(rho_db.size()) *
                  static_cast<std::uint64_t>(opt.common.trials);
  }

  const auto csv_path = setup.out_dir / "mse_sweep.csv";
  write_text_file(csv_path.string(), csv);
  write_text_file((setup.out_dir / "plot_mse_sweep.py").string(), kMsePlotScript);
  std::cout << "wrote " << csv_path.string() << "\n";
  return kExitOk;
}

int cmd_rate_vs_m(const RateVsMOptions& opt) {
  ResolvedSetup setup = resolve(opt.common);
  const std::vector<double> m_values = parse_value_list(opt.m_values);

  std::optional<ScenarioSpec<double>> scenario;
  if (opt.drop == "auto") {
    scenario = setup.scenario;
  } else if (opt.drop == "fixed") {
    scenario.reset();
  } else if (opt.drop == "once" || opt.drop == "per-trial") {
    if (!setup.scenario)
      throw ConfigError(ConfigViolation::kMalformedConfig,
                        "--drop " + opt.drop + " needs a scenario block in the config");
    if (opt.drop == "once") {
      RandomSource drop = substream(opt.common.seed, 0, Stream::kUserDrop);
      setup.system.large_scale = drop_users(*setup.scenario, drop);
    } else {
      scenario = setup.scenario;
    }
  } else {
    throw std::invalid_argument("unknown drop mode: " + opt.drop);
  }

  SweepSpec spec;
  spec.base = setup.system;
  spec.axis = SweepAxis::kAntennas;
  spec.values = m_values;
  spec.trials = opt.common.trials;
  spec.seed = opt.common.seed;
  spec.threads = opt.common.threads;
  spec.scenario = scenario;
  spec.mse_metrics = false;
  spec.rate_metrics = true;
  const SweepResult result = run_sweep(spec);

  std::string csv = join_csv_row({"M", "rate_mc_sum", "rate_approx_sum", "rate_perfect_csi_sum",
                                  "rate_perfect_hw_sum", "ci95", "trials", "seed"});
  for (const SweepPoint& pt : result.points) {
    if (!pt.error.empty())
      std::cerr << "rate-vs-m: skipped M=" << pt.axis_value << ": " << pt.error << "\n";
    csv += join_csv_row({format_g17(pt.axis_value), format_g17(pt.rate_mc_sum),
                         format_g17(pt.rate_approx_sum), format_g17(pt.rate_perfect_csi_sum),
                         format_g17(pt.rate_perfect_hw_sum), format_g17(pt.rate_ci95),
                         int_cell(opt.common.trials),
                         int_cell(static_cast<long long>(opt.common.seed))});
  }

  const auto csv_path = setup.out_dir / "rate_vs_m.csv";
  write_text_file(csv_path.string(), csv);
  write_text_file((setup.out_dir / "plot_rate_vs_m.py").string(), kRatePlotScript);
  std::cout << "wrote " << csv_path.string() << "\n";
  return kExitOk;
}

int cmd_compensation(const CompensationOptions& opt) {
  const ResolvedSetup setup = resolve(opt.common);
  const AdcBits ref_bits = parse_bits(opt.ref_bits);
  const std::vector<AdcBits> alt_bits = parse_bits_list(opt.alt_bits);
  const std::vector<double> m_values = parse_value_list(opt.m_values);
  if (!(opt.ref_scale > 0) || opt.ref_scale > 1)
    throw std::invalid_argument("--ref-scale must lie in (0, 1]");

  std::string matches_csv = join_csv_row({"bits", "scale", "matched", "achieved_sum_rate",
                                          "target_sum_rate", "ref_bits", "ref_scale", "match_m"});
  std::string curves_csv = join_csv_row({"M", "bits", "scale", "sum_rate_approx"});

  const auto curve_rows = [&](AdcBits bits, double scale) {
    std::string rows;
    for (const double m : m_values) {
      const SystemConfig<double> at_m = apply_axis(setup.system, SweepAxis::kAntennas, m);
      rows += join_csv_row({format_g17(m), format_bits(bits), format_g17(scale),
                            format_g17(sum_rate_at(at_m, bits, scale))});
    }
    return rows;
  };

  curves_csv += curve_rows(ref_bits, opt.ref_scale);
  for (const AdcBits bits : alt_bits) {
    const auto match = find_matching_scale(setup.system, ref_bits, opt.ref_scale, bits);
    matches_csv += join_csv_row(
        {format_bits(bits), format_g17(match.scale), int_cell(match.matched ? 1 : 0),
         format_g17(match.achieved_sum_rate), format_g17(match.target_sum_rate),
         format_bits(ref_bits), format_g17(opt.ref_scale), int_cell(setup.system.num_antennas)});
    std::cout << "bits=" << format_bits(bits)
              << (match.matched ? " matched at scale=" : " unreachable; best scale=")
              << format_g17(match.scale) << " sum_rate=" << format_g17(match.achieved_sum_rate)
              << " target=" << format_g17(match.target_sum_rate) << "\n";
    curves_csv += curve_rows(bits, match.scale);
  }

  const auto matches_path = setup.out_dir / "compensation.csv";
  write_text_file(matches_path.string(), matches_csv);
  write_text_file((setup.out_dir / "compensation_curves.csv").string(), curves_csv);
  write_text_file((setup.out_dir / "plot_compensation.py").string(), kCompensationPlotScript);
  std::cout << "wrote " << matches_path.string() << "\n";
  return kExitOk;
}

int cmd_validate(const ValidateOptions& opt) {
  const ResolvedSetup setup = resolve(opt.common);
  const ValidationReport report = run_validation(opt.common.seed);
  for (const CheckResult& c : report.checks)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  measured=" << format_g17(c.measured)
              << " tolerance=" << format_g17(c.tolerance) << "\n";
  const auto json_path = setup.out_dir / "validation_report.json";
  write_text_file(json_path.string(), report_to_json(report));
  std::cout << "wrote " << json_path.string() << "\n";
  if (!report.all_pass()) {
    std::cerr << "validation failed\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace qmimo
