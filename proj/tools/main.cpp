#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "qmimo/commands.hpp"
#include "qmimo/config.hpp"
#include "qmimo/io.hpp"

namespace {

void add_common(CLI::App* cmd, qmimo::CommonOptions& common) {
  cmd->add_option("--config", common.config_path, "JSON config file (defaults when omitted)");
  cmd->add_option("--out-dir", common.out_dir,
                  "output directory (default: $QMIMO_OUT_DIR, then '.')");
  cmd->add_option("--seed", common.seed, "master seed for all random streams");
  cmd->add_option("--trials", common.trials, "Monte Carlo trials per point")
      ->check(CLI::Range(2, 100000000));
  cmd->add_option("--threads", common.threads, "worker threads (never changes results)")
      ->check(CLI::Range(1, 4096));
  cmd->add_option("--rho-u-db", common.rho_u_db, "data transmit power in dB");
  cmd->add_option("--shadow-db", common.shadow_db, "shadow-fading std deviation in dB");
  cmd->add_option("--kappa", common.kappa, "front-end scale magnitude |chi|");
  cmd->add_option("--sigma2", common.sigma2, "front-end distortion variance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation toolkit for coarsely quantized multi-antenna uplinks"};
  app.require_subcommand(1);

  qmimo::MseSweepOptions mse_opt;
  auto* mse = app.add_subcommand("mse-sweep",
                                 "channel-estimation error vs pilot power, per ADC resolution");
  add_common(mse, mse_opt.common);
  mse->add_option("--rho-p-db", mse_opt.rho_p_db_values,
                  "pilot powers in dB: 'a,b,c' or 'start:step:stop'");
  mse->add_option("--bits", mse_opt.bits_values, "comma list of resolutions, 'inf' allowed");

  qmimo::RateVsMOptions rate_opt;
  auto* rate = app.add_subcommand("rate-vs-m", "sum rate vs antenna count");
  add_common(rate, rate_opt.common);
  rate->add_option("--m", rate_opt.m_values, "antenna counts: 'a,b,c' or 'start:step:stop'");
  rate->add_option("--rho-p-db", rate_opt.common.rho_p_db, "pilot transmit power in dB");
  rate->add_option("--drop", rate_opt.drop,
                   "user drop mode: auto, fixed, once or per-trial (needs a scenario)");

  qmimo::CompensationOptions comp_opt;
  auto* comp = app.add_subcommand(
      "compensation", "find front-end scales that match a reference sum rate");
  add_common(comp, comp_opt.common);
  comp->add_option("--ref-bits", comp_opt.ref_bits, "reference ADC resolution");
  comp->add_option("--ref-scale", comp_opt.ref_scale, "reference |chi|")
      ->check(CLI::Range(1e-12, 1.0));
  comp->add_option("--alt-bits", comp_opt.alt_bits, "resolutions to match against the reference");
  comp->add_option("--m", comp_opt.m_values, "antenna counts for the emitted rate curves");
  comp->add_option("--rho-p-db", comp_opt.common.rho_p_db, "pilot transmit power in dB");

  qmimo::ValidateOptions val_opt;
  auto* val = app.add_subcommand("validate", "run the numerical self-check suite");
  add_common(val, val_opt.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? qmimo::kExitOk : qmimo::kExitUsage;
  }

  try {
    if (mse->parsed()) return qmimo::cmd_mse_sweep(mse_opt);
    if (rate->parsed()) return qmimo::cmd_rate_vs_m(rate_opt);
    if (comp->parsed()) return qmimo::cmd_compensation(comp_opt);
    if (val->parsed()) return qmimo::cmd_validate(val_opt);
  } catch (const qmimo::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qmimo::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qmimo::kExitUsage;
  }
  return qmimo::kExitUsage;
}
