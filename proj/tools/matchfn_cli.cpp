#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "matchfn/pipeline.hpp"

namespace {

// exit codes: 0 ok, 1 validation verdict failed, 2 config, 3 I/O,
// 4 data, 5 estimation
int exit_code_for(const matchfn::Error& e) {
  switch (e.kind()) {
    case matchfn::ErrorKind::config: return 2;
    case matchfn::ErrorKind::io: return 3;
    case matchfn::ErrorKind::data: return 4;
    case matchfn::ErrorKind::estimation: return 5;
  }
  return 5;
}

struct CliOptions {
  matchfn::RunConfig run;
  std::string transform = "log-range";
  std::string base_point = "median";
  std::string psi_range = "0.05:20";
  std::string baseline;
  std::string efficiency_process = "log-random-walk";
  std::string region;
  std::string dgp_start = "2010-01";
};

void add_estimator_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--bandwidth", opt.run.kernel.bandwidth,
                  "kernel bandwidth in transformed coordinates")
      ->capture_default_str();
  cmd->add_option("--transform", opt.transform, "log-range, range, or identity")
      ->capture_default_str();
  cmd->add_option("--grid-psi", opt.run.grid_psi, "psi grid resolution")->capture_default_str();
  cmd->add_option("--grid-lambda", opt.run.grid_lambda, "lambda grid resolution")
      ->capture_default_str();
  cmd->add_option("--psi-range", opt.psi_range, "grid span as lo:hi")->capture_default_str();
  cmd->add_option("--base-point", opt.base_point, "median or YYYY-MM")->capture_default_str();
  cmd->add_option("--window", opt.run.projection.window_length,
                  "elasticity window in months (0 = global fit)")
      ->capture_default_str();
  cmd->add_flag("--intercept", opt.run.projection.intercept,
                "include an intercept in the projection");
  cmd->add_option("--baseline", opt.baseline, "baseline period YYYY-MM for the index");
}

void add_dgp_flags(CLI::App* cmd, CliOptions& opt) {
  auto& dgp = opt.run.dgp;
  cmd->add_option("--periods", dgp.periods)->capture_default_str();
  cmd->add_option("--alpha", dgp.alpha, "Cobb-Douglas exponent on AU")->capture_default_str();
  cmd->add_option("--mu", dgp.mu, "matching function scale")->capture_default_str();
  cmd->add_option("--efficiency-process", opt.efficiency_process,
                  "constant, log-random-walk, or log-ar1")
      ->capture_default_str();
  cmd->add_option("--efficiency-sigma", dgp.efficiency_sigma)->capture_default_str();
  cmd->add_option("--efficiency-rho", dgp.efficiency_rho)->capture_default_str();
  cmd->add_option("--efficiency-coupling", dgp.efficiency_coupling,
                  "loading of log A in the user process")
      ->capture_default_str();
  cmd->add_option("--user-rho", dgp.user_rho)->capture_default_str();
  cmd->add_option("--user-sigma", dgp.user_sigma)->capture_default_str();
  cmd->add_option("--vacancy-slope", dgp.vacancy_slope)->capture_default_str();
  cmd->add_option("--vacancy-rho", dgp.vacancy_rho)->capture_default_str();
  cmd->add_option("--vacancy-sigma", dgp.vacancy_sigma)->capture_default_str();
  cmd->add_option("--noise-sd", dgp.noise_sd, "lognormal noise on H")->capture_default_str();
  cmd->add_option("--dgp-start", opt.dgp_start, "first simulated period")->capture_default_str();
  cmd->add_option("--seed", dgp.seed)->capture_default_str();
}

void resolve(CliOptions& opt, const std::string& subcommand) {
  auto& run = opt.run;
  run.subcommand = subcommand;
  run.kernel.transform = matchfn::transform_from_string(opt.transform);
  if (!opt.region.empty()) run.region = opt.region;
  if (opt.base_point == "median") {
    run.base_policy = matchfn::BasePointPolicy::median;
  } else {
    run.base_policy = matchfn::BasePointPolicy::period_specified;
    run.base_period = matchfn::Month::parse(opt.base_point);
  }
  auto colon = opt.psi_range.find(':');
  if (colon == std::string::npos)
    throw matchfn::ConfigError("--psi-range expects lo:hi, got '" + opt.psi_range + "'");
  try {
    run.psi_range_lo = std::stod(opt.psi_range.substr(0, colon));
    run.psi_range_hi = std::stod(opt.psi_range.substr(colon + 1));
  } catch (const std::exception&) {
    throw matchfn::ConfigError("--psi-range expects numeric lo:hi, got '" + opt.psi_range + "'");
  }
  if (!opt.baseline.empty()) run.baseline = matchfn::Month::parse(opt.baseline);
  run.dgp.efficiency_process = matchfn::efficiency_process_from_string(opt.efficiency_process);
  run.dgp.start_period = matchfn::Month::parse(opt.dgp_start);
  run.dgp.region = run.region;
  run.dgp.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric matching-function estimation from (users, vacancies, hires) panels"};
  app.require_subcommand(1);

  CliOptions opt;

  auto* diagnose = app.add_subcommand("diagnose", "market diagnostics and trend charts");
  auto* estimate = app.add_subcommand("estimate", "recover efficiency and elasticities");
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic ground-truth panel");
  auto* validate = app.add_subcommand("validate", "simulate, estimate, and score against truth");

  for (auto* cmd : {diagnose, estimate}) {
    cmd->add_option("--input", opt.run.input_path, "panel CSV")->required();
    cmd->add_option("--period-column", opt.run.schema.period)->capture_default_str();
    cmd->add_option("--region-column", opt.run.schema.region)->capture_default_str();
    cmd->add_option("--users-column", opt.run.schema.users)->capture_default_str();
    cmd->add_option("--vacancies-column", opt.run.schema.vacancies)->capture_default_str();
    cmd->add_option("--hires-column", opt.run.schema.hires)->capture_default_str();
  }
  for (auto* cmd : {diagnose, estimate, simulate, validate}) {
    cmd->add_option("--outdir", opt.run.outdir, "output directory")->capture_default_str();
    cmd->add_option("--region", opt.region, "restrict to one region label");
  }
  add_estimator_flags(estimate, opt);
  add_estimator_flags(validate, opt);
  add_dgp_flags(simulate, opt);
  add_dgp_flags(validate, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (diagnose->parsed()) {
      resolve(opt, "diagnose");
      return matchfn::run_diagnose(opt.run);
    }
    if (estimate->parsed()) {
      resolve(opt, "estimate");
      return matchfn::run_estimate(opt.run);
    }
    if (simulate->parsed()) {
      resolve(opt, "simulate");
      return matchfn::run_simulate(opt.run);
    }
    resolve(opt, "validate");
    return matchfn::run_validate(opt.run);
  } catch (const matchfn::Error& e) {
    std::cerr << "error [" << opt.run.subcommand << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}
