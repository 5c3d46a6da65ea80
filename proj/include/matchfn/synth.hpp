#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matchfn/elasticity.hpp"
#include "matchfn/panel.hpp"

namespace matchfn {

enum class EfficiencyProcess { constant, log_random_walk, log_ar1 };

EfficiencyProcess efficiency_process_from_string(const std::string& name);
std::string to_string(EfficiencyProcess p);

/// Ground-truth CRS Cobb-Douglas generator: H = mu (A U)^alpha V^(1-alpha).
/// Vacancies depend on users only through an affine rule in logs plus noise
/// drawn from its own RNG stream, so V is independent of A given U.
struct DgpConfig {
  std::size_t periods = 2000;
  double alpha = 0.5;  // Cobb-Douglas exponent on AU, in (0, 1)
  double mu = 0.8;     // scale of the matching function

  EfficiencyProcess efficiency_process = EfficiencyProcess::log_random_walk;
  double efficiency_sigma = 0.05;  // innovation s.d. of log A
  double efficiency_rho = 0.95;    // AR(1) coefficient (log_ar1 only)

  // log U_t = user_log_mean + efficiency_coupling * log A_t + eta_t,
  // eta AR(1). Coupling > 0 makes market size respond to efficiency,
  // the endogeneity the estimator is built to tolerate.
  double user_log_mean = std::log(1000.0);
  double user_rho = 0.8;
  double user_sigma = 0.03;  // innovation s.d. of eta
  double efficiency_coupling = 1.0;

  // log V_t = vacancy_intercept + vacancy_slope * log U_t + eps_t,
  // eps AR(1) on its own stream (independent of the A shocks).
  // slope 2 keeps every lambda column of the efficiency trace inside the
  // data band: the column's visible psi window and its CDF transition both
  // move one-for-one with log lambda
  double vacancy_intercept = 0.0;
  double vacancy_slope = 2.0;
  double vacancy_rho = 0.9;
  double vacancy_sigma = 0.15;  // innovation s.d. of eps

  double noise_sd = 0.0;  // multiplicative lognormal noise on H
  bool cap_hires = false; // cap H at min(U, V) (flow-style data)

  Month start_period = Month{2010, 1};
  std::optional<std::string> region;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct SyntheticTruth {
  Month period;
  double efficiency = 0;  // A_t
  double matches = 0;     // mu (A_t U_t)^alpha V_t^(1-alpha), pre-noise
};

struct SyntheticPanel {
  Panel panel;
  std::vector<SyntheticTruth> truth;
  std::vector<double> vacancy_noise;  // eps_t, kept for the independence audit
  DgpConfig config;
};

SyntheticPanel generate(const DgpConfig& config);

struct ValidationReport {
  double correlation_log_a = 0;  // recovered vs true log A, base-normalized
  double mae_log_a = 0;
  double elasticity_au_dev = 0;  // mean |elasticity_au - alpha|, interior
  double elasticity_v_dev = 0;   // mean |elasticity_v - (1 - alpha)|
  std::size_t n_aligned = 0;
  std::size_t n_out_of_range = 0;
  std::size_t n_elasticity = 0;
  double alpha = 0;

  // thresholds the report was judged against
  double min_correlation = 0.95;
  double max_mae = 0.05;
  double max_elasticity_dev = 0.1;

  bool efficiency_ok() const {
    return correlation_log_a > min_correlation && mae_log_a < max_mae;
  }
  bool elasticity_ok() const {
    return elasticity_au_dev < max_elasticity_dev &&
           elasticity_v_dev < max_elasticity_dev;
  }
  bool passed() const { return efficiency_ok() && elasticity_ok(); }
};

/// Compares a recovered efficiency series and elasticities against the
/// generator's truth. Both efficiency series are renormalized at the
/// recovered series' base observation. Interior windows only for the
/// elasticity deviations.
ValidationReport oracle_report(const SyntheticPanel& synthetic,
                               const EfficiencySeries& recovered,
                               const std::vector<ElasticityEstimate>& elasticities,
                               int window_length = 12);

}  // namespace matchfn
