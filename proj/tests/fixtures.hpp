#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "matchfn/pipeline.hpp"
#include "matchfn/synth.hpp"

namespace fixtures {

// the Monte Carlo recovery fixture: random-walk efficiency, market size
// coupled to efficiency, persistent vacancy noise wide enough to cover the
// traced support
inline matchfn::DgpConfig recovery_dgp(std::size_t periods = 2000, double alpha = 0.5,
                                       std::uint64_t seed = 1) {
  matchfn::DgpConfig dgp;
  dgp.periods = periods;
  dgp.alpha = alpha;
  dgp.mu = 0.8;
  dgp.efficiency_process = matchfn::EfficiencyProcess::log_random_walk;
  dgp.efficiency_sigma = 0.05;
  dgp.seed = seed;
  return dgp;
}

// constant-efficiency fixture: tight market noise so the recovered series
// should be flat; pair with constant_run() for the narrow psi window where
// the step is identified
inline matchfn::DgpConfig constant_dgp(std::size_t periods = 500, std::uint64_t seed = 2) {
  matchfn::DgpConfig dgp = recovery_dgp(periods, 0.5, seed);
  dgp.efficiency_process = matchfn::EfficiencyProcess::constant;
  dgp.user_sigma = 0.01;
  dgp.vacancy_sigma = 0.05;
  dgp.vacancy_rho = 0.8;
  return dgp;
}

// surface-recovery fixture: wide independent variation in market size and
// vacancies (slope 1) so queries off the sample manifold — doubling (u, v)
// at fixed a — still fall inside the kernel support
inline matchfn::DgpConfig surface_dgp(std::size_t periods = 2500, std::uint64_t seed = 7) {
  matchfn::DgpConfig dgp = recovery_dgp(periods, 0.5, seed);
  dgp.user_sigma = 0.25;
  dgp.vacancy_sigma = 0.3;
  dgp.vacancy_slope = 1.0;
  dgp.vacancy_rho = 0.8;
  return dgp;
}

inline matchfn::RunConfig surface_run() {
  matchfn::RunConfig config;
  config.subcommand = "test";
  config.psi_range_lo = 0.2;
  config.psi_range_hi = 5.0;
  config.kernel.bandwidth = 0.02;
  return config;
}

inline matchfn::RunConfig default_run() {
  matchfn::RunConfig config;
  config.subcommand = "test";
  return config;
}

inline matchfn::RunConfig constant_run() {
  matchfn::RunConfig config = default_run();
  config.psi_range_lo = 0.9;
  config.psi_range_hi = 1.12;
  config.kernel.bandwidth = 0.02;
  return config;
}

// short panels do not cover the full default psi window; a narrower range
// keeps the traced grid inside the sampled band
inline matchfn::RunConfig narrow_run() {
  matchfn::RunConfig config;
  config.subcommand = "test";
  config.psi_range_lo = 0.1;
  config.psi_range_hi = 10.0;
  return config;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace fixtures
