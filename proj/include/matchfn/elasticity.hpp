#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matchfn/efficiency.hpp"
#include "matchfn/panel.hpp"

namespace matchfn {

/// Least-squares projection of hires on (A*U, V) over a window of periods.
struct ProjectionFit {
  Month window_start;
  Month window_end;  // inclusive
  double beta_au = 0;
  double beta_v = 0;
  double intercept = 0;
  bool intercept_used = false;
  double rss = 0;
  std::size_t n_obs = 0;
};

struct ElasticityEstimate {
  Month period;
  std::optional<std::string> region;
  // nullopt when H_t = 0 or efficiency is unavailable for the period
  std::optional<double> elasticity_au;  // beta_au * A_t U_t / H_t
  std::optional<double> elasticity_v;   // beta_v * V_t / H_t
  double beta_au = 0;
  double beta_v = 0;
  Month window_start;
  Month window_end;
};

struct ProjectionOptions {
  int window_length = 12;  // months; 0 = one global fit
  bool intercept = false;
};

ProjectionFit fit_local_projection(const Panel& panel,
                                   const EfficiencySeries& efficiency,
                                   Month center, const ProjectionOptions& options = {});

std::vector<ElasticityEstimate> elasticity_series(
    const Panel& panel, const EfficiencySeries& efficiency,
    const ProjectionOptions& options = {});

}  // namespace matchfn
