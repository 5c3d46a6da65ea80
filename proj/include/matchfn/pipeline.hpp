#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "matchfn/efficiency.hpp"
#include "matchfn/elasticity.hpp"
#include "matchfn/kernel_cdf.hpp"
#include "matchfn/panel.hpp"
#include "matchfn/synth.hpp"

namespace matchfn {

/// Fully-resolved run options shared by the CLI subcommands. Every run
/// writes a JSON echo of this next to its outputs.
struct RunConfig {
  std::string subcommand;
  std::string input_path;
  std::string outdir = ".";
  std::optional<std::string> region;
  ColumnSchema schema;

  KernelConfig kernel;
  std::size_t grid_psi = 200;
  std::size_t grid_lambda = 60;
  double psi_range_lo = 0.05;
  double psi_range_hi = 20.0;
  BasePointPolicy base_policy = BasePointPolicy::median;
  std::optional<Month> base_period;
  ProjectionOptions projection;
  std::optional<Month> baseline;  // default: first period per region

  DgpConfig dgp;

  std::string echo_json() const;
};

/// Result of the full per-region estimation pipeline (fit -> base point ->
/// trace -> invert -> project), independent of any file output.
struct EstimationResult {
  std::string region_label;  // empty for the aggregate
  EfficiencySeries efficiency;
  NormalizedSeries efficiency_index;
  std::vector<ElasticityEstimate> elasticities;
  BasePoint base;
};

EstimationResult estimate_region(const Panel& region_panel, const RunConfig& config);

int run_diagnose(const RunConfig& config);
int run_estimate(const RunConfig& config);
int run_simulate(const RunConfig& config);
int run_validate(const RunConfig& config, ValidationReport* out = nullptr);

/// Atomic text-file write: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace matchfn
