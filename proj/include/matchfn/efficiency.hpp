#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matchfn/kernel_cdf.hpp"
#include "matchfn/panel.hpp"

namespace matchfn {

/// Anchor observation; efficiency is reported relative to A = 1 here.
struct BasePoint {
  double hires0 = 0;
  double users0 = 0;
  double vacancies0 = 0;
  Month period;
  std::optional<std::string> region;
};

enum class BasePointPolicy { median, period_specified };

/// Geometric grids of the two scaling factors: psi scales (A, H, V) and
/// lambda scales U. Both grids contain 1 exactly.
struct TraceGrid {
  std::vector<double> psi_values;
  std::vector<double> lambda_values;

  static TraceGrid geometric(std::size_t n_psi = 200, std::size_t n_lambda = 60,
                             double lo = 0.05, double hi = 20.0);

  std::size_t psi_index_of_one() const;
  std::size_t lambda_index_of_one() const;
};

/// F[psi_i, lambda_j] = estimated F(psi A0 | lambda U0), traced through
/// the conditional CDF of hires. Stored row-major: psi varies fastest.
struct EfficiencyDistribution {
  TraceGrid grid;
  std::vector<double> raw;        // before monotonization; NaN where unclassifiable
  std::vector<double> monotone;   // PAVA-corrected along psi per lambda column
  std::vector<bool> in_support;   // cell evaluated directly from data
  bool monotonized = false;
  std::size_t unusable_cells = 0;

  double& mono_at(std::size_t psi_i, std::size_t lambda_j);
  double mono_at(std::size_t psi_i, std::size_t lambda_j) const;
  double raw_at(std::size_t psi_i, std::size_t lambda_j) const;
};

struct EfficiencyEntry {
  Month period;
  std::optional<std::string> region;
  double efficiency = 0;  // A_t relative to A0 = 1
  bool in_range = true;   // false when clamped to the trace-grid boundary
};

struct EfficiencySeries {
  std::vector<EfficiencyEntry> entries;
  BasePoint base;
};

/// Matching-function surface m(a, u, v): probability read off the traced
/// F(a | u), pushed through the conditional quantile at (u, v).
class MatchingSurface {
public:
  MatchingSurface(const ConditionalCdfEstimator* estimator,
                  const EfficiencyDistribution* distribution, BasePoint base,
                  double base_scale = 1.0)
      : estimator_(estimator),
        distribution_(distribution),
        base_(base),
        base_scale_(base_scale) {}

  struct Result {
    double hires = 0;
    bool in_support = true;  // false: nearest-support evaluation returned
  };
  Result evaluate(double a, double u, double v) const;

private:
  const ConditionalCdfEstimator* estimator_;
  const EfficiencyDistribution* distribution_;
  BasePoint base_;
  double base_scale_ = 1.0;  // raw psi of the base observation's inversion
};

BasePoint select_base_point(const Panel& panel,
                            BasePointPolicy policy = BasePointPolicy::median,
                            std::optional<Month> period = std::nullopt);

/// Evaluates F[psi_i, lambda_j] = cdf(psi H0 | lambda U0, psi V0) over the
/// grid, classifies out-of-support cells to their CDF limit where the psi
/// position determines it, then monotonizes each lambda column in psi.
/// Throws EstimationError when more than half the cells are unclassifiable.
EfficiencyDistribution trace_distribution(const ConditionalCdfEstimator& estimator,
                                          const BasePoint& base,
                                          const TraceGrid& grid);

/// Inverts the traced distribution at p_t = cdf(H_t | U_t, V_t) per
/// observation: lambda* = U_t/U0, geometric interpolation between lambda
/// columns, linear-in-probability inversion along psi.
EfficiencySeries recover_efficiency(const ConditionalCdfEstimator& estimator,
                                    const EfficiencyDistribution& distribution,
                                    const Panel& panel, const BasePoint& base);

MatchingSurface recover_matching_surface(const ConditionalCdfEstimator& estimator,
                                         const EfficiencyDistribution& distribution,
                                         const BasePoint& base);

/// Pool-adjacent-violators projection onto non-decreasing sequences
/// (least squares, unit weights).
std::vector<double> pava_non_decreasing(std::vector<double> values);

}  // namespace matchfn
