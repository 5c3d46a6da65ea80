#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "matchfn/common.hpp"

namespace matchfn {

enum class CoordinateTransform {
  log_range_scale,  // log, then min/max-scale each axis to [0, 1]
  range_scale,      // min/max-scale raw coordinates
  identity,
};

CoordinateTransform transform_from_string(const std::string& name);
std::string to_string(CoordinateTransform t);

struct KernelConfig {
  double bandwidth = 0.01;  // per axis, in transformed coordinates
  CoordinateTransform transform = CoordinateTransform::log_range_scale;
  double min_effective_weight = 1e-12;  // unnormalized weights below this are zero
};

struct SamplePoint {
  double users = 0;
  double vacancies = 0;
  double hires = 0;
};

/// Kernel-weighted empirical conditional CDF of H given (U, V).
///
/// The CDF at (h, u, v) is sum_t 1(H_t < h) w_t with bivariate normal
/// kernel weights w_t in the transformed (U, V) plane, normalized to sum
/// to one. The inequality is strict, so ties on H fall left of the step.
/// Immutable once fitted; queries are pure.
class ConditionalCdfEstimator {
public:
  static ConditionalCdfEstimator fit(const std::vector<SamplePoint>& sample,
                                     const KernelConfig& config = {});

  /// Unnormalized kernel weight of one sample point at a query, after the
  /// min_effective_weight truncation.
  double kernel_weight(double query_u, double query_v, std::size_t sample_index) const;

  double conditional_cdf(double h, double u, double v) const;

  /// Generalized inverse inf{h : cdf(h) >= p} on the weighted step
  /// function, linearly interpolated between steps so that
  /// quantile(cdf(H_t)) round-trips sample points.
  double conditional_quantile(double p, double u, double v) const;

  /// Total unnormalized weight at a query; support means total above the
  /// truncation threshold.
  double total_weight(double u, double v) const;
  bool in_support(double u, double v) const;

  std::array<double, 2> transform_point(double u, double v) const;

  const std::vector<SamplePoint>& sample() const noexcept { return sample_; }
  const KernelConfig& config() const noexcept { return config_; }
  std::size_t size() const noexcept { return sample_.size(); }

private:
  ConditionalCdfEstimator() = default;

  struct Axis {
    bool log = false;
    double offset = 0;
    double scale = 1;
    double apply(double x) const;
  };

  // weights[t] for every sample point at (u, v); returns total
  double weights_at(double u, double v, std::vector<double>& weights) const;

  std::vector<SamplePoint> sample_;
  KernelConfig config_;
  Axis axis_u_, axis_v_;
  std::vector<double> tu_, tv_;       // transformed sample coordinates
  std::vector<std::size_t> order_;    // indices sorted by hires; cdf and
                                      // quantile accumulate weights in this
                                      // order so their partial sums agree
                                      // bit for bit
};

}  // namespace matchfn
