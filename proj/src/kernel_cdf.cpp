#include "matchfn/kernel_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matchfn {

CoordinateTransform transform_from_string(const std::string& name) {
  if (name == "log-range" || name == "log_range_scale") return CoordinateTransform::log_range_scale;
  if (name == "range" || name == "range_scale") return CoordinateTransform::range_scale;
  if (name == "identity") return CoordinateTransform::identity;
  throw ConfigError("unknown transform '" + name + "' (expected log-range, range, or identity)");
}

std::string to_string(CoordinateTransform t) {
  switch (t) {
    case CoordinateTransform::log_range_scale: return "log-range";
    case CoordinateTransform::range_scale: return "range";
    case CoordinateTransform::identity: return "identity";
  }
  return "?";
}

double ConditionalCdfEstimator::Axis::apply(double x) const {
  double v = log ? std::log(x) : x;
  return (v - offset) * scale;
}

ConditionalCdfEstimator ConditionalCdfEstimator::fit(const std::vector<SamplePoint>& sample,
                                                     const KernelConfig& config) {
  if (config.bandwidth <= 0) throw ConfigError("bandwidth must be positive");
  if (config.min_effective_weight < 0) throw ConfigError("min_effective_weight must be non-negative");
  if (sample.size() < 2)
    throw EstimationError("insufficient data: need at least 2 sample points, got " +
                          std::to_string(sample.size()));

  bool use_log = config.transform == CoordinateTransform::log_range_scale;
  if (use_log) {
    for (std::size_t i = 0; i < sample.size(); ++i) {
      if (!(sample[i].users > 0) || !(sample[i].vacancies > 0))
        throw EstimationError("log transform requires positive users and vacancies, violated at row " +
                              std::to_string(i));
    }
  }

  ConditionalCdfEstimator est;
  est.sample_ = sample;
  est.config_ = config;

  auto fit_axis = [&](auto getter) {
    Axis axis;
    axis.log = use_log;
    if (config.transform == CoordinateTransform::identity) return axis;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : sample) {
      double v = use_log ? std::log(getter(p)) : getter(p);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    axis.offset = lo;
    axis.scale = hi > lo ? 1.0 / (hi - lo) : 1.0;  // degenerate axis maps to 0
    return axis;
  };
  est.axis_u_ = fit_axis([](const SamplePoint& p) { return p.users; });
  est.axis_v_ = fit_axis([](const SamplePoint& p) { return p.vacancies; });

  est.tu_.reserve(sample.size());
  est.tv_.reserve(sample.size());
  for (const auto& p : sample) {
    est.tu_.push_back(est.axis_u_.apply(p.users));
    est.tv_.push_back(est.axis_v_.apply(p.vacancies));
  }
  est.order_.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) est.order_[i] = i;
  std::sort(est.order_.begin(), est.order_.end(), [&](std::size_t a, std::size_t b) {
    return sample[a].hires != sample[b].hires ? sample[a].hires < sample[b].hires : a < b;
  });
  return est;
}

std::array<double, 2> ConditionalCdfEstimator::transform_point(double u, double v) const {
  return {axis_u_.apply(u), axis_v_.apply(v)};
}

double ConditionalCdfEstimator::kernel_weight(double query_u, double query_v,
                                              std::size_t sample_index) const {
  auto [qu, qv] = transform_point(query_u, query_v);
  double h = config_.bandwidth;
  double du = (tu_[sample_index] - qu) / h;
  double dv = (tv_[sample_index] - qv) / h;
  double w = std::exp(-0.5 * (du * du + dv * dv));
  return w < config_.min_effective_weight ? 0.0 : w;
}

double ConditionalCdfEstimator::weights_at(double u, double v, std::vector<double>& weights) const {
  auto [qu, qv] = transform_point(u, v);
  const double inv_h = 1.0 / config_.bandwidth;
  weights.resize(sample_.size());
  for (std::size_t t = 0; t < sample_.size(); ++t) {
    double du = (tu_[t] - qu) * inv_h;
    double dv = (tv_[t] - qv) * inv_h;
    double w = std::exp(-0.5 * (du * du + dv * dv));
    if (w < config_.min_effective_weight) w = 0;
    weights[t] = w;
  }
  // accumulate in hires order: the cdf's full prefix sum then equals the
  // total exactly, keeping cdf values in [0, 1] to the last bit
  double total = 0;
  for (std::size_t idx : order_) total += weights[idx];
  return total;
}

double ConditionalCdfEstimator::total_weight(double u, double v) const {
  std::vector<double> w;
  return weights_at(u, v, w);
}

bool ConditionalCdfEstimator::in_support(double u, double v) const {
  return total_weight(u, v) > config_.min_effective_weight;
}

double ConditionalCdfEstimator::conditional_cdf(double h, double u, double v) const {
  std::vector<double> w;
  double total = weights_at(u, v, w);
  if (!(total > config_.min_effective_weight))
    throw OutOfSupportError("query (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") is outside the effective support of the sample");
  double acc = 0;
  for (std::size_t idx : order_) {
    if (!(sample_[idx].hires < h)) break;
    acc += w[idx];
  }
  return acc / total;
}

double ConditionalCdfEstimator::conditional_quantile(double p, double u, double v) const {
  if (p < 0 || p > 1)
    throw ConfigError("quantile level must lie in [0, 1], got " + std::to_string(p));
  std::vector<double> w;
  double total = weights_at(u, v, w);
  if (!(total > config_.min_effective_weight))
    throw OutOfSupportError("query (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") is outside the effective support of the sample");

  // walk the sample in hires order, merging ties, so the cumulative sums
  // reproduce conditional_cdf's partial sums exactly
  std::vector<double> hs, cum;  // distinct H and cumulative weight up to and including H
  for (std::size_t idx : order_) {
    double hv = sample_[idx].hires;
    if (!hs.empty() && hs.back() == hv) {
      cum.back() += w[idx];
    } else {
      hs.push_back(hv);
      cum.push_back((cum.empty() ? 0.0 : cum.back()) + w[idx]);
    }
  }
  // knots: (p_k, H_k) with p_k = cdf(H_k) = weight strictly below H_k
  // so quantile(cdf(H_k)) returns H_k exactly
  const std::size_t k_count = hs.size();
  auto knot_p = [&](std::size_t k) { return k == 0 ? 0.0 : cum[k - 1] / total; };
  if (p <= knot_p(0)) return hs.front();
  if (p >= knot_p(k_count - 1)) return hs.back();
  // binary search for the bracketing knots
  std::size_t lo = 0, hi = k_count - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (knot_p(mid) <= p) lo = mid; else hi = mid;
  }
  double p0 = knot_p(lo), p1 = knot_p(hi);
  if (p1 <= p0) return hs[hi];
  double t = (p - p0) / (p1 - p0);
  return hs[lo] + t * (hs[hi] - hs[lo]);
}

}  // namespace matchfn
