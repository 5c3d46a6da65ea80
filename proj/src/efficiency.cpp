#include "matchfn/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matchfn {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

TraceGrid TraceGrid::geometric(std::size_t n_psi, std::size_t n_lambda, double lo, double hi) {
  if (n_psi < 2 || n_lambda < 2) throw ConfigError("trace grid needs at least 2 points per axis");
  if (!(lo > 0) || !(hi > lo)) throw ConfigError("trace grid range must satisfy 0 < lo < hi");
  if (!(lo < 1 && hi > 1)) throw ConfigError("trace grid range must straddle 1");

  // grid_i = r^(i - m) with m the index nearest 1, so 1 is on the grid
  // exactly and the spacing is geometric by construction
  auto build = [&](std::size_t n) {
    double log_r = std::log(hi / lo) / static_cast<double>(n - 1);
    auto m = static_cast<long>(std::lround(std::log(1.0 / lo) / log_r));
    m = std::clamp<long>(m, 0, static_cast<long>(n - 1));
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
      values[i] = std::exp(static_cast<double>(static_cast<long>(i) - m) * log_r);
    return values;
  };
  TraceGrid grid;
  grid.psi_values = build(n_psi);
  grid.lambda_values = build(n_lambda);
  return grid;
}

namespace {

std::size_t index_of_one(const std::vector<double>& values) {
  auto it = std::find(values.begin(), values.end(), 1.0);
  if (it == values.end()) throw EstimationError("trace grid does not contain 1");
  return static_cast<std::size_t>(it - values.begin());
}

}  // namespace

std::size_t TraceGrid::psi_index_of_one() const { return index_of_one(psi_values); }
std::size_t TraceGrid::lambda_index_of_one() const { return index_of_one(lambda_values); }

double& EfficiencyDistribution::mono_at(std::size_t psi_i, std::size_t lambda_j) {
  return monotone[lambda_j * grid.psi_values.size() + psi_i];
}
double EfficiencyDistribution::mono_at(std::size_t psi_i, std::size_t lambda_j) const {
  return monotone[lambda_j * grid.psi_values.size() + psi_i];
}
double EfficiencyDistribution::raw_at(std::size_t psi_i, std::size_t lambda_j) const {
  return raw[lambda_j * grid.psi_values.size() + psi_i];
}

std::vector<double> pava_non_decreasing(std::vector<double> values) {
  const std::size_t n = values.size();
  std::vector<double> level;   // pooled block means
  std::vector<std::size_t> size;
  level.reserve(n);
  size.reserve(n);
  for (double v : values) {
    level.push_back(v);
    size.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      double merged = (level[level.size() - 2] * size[size.size() - 2] +
                       level.back() * size.back()) /
                      static_cast<double>(size[size.size() - 2] + size.back());
      size[size.size() - 2] += size.back();
      level[level.size() - 2] = merged;
      level.pop_back();
      size.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < level.size(); ++b)
    out.insert(out.end(), size[b], level[b]);
  return out;
}

BasePoint select_base_point(const Panel& panel, BasePointPolicy policy,
                            std::optional<Month> period) {
  if (panel.empty()) throw DataError("cannot select a base point from an empty panel");

  auto positive = [](const PanelObservation& o) {
    return o.users > 0 && o.vacancies > 0 && o.hires > 0;
  };

  const PanelObservation* chosen = nullptr;
  if (policy == BasePointPolicy::period_specified) {
    if (!period) throw ConfigError("base-point policy 'period' requires a period");
    for (const auto& obs : panel.observations)
      if (obs.period == *period) chosen = &obs;
    if (!chosen) throw DataError("base period " + period->str() + " not present in panel");
    if (!positive(*chosen))
      throw DataError("base observation at " + period->str() + " has a zero component");
  } else {
    // observation nearest (euclidean in log space) to the per-axis median
    std::vector<const PanelObservation*> candidates;
    for (const auto& obs : panel.observations)
      if (positive(obs)) candidates.push_back(&obs);
    if (candidates.empty())
      throw DataError("no observation with positive users, vacancies, and hires");
    auto median_of = [&](auto getter) {
      std::vector<double> vals;
      vals.reserve(candidates.size());
      for (const auto* o : candidates) vals.push_back(std::log(getter(*o)));
      std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
      return vals[vals.size() / 2];
    };
    double mu = median_of([](const PanelObservation& o) { return o.users; });
    double mv = median_of([](const PanelObservation& o) { return o.vacancies; });
    double best = std::numeric_limits<double>::infinity();
    for (const auto* o : candidates) {
      double du = std::log(o->users) - mu;
      double dv = std::log(o->vacancies) - mv;
      double d = du * du + dv * dv;
      if (d < best) {
        best = d;
        chosen = o;
      }
    }
  }
  return BasePoint{chosen->hires, chosen->users, chosen->vacancies, chosen->period,
                   chosen->region};
}

EfficiencyDistribution trace_distribution(const ConditionalCdfEstimator& estimator,
                                          const BasePoint& base, const TraceGrid& grid) {
  if (!(base.hires0 > 0 && base.users0 > 0 && base.vacancies0 > 0))
    throw EstimationError("base point must have strictly positive components");

  const std::size_t n_psi = grid.psi_values.size();
  const std::size_t n_lambda = grid.lambda_values.size();

  EfficiencyDistribution dist;
  dist.grid = grid;
  dist.raw.assign(n_psi * n_lambda, kNan);
  dist.in_support.assign(n_psi * n_lambda, false);
  std::vector<std::size_t> dead_per_column(n_lambda, 0);

  parallel_for(n_lambda, [&](std::size_t j) {
    const double lambda = grid.lambda_values[j];
    const double u = lambda * base.users0;
    std::vector<double> column(n_psi, kNan);
    for (std::size_t i = 0; i < n_psi; ++i) {
      const double psi = grid.psi_values[i];
      // F(psi A0 | lambda U0) = G(psi lambda H0 | lambda U0, psi lambda V0):
      // scaling (H, V) by psi*lambda and U by lambda moves A by psi under
      // CRS, so the degenerate constant-A case steps at psi = 1 for every
      // lambda
      try {
        column[i] = estimator.conditional_cdf(psi * lambda * base.hires0, u,
                                              psi * lambda * base.vacancies0);
        dist.in_support[j * n_psi + i] = true;
      } catch (const OutOfSupportError&) {
        // classified below from the cell's position in the column
      }
    }
    // out-of-support cells below the data band are at the CDF's lower
    // limit, those above at the upper limit; interior holes interpolate
    long first = -1, last = -1;
    for (std::size_t i = 0; i < n_psi; ++i)
      if (!std::isnan(column[i])) {
        if (first < 0) first = static_cast<long>(i);
        last = static_cast<long>(i);
      }
    if (first < 0) {
      dead_per_column[j] = n_psi;  // whole column unusable
    } else {
      for (long i = 0; i < first; ++i) column[i] = 0.0;
      for (long i = last + 1; i < static_cast<long>(n_psi); ++i) column[i] = 1.0;
      for (long i = first + 1; i < last; ++i) {
        if (!std::isnan(column[i])) continue;
        long next = i + 1;
        while (std::isnan(column[next])) ++next;
        double x0 = std::log(grid.psi_values[i - 1]);
        double x1 = std::log(grid.psi_values[next]);
        for (long k = i; k < next; ++k) {
          double t = (std::log(grid.psi_values[k]) - x0) / (x1 - x0);
          column[k] = column[i - 1] + t * (column[next] - column[i - 1]);
        }
        i = next;
      }
    }
    for (std::size_t i = 0; i < n_psi; ++i) dist.raw[j * n_psi + i] = column[i];
  });

  std::size_t dead = 0;
  for (auto d : dead_per_column) dead += d;
  dist.unusable_cells = dead;
  if (dead * 2 > n_psi * n_lambda)
    throw EstimationError(
        "trace failed: more than half of the grid cells are outside the data "
        "support; narrow the psi/lambda range");

  dist.monotone = dist.raw;
  for (std::size_t j = 0; j < n_lambda; ++j) {
    if (dead_per_column[j] == n_psi) continue;
    std::vector<double> col(dist.monotone.begin() + j * n_psi,
                            dist.monotone.begin() + (j + 1) * n_psi);
    col = pava_non_decreasing(std::move(col));
    for (std::size_t i = 0; i < n_psi; ++i)
      dist.monotone[j * n_psi + i] = std::clamp(col[i], 0.0, 1.0);
  }
  dist.monotonized = true;
  return dist;
}

namespace {

struct ColumnBlend {
  std::size_t j0, j1;
  double weight;  // on j1
  bool clamped;
};

// geometric interpolation position between lambda columns
ColumnBlend locate_lambda(const TraceGrid& grid, double lambda_star) {
  const auto& lam = grid.lambda_values;
  if (lambda_star <= lam.front()) return {0, 0, 0.0, lambda_star < lam.front()};
  if (lambda_star >= lam.back())
    return {lam.size() - 1, lam.size() - 1, 0.0, lambda_star > lam.back()};
  std::size_t j1 = static_cast<std::size_t>(
      std::lower_bound(lam.begin(), lam.end(), lambda_star) - lam.begin());
  if (lam[j1] == lambda_star) return {j1, j1, 0.0, false};
  std::size_t j0 = j1 - 1;
  double w = std::log(lambda_star / lam[j0]) / std::log(lam[j1] / lam[j0]);
  return {j0, j1, w, false};
}

struct Inversion {
  double psi;
  bool interior;  // false when the probability fell on a filled boundary
};

// generalized inverse of a monotone probability column, linear in
// probability between cells, geometric in psi
Inversion invert_column(const TraceGrid& grid, const std::vector<double>& column,
                        const std::vector<char>& supported, double p) {
  const auto& psi = grid.psi_values;
  const std::size_t n = psi.size();
  std::size_t i = 0;
  while (i < n && column[i] < p) ++i;
  if (i == 0) return {psi.front(), false};
  if (i == n) return {psi.back(), false};
  bool interior = supported.empty() || supported[i] || supported[i - 1];
  if (column[i] == p && column[i] > column[i - 1]) return {psi[i], interior};
  double denom = column[i] - column[i - 1];
  double t = denom > 0 ? (p - column[i - 1]) / denom : 0.5;
  double log_psi = std::log(psi[i - 1]) + t * (std::log(psi[i]) - std::log(psi[i - 1]));
  return {std::exp(log_psi), interior};
}

std::vector<double> blended_column(const EfficiencyDistribution& dist, const ColumnBlend& blend) {
  const std::size_t n = dist.grid.psi_values.size();
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = dist.mono_at(i, blend.j0);
    double b = dist.mono_at(i, blend.j1);
    col[i] = (1.0 - blend.weight) * a + blend.weight * b;
  }
  return col;
}

std::vector<char> blended_support(const EfficiencyDistribution& dist, const ColumnBlend& blend) {
  const std::size_t n = dist.grid.psi_values.size();
  std::vector<char> s(n);
  for (std::size_t i = 0; i < n; ++i)
    s[i] = dist.in_support[blend.j0 * n + i] || dist.in_support[blend.j1 * n + i];
  return s;
}

}  // namespace

EfficiencySeries recover_efficiency(const ConditionalCdfEstimator& estimator,
                                    const EfficiencyDistribution& distribution,
                                    const Panel& panel, const BasePoint& base) {
  if (!distribution.monotonized)
    throw EstimationError("distribution must be monotonized before inversion");
  if (panel.empty()) throw DataError("cannot recover efficiency from an empty panel");

  EfficiencySeries series;
  series.base = base;
  series.entries.resize(panel.size());

  parallel_for(panel.size(), [&](std::size_t k) {
    const auto& obs = panel.observations[k];
    EfficiencyEntry entry;
    entry.period = obs.period;
    entry.region = obs.region;
    try {
      double p = estimator.conditional_cdf(obs.hires, obs.users, obs.vacancies);
      ColumnBlend blend = locate_lambda(distribution.grid, obs.users / base.users0);
      auto col = blended_column(distribution, blend);
      auto sup = blended_support(distribution, blend);
      Inversion inv = invert_column(distribution.grid, col, sup, p);
      entry.efficiency = inv.psi;
      entry.in_range = inv.interior && !blend.clamped;
    } catch (const OutOfSupportError&) {
      entry.efficiency = kNan;
      entry.in_range = false;
    }
    series.entries[k] = entry;
  });

  // re-anchor so the base observation sits exactly at A = 1; the level of
  // A is only identified up to this normalization anyway
  double base_value = kNan;
  for (const auto& e : series.entries)
    if (e.period == base.period && e.region == base.region) base_value = e.efficiency;
  if (std::isfinite(base_value) && base_value > 0) {
    for (auto& e : series.entries)
      if (std::isfinite(e.efficiency)) e.efficiency /= base_value;
  }
  return series;
}

MatchingSurface recover_matching_surface(const ConditionalCdfEstimator& estimator,
                                         const EfficiencyDistribution& distribution,
                                         const BasePoint& base) {
  if (!distribution.monotonized)
    throw EstimationError("distribution must be monotonized before use");
  // the recovered series is re-anchored so the base observation sits at
  // A = 1; apply the same anchor to the psi axis so surface(recovered A)
  // round-trips the base-relative units
  double scale = 1.0;
  try {
    double p0 = estimator.conditional_cdf(base.hires0, base.users0, base.vacancies0);
    ColumnBlend blend = locate_lambda(distribution.grid, 1.0);
    Inversion inv = invert_column(distribution.grid, blended_column(distribution, blend),
                                  blended_support(distribution, blend), p0);
    if (std::isfinite(inv.psi) && inv.psi > 0) scale = inv.psi;
  } catch (const OutOfSupportError&) {
  }
  return MatchingSurface(&estimator, &distribution, base, scale);
}

MatchingSurface::Result MatchingSurface::evaluate(double a, double u, double v) const {
  const auto& dist = *distribution_;
  const auto& psi = dist.grid.psi_values;
  a *= base_scale_;
  ColumnBlend blend = locate_lambda(dist.grid, u / base_.users0);
  auto col = blended_column(dist, blend);

  // forward read of F(a | u): same piecewise-linear-in-log-psi shape the
  // inversion uses, so surface(recovered A) round-trips
  double p;
  bool flagged = blend.clamped;
  if (a <= psi.front()) {
    p = col.front();
    flagged = true;
  } else if (a >= psi.back()) {
    p = col.back();
    flagged = true;
  } else {
    std::size_t i = static_cast<std::size_t>(
        std::lower_bound(psi.begin(), psi.end(), a) - psi.begin());
    if (psi[i] == a) {
      p = col[i];
    } else {
      double t = (std::log(a) - std::log(psi[i - 1])) / (std::log(psi[i]) - std::log(psi[i - 1]));
      p = col[i - 1] + t * (col[i] - col[i - 1]);
    }
  }

  try {
    return {estimator_->conditional_quantile(p, u, v), !flagged};
  } catch (const OutOfSupportError&) {
    // fall back to the nearest sample point in transformed coordinates
    auto [qu, qv] = estimator_->transform_point(u, v);
    const auto& sample = estimator_->sample();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_t = 0;
    for (std::size_t t = 0; t < sample.size(); ++t) {
      auto [su, sv] = estimator_->transform_point(sample[t].users, sample[t].vacancies);
      double d = (su - qu) * (su - qu) + (sv - qv) * (sv - qv);
      if (d < best) {
        best = d;
        best_t = t;
      }
    }
    double h = estimator_->conditional_quantile(p, sample[best_t].users, sample[best_t].vacancies);
    return {h, false};
  }
}

}  // namespace matchfn
