#include "matchfn/elasticity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

namespace matchfn {

namespace {

struct Row {
  const PanelObservation* obs;
  double efficiency;  // NaN when unavailable
};

// (period -> efficiency) lookup for one region
std::map<int, double> efficiency_by_period(const EfficiencySeries& efficiency,
                                           const std::optional<std::string>& region) {
  std::map<int, double> out;
  for (const auto& e : efficiency.entries) {
    if (e.region != region) continue;
    out[e.period.index()] = e.in_range ? e.efficiency
                                       : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

struct WindowSpan {
  int start;  // month index, inclusive
  int end;
};

// centered window of `length` months containing `center`, truncated to the
// sample span; length 0 means the whole sample
WindowSpan window_span(int center, int length, int sample_start, int sample_end) {
  if (length <= 0) return {sample_start, sample_end};
  int start = center - length / 2;
  int end = start + length - 1;
  if (start < sample_start) {
    end = std::min(sample_end, end + (sample_start - start));
    start = sample_start;
  }
  if (end > sample_end) {
    start = std::max(sample_start, start - (end - sample_end));
    end = sample_end;
  }
  return {start, end};
}

struct Lsq {
  double beta_au, beta_v, intercept, rss;
  std::size_t n;
};

Lsq solve_projection(const std::vector<Row>& rows, bool intercept, const std::string& where) {
  std::vector<std::array<double, 3>> x;  // (AU, V, 1)
  std::vector<double> y;
  for (const auto& r : rows) {
    if (!std::isfinite(r.efficiency)) continue;
    x.push_back({r.efficiency * r.obs->users, r.obs->vacancies, 1.0});
    y.push_back(r.obs->hires);
  }
  if (x.size() < 3)
    throw EstimationError("insufficient window: " + std::to_string(x.size()) +
                          " usable observations (need 3) in " + where);

  const std::size_t dim = intercept ? 3 : 2;
  double g[3][3] = {};
  double b[3] = {};
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) g[i][j] += x[k][i] * x[k][j];
      b[i] += x[k][i] * y[k];
    }
  }

  // gaussian elimination with partial pivoting; singular design = collinear
  std::array<std::size_t, 3> perm = {0, 1, 2};
  double scale = 0;
  for (std::size_t i = 0; i < dim; ++i) scale = std::max(scale, std::abs(g[i][i]));
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < dim; ++r)
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    if (piv != col) {
      std::swap(perm[piv], perm[col]);
      for (std::size_t c = 0; c < dim; ++c) std::swap(g[piv][c], g[col][c]);
      std::swap(b[piv], b[col]);
    }
    if (std::abs(g[col][col]) <= 1e-12 * scale)
      throw EstimationError("collinear regressors (A*U proportional to V) in " + where);
    for (std::size_t r = col + 1; r < dim; ++r) {
      double f = g[r][col] / g[col][col];
      for (std::size_t c = col; c < dim; ++c) g[r][c] -= f * g[col][c];
      b[r] -= f * b[col];
    }
  }
  double beta[3] = {};
  for (std::size_t i = dim; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < dim; ++j) acc -= g[i][j] * beta[j];
    beta[i] = acc / g[i][i];
  }

  Lsq out{beta[0], beta[1], intercept ? beta[2] : 0.0, 0.0, x.size()};
  for (std::size_t k = 0; k < x.size(); ++k) {
    double fit = out.beta_au * x[k][0] + out.beta_v * x[k][1] + out.intercept;
    out.rss += (y[k] - fit) * (y[k] - fit);
  }
  return out;
}

std::vector<Row> collect_window(const Panel& panel, const std::map<int, double>& eff,
                                const std::optional<std::string>& region, WindowSpan span) {
  std::vector<Row> rows;
  for (const auto& obs : panel.observations) {
    if (obs.region != region) continue;
    int idx = obs.period.index();
    if (idx < span.start || idx > span.end) continue;
    auto it = eff.find(idx);
    double a = it == eff.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
    rows.push_back({&obs, a});
  }
  return rows;
}

WindowSpan region_span(const Panel& panel, const std::optional<std::string>& region) {
  int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
  for (const auto& obs : panel.observations) {
    if (obs.region != region) continue;
    lo = std::min(lo, obs.period.index());
    hi = std::max(hi, obs.period.index());
  }
  if (lo > hi) throw DataError("region has no observations");
  return {lo, hi};
}

}  // namespace

ProjectionFit fit_local_projection(const Panel& panel, const EfficiencySeries& efficiency,
                                   Month center, const ProjectionOptions& options) {
  const auto& region = efficiency.base.region;
  auto eff = efficiency_by_period(efficiency, region);
  WindowSpan sample = region_span(panel, region);
  WindowSpan span = window_span(center.index(), options.window_length, sample.start, sample.end);
  auto rows = collect_window(panel, eff, region, span);
  Lsq sol = solve_projection(rows, options.intercept,
                             "window " + Month::from_index(span.start).str() + ".." +
                                 Month::from_index(span.end).str());
  ProjectionFit fit;
  fit.window_start = Month::from_index(span.start);
  fit.window_end = Month::from_index(span.end);
  fit.beta_au = sol.beta_au;
  fit.beta_v = sol.beta_v;
  fit.intercept = sol.intercept;
  fit.intercept_used = options.intercept;
  fit.rss = sol.rss;
  fit.n_obs = sol.n;
  return fit;
}

std::vector<ElasticityEstimate> elasticity_series(const Panel& panel,
                                                  const EfficiencySeries& efficiency,
                                                  const ProjectionOptions& options) {
  const auto& region = efficiency.base.region;
  auto eff = efficiency_by_period(efficiency, region);

  std::vector<ElasticityEstimate> out;
  for (const auto& obs : panel.observations) {
    if (obs.region != region) continue;
    ElasticityEstimate est;
    est.period = obs.period;
    est.region = obs.region;
    try {
      ProjectionFit fit = fit_local_projection(panel, efficiency, obs.period, options);
      est.beta_au = fit.beta_au;
      est.beta_v = fit.beta_v;
      est.window_start = fit.window_start;
      est.window_end = fit.window_end;
      auto it = eff.find(obs.period.index());
      double a = it == eff.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
      // the footnote formula evaluated at the period's own levels
      if (obs.hires > 0 && std::isfinite(a)) {
        est.elasticity_au = fit.beta_au * a * obs.users / obs.hires;
        est.elasticity_v = fit.beta_v * obs.vacancies / obs.hires;
      }
    } catch (const EstimationError&) {
      // window unusable for this period; elasticities stay flagged
    }
    out.push_back(est);
  }
  return out;
}

}  // namespace matchfn
