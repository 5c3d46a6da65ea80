#include "matchfn/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "matchfn/svg.hpp"

namespace matchfn {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
}

std::string RunConfig::echo_json() const {
  json j;
  j["subcommand"] = subcommand;
  j["input"] = input_path;
  j["outdir"] = outdir;
  if (region) j["region"] = *region;
  j["columns"] = {{"period", schema.period},
                  {"region", schema.region},
                  {"users", schema.users},
                  {"vacancies", schema.vacancies},
                  {"hires", schema.hires}};
  j["bandwidth"] = kernel.bandwidth;
  j["transform"] = to_string(kernel.transform);
  j["min_effective_weight"] = kernel.min_effective_weight;
  j["grid_psi"] = grid_psi;
  j["grid_lambda"] = grid_lambda;
  j["psi_range"] = {psi_range_lo, psi_range_hi};
  j["base_point"] = base_policy == BasePointPolicy::median
                        ? std::string("median")
                        : (base_period ? base_period->str() : std::string("?"));
  j["window"] = projection.window_length;
  j["intercept"] = projection.intercept;
  if (baseline) j["baseline"] = baseline->str();
  if (subcommand == "simulate" || subcommand == "validate") {
    j["dgp"] = {{"periods", dgp.periods},
                {"alpha", dgp.alpha},
                {"mu", dgp.mu},
                {"efficiency_process", to_string(dgp.efficiency_process)},
                {"efficiency_sigma", dgp.efficiency_sigma},
                {"efficiency_rho", dgp.efficiency_rho},
                {"user_log_mean", dgp.user_log_mean},
                {"user_rho", dgp.user_rho},
                {"user_sigma", dgp.user_sigma},
                {"efficiency_coupling", dgp.efficiency_coupling},
                {"vacancy_intercept", dgp.vacancy_intercept},
                {"vacancy_slope", dgp.vacancy_slope},
                {"vacancy_rho", dgp.vacancy_rho},
                {"vacancy_sigma", dgp.vacancy_sigma},
                {"noise_sd", dgp.noise_sd},
                {"cap_hires", dgp.cap_hires},
                {"start_period", dgp.start_period.str()},
                {"seed", dgp.seed}};
  }
  return j.dump(2) + "\n";
}

namespace {

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string csv_opt(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? csv_number(*v) : std::string();
}

void ensure_outdir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.outdir, ec);
  if (ec) throw IoError("cannot create output directory '" + config.outdir + "'");
}

void write_echo(const RunConfig& config) {
  ensure_outdir(config);
  write_file_atomic(fs::path(config.outdir) / (config.subcommand + "_config.json"),
                    config.echo_json());
}

Panel load_input(const RunConfig& config) {
  IngestReport report;
  Panel panel = ingest_panel_file(config.input_path, config.schema, &report);
  for (const auto& err : report.row_errors)
    std::cerr << "warning: " << config.input_path << ":" << err.line << ": " << err.message
              << "\n";
  if (config.region) {
    panel = panel.filter_region(config.region);
    if (panel.empty()) throw DataError("no observations for region '" + *config.region + "'");
  }
  return panel;
}

}  // namespace

int run_diagnose(const RunConfig& config) {
  write_echo(config);
  Panel panel = load_input(config);
  auto diagnostics = compute_diagnostics(panel);

  std::ostringstream csv;
  csv << "period,region,tightness,job_finding_rate,worker_finding_rate\n";
  for (const auto& d : diagnostics) {
    csv << d.period.str() << ',' << d.region.value_or("") << ',' << csv_opt(d.tightness)
        << ',' << csv_opt(d.job_finding_rate) << ',' << csv_opt(d.worker_finding_rate)
        << '\n';
  }
  fs::path out(config.outdir);
  write_file_atomic(out / "diagnostics.csv", csv.str());

  auto facet = [&](auto value_of, const std::string& title, const std::string& ylab,
                   const std::string& file) {
    LineChart chart;
    chart.title = title;
    chart.y_label = ylab;
    for (const auto& region : panel.regions()) {
      ChartSeries series;
      series.name = region.empty() ? "aggregate" : region;
      for (const auto& d : diagnostics)
        if (d.region.value_or("") == region) series.points.emplace_back(d.period, value_of(d));
      chart.series.push_back(std::move(series));
    }
    write_file_atomic(out / file, chart.render());
  };
  facet([](const MarketDiagnostics& d) { return d.tightness; }, "Labor market tightness",
        "V / U", "tightness.svg");
  {
    LineChart chart;
    chart.title = "Hires";
    chart.y_label = "H";
    for (const auto& region : panel.regions()) {
      ChartSeries series;
      series.name = region.empty() ? "aggregate" : region;
      for (const auto& obs : panel.observations)
        if (obs.region.value_or("") == region)
          series.points.emplace_back(obs.period, obs.hires);
      chart.series.push_back(std::move(series));
    }
    write_file_atomic(out / "hires.svg", chart.render());
  }
  {
    LineChart chart;
    chart.title = "Job and worker finding rates";
    chart.y_label = "rate";
    for (const auto& region : panel.regions()) {
      std::string tag = region.empty() ? "" : " (" + region + ")";
      ChartSeries job{"H/U" + tag, {}}, worker{"H/V" + tag, {}};
      for (const auto& d : diagnostics) {
        if (d.region.value_or("") != region) continue;
        job.points.emplace_back(d.period, d.job_finding_rate);
        worker.points.emplace_back(d.period, d.worker_finding_rate);
      }
      chart.series.push_back(std::move(job));
      chart.series.push_back(std::move(worker));
    }
    write_file_atomic(out / "finding_rates.svg", chart.render());
  }
  return 0;
}

EstimationResult estimate_region(const Panel& region_panel, const RunConfig& config) {
  EstimationResult result;
  result.region_label =
      region_panel.empty() ? "" : region_panel.observations.front().region.value_or("");

  std::vector<SamplePoint> sample;
  bool needs_positive = config.kernel.transform == CoordinateTransform::log_range_scale;
  for (const auto& obs : region_panel.observations) {
    if (needs_positive && !(obs.users > 0 && obs.vacancies > 0)) continue;
    sample.push_back({obs.users, obs.vacancies, obs.hires});
  }
  auto estimator = ConditionalCdfEstimator::fit(sample, config.kernel);

  result.base = select_base_point(region_panel, config.base_policy, config.base_period);
  TraceGrid grid = TraceGrid::geometric(config.grid_psi, config.grid_lambda,
                                        config.psi_range_lo, config.psi_range_hi);
  auto distribution = trace_distribution(estimator, result.base, grid);
  result.efficiency = recover_efficiency(estimator, distribution, region_panel, result.base);
  result.elasticities = elasticity_series(region_panel, result.efficiency, config.projection);

  std::vector<std::pair<Month, double>> series;
  for (const auto& e : result.efficiency.entries)
    if (std::isfinite(e.efficiency)) series.emplace_back(e.period, e.efficiency);
  if (series.empty()) throw EstimationError("no in-support efficiency values recovered");
  Month baseline = config.baseline.value_or(series.front().first);
  result.efficiency_index = normalize_to_baseline(series, baseline);
  return result;
}

int run_estimate(const RunConfig& config) {
  write_echo(config);
  Panel panel = load_input(config);

  std::vector<EstimationResult> results;
  for (const auto& region : panel.regions()) {
    Panel sub = panel.filter_region(region.empty() ? std::optional<std::string>{""}
                                                   : std::optional<std::string>{region});
    // filter_region("") matches the aggregate rows (no region label)
    if (sub.size() < 24)
      std::cerr << "warning: region '" << (region.empty() ? "aggregate" : region)
                << "' has only " << sub.size() << " observations (< 24); proceeding\n";
    results.push_back(estimate_region(sub, config));
  }

  fs::path out(config.outdir);
  std::ostringstream eff;
  eff << "period,region,efficiency,efficiency_index,support_flag\n";
  for (const auto& r : results) {
    std::map<int, double> index;
    for (const auto& [m, v] : r.efficiency_index.values) index[m.index()] = v;
    for (const auto& e : r.efficiency.entries) {
      auto it = index.find(e.period.index());
      eff << e.period.str() << ',' << r.region_label << ','
          << (std::isfinite(e.efficiency) ? csv_number(e.efficiency) : std::string()) << ','
          << (it != index.end() ? csv_number(it->second) : std::string()) << ','
          << (std::isfinite(e.efficiency) ? (e.in_range ? "in" : "out") : "out") << '\n';
    }
  }
  write_file_atomic(out / "efficiency.csv", eff.str());

  std::ostringstream ela;
  ela << "period,region,elasticity_au,elasticity_v,beta_au,beta_v,window_start,window_end\n";
  for (const auto& r : results) {
    for (const auto& e : r.elasticities) {
      ela << e.period.str() << ',' << r.region_label << ',' << csv_opt(e.elasticity_au)
          << ',' << csv_opt(e.elasticity_v) << ',' << csv_number(e.beta_au) << ','
          << csv_number(e.beta_v) << ',' << e.window_start.str() << ',' << e.window_end.str()
          << '\n';
    }
  }
  write_file_atomic(out / "elasticity.csv", ela.str());

  {
    LineChart chart;
    chart.title = "Matching efficiency (baseline = 1)";
    chart.y_label = "A index";
    for (const auto& r : results) {
      ChartSeries s;
      s.name = r.region_label.empty() ? "aggregate" : r.region_label;
      for (const auto& [m, v] : r.efficiency_index.values) s.points.emplace_back(m, v);
      chart.series.push_back(std::move(s));
    }
    write_file_atomic(out / "efficiency.svg", chart.render());
  }
  {
    LineChart chart;
    chart.title = "Matching elasticities";
    chart.y_label = "elasticity";
    for (const auto& r : results) {
      std::string tag = r.region_label.empty() ? "" : " (" + r.region_label + ")";
      ChartSeries au{"d ln m / d ln AU" + tag, {}}, ev{"d ln m / d ln V" + tag, {}};
      for (const auto& e : r.elasticities) {
        au.points.emplace_back(e.period, e.elasticity_au);
        ev.points.emplace_back(e.period, e.elasticity_v);
      }
      chart.series.push_back(std::move(au));
      chart.series.push_back(std::move(ev));
    }
    write_file_atomic(out / "elasticity.svg", chart.render());
  }
  return 0;
}

int run_simulate(const RunConfig& config) {
  write_echo(config);
  SyntheticPanel synthetic = generate(config.dgp);

  std::ostringstream panel_csv;
  serialize_panel(synthetic.panel, panel_csv, config.schema);

  std::ostringstream truth_csv;
  truth_csv << "period,true_efficiency,true_matches\n";
  for (const auto& t : synthetic.truth)
    truth_csv << t.period.str() << ',' << csv_number(t.efficiency) << ','
              << csv_number(t.matches) << '\n';

  fs::path out(config.outdir);
  write_file_atomic(out / "panel.csv", panel_csv.str());
  write_file_atomic(out / "truth.csv", truth_csv.str());
  return 0;
}

int run_validate(const RunConfig& config, ValidationReport* out_report) {
  write_echo(config);
  SyntheticPanel synthetic = generate(config.dgp);

  EstimationResult result = estimate_region(synthetic.panel, config);
  ValidationReport report = oracle_report(synthetic, result.efficiency, result.elasticities,
                                          std::max(1, config.projection.window_length));
  if (out_report) *out_report = report;

  json j;
  j["correlation_log_a"] = report.correlation_log_a;
  j["mae_log_a"] = report.mae_log_a;
  j["elasticity_au_dev"] = report.elasticity_au_dev;
  j["elasticity_v_dev"] = report.elasticity_v_dev;
  j["alpha"] = report.alpha;
  j["elasticity_targets"] = {report.alpha, 1.0 - report.alpha};
  j["n_aligned"] = report.n_aligned;
  j["n_out_of_range"] = report.n_out_of_range;
  j["n_elasticity"] = report.n_elasticity;
  j["thresholds"] = {{"min_correlation", report.min_correlation},
                     {"max_mae", report.max_mae},
                     {"max_elasticity_dev", report.max_elasticity_dev}};
  j["efficiency_ok"] = report.efficiency_ok();
  j["elasticity_ok"] = report.elasticity_ok();
  j["passed"] = report.passed();
  write_file_atomic(fs::path(config.outdir) / "validation.json", j.dump(2) + "\n");

  std::cout << "metric                         value      threshold   status\n";
  auto row = [](const std::string& name, double value, const std::string& threshold,
                bool ok) {
    std::ostringstream os;
    os.precision(4);
    os << name;
    os << std::string(name.size() < 30 ? 30 - name.size() : 1, ' ');
    os << value << "     " << threshold << "   " << (ok ? "ok" : "FAIL");
    std::cout << os.str() << "\n";
  };
  row("correlation(log A)", report.correlation_log_a,
      "> " + std::to_string(report.min_correlation), report.correlation_log_a > report.min_correlation);
  row("MAE(log A)", report.mae_log_a, "< " + std::to_string(report.max_mae),
      report.mae_log_a < report.max_mae);
  row("mean |el_au - alpha|", report.elasticity_au_dev,
      "< " + std::to_string(report.max_elasticity_dev),
      report.elasticity_au_dev < report.max_elasticity_dev);
  row("mean |el_v - (1-alpha)|", report.elasticity_v_dev,
      "< " + std::to_string(report.max_elasticity_dev),
      report.elasticity_v_dev < report.max_elasticity_dev);
  std::cout << "verdict: " << (report.passed() ? "PASS" : "FAIL") << "\n";
  return report.passed() ? 0 : 1;
}

}  // namespace matchfn
