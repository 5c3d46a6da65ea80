#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "matchfn/pipeline.hpp"

namespace py = pybind11;
using namespace matchfn;

namespace {

// owns every piece the surface borrows from, so python lifetimes are safe
struct SurfaceHandle {
  std::shared_ptr<ConditionalCdfEstimator> estimator;
  EfficiencyDistribution distribution;
  BasePoint base;

  std::pair<double, bool> evaluate(double a, double u, double v) const {
    auto r = MatchingSurface(estimator.get(), &distribution, base).evaluate(a, u, v);
    return {r.hires, r.in_support};
  }
};

SurfaceHandle make_surface(const Panel& panel, double bandwidth, std::size_t grid_psi,
                           std::size_t grid_lambda, double psi_lo, double psi_hi) {
  RunConfig config;
  config.kernel.bandwidth = bandwidth;
  config.grid_psi = grid_psi;
  config.grid_lambda = grid_lambda;
  config.psi_range_lo = psi_lo;
  config.psi_range_hi = psi_hi;
  std::vector<SamplePoint> sample;
  for (const auto& obs : panel.observations)
    if (obs.users > 0 && obs.vacancies > 0) sample.push_back({obs.users, obs.vacancies, obs.hires});
  SurfaceHandle handle;
  handle.estimator = std::make_shared<ConditionalCdfEstimator>(
      ConditionalCdfEstimator::fit(sample, config.kernel));
  handle.base = select_base_point(panel);
  TraceGrid grid = TraceGrid::geometric(grid_psi, grid_lambda, psi_lo, psi_hi);
  handle.distribution = trace_distribution(*handle.estimator, handle.base, grid);
  return handle;
}

Panel panel_from_rows(
    const std::vector<std::tuple<std::string, std::optional<std::string>, double, double, double>>&
        rows,
    const std::string& label) {
  // route through the CSV ingester so python callers get the same
  // validation, sorting, and gap reporting as the CLI
  std::ostringstream csv;
  csv << "period,region,users,vacancies,hires\n";
  csv.precision(17);
  for (const auto& [period, region, u, v, h] : rows)
    csv << period << ',' << region.value_or("") << ',' << u << ',' << v << ',' << h << '\n';
  std::istringstream in(csv.str());
  Panel p = ingest_panel(in);
  p.label = label;
  return p;
}

}  // namespace

PYBIND11_MODULE(_matchfn, m) {
  m.doc() = "Nonparametric matching-function estimation core";

  py::register_exception<OutOfSupportError>(m, "OutOfSupportError");
  static py::exception<Error> base_exc(m, "MatchfnError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const OutOfSupportError&) {
      throw;  // handled by the registered exception above
    } catch (const Error& e) {
      py::set_error(base_exc, e.what());
    }
  });

  py::class_<Month>(m, "Month")
      .def(py::init(&Month::parse))
      .def_readonly("year", &Month::year)
      .def_readonly("month", &Month::month)
      .def("__str__", &Month::str)
      .def("__repr__", [](const Month& mo) { return "Month('" + mo.str() + "')"; })
      .def("__eq__", [](const Month& a, const Month& b) { return a == b; })
      .def("__lt__", [](const Month& a, const Month& b) { return a < b; });

  py::class_<PanelObservation>(m, "PanelObservation")
      .def_readonly("period", &PanelObservation::period)
      .def_readonly("region", &PanelObservation::region)
      .def_readonly("users", &PanelObservation::users)
      .def_readonly("vacancies", &PanelObservation::vacancies)
      .def_readonly("hires", &PanelObservation::hires);

  py::class_<Panel>(m, "Panel")
      .def(py::init(&panel_from_rows), py::arg("rows"), py::arg("label") = "python",
           "rows: iterable of (period 'YYYY-MM', region or None, users, vacancies, hires)")
      .def_readonly("observations", &Panel::observations)
      .def_readonly("label", &Panel::label)
      .def("__len__", &Panel::size)
      .def_property_readonly("gaps", [](const Panel& p) {
        std::vector<std::string> out;
        for (const auto& g : p.gaps) out.push_back(g.period.str());
        return out;
      });

  m.def("load_panel", [](const std::string& path) { return ingest_panel_file(path); },
        py::arg("path"));

  py::class_<MarketDiagnostics>(m, "MarketDiagnostics")
      .def_readonly("period", &MarketDiagnostics::period)
      .def_readonly("tightness", &MarketDiagnostics::tightness)
      .def_readonly("job_finding_rate", &MarketDiagnostics::job_finding_rate)
      .def_readonly("worker_finding_rate", &MarketDiagnostics::worker_finding_rate);
  m.def("compute_diagnostics", &compute_diagnostics);

  py::class_<KernelConfig>(m, "KernelConfig")
      .def(py::init([](double bandwidth, const std::string& transform, double min_weight) {
             return KernelConfig{bandwidth, transform_from_string(transform), min_weight};
           }),
           py::arg("bandwidth") = 0.01, py::arg("transform") = "log-range",
           py::arg("min_effective_weight") = 1e-12)
      .def_readonly("bandwidth", &KernelConfig::bandwidth);

  py::class_<ConditionalCdfEstimator>(m, "ConditionalCdfEstimator")
      .def_static(
          "fit",
          [](const std::vector<std::tuple<double, double, double>>& sample,
             const KernelConfig& config) {
            std::vector<SamplePoint> pts;
            pts.reserve(sample.size());
            for (const auto& [u, v, h] : sample) pts.push_back({u, v, h});
            return ConditionalCdfEstimator::fit(pts, config);
          },
          py::arg("sample"), py::arg("config") = KernelConfig{})
      .def("cdf", &ConditionalCdfEstimator::conditional_cdf, py::arg("h"), py::arg("u"),
           py::arg("v"))
      .def("quantile", &ConditionalCdfEstimator::conditional_quantile, py::arg("p"),
           py::arg("u"), py::arg("v"))
      .def("in_support", &ConditionalCdfEstimator::in_support)
      .def("__len__", &ConditionalCdfEstimator::size);

  py::class_<EfficiencyEntry>(m, "EfficiencyEntry")
      .def_readonly("period", &EfficiencyEntry::period)
      .def_readonly("region", &EfficiencyEntry::region)
      .def_readonly("efficiency", &EfficiencyEntry::efficiency)
      .def_readonly("in_range", &EfficiencyEntry::in_range);

  py::class_<ElasticityEstimate>(m, "ElasticityEstimate")
      .def_readonly("period", &ElasticityEstimate::period)
      .def_readonly("elasticity_au", &ElasticityEstimate::elasticity_au)
      .def_readonly("elasticity_v", &ElasticityEstimate::elasticity_v)
      .def_readonly("beta_au", &ElasticityEstimate::beta_au)
      .def_readonly("beta_v", &ElasticityEstimate::beta_v);

  py::class_<EstimationResult>(m, "EstimationResult")
      .def_property_readonly("efficiency",
                             [](const EstimationResult& r) { return r.efficiency.entries; })
      .def_readonly("elasticities", &EstimationResult::elasticities)
      .def_property_readonly("base_period",
                             [](const EstimationResult& r) { return r.base.period; })
      .def_property_readonly("efficiency_index", [](const EstimationResult& r) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& [mo, v] : r.efficiency_index.values) out.emplace_back(mo.str(), v);
        return out;
      });

  m.def(
      "estimate",
      [](const Panel& panel, double bandwidth, const std::string& transform,
         std::size_t grid_psi, std::size_t grid_lambda, double psi_lo, double psi_hi,
         int window, const std::optional<std::string>& baseline,
         const std::optional<std::string>& base_period) {
        RunConfig config;
        config.kernel.bandwidth = bandwidth;
        config.kernel.transform = transform_from_string(transform);
        config.grid_psi = grid_psi;
        config.grid_lambda = grid_lambda;
        config.psi_range_lo = psi_lo;
        config.psi_range_hi = psi_hi;
        config.projection.window_length = window;
        if (baseline) config.baseline = Month::parse(*baseline);
        if (base_period) {
          config.base_policy = BasePointPolicy::period_specified;
          config.base_period = Month::parse(*base_period);
        }
        return estimate_region(panel, config);
      },
      py::arg("panel"), py::arg("bandwidth") = 0.01, py::arg("transform") = "log-range",
      py::arg("grid_psi") = 200, py::arg("grid_lambda") = 60, py::arg("psi_lo") = 0.05,
      py::arg("psi_hi") = 20.0, py::arg("window") = 12, py::arg("baseline") = std::nullopt,
      py::arg("base_period") = std::nullopt,
      "Run the full estimation pipeline on a single-region panel.");

  py::class_<SurfaceHandle>(m, "MatchingSurface")
      .def("evaluate", &SurfaceHandle::evaluate, py::arg("a"), py::arg("u"), py::arg("v"),
           "Returns (hires, in_support) for the matching function at (a, u, v).")
      .def_property_readonly("base_period",
                             [](const SurfaceHandle& s) { return s.base.period; });
  m.def("recover_surface", &make_surface, py::arg("panel"), py::arg("bandwidth") = 0.01,
        py::arg("grid_psi") = 200, py::arg("grid_lambda") = 60, py::arg("psi_lo") = 0.05,
        py::arg("psi_hi") = 20.0,
        "Fit the estimator, trace the efficiency distribution, and expose the "
        "recovered matching surface.");

  py::class_<DgpConfig>(m, "DgpConfig")
      .def(py::init<>())
      .def_readwrite("periods", &DgpConfig::periods)
      .def_readwrite("alpha", &DgpConfig::alpha)
      .def_readwrite("mu", &DgpConfig::mu)
      .def_readwrite("efficiency_sigma", &DgpConfig::efficiency_sigma)
      .def_readwrite("efficiency_rho", &DgpConfig::efficiency_rho)
      .def_readwrite("efficiency_coupling", &DgpConfig::efficiency_coupling)
      .def_readwrite("user_rho", &DgpConfig::user_rho)
      .def_readwrite("user_sigma", &DgpConfig::user_sigma)
      .def_readwrite("vacancy_slope", &DgpConfig::vacancy_slope)
      .def_readwrite("vacancy_rho", &DgpConfig::vacancy_rho)
      .def_readwrite("vacancy_sigma", &DgpConfig::vacancy_sigma)
      .def_readwrite("noise_sd", &DgpConfig::noise_sd)
      .def_readwrite("seed", &DgpConfig::seed)
      .def_property(
          "efficiency_process",
          [](const DgpConfig& c) { return to_string(c.efficiency_process); },
          [](DgpConfig& c, const std::string& s) {
            c.efficiency_process = efficiency_process_from_string(s);
          });

  py::class_<SyntheticTruth>(m, "SyntheticTruth")
      .def_readonly("period", &SyntheticTruth::period)
      .def_readonly("efficiency", &SyntheticTruth::efficiency)
      .def_readonly("matches", &SyntheticTruth::matches);

  py::class_<SyntheticPanel>(m, "SyntheticPanel")
      .def_readonly("panel", &SyntheticPanel::panel)
      .def_readonly("truth", &SyntheticPanel::truth);
  m.def("generate", &generate, py::arg("config"));

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("correlation_log_a", &ValidationReport::correlation_log_a)
      .def_readonly("mae_log_a", &ValidationReport::mae_log_a)
      .def_readonly("elasticity_au_dev", &ValidationReport::elasticity_au_dev)
      .def_readonly("elasticity_v_dev", &ValidationReport::elasticity_v_dev)
      .def("passed", &ValidationReport::passed);
  m.def("oracle_report", &oracle_report, py::arg("synthetic"), py::arg("recovered"),
        py::arg("elasticities"), py::arg("window_length") = 12);
  m.def(
      "validate",
      [](const DgpConfig& dgp, double bandwidth, int window, double psi_lo, double psi_hi) {
        RunConfig config;
        config.subcommand = "validate";
        config.dgp = dgp;
        config.kernel.bandwidth = bandwidth;
        config.projection.window_length = window;
        config.psi_range_lo = psi_lo;
        config.psi_range_hi = psi_hi;
        SyntheticPanel synthetic = generate(dgp);
        EstimationResult result = estimate_region(synthetic.panel, config);
        return oracle_report(synthetic, result.efficiency, result.elasticities,
                             std::max(1, window));
      },
      py::arg("dgp") = DgpConfig{}, py::arg("bandwidth") = 0.01, py::arg("window") = 12,
      py::arg("psi_lo") = 0.05, py::arg("psi_hi") = 20.0,
      "Simulate, estimate, and score against the generator's truth.");
}
