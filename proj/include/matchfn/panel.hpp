#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matchfn/common.hpp"

namespace matchfn {

/// One period x region record of the observable aggregates.
struct PanelObservation {
  Month period;
  std::optional<std::string> region;  // absent for national aggregate
  double users = 0;      // U, active job seekers (monthly stock)
  double vacancies = 0;  // V, posted vacancies
  double hires = 0;      // H, realized matches; may exceed U

  friend bool operator==(const PanelObservation&, const PanelObservation&) = default;
};

/// Months missing inside a region's observed span. Reported, never filled.
struct PanelGap {
  Month period;
  std::optional<std::string> region;
};

struct Panel {
  std::vector<PanelObservation> observations;  // sorted by (region, period)
  std::vector<PanelGap> gaps;
  std::string label;

  bool empty() const noexcept { return observations.empty(); }
  std::size_t size() const noexcept { return observations.size(); }

  std::vector<std::string> regions() const;
  Panel filter_region(const std::optional<std::string>& region) const;
};

struct MarketDiagnostics {
  Month period;
  std::optional<std::string> region;
  // nullopt = denominator was zero; never zero-filled
  std::optional<double> tightness;            // V/U
  std::optional<double> job_finding_rate;     // H/U
  std::optional<double> worker_finding_rate;  // H/V
};

struct NormalizedSeries {
  Month baseline_period;
  std::vector<std::pair<Month, double>> values;  // index = value / value(baseline)
};

struct ColumnSchema {
  std::string period = "period";
  std::string region = "region";  // optional in the data
  std::string users = "users";
  std::string vacancies = "vacancies";
  std::string hires = "hires";
};

/// Rows that failed validation, with the reason. An ingest succeeds as long
/// as at least the well-formed rows survive; callers inspect the report.
struct RowError {
  std::size_t line = 0;  // 1-based line number in the source
  std::string message;
};

struct IngestReport {
  std::vector<RowError> row_errors;
};

/// Parses a CSV stream into a validated, sorted Panel.
/// Throws DataError for missing columns, duplicate (period, region) keys,
/// or an empty data section. Per-row value problems go to `report`.
Panel ingest_panel(std::istream& source, const ColumnSchema& schema = {},
                   IngestReport* report = nullptr);
Panel ingest_panel_file(const std::string& path, const ColumnSchema& schema = {},
                        IngestReport* report = nullptr);

void serialize_panel(const Panel& panel, std::ostream& out,
                     const ColumnSchema& schema = {});

std::vector<MarketDiagnostics> compute_diagnostics(const Panel& panel);

NormalizedSeries normalize_to_baseline(
    const std::vector<std::pair<Month, double>>& series, Month baseline);

}  // namespace matchfn
