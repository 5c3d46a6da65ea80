#include "matchfn/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace matchfn {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_count(const std::string& text, const std::string& column) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw DataError("cannot parse " + column + " value '" + text + "'");
  }
  if (pos != text.size()) throw DataError("trailing junk in " + column + " value '" + text + "'");
  if (!std::isfinite(v) || v < 0) throw DataError(column + " must be finite and non-negative, got '" + text + "'");
  return v;
}

bool region_less(const std::optional<std::string>& a, const std::optional<std::string>& b) {
  if (a.has_value() != b.has_value()) return !a.has_value();
  if (!a) return false;
  return *a < *b;
}

}  // namespace

std::vector<std::string> Panel::regions() const {
  std::vector<std::string> out;
  for (const auto& obs : observations) {
    std::string r = obs.region.value_or("");
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  }
  return out;
}

Panel Panel::filter_region(const std::optional<std::string>& region) const {
  if (!region) return *this;
  Panel out;
  out.label = label;
  for (const auto& obs : observations)
    if (obs.region.value_or("") == *region) out.observations.push_back(obs);
  for (const auto& gap : gaps)
    if (gap.region.value_or("") == *region) out.gaps.push_back(gap);
  return out;
}

Panel ingest_panel(std::istream& source, const ColumnSchema& schema, IngestReport* report) {
  std::string header_line;
  if (!std::getline(source, header_line)) throw DataError("empty input: no header row");
  auto header = split_csv_line(header_line);
  for (auto& h : header) h = trim(h);

  auto find_col = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int c_period = find_col(schema.period);
  int c_users = find_col(schema.users);
  int c_vacancies = find_col(schema.vacancies);
  int c_hires = find_col(schema.hires);
  int c_region = find_col(schema.region);  // optional
  const std::vector<std::pair<int, std::string>> required = {
      {c_period, schema.period},
      {c_users, schema.users},
      {c_vacancies, schema.vacancies},
      {c_hires, schema.hires}};
  for (const auto& [col, name] : required) {
    if (col < 0) throw DataError("missing required column '" + name + "'");
  }

  Panel panel;
  std::string line;
  std::size_t lineno = 1;
  std::size_t data_rows = 0;
  while (std::getline(source, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ++data_rows;
    auto fields = split_csv_line(line);
    try {
      if (static_cast<int>(fields.size()) <= std::max({c_period, c_users, c_vacancies, c_hires}))
        throw DataError("row has too few fields");
      PanelObservation obs;
      obs.period = Month::parse(trim(fields[c_period]));
      if (c_region >= 0 && c_region < static_cast<int>(fields.size())) {
        std::string r = trim(fields[c_region]);
        if (!r.empty()) obs.region = r;
      }
      obs.users = parse_count(trim(fields[c_users]), schema.users);
      obs.vacancies = parse_count(trim(fields[c_vacancies]), schema.vacancies);
      obs.hires = parse_count(trim(fields[c_hires]), schema.hires);
      panel.observations.push_back(std::move(obs));
    } catch (const DataError& e) {
      if (report) report->row_errors.push_back({lineno, e.what()});
    }
  }
  if (data_rows == 0) throw DataError("empty input: header only, no data rows");
  if (panel.observations.empty())
    throw DataError("no valid rows survived ingestion (" +
                    std::to_string(report ? report->row_errors.size() : data_rows) +
                    " rejected)");

  std::stable_sort(panel.observations.begin(), panel.observations.end(),
                   [](const PanelObservation& a, const PanelObservation& b) {
                     if (a.region != b.region) return region_less(a.region, b.region);
                     return a.period < b.period;
                   });

  // duplicates
  std::vector<std::string> dups;
  for (std::size_t i = 1; i < panel.observations.size(); ++i) {
    const auto& a = panel.observations[i - 1];
    const auto& b = panel.observations[i];
    if (a.region == b.region && a.period == b.period)
      dups.push_back(b.period.str() + (b.region ? "/" + *b.region : ""));
  }
  if (!dups.empty()) {
    std::string msg = "duplicate (period, region) keys:";
    for (const auto& d : dups) msg += " " + d;
    throw DataError(msg);
  }

  // gap list per region
  for (std::size_t i = 1; i < panel.observations.size(); ++i) {
    const auto& a = panel.observations[i - 1];
    const auto& b = panel.observations[i];
    if (a.region != b.region) continue;
    for (int idx = a.period.index() + 1; idx < b.period.index(); ++idx)
      panel.gaps.push_back({Month::from_index(idx), a.region});
  }
  return panel;
}

Panel ingest_panel_file(const std::string& path, const ColumnSchema& schema, IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  Panel p = ingest_panel(in, schema, report);
  p.label = path;
  return p;
}

void serialize_panel(const Panel& panel, std::ostream& out, const ColumnSchema& schema) {
  bool has_region = std::any_of(panel.observations.begin(), panel.observations.end(),
                                [](const auto& o) { return o.region.has_value(); });
  out << schema.period;
  if (has_region) out << ',' << schema.region;
  out << ',' << schema.users << ',' << schema.vacancies << ',' << schema.hires << '\n';
  std::ostringstream num;
  num.precision(17);
  for (const auto& obs : panel.observations) {
    out << obs.period.str();
    if (has_region) out << ',' << obs.region.value_or("");
    num.str("");
    num << ',' << obs.users << ',' << obs.vacancies << ',' << obs.hires;
    out << num.str() << '\n';
  }
}

std::vector<MarketDiagnostics> compute_diagnostics(const Panel& panel) {
  if (panel.empty()) throw DataError("cannot compute diagnostics on an empty panel");
  std::vector<MarketDiagnostics> out;
  out.reserve(panel.size());
  for (const auto& obs : panel.observations) {
    MarketDiagnostics d;
    d.period = obs.period;
    d.region = obs.region;
    if (obs.users > 0) {
      d.tightness = obs.vacancies / obs.users;
      d.job_finding_rate = obs.hires / obs.users;
    }
    if (obs.vacancies > 0) d.worker_finding_rate = obs.hires / obs.vacancies;
    out.push_back(d);
  }
  return out;
}

NormalizedSeries normalize_to_baseline(const std::vector<std::pair<Month, double>>& series,
                                       Month baseline) {
  const std::pair<Month, double>* base = nullptr;
  for (const auto& p : series)
    if (p.first == baseline) base = &p;
  if (!base) throw DataError("baseline period " + baseline.str() + " not present in series");
  if (!(base->second > 0))
    throw DataError("baseline value at " + baseline.str() + " is not positive, cannot normalize");
  NormalizedSeries out;
  out.baseline_period = baseline;
  out.values.reserve(series.size());
  for (const auto& [period, value] : series)
    out.values.emplace_back(period, period == baseline ? 1.0 : value / base->second);
  return out;
}

}  // namespace matchfn
