#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "matchfn/panel.hpp"

using namespace matchfn;

TEST_CASE("ingest: minimal well-formed file") {
  std::istringstream in(
      "period,users,vacancies,hires\n"
      "2019-12,100,80,60\n"
      "2020-01,110,90,70\n");
  Panel p = ingest_panel(in);
  REQUIRE(p.size() == 2);
  CHECK(p.gaps.empty());
  CHECK(p.observations[0].period == Month{2019, 12});
  CHECK(p.observations[1].users == 110);
  CHECK(!p.observations[0].region.has_value());
}

TEST_CASE("ingest: missing month lands in the gap list") {
  std::istringstream in(
      "period,users,vacancies,hires\n"
      "2019-12,100,80,60\n"
      "2020-02,110,90,70\n");
  Panel p = ingest_panel(in);
  REQUIRE(p.size() == 2);
  REQUIRE(p.gaps.size() == 1);
  CHECK(p.gaps[0].period == Month{2020, 1});
}

TEST_CASE("ingest: header-only file is an empty-input error") {
  std::istringstream in("period,users,vacancies,hires\n");
  CHECK_THROWS_AS(ingest_panel(in), DataError);
}

TEST_CASE("ingest: missing required column names the column") {
  std::istringstream in("period,users,hires\n2019-12,1,2\n");
  CHECK_THROWS_WITH_AS(ingest_panel(in), doctest::Contains("vacancies"), DataError);
}

TEST_CASE("ingest: duplicate (period, region) keys rejected") {
  std::istringstream in(
      "period,region,users,vacancies,hires\n"
      "2019-12,Tokyo,1,2,3\n"
      "2019-12,Tokyo,4,5,6\n"
      "2019-12,Osaka,1,1,1\n");
  CHECK_THROWS_WITH_AS(ingest_panel(in), doctest::Contains("2019-12"), DataError);
}

TEST_CASE("ingest: bad rows are reported, good rows survive") {
  std::istringstream in(
      "period,users,vacancies,hires\n"
      "2019-12,100,80,60\n"
      "2020-01,-5,80,60\n"
      "2020-02,abc,80,60\n"
      "2020-03,100,80,60\n");
  IngestReport report;
  Panel p = ingest_panel(in, {}, &report);
  CHECK(p.size() == 2);
  REQUIRE(report.row_errors.size() == 2);
  CHECK(report.row_errors[0].line == 3);
}

TEST_CASE("ingest: hires above users is legal (spot work)") {
  std::istringstream in("period,users,vacancies,hires\n2023-05,100,162.5,130\n");
  Panel p = ingest_panel(in);
  CHECK(p.observations[0].hires == 130);
}

TEST_CASE("ingest: column remapping") {
  std::istringstream in("month,U,V,H\n2019-12,1,2,3\n");
  ColumnSchema schema;
  schema.period = "month";
  schema.users = "U";
  schema.vacancies = "V";
  schema.hires = "H";
  Panel p = ingest_panel(in, schema);
  CHECK(p.observations[0].vacancies == 2);
}

TEST_CASE("serialize then ingest is the identity on valid panels") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1e6);
  for (int rep = 0; rep < 20; ++rep) {
    Panel p;
    int n = 1 + static_cast<int>(rng() % 40);
    int offset = 0;
    for (int i = 0; i < n; ++i) {
      PanelObservation obs;
      offset += 1 + static_cast<int>(rng() % 3);
      obs.period = Month{2015, 1} + offset;
      if (rep % 2) obs.region = (i % 2) ? "Tokyo" : "Osaka";
      obs.users = unif(rng);
      obs.vacancies = unif(rng);
      obs.hires = unif(rng);
      p.observations.push_back(obs);
    }
    std::sort(p.observations.begin(), p.observations.end(),
              [](const auto& a, const auto& b) {
                auto ka = std::make_pair(a.region.value_or(""), a.period.index());
                auto kb = std::make_pair(b.region.value_or(""), b.period.index());
                return ka < kb;
              });
    std::stringstream buf;
    serialize_panel(p, buf);
    Panel q = ingest_panel(buf);
    REQUIRE(q.size() == p.size());
    for (std::size_t i = 0; i < p.observations.size(); ++i)
      CHECK(q.observations[i] == p.observations[i]);
  }
}

TEST_CASE("diagnostics: equal stocks") {
  Panel p;
  p.observations.push_back({Month{2020, 1}, std::nullopt, 100, 100, 80});
  auto d = compute_diagnostics(p);
  REQUIRE(d.size() == 1);
  CHECK(*d[0].tightness == doctest::Approx(1.0));
  CHECK(*d[0].job_finding_rate == doctest::Approx(0.8));
  CHECK(*d[0].worker_finding_rate == doctest::Approx(0.8));
}

TEST_CASE("diagnostics: platform-style regime with job rate above one") {
  Panel p;
  p.observations.push_back({Month{2023, 5}, std::nullopt, 100, 162.5, 130});
  auto d = compute_diagnostics(p);
  CHECK(*d[0].job_finding_rate == doctest::Approx(1.3));
  CHECK(*d[0].worker_finding_rate == doctest::Approx(0.8));
}

TEST_CASE("diagnostics: zero denominators flagged, not zero-filled") {
  Panel p;
  p.observations.push_back({Month{2020, 1}, std::nullopt, 0, 50, 0});
  auto d = compute_diagnostics(p);
  CHECK(!d[0].tightness.has_value());
  CHECK(!d[0].job_finding_rate.has_value());
  CHECK(*d[0].worker_finding_rate == doctest::Approx(0.0));
}

TEST_CASE("diagnostics arithmetic is exact on random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.001, 1e7);
  Panel p;
  for (int i = 0; i < 500; ++i)
    p.observations.push_back({Month{2000, 1} + i, std::nullopt, unif(rng), unif(rng), unif(rng)});
  auto d = compute_diagnostics(p);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& obs = p.observations[i];
    CHECK(std::abs(*d[i].tightness * obs.users - obs.vacancies) <=
          1e-12 * obs.vacancies);
    CHECK(std::abs(*d[i].job_finding_rate * obs.users - obs.hires) <= 1e-12 * obs.hires);
    CHECK(std::abs(*d[i].worker_finding_rate * obs.vacancies - obs.hires) <=
          1e-12 * obs.hires);
  }
}

TEST_CASE("normalize_to_baseline: direct division") {
  std::vector<std::pair<Month, double>> s = {{Month{2019, 12}, 2.0}, {Month{2020, 1}, 3.0}};
  auto n = normalize_to_baseline(s, Month{2019, 12});
  CHECK(n.values[0].second == 1.0);
  CHECK(n.values[1].second == doctest::Approx(1.5));
}

TEST_CASE("normalize_to_baseline: constant series becomes all ones") {
  std::vector<std::pair<Month, double>> s;
  for (int i = 0; i < 12; ++i) s.emplace_back(Month{2020, 1} + i, 4.2);
  auto n = normalize_to_baseline(s, Month{2020, 6});
  for (const auto& [m, v] : n.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("normalize_to_baseline: sevenfold rise shows as index 7") {
  std::vector<std::pair<Month, double>> s = {{Month{2019, 12}, 0.5}, {Month{2023, 5}, 3.5}};
  auto n = normalize_to_baseline(s, Month{2019, 12});
  CHECK(n.values[1].second == doctest::Approx(7.0));
}

TEST_CASE("normalize_to_baseline: errors") {
  std::vector<std::pair<Month, double>> s = {{Month{2020, 1}, 2.0}};
  CHECK_THROWS_WITH_AS(normalize_to_baseline(s, Month{2020, 2}), doctest::Contains("2020-02"),
                       DataError);
  std::vector<std::pair<Month, double>> z = {{Month{2020, 1}, 0.0}};
  CHECK_THROWS_AS(normalize_to_baseline(z, Month{2020, 1}), DataError);
}

TEST_CASE("normalize_to_baseline is idempotent") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.1, 100.0);
  std::vector<std::pair<Month, double>> s;
  for (int i = 0; i < 30; ++i) s.emplace_back(Month{2019, 1} + i, unif(rng));
  auto once = normalize_to_baseline(s, Month{2019, 5});
  auto twice = normalize_to_baseline(once.values, Month{2019, 5});
  for (std::size_t i = 0; i < once.values.size(); ++i)
    CHECK(twice.values[i].second == once.values[i].second);
}

TEST_CASE("month parsing round-trips and rejects junk") {
  CHECK(Month::parse("2019-12") == Month{2019, 12});
  CHECK(Month::parse("2019-12").str() == "2019-12");
  CHECK((Month{2019, 12} + 1) == Month{2020, 1});
  CHECK_THROWS_AS(Month::parse("2019-13"), DataError);
  CHECK_THROWS_AS(Month::parse("hello"), DataError);
}
