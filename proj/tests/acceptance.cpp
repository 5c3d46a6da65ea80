// Acceptance gate: one pass/fail line per criterion, strict tolerances.
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "matchfn/pipeline.hpp"

using namespace matchfn;
namespace fs = std::filesystem;

namespace {

void verdict(int criterion, const std::string& name, bool ok) {
  std::printf("criterion %d (%s): %s\n", criterion, name.c_str(), ok ? "PASS" : "FAIL");
  std::fflush(stdout);
}

struct FixtureRun {
  SyntheticPanel synthetic;
  EstimationResult result;
  ValidationReport report;
  double seconds = 0;
};

const FixtureRun& monte_carlo_run(double alpha) {
  static std::map<double, FixtureRun> cache;
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;

  FixtureRun run;
  run.synthetic = generate(fixtures::recovery_dgp(2000, alpha, 1));
  auto t0 = std::chrono::steady_clock::now();
  run.result = estimate_region(run.synthetic.panel, fixtures::default_run());
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.report = oracle_report(run.synthetic, run.result.efficiency, run.result.elasticities);
  return cache.emplace(alpha, std::move(run)).first->second;
}

}  // namespace

TEST_CASE("1: Monte Carlo efficiency recovery") {
  const auto& run = monte_carlo_run(0.5);
  bool ok = run.report.correlation_log_a > 0.95 && run.report.mae_log_a < 0.05 &&
            run.seconds < 60.0;
  verdict(1, "monte carlo efficiency recovery", ok);
  CHECK(run.report.correlation_log_a > 0.95);
  CHECK(run.report.mae_log_a < 0.05);
  CHECK(run.seconds < 60.0);
}

TEST_CASE("2: elasticity recovery at alpha 0.3, 0.5, 0.7") {
  bool ok = true;
  for (double alpha : {0.3, 0.5, 0.7}) {
    const auto& run = monte_carlo_run(alpha);
    CHECK(run.report.elasticity_au_dev < 0.1);
    CHECK(run.report.elasticity_v_dev < 0.1);
    ok = ok && run.report.elasticity_au_dev < 0.1 && run.report.elasticity_v_dev < 0.1;
  }
  verdict(2, "rolling-window elasticity recovery", ok);
}

TEST_CASE("3: constant-efficiency degeneracy") {
  auto synthetic = generate(fixtures::constant_dgp(500));
  auto result = estimate_region(synthetic.panel, fixtures::constant_run());
  std::vector<double> values;
  for (const auto& e : result.efficiency.entries)
    if (std::isfinite(e.efficiency)) values.push_back(e.efficiency);
  REQUIRE(!values.empty());
  double mean = 0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  double cv = std::sqrt(var / values.size()) / mean;
  verdict(3, "constant-efficiency degeneracy", cv < 0.02);
  CHECK(cv < 0.02);
}

TEST_CASE("4: normalization at the base and baseline points") {
  bool ok = true;
  auto check_fixture = [&](const EstimationResult& result) {
    double at_base = std::nan("");
    for (const auto& e : result.efficiency.entries)
      if (e.period == result.base.period) at_base = e.efficiency;
    CHECK(std::abs(at_base - 1.0) <= 1e-6);
    ok = ok && std::abs(at_base - 1.0) <= 1e-6;
    double at_baseline = std::nan("");
    for (const auto& [m, v] : result.efficiency_index.values)
      if (m == result.efficiency_index.baseline_period) at_baseline = v;
    CHECK(at_baseline == 1.0);
    ok = ok && at_baseline == 1.0;
  };
  check_fixture(monte_carlo_run(0.5).result);
  check_fixture(monte_carlo_run(0.3).result);
  auto constant = generate(fixtures::constant_dgp(500));
  check_fixture(estimate_region(constant.panel, fixtures::constant_run()));
  verdict(4, "normalization", ok);
}

TEST_CASE("5: scale equivariance under a common factor of 10") {
  auto synthetic = generate(fixtures::recovery_dgp(400, 0.5, 9));
  auto base = estimate_region(synthetic.panel, fixtures::narrow_run());
  Panel scaled = synthetic.panel;
  for (auto& obs : scaled.observations) {
    obs.users *= 10.0;
    obs.vacancies *= 10.0;
    obs.hires *= 10.0;
  }
  auto rescaled = estimate_region(scaled, fixtures::narrow_run());
  REQUIRE(base.efficiency_index.values.size() == rescaled.efficiency_index.values.size());
  double worst = 0;
  for (std::size_t i = 0; i < base.efficiency_index.values.size(); ++i)
    worst = std::max(worst, std::abs(base.efficiency_index.values[i].second -
                                     rescaled.efficiency_index.values[i].second));
  verdict(5, "scale equivariance", worst <= 1e-6);
  CHECK(worst <= 1e-6);
}

TEST_CASE("6: conditional CDF properties on 50 randomized fixtures") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(1.0, 1000.0);
  bool ok = true;
  for (int fixture = 0; fixture < 50; ++fixture) {
    std::size_t n = 40 + rng() % 200;
    std::vector<SamplePoint> sample;
    for (std::size_t i = 0; i < n; ++i) sample.push_back({unif(rng), unif(rng), unif(rng)});
    KernelConfig cfg;
    cfg.bandwidth = 0.05 + 0.002 * fixture;
    auto est = ConditionalCdfEstimator::fit(sample, cfg);
    const auto& q = sample[fixture % n];

    double total = est.total_weight(q.users, q.vacancies);
    double acc = 0;
    for (std::size_t t = 0; t < n; ++t) acc += est.kernel_weight(q.users, q.vacancies, t);
    bool weights_ok = std::abs(acc / total - 1.0) <= 1e-12;

    bool monotone_ok = true;
    double prev = -1;
    for (int k = 0; k <= 1000; ++k) {
      double p = est.conditional_cdf(1100.0 * k / 1000.0, q.users, q.vacancies);
      monotone_ok = monotone_ok && p >= prev && p >= 0.0 && p <= 1.0;
      prev = p;
    }

    bool roundtrip_ok = true;
    for (const auto& s : sample) {
      double p = est.conditional_cdf(s.hires, s.users, s.vacancies);
      if (p <= 0.0 || p >= 1.0) continue;
      double h = est.conditional_quantile(p, s.users, s.vacancies);
      roundtrip_ok = roundtrip_ok && std::abs(h - s.hires) <= 1e-9 * std::max(1.0, s.hires);
    }
    CHECK(weights_ok);
    CHECK(monotone_ok);
    CHECK(roundtrip_ok);
    ok = ok && weights_ok && monotone_ok && roundtrip_ok;
  }
  verdict(6, "cdf monotonicity, weights, round-trip", ok);
}

TEST_CASE("7: exact linear projection") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(10.0, 500.0);
  Panel panel;
  EfficiencySeries efficiency;
  for (int i = 0; i < 24; ++i) {
    Month m = Month{2020, 1} + i;
    double a = 0.5 + (rng() % 1000) / 1000.0;
    double u = unif(rng), v = unif(rng);
    panel.observations.push_back({m, std::nullopt, u, v, 0.3 * a * u + 0.5 * v});
    efficiency.entries.push_back({m, std::nullopt, a, true});
  }
  auto fit = fit_local_projection(panel, efficiency, Month{2020, 12});
  bool ok = std::abs(fit.beta_au - 0.3) <= 1e-10 && std::abs(fit.beta_v - 0.5) <= 1e-10;
  verdict(7, "exact linear projection", ok);
  CHECK(fit.beta_au == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(fit.beta_v == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("8: diagnostics arithmetic") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0.001, 1e8);
  Panel panel;
  for (int i = 0; i < 1000; ++i)
    panel.observations.push_back(
        {Month{1990, 1} + i, std::nullopt, unif(rng), unif(rng), unif(rng)});
  auto d = compute_diagnostics(panel);
  bool ok = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& obs = panel.observations[i];
    ok = ok && std::abs(*d[i].tightness - obs.vacancies / obs.users) <=
                   1e-12 * (obs.vacancies / obs.users);
    ok = ok && std::abs(*d[i].job_finding_rate - obs.hires / obs.users) <=
                   1e-12 * (obs.hires / obs.users);
    ok = ok && std::abs(*d[i].worker_finding_rate - obs.hires / obs.vacancies) <=
                   1e-12 * (obs.hires / obs.vacancies);
  }
  Panel zero;
  zero.observations.push_back({Month{2020, 1}, std::nullopt, 0, 0, 5});
  auto dz = compute_diagnostics(zero);
  ok = ok && !dz[0].tightness && !dz[0].job_finding_rate && !dz[0].worker_finding_rate;
  verdict(8, "diagnostics arithmetic", ok);
  CHECK(ok);
}

namespace {

int shell(const std::string& cmd) {
  int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("9: byte-identical outputs across consecutive runs") {
  fs::path root = fs::temp_directory_path() / ("matchfn_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  bool ok = true;
  std::string cli = MATCHFN_CLI_PATH;
  for (const char* tag : {"a", "b"}) {
    fs::path dir = root / tag;
    fs::create_directories(dir);
    ok = ok && shell(cli + " simulate --outdir " + dir.string() +
                     " --periods 800 --alpha 0.5 --seed 5") == 0;
    ok = ok && shell(cli + " estimate --input " + (dir / "panel.csv").string() +
                     " --outdir " + dir.string() + " --psi-range 0.1:10") == 0;
  }
  REQUIRE(ok);
  for (const char* f : {"panel.csv", "truth.csv", "efficiency.csv", "elasticity.csv"}) {
    bool same = slurp(root / "a" / f) == slurp(root / "b" / f);
    CHECK(same);
    ok = ok && same;
  }
  fs::remove_all(root);
  verdict(9, "determinism", ok);
}
