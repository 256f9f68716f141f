#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gswlab/errors.hpp"
#include "gswlab/harness.hpp"
#include "gswlab/parallel.hpp"
#include "gswlab/rng.hpp"

using namespace gswlab;

namespace {

ExperimentConfig small_rate() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::rate;
  cfg.n_grid = {16, 32, 64};
  cfg.reps = 10;
  cfg.m_plugin = 128;
  return cfg;
}

std::string rate_csv(const ExperimentConfig& cfg) {
  std::ostringstream os;
  write_rate_csv(os, run_rate_experiment(cfg));
  return os.str();
}

}  // namespace

TEST_CASE("rate fit on exact power laws") {
  std::vector<double> ns, est, se;
  for (int e = 5; e <= 12; ++e) {
    ns.push_back(std::exp2(e));
    est.push_back(3.0 * std::pow(std::exp2(e), -0.5));
    se.push_back(0.01 * est.back());
  }
  for (bool weighted : {false, true}) {
    const auto fit = rate_fit(ns, est, se, weighted);
    CHECK(std::abs(fit.slope + 0.5) <= 1e-12);
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  const std::vector<double> flat(ns.size(), 0.7);
  CHECK(std::abs(rate_fit(ns, flat, se).slope) <= 1e-14);
}

TEST_CASE("rate fit recovers a noisy slope") {
  Rng rng(5);
  std::vector<double> ns, est, se;
  for (int e = 4; e <= 20; ++e) {
    ns.push_back(std::exp2(e));
    est.push_back(std::pow(ns.back(), -0.4) * std::exp(0.05 * rng.normal()));
    se.push_back(0.05 * est.back());
  }
  const auto fit = rate_fit(ns, est, se);
  CHECK(fit.slope_stderr > 0.0);
  CHECK(std::abs(fit.slope + 0.4) <= 3.0 * fit.slope_stderr);
}

TEST_CASE("rate fit errors") {
  CHECK_THROWS_AS(rate_fit({1.0, 2.0}, {1.0, 0.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(rate_fit({1.0, 2.0}, {1.0}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(rate_fit({2.0, 2.0}, {1.0, 0.5}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(rate_fit({1.0, 2.0}, {1.0, 0.5}, {0.0, 1.0}, true), DomainError);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.p = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.beta = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.beta = 2.5;  // (q + d)/(p + d) = 2.5
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.n_grid = {64, 32};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.n_grid = {64};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.reps = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.m_plugin = 100'000;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.kind = ExperimentKind::verify;
  bad.suite = "nope";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.suite = "mz";
  CHECK_NOTHROW(bad.validate());
  bad = cfg;
  bad.kind = ExperimentKind::lowerbound;
  bad.n_grid = {8, 1024};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("parsing") {
  CHECK(parse_n_grid("32,64,128") == std::vector<std::int64_t>{32, 64, 128});
  CHECK_THROWS_AS(parse_n_grid("32,x"), ConfigError);
  CHECK_THROWS_AS(parse_n_grid("32,64.5"), ConfigError);
  CHECK_THROWS_AS(parse_n_grid(""), ConfigError);
  CHECK(parse_output_format("json") == OutputFormat::json);
  CHECK_THROWS_AS(parse_output_format("xml"), ConfigError);
  for (auto k : {ExperimentKind::rate, ExperimentKind::lowerbound, ExperimentKind::verify, ExperimentKind::constants,
                 ExperimentKind::gmu}) {
    CHECK(parse_experiment_kind(to_string(k)) == k);
  }
  const auto m = parse_measure_name("zygmund:p=2,alpha=0.5");
  CHECK(m.base == "zygmund");
  CHECK(m.params.at("p") == 2.0);
  CHECK(m.params.at("alpha") == 0.5);
  CHECK_THROWS_AS(parse_measure_name("zygmund:p"), ConfigError);
  CHECK_THROWS_AS(parse_measure_name("zygmund:p=1x"), ConfigError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("measure catalog") {
  CHECK(make_measure("exponential").name.size() > 0);
  CHECK(make_measure("gaussian:d=3").dimension == 3);
  CHECK(make_measure("sharp_rate").dimension == 1);
  CHECK(make_measure("dirac:d=2").dimension == 2);
  CHECK(make_measure("zygmund:p=1,alpha=1").dimension == 1);
  CHECK_THROWS_AS(make_measure("cauchy"), ConfigError);
  CHECK_THROWS_AS(make_measure("gaussian:rate=2"), ConfigError);
  CHECK_THROWS_AS(make_measure("gaussian:d=1.5"), ConfigError);
  CHECK_THROWS_AS(make_measure("exponential:rate=-1"), ConfigError);
}

TEST_CASE("rate experiment output") {
  const auto cfg = small_rate();
  const auto result = run_rate_experiment(cfg);
  REQUIRE(result.rows.size() == 3);
  for (const auto& r : result.rows) {
    CHECK(r.estimate > 0.0);
    CHECK(r.std_err > 0.0);
    CHECK(r.bound_carlson > 0.0);
    CHECK(r.bound_dyadic > 0.0);
  }
  CHECK(result.rows[1].bound_carlson / result.rows[0].bound_carlson == doctest::Approx(std::sqrt(0.5)));
  const std::string csv = rate_csv(cfg);
  CHECK(csv.rfind("experiment,measure,d,p,q,sigma,beta,N,reps,m_plugin,seed,estimate,stderr,bound_carlson,"
                  "bound_dyadic,bound_fg15_shape\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(rate_csv(cfg) == csv);

  const auto threads = num_threads();
  set_num_threads(1);
  const std::string single = rate_csv(cfg);
  set_num_threads(threads);
  CHECK(single == csv);

  const auto j = rate_json(result);
  CHECK(j.dump().find("\"slope\"") != std::string::npos);
}

TEST_CASE("constants json") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::constants;
  const auto j = constants_json(cfg);
  for (const char* key : {"c_pd", "gaussian_moment_p", "i_abd", "carlson_constant", "mz_constant", "rate_exponent",
                          "c_beta_sigma_carlson", "c_beta_sigma_dyadic"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["gaussian_moment_p"].get<double>() == doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846)));
  CHECK(j["mz_constant"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(j["rate_exponent"].get<double>() == doctest::Approx(0.5));
  CHECK(j["m_q"].get<double>() == doctest::Approx(std::pow(24.0, 0.25)));
}

TEST_CASE("lowerbound json") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::lowerbound;
  cfg.n_grid = {65536, 1 << 20};
  cfg.sigma = 0.25;
  cfg.reps = 1000;
  const auto j = lowerbound_json(cfg);
  REQUIRE(j["reports"].size() == 2);
  CHECK(j["reports"][1]["quantities"]["k_N"].get<int>() == 4);
  CHECK(j["c_be"].get<double>() == kBerryEsseen);
}

TEST_CASE("gmu table") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::gmu;
  std::ostringstream os;
  write_gmu_csv(os, cfg);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "measure,p,t,H,G,G_over_tp");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows > 10);
}

TEST_CASE("verification suites") {
  CHECK(verification_suites().size() == 8);
  CHECK_THROWS_AS(run_verification_suite("nope"), ConfigError);
  const auto rep = run_verification_suite("transport_metric", 42);
  CHECK(rep.cases.size() >= 200);
  CHECK(rep.passed());
  CHECK(rep.failures() == 0);
  std::ostringstream os;
  write_report_csv(os, rep);
  CHECK(os.str().rfind("suite,case,lhs,rhs,slack,pass\n", 0) == 0);
  CHECK(report_json(rep)["passed"].get<bool>());
  CHECK(run_verification_suite("neighborhood", 42).passed());
}
