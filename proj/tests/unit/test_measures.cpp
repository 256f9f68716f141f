#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gswlab/errors.hpp"
#include "gswlab/measures.hpp"

using namespace gswlab;

namespace {

double weight_sum(const DiscreteMeasure& m) {
  double s = 0.0;
  for (double w : m.weights()) s += w;
  return s;
}

}  // namespace

TEST_CASE("discrete measure invariants") {
  const std::vector<double> xs{0.0, 1.0, 2.0};
  auto pts = PointSet::from_scalars(xs);
  CHECK_NOTHROW(DiscreteMeasure(pts, {0.2, 0.3, 0.5}));
  CHECK_THROWS_AS(DiscreteMeasure(pts, {0.2, 0.3, 0.6}), InvariantError);
  CHECK_THROWS_AS(DiscreteMeasure(pts, {-0.1, 0.6, 0.5}), InvariantError);
  const std::vector<double> dup{0.0, 1.0, 0.0};
  CHECK_THROWS_AS(DiscreteMeasure::uniform(PointSet::from_scalars(dup)), InvariantError);
  CHECK_THROWS_AS(PointSet::from_rows({{0.0, 1.0}, {2.0}}), InvariantError);
  CHECK(weight_sum(DiscreteMeasure::uniform(pts)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dirac samples") {
  const auto c = sample(dirac_spec(3), 5, 123);
  REQUIRE(c.size() == 5);
  CHECK(c.dim() == 3);
  for (double v : c.points.coords()) CHECK(v == 0.0);
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto spec = exponential_spec(1.0);
  const auto a = sample(spec, 100, 9);
  const auto b = sample(spec, 100, 9);
  const auto c = sample(spec, 100, 10);
  CHECK(a.points == b.points);
  CHECK_FALSE(a.points == c.points);
}

TEST_CASE("gaussian sample mean within CLT width") {
  const std::size_t n = 100000;
  const auto c = sample(gaussian_spec(1), n, 1);
  double mean = 0.0;
  for (double v : c.points.coords()) mean += v;
  mean /= static_cast<double>(n);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("empirical moments converge to catalog moments") {
  const std::size_t n = 100000;
  for (const auto& spec : {gaussian_spec(1), exponential_spec(1.0)}) {
    const auto c = sample(spec, n, 31);
    for (double q : {1.0, 2.0, 3.0}) {
      double s = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = std::pow(std::abs(c.points[i][0]), q);
        s += v;
        s2 += v * v;
      }
      const double mean = s / n;
      const double se = std::sqrt((s2 / n - mean * mean) / n);
      CHECK(std::abs(mean - moment_power(spec, q)) <= 5.0 * se);
    }
  }
}

TEST_CASE("moments: closed forms and quadrature") {
  const std::vector<double> xs{-1.0, 1.0};
  CHECK(moment(DiscreteMeasure::uniform(PointSet::from_scalars(xs)), 2.0) == doctest::Approx(1.0));
  CHECK(moment(gaussian_spec(1), 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  const auto e = exponential_spec(1.0);
  for (double q : {1.0, 2.5, 4.0}) {
    CHECK(tail_power_integral(e.tail, q, 0.0) == doctest::Approx(std::tgamma(q + 1.0)).epsilon(1e-8));
    CHECK(moment_power(e, q) == doctest::Approx(std::tgamma(q + 1.0)).epsilon(1e-13));
  }
  const auto g = gaussian_spec(3);
  CHECK(tail_power_integral(g.tail, 2.0, 0.0) == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("sharp-rate measure truncations") {
  const auto m1 = sharp_rate_measure(1, 1);
  REQUIRE(m1.size() == 3);
  double at0 = 0.0, at2 = 0.0, atm2 = 0.0;
  for (std::size_t i = 0; i < m1.size(); ++i) {
    const double x = m1.points()[i][0];
    if (x == 0.0) at0 = m1.weights()[i];
    if (x == 2.0) at2 = m1.weights()[i];
    if (x == -2.0) atm2 = m1.weights()[i];
  }
  CHECK(at0 == 0.5);
  CHECK(at2 == 0.25);
  CHECK(atm2 == 0.25);

  const auto m3 = sharp_rate_measure(2, 3);
  for (std::size_t i = 0; i < m3.size(); ++i) {
    const auto x = m3.points()[i];
    CHECK(x[1] == 0.0);
    if (x[0] == 0.0) CHECK(m3.weights()[i] == 0.435546875);
  }
  const auto m6 = sharp_rate_measure(1, 6);
  for (std::size_t i = 0; i < m6.size(); ++i) {
    if (m6.points()[i][0] == 16.0) CHECK(m6.weights()[i] == std::ldexp(1.0, -17));
  }
  for (int k = 1; k <= 7; ++k) {
    const auto m = sharp_rate_measure(1, k);
    double s = 0.0;
    for (double w : m.weights()) s += w;
    CHECK(s == 1.0);
  }
}

TEST_CASE("sharp-rate moment series") {
  double s = 0.0;
  for (int k = 1; k < 40; ++k) s += std::exp2(-(k * k - 3.0 * k));
  CHECK(sharp_rate_moment_power(3.0) == doctest::Approx(s).epsilon(1e-15));
  CHECK(moment_power(sharp_rate_spec(1), 3.0) == doctest::Approx(s).epsilon(1e-15));
}

TEST_CASE("sharp-rate sampling frequencies") {
  const std::size_t n = 1000000;
  const auto c = sample(sharp_rate_spec(1), n, 7);
  std::size_t at2 = 0, at4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    at2 += c.points[i][0] == 2.0 ? 1 : 0;
    at4 += c.points[i][0] == 4.0 ? 1 : 0;
  }
  const double nd = static_cast<double>(n);
  CHECK(std::abs(at2 / nd - 0.25) <= 4.0 * std::sqrt(0.25 * nd) / nd);
  const double w2 = std::exp2(-5.0);
  CHECK(std::abs(at4 / nd - w2) <= 4.0 * std::sqrt(w2 / nd));

  const auto d3 = sample_sharp_rate(3, 1000, 5);
  for (std::size_t i = 0; i < d3.size(); ++i) {
    CHECK(d3.points[i][1] == 0.0);
    CHECK(d3.points[i][2] == 0.0);
    const double x = std::abs(d3.points[i][0]);
    CHECK((x == 0.0 || std::exp2(std::round(std::log2(x))) == x));
  }
}

TEST_CASE("zygmund tail") {
  const double p = 1.0, alpha = 1.0;
  const auto z = zygmund_spec(p, alpha);
  CHECK(z.tail.eval(1.0) == doctest::Approx(std::pow(std::log(std::exp(1.0) + 1.0), -(alpha + 2))));
  CHECK(z.tail.eval(1.0) < 1.0);
  double prev = z.tail.eval(0.0);
  for (int i = 1; i <= 10000; ++i) {
    const double t = 1e-3 * i * i;
    const double v = z.tail.eval(t);
    CHECK(v <= prev);
    CHECK(z.tail.eval(t + 1e-12 * t) == doctest::Approx(v).epsilon(1e-9));
    prev = v;
  }
  const double mp = tail_power_integral(z.tail, p, 0.0);
  CHECK(std::isfinite(mp));
  CHECK(mp > 0.0);
  CHECK_THROWS_AS(tail_power_integral(z.tail, p + 0.5, 0.0), DivergenceError);
}

TEST_CASE("zygmund sampler matches its tail") {
  const auto z = zygmund_spec(2.0, 0.5);
  const std::size_t n = 200000;
  const auto c = sample(z, n, 3);
  for (double t : {0.5, 2.0, 10.0}) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += std::abs(c.points[i][0]) > t ? 1 : 0;
    const double f = static_cast<double>(hits) / n;
    const double pt = z.tail.eval(t);
    CHECK(std::abs(f - pt) <= 5.0 * std::sqrt(pt * (1 - pt) / n));
  }
}

TEST_CASE("csv round trip") {
  const auto m = DiscreteMeasure(PointSet::from_rows({{0.1, -2.0}, {3.0, 1e-300}}), {0.25, 0.75});
  std::stringstream ss;
  write_csv(ss, m);
  const auto back = read_discrete_measure_csv(ss);
  CHECK(back.points() == m.points());
  CHECK(back.weights()[0] == 0.25);

  auto cloud = sample(gaussian_spec(2), 10, 4);
  std::stringstream sc;
  write_csv(sc, cloud);
  const auto c2 = read_sample_cloud_csv(sc);
  CHECK(c2.points == cloud.points);
  CHECK(c2.seed == cloud.seed);

  std::stringstream bad("x_1,weight\n0,0.5\n1,0.4\n");
  CHECK_THROWS_AS(read_discrete_measure_csv(bad), InvariantError);
}
