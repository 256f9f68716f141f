#include <cmath>
#include <vector>

#include "doctest.h"
#include "gswlab/bounds.hpp"
#include "gswlab/critical.hpp"
#include "gswlab/errors.hpp"

using namespace gswlab;

namespace {

TailFunction exp_tail() { return TailFunction(exponential_spec(1.0).tail, 1.0); }

}  // namespace

TEST_CASE("tail function checks") {
  Tail increasing{[](double t) { return std::min(1.0, 0.1 + 0.01 * t); }, {}};
  CHECK_THROWS_AS(TailFunction(increasing, 1.0), InvariantError);
  Tail heavy{[](double t) { return t <= 1.0 ? 1.0 : 1.0 / t; }, {}};
  CHECK_THROWS_AS(TailFunction(heavy, 1.0), DivergenceError);
  CHECK(exp_tail().moment_p() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("H for the exponential tail") {
  const auto tail = exp_tail();
  for (double t : {0.0, 0.5, 2.0, 10.0, 40.0}) {
    CHECK(h_mu(tail, t) == doctest::Approx(std::exp(-t)).epsilon(1e-8));
  }
}

TEST_CASE("H for the Zygmund tail against a Riemann sum") {
  const auto z = zygmund_spec(1.0, 1.0);
  const TailFunction tail(z.tail, 1.0);
  // H(1) = int_0^inf e^y P(|X| > e^y) dy = int_0^inf log(e + e^y)^{-3} dy
  const long n = 10'000'000;
  const double top = 1e4, h = top / n;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    const double y = (i + 0.5) * h;
    sum += std::pow(y + std::log1p(std::exp(1.0 - y)), -3.0);
  }
  sum = sum * h + 0.5 / (top * top);
  CHECK(h_mu(tail, 1.0) == doctest::Approx(sum).epsilon(1e-4));
}

TEST_CASE("H is strictly decreasing") {
  for (auto [p, alpha] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const TailFunction tail(zygmund_spec(p, alpha).tail, p);
    double prev = h_mu(tail, 0.0);
    CHECK(prev == doctest::Approx(tail.moment_p()).epsilon(1e-8));
    for (int k = -8; k <= 32; ++k) {
      const double v = h_mu(tail, std::pow(10.0, k / 4.0));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("canonical G for the exponential tail") {
  const auto tail = exp_tail();
  const auto g = canonical_calibration(tail);
  CHECK(g(0.0) == 0.0);
  CHECK(g_mu_canonical(tail, 0.0) == 0.0);
  for (double t : {1e-4, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0}) {
    const double closed = 2.0 * std::expm1(0.5 * t);
    CHECK(std::abs(g(t) - closed) <= 1e-6 * closed);
    CHECK(std::abs(g_mu_canonical(tail, t) - closed) <= 1e-6 * closed);
  }
  // E[2(e^{X/2} - 1)] = 2 for X ~ Exponential(1)
  CHECK(g.expected_g == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g.t_max == 128.0);
}

TEST_CASE("canonical G of a light tail exceeds every polynomial") {
  const auto g = canonical_calibration(exp_tail());
  const auto pr = check_calibration_properties(g);
  CHECK(pr.positive);
  CHECK(pr.finite_expectation);
  CHECK(pr.superlinear);
  CHECK(pr.monotone_ratio);
  CHECK_FALSE(pr.subpolynomial);
}

TEST_CASE("canonical G for Zygmund tails satisfies the five properties") {
  for (auto [p, alpha] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const TailFunction tail(zygmund_spec(p, alpha).tail, p);
    const auto g = canonical_calibration(tail);
    const auto pr = check_calibration_properties(g);
    CHECK(pr.positive);
    CHECK(pr.finite_expectation);
    CHECK(pr.superlinear);
    CHECK(pr.monotone_ratio);
    CHECK(pr.subpolynomial);
    for (double t : {0.3, 2.0, 17.0, 1e3, 1e6}) {
      CHECK(g(t) == doctest::Approx(g_mu_canonical(tail, t)).epsilon(1e-7));
    }
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double t = 0.1 * i;
      const double r = g(t) / std::pow(t, p);
      CHECK(r >= prev * (1.0 - 1e-12));
      prev = r;
    }
  }
}

TEST_CASE("Zygmund calibration") {
  CHECK(g_mu_zygmund(1.0, 1.0, 0.0) == 0.0);
  const double e1 = std::exp(1.0) - 1.0;
  CHECK(g_mu_zygmund(1.0, 1.0, e1) == doctest::Approx(e1).epsilon(1e-15));
  for (auto [p, alpha] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const TailFunction tail(zygmund_spec(p, alpha).tail, p);
    const auto g = zygmund_calibration(tail, alpha);
    CHECK(check_calibration_properties(g).all());
    CHECK(std::isfinite(g.expected_g));
  }
}

TEST_CASE("Zygmund moment agrees with Monte Carlo") {
  const auto spec = exponential_spec(1.0);
  const auto g = zygmund_calibration(TailFunction(spec.tail, 1.0), 1.0);
  const auto mc = expected_g_monte_carlo(g, spec, 1'000'000, 3);
  CHECK(std::abs(mc.mean - g.expected_g) <= 5.0 * mc.std_err);
}

TEST_CASE("truncation chain") {
  const auto spec = exponential_spec(1.0);
  const auto g = canonical_calibration(TailFunction(spec.tail, 1.0));
  const auto t = truncation_bound_check(g, spec, 2.0, 1'000'000, 1);
  CHECK(t.holds);
  CHECK(t.lhs <= t.mid);
  CHECK(t.mid <= t.rhs);
  const auto small = truncation_bound_check(g, spec, 1e-6, 200'000, 2);
  CHECK(small.holds);
  CHECK(small.lhs == doctest::Approx(1.0).epsilon(0.02));

  const std::vector<double> at{0.5};
  const auto bounded = discrete_spec(DiscreteMeasure::uniform(PointSet::from_scalars(at)));
  const auto b = truncation_bound_check(g, bounded, 1.0, 1000, 3);
  CHECK(b.lhs == 0.0);
  CHECK(b.mid == 0.0);
  CHECK(b.rhs > 0.0);
  CHECK(b.holds);
  CHECK_THROWS_AS(g_mu_canonical(TailFunction(bounded.tail, 1.0), 1.0), DomainError);
}

TEST_CASE("gamma_eps and the constant") {
  CHECK(gamma_eps(1.0, 1, 1.0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(gamma_eps(2.0, 2, 2.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  for (int d = 1; d < 5; ++d) {
    CHECK(gamma_eps(1.5, d, 1e-9) < 1.0 / (2.0 * (1.5 + d)));
    CHECK(rate_g_constant(1.0, d) == doctest::Approx(std::max(c_pd(1.0, d), 2.0)).epsilon(1e-14));
  }
}

TEST_CASE("rate_g_bound limits") {
  const TailFunction tail(zygmund_spec(1.0, 1.0).tail, 1.0);
  const auto canon = canonical_calibration(tail);
  double prev = INFINITY;
  for (double e : {10.0, 20.0, 40.0}) {
    const auto b = rate_g_bound(1.0, 1, 1.0, canon, std::exp2(e));
    const double ratio = b.remainder / b.leading;
    CHECK(ratio < prev);
    prev = ratio;
    const double n_gamma = std::pow(std::exp2(e), gamma_eps(1.0, 1, 1.0));
    CHECK(b.sigma_used == doctest::Approx(n_gamma / canon(n_gamma)).epsilon(1e-14));
  }
  const auto zyg = zygmund_calibration(tail, 1.0);
  double lead_prev = INFINITY;
  for (int k = 4; k <= 40; ++k) {
    const double lead = rate_g_bound(1.0, 1, 1.0, zyg, std::exp2(k)).leading;
    CHECK(lead <= lead_prev);
    lead_prev = lead;
  }
}

TEST_CASE("Zygmund bound") {
  const double c = rate_g_constant(1.0, 1);
  CHECK(zygmund_bound(1.0, 1.0, 1, 1.0, 0.0, 65536.0) == doctest::Approx(c / std::log(5.0)).epsilon(1e-14));
  // N' with log(1 + N'^gamma) = 2 log(1 + N^gamma), gamma = 1/8, N^gamma = 4: N'^gamma = 24
  const double n2 = std::pow(24.0, 8.0);
  CHECK(zygmund_bound(1.0, 1.0, 1, 1.0, 0.3, n2) ==
        doctest::Approx(0.5 * zygmund_bound(1.0, 1.0, 1, 1.0, 0.3, 65536.0)).epsilon(1e-12));
  const auto g = zygmund_calibration(TailFunction(zygmund_spec(2.0, 0.5).tail, 2.0), 0.5);
  for (double n : {1e3, 1e6, 1e12}) {
    const double lead = rate_g_bound(2.0, 2, 0.5, g, n).leading;
    CHECK(zygmund_bound(2.0, 0.5, 2, 0.5, g.expected_g, n) == doctest::Approx(lead).epsilon(1e-10));
  }
}
