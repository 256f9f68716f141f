#include <cmath>
#include <vector>

#include "doctest.h"
#include "gswlab/bounds.hpp"
#include "gswlab/errors.hpp"
#include "gswlab/numerics.hpp"
#include "gswlab/rng.hpp"

using namespace gswlab;

TEST_CASE("c_pd") {
  CHECK(c_pd(2.0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c_pd(2.0, 4) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(c_pd(1.0, 1) == doctest::Approx(std::pow(2.0, 1.5) / std::sqrt(kPi)).epsilon(1e-13));
}

TEST_CASE("gaussian moments") {
  for (int d = 1; d <= 6; ++d) {
    CHECK(std::abs(gaussian_moment(2.0, d) - d) <= 1e-12);
    CHECK(gaussian_moment(0.0, d) == 1.0);
  }
  const double quad = 2.0 * integrate([](double z) { return z * std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); },
                                      0.0, kInf);
  CHECK(gaussian_moment(1.0, 1) == doctest::Approx(quad).epsilon(1e-9));
  CHECK(gaussian_moment(1.0, 1) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
}

TEST_CASE("i_abd closed form") {
  for (int d = 1; d <= 3; ++d) CHECK(i_abd(2.0 * d, 2.0, d) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK_THROWS_AS(i_abd(1.0, 2.0, 1), DomainError);
  CHECK_THROWS_AS(i_abd(2.0, 1.0, 1), DomainError);
  double prev = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const double v = i_abd(1.0 + eps, 2.0, 1);
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 1e5);
}

TEST_CASE("i_abd matches quadrature on random triples") {
  Rng rng(2);
  QuadratureSpec quad;
  quad.abs_tol = 1e-14;
  quad.rel_tol = 1e-10;
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const double beta = 1.2 + 1.8 * rng.uniform();
    const double alpha = d * (beta - 1.0) * (1.3 + 2.0 * rng.uniform());
    const double a = d / alpha, b = 1.0 / (beta - 1.0);
    auto f = [&](double s) { return std::pow(s, a - 1.0) * std::pow(1.0 + s, -b); };
    const double num = integrate(f, 0.0, 1.0, quad) + integrate(f, 1.0, kInf, quad, RayMap::logarithmic);
    CHECK(std::abs(num - i_abd(alpha, beta, d)) <= 1e-6 * num);
  }
}

TEST_CASE("Carlson inequality for the standard Gaussian") {
  QuadratureSpec quad;
  quad.abs_tol = 1e-14;
  quad.rel_tol = 1e-11;
  auto g = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); };
  for (auto [alpha, beta] : {std::pair{2.0, 1.5}, std::pair{3.0, 2.0}, std::pair{5.0, 2.0}}) {
    const double a = 2.0 * integrate([&](double x) { return std::pow(g(x), beta); }, 0.0, kInf, quad);
    const double b =
        2.0 * integrate([&](double x) { return std::pow(x, alpha) * std::pow(g(x), beta); }, 0.0, kInf, quad);
    const double e1 = (alpha - (beta - 1.0)) / (alpha * beta), e2 = (beta - 1.0) / (alpha * beta);
    const double c = carlson_constant(alpha, beta, 1);
    CHECK(c > 0.0);
    CHECK(std::isfinite(c));
    const double rhs = c * std::pow(a, e1) * std::pow(b, e2);
    CHECK(1.0 <= rhs);
    const double ts = carlson_t_star(alpha, beta, 1, a, b);
    const double f0 = carlson_objective(ts, alpha, beta, 1, a, b);
    CHECK(f0 <= carlson_objective(1.1 * ts, alpha, beta, 1, a, b));
    CHECK(f0 <= carlson_objective(0.9 * ts, alpha, beta, 1, a, b));
    // the constant is F(t*) with the sphere/I factor
    const double factor = std::pow(2.0 * std::sqrt(kPi) * i_abd(alpha, beta, 1) / (std::tgamma(0.5) * alpha),
                                   (beta - 1.0) / beta);
    CHECK(rhs == doctest::Approx(f0 * factor).epsilon(1e-12));
  }
}

TEST_CASE("Marcinkiewicz-Zygmund constants") {
  CHECK(mz_constant(2.0) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(mz_constant(1.0) == 2.0);
  CHECK(mz_constant(4.0) == doctest::Approx(2.0 * std::sqrt(3.0)));
  CHECK(mz_rate_exponent(2.0) == 0.5);
  CHECK(mz_rate_exponent(1.5) == doctest::Approx(1.0 / 3.0));
  CHECK(mz_rate_exponent(3.0) == 0.5);
}

TEST_CASE("rate constant: Carlson variant with zero moment") {
  const double p = 1, q = 4, sigma = 0.8, beta = 2;
  const int d = 1;
  const SmoothRateConstantSpec s{p, q, d, sigma, beta, 0.0, RateVariant::carlson};
  const double alpha = q - p * beta;
  const double gauss_only = std::pow(2.0, 1.5 * q - 1.0) * std::pow(sigma, q) * std::tgamma(0.5 * (q + d)) /
                            std::tgamma(0.5 * d);
  const double expected = std::pow(2.0, p) * mz_constant(beta) * carlson_constant(alpha, beta, d) /
                          std::pow(2.0 * kPi * sigma * sigma, d * (beta - 1.0) / (2.0 * beta)) *
                          std::pow(gauss_only, ((p + d) * beta - d) / (q * beta));
  CHECK(rate_smooth_constant(s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rate constant: dyadic series against long partial sums") {
  for (double sigma : {0.3, 1.0, 3.0}) {
    const double p = 1, q = 5, beta = 1.8, mq = 1.7;
    const int d = 2;
    const SmoothRateConstantSpec s{p, q, d, sigma, beta, mq, RateVariant::dyadic};
    long double series = 1.0L;
    for (int n = 1; n <= 200; ++n) {
      series += std::pow(2.0L, (p + d * (1.0L - 1.0L / beta)) * n) * std::pow(2.0L * d, 1.0L / beta) *
                std::exp(-std::ldexp(1.0L, 2 * n - 5) / (beta * sigma * sigma));
    }
    const double lead = std::pow(2.0, p + d * (1.0 - 1.0 / beta)) * std::pow(d, 0.5 * p) * mz_constant(beta) /
                        std::pow(2.0 * kPi * sigma * sigma, d * (beta - 1.0) / (2.0 * beta));
    const double mom = std::pow(2.0, 2.0 * q / beta) / (1.0 - std::pow(2.0, p + d - (q + d) / beta)) *
                       std::pow(mq, q / beta);
    CHECK(rate_smooth_constant(s) == doctest::Approx(lead * (mom + static_cast<double>(series))).epsilon(1e-13));
  }
}

TEST_CASE("rate constants scale as sigma^{-d(beta-1)/beta} at small sigma") {
  for (auto v : {RateVariant::carlson, RateVariant::dyadic}) {
    const double beta = 1.5;
    const int d = 2;
    SmoothRateConstantSpec s{1.0, 6.0, d, 1e-3, beta, 3.0, v};
    const double c1 = rate_smooth_constant(s);
    s.sigma *= 0.5;
    const double c2 = rate_smooth_constant(s);
    const double expected = std::pow(2.0, d * (beta - 1.0) / beta);
    CHECK(std::abs(c2 / c1 - expected) <= 0.05 * expected);
  }
}

TEST_CASE("rate bound shape") {
  const SmoothRateConstantSpec s{1.0, 4.0, 1, 1.0, 2.0, 1.3, RateVariant::carlson};
  SmoothRateConstantSpec t = s;
  t.variant = RateVariant::dyadic;
  CHECK(rate_smooth_bound(s, 1.0) == doctest::Approx(std::min(rate_smooth_constant(s), rate_smooth_constant(t))));
  CHECK(rate_smooth_bound(s, 400.0) == doctest::Approx(0.5 * rate_smooth_bound(s, 100.0)).epsilon(1e-14));
  for (auto v : {RateVariant::carlson, RateVariant::dyadic}) {
    SmoothRateConstantSpec u = s;
    u.variant = v;
    double prev = INFINITY;
    for (double n = 1; n < 1e6; n *= 3) {
      const double b = rate_smooth_bound(u, n);
      CHECK(b <= prev);
      prev = b;
    }
    const double c0 = rate_smooth_constant(u);
    u.m_q *= 1.5;
    CHECK(rate_smooth_constant(u) > c0);
  }
  SmoothRateConstantSpec bad = s;
  bad.beta = 2.5;
  CHECK_THROWS_AS(rate_smooth_constant(bad), DomainError);
}

TEST_CASE("best beta") {
  const auto a = best_beta(1.0, 4.0, 1);
  CHECK(a.beta == 2.0);
  CHECK(a.exponent == 0.5);
  const auto b = best_beta(2.0, 3.0, 2);
  CHECK(b.beta == doctest::Approx(0.999 * 1.25).epsilon(1e-14));
  CHECK(b.exponent == doctest::Approx((b.beta - 1.0) / b.beta).epsilon(1e-14));
  CHECK(b.exponent == doctest::Approx(0.1992).epsilon(1e-3));
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double p = 1.0 + 2.0 * rng.uniform();
    const double q = p + 0.1 + 5.0 * rng.uniform();
    const int d = 1 + static_cast<int>(rng.below(5));
    CHECK(best_beta(p, q, d).exponent < (q - p) / (q + d));
  }
}

TEST_CASE("comparator rate shapes") {
  CHECK(fg15_rate_shape(1.0, 4.0, 3, 64.0) == doctest::Approx(std::pow(64.0, -1.0 / 3.0) + std::pow(64.0, -0.75)));
  const double n = std::exp(1.0) - 1.0;
  CHECK(fg15_rate_shape(1.0, 3.0, 2, n) ==
        doctest::Approx(std::pow(n, -0.5) * std::log1p(n) + std::pow(n, -2.0 / 3.0)));
  CHECK(fg15_rate_shape(1.0, 3.0, 1, 100.0) == doctest::Approx(0.1 + std::pow(100.0, -2.0 / 3.0)));
  CHECK(fg15_rate_shape(1.0, 3.0, 1, 100.0, 2.0, 3.0) == doctest::Approx(6.0 * (0.1 + std::pow(100.0, -2.0 / 3.0))));
  CHECK_THROWS_AS(fg15_rate_shape(1.0, 2.0, 1, 10.0), DomainError);
  CHECK_THROWS_AS(fg15_rate_shape(1.0, 4.0 / 3.0, 4, 10.0), DomainError);
  CHECK(best_beta(1.0, 11.0, 4).exponent == 0.5);
  CHECK(fg15_exponent(1.0, 11.0, 4) == 0.25);
}
