#include "gswlab/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "gswlab/errors.hpp"
#include "gswlab/numerics.hpp"

namespace gswlab {

namespace {

void require_pd(double p, int d) {
  if (!(p >= 1.0) || d < 1) throw DomainError("need p >= 1 and d >= 1");
}

void require_carlson(double alpha, double beta, int d) {
  if (!(beta > 1.0) || d < 1) throw DomainError("Carlson constant: need beta > 1 and d >= 1");
  if (!(alpha > d * (beta - 1.0))) throw DomainError("Carlson constant: need alpha > d(beta - 1)");
}

double gamma_ratio(double a, double b) { return std::exp(log_gamma_fn(a) - log_gamma_fn(b)); }

}  // namespace

double c_pd(double p, int d) {
  require_pd(p, d);
  return std::pow(2.0, 1.5) * std::pow(gamma_ratio(0.5 * (p + d), 0.5 * d), 1.0 / p);
}

double gaussian_moment(double p, int d) {
  if (!(p >= 0.0) || d < 1) throw DomainError("gaussian_moment: need p >= 0 and d >= 1");
  if (p == 0.0) return 1.0;
  if (p == 2.0) return static_cast<double>(d);
  return std::pow(2.0, 0.5 * p) * gamma_ratio(0.5 * (p + d), 0.5 * d);
}

double i_abd(double alpha, double beta, int d) {
  require_carlson(alpha, beta, d);
  const double a = d / alpha;
  const double b = 1.0 / (beta - 1.0);
  return std::exp(log_gamma_fn(a) + log_gamma_fn(b - a) - log_gamma_fn(b));
}

double carlson_constant(double alpha, double beta, int d) {
  require_carlson(alpha, beta, d);
  const double db = d * (beta - 1.0);
  const double sphere = 2.0 * std::pow(kPi, 0.5 * d) / gamma_fn(0.5 * d);
  return std::pow(alpha / db, 1.0 / beta) * std::pow(db / (alpha - db), (alpha - db) / (alpha * beta)) *
         std::pow(sphere * i_abd(alpha, beta, d) / alpha, (beta - 1.0) / beta);
}

double carlson_t_star(double alpha, double beta, int d, double a, double b) {
  require_carlson(alpha, beta, d);
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("carlson_t_star: integrals must be positive");
  const double db = d * (beta - 1.0);
  return std::pow(db * a / ((alpha - db) * b), 1.0 / alpha);
}

double carlson_objective(double t, double alpha, double beta, int d, double a, double b) {
  require_carlson(alpha, beta, d);
  if (!(t > 0.0)) throw DomainError("carlson_objective: t must be positive");
  return std::pow(t, -d * (beta - 1.0) / beta) * std::pow(a + std::pow(t, alpha) * b, 1.0 / beta);
}

double mz_constant(double beta) {
  if (!(beta >= 1.0)) throw DomainError("mz_constant: beta must be >= 1");
  return 2.0 * std::sqrt(std::floor(beta / 2.0) + 1.0);
}

double mz_rate_exponent(double beta) {
  if (!(beta >= 1.0)) throw DomainError("mz_rate_exponent: beta must be >= 1");
  return std::min((beta - 1.0) / beta, 0.5);
}

std::string to_string(RateVariant v) { return v == RateVariant::carlson ? "carlson" : "dyadic"; }

void SmoothRateConstantSpec::validate() const {
  require_pd(p, d);
  if (!(q > p)) throw DomainError("rate constant: need q > p");
  if (!(sigma > 0.0)) throw DomainError("rate constant: sigma must be positive");
  if (!(m_q >= 0.0) || !std::isfinite(m_q)) throw DomainError("rate constant: M_q must be finite and >= 0");
  if (!(beta > 1.0) || !(beta < (q + d) / (p + d))) {
    throw DomainError("rate constant: beta must lie in (1, (q+d)/(p+d))");
  }
}

namespace {

double carlson_variant(const SmoothRateConstantSpec& s) {
  const double alpha = s.q - s.p * s.beta;
  const double d = s.d;
  const double gauss = 1.0 / std::pow(2.0 * kPi * s.sigma * s.sigma, d * (s.beta - 1.0) / (2.0 * s.beta));
  const double brace = std::pow(2.0, s.q - 1.0) * std::pow(s.m_q, s.q) +
                       std::pow(2.0, 1.5 * s.q - 1.0) * std::pow(s.sigma, s.q) *
                           gamma_ratio(0.5 * (s.q + d), 0.5 * d);
  const double expo = ((s.p + d) * s.beta - d) / (s.q * s.beta);
  return std::pow(2.0, s.p) * mz_constant(s.beta) * carlson_constant(alpha, s.beta, s.d) * gauss *
         std::pow(brace, expo);
}

// sum_{n>=0} 2^{pn + dn(1-1/beta)} (1_{n=0} + (2d)^{1/beta} e^{-2^{2n-5}/(beta sigma^2)} 1_{n>=1})
double dyadic_series(const SmoothRateConstantSpec& s) {
  const double d = s.d;
  const double growth = (s.p + d * (1.0 - 1.0 / s.beta)) * std::log(2.0);
  const double pref = std::log(2.0 * d) / s.beta;
  const double rate = 1.0 / (s.beta * s.sigma * s.sigma);
  double sum = 1.0;
  for (int n = 1; n < 512; ++n) {
    const double log_term = n * growth + pref - rate * std::ldexp(1.0, 2 * n - 5);
    const double term = std::exp(log_term);
    sum += term;
    // past the peak the ratio of consecutive terms is below 1/2
    const double next_log = (n + 1) * growth + pref - rate * std::ldexp(1.0, 2 * n - 3);
    const bool decreasing = next_log - log_term < -std::log(2.0);
    if (decreasing && 2.0 * std::exp(next_log) < 1e-16 * sum) break;
  }
  return sum;
}

double dyadic_variant(const SmoothRateConstantSpec& s) {
  const double d = s.d;
  const double lead = std::pow(2.0, s.p + d * (1.0 - 1.0 / s.beta)) * std::pow(d, 0.5 * s.p) *
                      mz_constant(s.beta) /
                      std::pow(2.0 * kPi * s.sigma * s.sigma, d * (s.beta - 1.0) / (2.0 * s.beta));
  const double ratio = std::pow(2.0, s.p + d - (s.q + d) / s.beta);
  const double moment_part = std::pow(2.0, 2.0 * s.q / s.beta) / (1.0 - ratio) * std::pow(s.m_q, s.q / s.beta);
  return lead * (moment_part + dyadic_series(s));
}

}  // namespace

double rate_smooth_constant(const SmoothRateConstantSpec& spec) {
  spec.validate();
  return spec.variant == RateVariant::carlson ? carlson_variant(spec) : dyadic_variant(spec);
}

double rate_smooth_bound(const SmoothRateConstantSpec& spec, double n) {
  spec.validate();
  if (!(n >= 1.0)) throw DomainError("rate_smooth_bound: N must be >= 1");
  const double c = std::min(carlson_variant(spec), dyadic_variant(spec));
  return c * std::pow(n, -mz_rate_exponent(spec.beta));
}

BetaChoice best_beta(double p, double q, int d) {
  require_pd(p, d);
  if (!(q > p)) throw DomainError("best_beta: need q > p");
  const double top = (q + d) / (p + d);
  if (top > 2.0) return {2.0, 0.5};
  const double beta = (1.0 - 1e-3) * top;
  return {beta, (beta - 1.0) / beta};
}

namespace {

enum class FgCase { above, critical, below };

FgCase fg_case(double p, double q, int d) {
  require_pd(p, d);
  if (!(q > p)) throw DomainError("fg15_rate_shape: need q > p");
  const double half_d = 0.5 * d;
  if (p >= half_d) {
    if (q == 2.0 * p) throw DomainError("fg15_rate_shape: excluded boundary q = 2p");
    return p == half_d ? FgCase::critical : FgCase::above;
  }
  if (q == d * p / (d - p)) throw DomainError("fg15_rate_shape: excluded boundary q = dp/(d-p)");
  return FgCase::below;
}

}  // namespace

double fg15_rate_shape(double p, double q, int d, double n, double c_fg, double mq_p) {
  const FgCase c = fg_case(p, q, d);
  if (!(n >= 1.0)) throw DomainError("fg15_rate_shape: N must be >= 1");
  const double moment_term = std::pow(n, -(q - p) / q);
  double first = 0.0;
  switch (c) {
    case FgCase::above: first = std::pow(n, -0.5); break;
    case FgCase::critical: first = std::pow(n, -0.5) * std::log1p(n); break;
    case FgCase::below: first = std::pow(n, -p / d); break;
  }
  return c_fg * mq_p * (first + moment_term);
}

double fg15_exponent(double p, double q, int d) {
  const FgCase c = fg_case(p, q, d);
  const double first = c == FgCase::below ? p / d : 0.5;
  return std::min(first, (q - p) / q);
}

}  // namespace gswlab
