#pragma once

#include <cstdint>
#include <string>

namespace gswlab {

/// C_{p,d} = 2^{3/2} (Gamma((p+d)/2) / Gamma(d/2))^{1/p}.
double c_pd(double p, int d);

/// M_p^p of the standard Gaussian in R^d: 2^{p/2} Gamma((p+d)/2) / Gamma(d/2).
double gaussian_moment(double p, int d);

/// Gamma(d/alpha) Gamma(1/(beta-1) - d/alpha) / Gamma(1/(beta-1)).
/// Throws DomainError unless beta > 1 and alpha > d(beta-1).
double i_abd(double alpha, double beta, int d);

/// Constant of the Carlson-type inequality
///   int g <= C (int g^beta)^{(alpha-d(beta-1))/(alpha beta)} (int |x|^alpha g^beta)^{d(beta-1)/(alpha beta)}.
double carlson_constant(double alpha, double beta, int d);

/// Minimizer of carlson_objective given A = int g^beta and B = int |x|^alpha g^beta.
double carlson_t_star(double alpha, double beta, int d, double a, double b);

/// F(t) = t^{-d(beta-1)/beta} (A + t^alpha B)^{1/beta}; carlson_constant(...) * A^.. * B^..
/// equals F(t*) times (2 pi^{d/2} I / (Gamma(d/2) alpha))^{(beta-1)/beta}.
double carlson_objective(double t, double alpha, double beta, int d, double a, double b);

/// C_beta = 2 sqrt(floor(beta/2) + 1).
double mz_constant(double beta);

/// min((beta-1)/beta, 1/2).
double mz_rate_exponent(double beta);

enum class RateVariant { carlson, dyadic };

std::string to_string(RateVariant v);

struct SmoothRateConstantSpec {
  double p = 1.0;
  double q = 2.0;
  int d = 1;
  double sigma = 1.0;
  double beta = 1.5;
  double m_q = 0.0;  // M_q(mu), not its q-th power
  RateVariant variant = RateVariant::carlson;

  /// Throws DomainError unless p >= 1, q > p, d >= 1, sigma > 0, m_q >= 0 and
  /// 1 < beta < (q+d)/(p+d).
  void validate() const;
};

/// The constant C_{beta,sigma} under the selected proof variant.
double rate_smooth_constant(const SmoothRateConstantSpec& spec);

/// min over both variants of C_{beta,sigma}, times N^{-mz_rate_exponent(beta)}.
double rate_smooth_bound(const SmoothRateConstantSpec& spec, double n);

struct BetaChoice {
  double beta;
  double exponent;
};

/// beta = 2 when (q+d)/(p+d) > 2; otherwise (1 - 1e-3)(q+d)/(p+d).
BetaChoice best_beta(double p, double q, int d);

/// N-dependent factor of the comparator rate for the classical distance:
///   p > d/2:  N^{-1/2} + N^{-(q-p)/q}
///   p = d/2:  N^{-1/2} log(1+N) + N^{-(q-p)/q}
///   p < d/2:  N^{-p/d} + N^{-(q-p)/q}
/// multiplied by c_fg * mq_p. Throws DomainError on the excluded equality
/// cases q = 2p (p >= d/2) and q = dp/(d-p) (p < d/2).
double fg15_rate_shape(double p, double q, int d, double n, double c_fg = 1.0, double mq_p = 1.0);

/// Power-law exponent of the slowest term of fg15_rate_shape (log factor ignored).
double fg15_exponent(double p, double q, int d);

}  // namespace gswlab
