#pragma once

#include <functional>
#include <limits>
#include <span>

namespace gswlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Tolerances for adaptive quadrature.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 1 << 14;

  /// Throws InvariantError unless all fields are positive.
  void validate() const;
};

/// Variable change used for an infinite end of the integration domain.
///
///  - rational:    s = a + u/(1-u),           u in [0,1)
///  - logarithmic: s = a + expm1(u/(1-u)),    u in [0,1)
///
/// The rational map suits tails decaying faster than 1/s^{1+eps} with eps not
/// small. The logarithmic map handles slowly varying tails such as
/// 1/(s log^k s); points with u/(1-u) > 700 are treated as zero.
enum class RayMap { rational, logarithmic };

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

double gamma_fn(double x);
double log_gamma_fn(double x);

double normal_cdf(double x);
/// 1 - normal_cdf(x), accurate in the far right tail.
double normal_sf(double x);

/// Adaptive Gauss-Kronrod (7/15) integration over [a, b]; a and/or b may be
/// infinite. Throws IntegrationError when the tolerance is not met within
/// spec.max_subdivisions or the integrand returns a non-finite value.
QuadratureResult integrate_detailed(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec = {},
                                    RayMap map = RayMap::rational);

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {}, RayMap map = RayMap::rational);

/// The one-dimensional Gaussian tail majorant exp(-u^2/2) >= P(Z >= u).
double gaussian_tail_1d(double u);

/// The d-dimensional majorant 2d exp(-t^2/(2 d sigma^2)) >= P(sigma |Z| >= t).
double gaussian_tail_d(double t, double sigma, int d);

/// Pairwise summation; result independent of thread scheduling given the order.
double pairwise_sum(std::span<const double> values);

/// Euclidean norm of a vector.
double norm2(std::span<const double> x);

}  // namespace gswlab
