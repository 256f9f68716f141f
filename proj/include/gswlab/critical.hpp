#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gswlab/measures.hpp"
#include "gswlab/numerics.hpp"

namespace gswlab {

/// Radial tail P(|X| > t) paired with the order p of the moment it must carry.
///
/// Construction checks eval(0) <= 1, monotonicity on a geometric grid and
/// finiteness of M_p^p = int p t^{p-1} P(|X| > t) dt (DivergenceError).
class TailFunction {
 public:
  TailFunction(Tail tail, double p, const QuadratureSpec& quad = {});

  const Tail& tail() const { return tail_; }
  double p() const { return p_; }
  double operator()(double t) const { return tail_.eval(t); }
  /// M_p^p = H(0).
  double moment_p() const { return moment_p_; }

 private:
  Tail tail_;
  double p_;
  double moment_p_;
};

/// H(t) = int_t^inf p s^{p-1} P(|X| > s) ds by quadrature.
double h_mu(const TailFunction& tail, double t, const QuadratureSpec& quad = {});

/// A calibration G with the data entering the rate bound.
struct CalibrationFunction {
  std::string name;
  double p = 1.0;
  std::function<double(double)> eval;
  double expected_g = 0.0;         // E[G(|X|)]
  double expected_g_stderr = 0.0;  // zero when computed by quadrature
  double t_max = 1e8;              // upper end of the grids used by the property checks

  double operator()(double t) const { return eval(t); }
};

/// G(t) = int_0^t p s^{p-1} / sqrt(H(s)) ds by nested quadrature (no cache).
/// Throws DomainError when H vanishes on [0, t].
double g_mu_canonical(const TailFunction& tail, double t, const QuadratureSpec& quad = {});

/// Canonical G with cached H and G.
///
/// H and G are tabulated on the nodes 0, 1e-6 * rho^k (rho = 2^{1/16}) up to
/// t_max. H(t) between nodes is the node value above t plus the local tail
/// integral, so it is exact and strictly monotone. Between nodes log G is the
/// cubic Hermite interpolant built from the node values and the exact slopes
/// G'/G with G' = p t^{p-1}/sqrt(H(t)). When t_max is not given it is the smaller of 1e8
/// and the first node where H drops below 1e-30 H(0). E[G(|X|)] is computed
/// by quadrature of G'(t) P(|X| > t) on [0, t_max] plus 2 sqrt(H(t_max)).
CalibrationFunction canonical_calibration(const TailFunction& tail, double t_max = 0.0);

/// t^p (log(1+t))^alpha.
double g_mu_zygmund(double p, double alpha, double t);

/// E[|X|^p (log(1+|X|))^alpha] by quadrature of G'(t) P(|X| > t).
double zygmund_moment(const TailFunction& tail, double alpha, const QuadratureSpec& quad = {});

/// G = t^p (log(1+t))^alpha with expected value from zygmund_moment.
CalibrationFunction zygmund_calibration(const TailFunction& tail, double alpha);

/// E[G(|X|)] estimated from n samples of spec (stream (seed, 0, 0)).
struct McValue {
  double mean = 0.0;
  double std_err = 0.0;
};
McValue expected_g_monte_carlo(const CalibrationFunction& g, const MeasureSpec& spec, std::size_t n,
                               std::uint64_t seed);

/// Grid checks of the five calibration properties:
///  1. G > 0 on (0, t_max]
///  2. E[G(|X|)] finite
///  3. G(t)/t^p strictly increasing along t = 10^{k/2} in [1, t_max] and
///     its last value at least twice its first
///  4. G(t)/t^p non-decreasing (relative slack 1e-9) on 0.1, 0.2, ..., 20
///     and on the geometric grid
///  5. G(t)/t^{p+1} decreasing along the upper half of the geometric grid
///     and its last value below half its maximum
struct PropertyReport {
  bool positive = false;
  bool finite_expectation = false;
  bool superlinear = false;
  bool monotone_ratio = false;
  bool subpolynomial = false;
  std::vector<double> grid;
  bool all() const { return positive && finite_expectation && superlinear && monotone_ratio && subpolynomial; }
};
PropertyReport check_calibration_properties(const CalibrationFunction& g);

/// Monte Carlo estimates of the chain
///   E[|X|^p 1{|X|>=c}] <= (c^p/G(c)) E[G(|X|) 1{|X|>=c}] <= (c^p/G(c)) E[G(|X|)].
struct TruncationCheck {
  double lhs = 0.0, mid = 0.0, rhs = 0.0;
  double lhs_se = 0.0, mid_se = 0.0, rhs_se = 0.0;
  /// lhs <= mid and mid <= rhs, each within 3 combined standard errors.
  bool holds = false;
};
TruncationCheck truncation_bound_check(const CalibrationFunction& g, const MeasureSpec& spec, double c,
                                       std::size_t n_mc, std::uint64_t seed);

/// p / (2 (p + eps)(p + d)).
double gamma_eps(double p, int d, double eps);

/// max{2^{p-1} C_{p,d}^p, 2^{3p-2}}.
double rate_g_constant(double p, int d);

struct RateGBound {
  double leading = 0.0;
  double remainder = 0.0;
  double sigma_used = 0.0;
};

/// leading = C (1 + E G) N^{p gamma} / G(N^gamma),
/// remainder = (N^{p gamma} / G(N^gamma)) (G(N^gamma) / N^{(p+eps) gamma})^{(p+d)/p},
/// sigma_used = N^gamma / G(N^gamma)^{1/p}.
RateGBound rate_g_bound(double p, int d, double eps, const CalibrationFunction& g, double n);

/// C (1 + zygmund_moment) / (log(1 + N^gamma))^alpha.
double zygmund_bound(double p, double alpha, int d, double eps, double zygmund_moment, double n);

}  // namespace gswlab
