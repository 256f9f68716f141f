#include "gswlab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "gswlab/errors.hpp"

namespace gswlab {

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
    throw InvariantError("QuadratureSpec: tolerances must be positive and max_subdivisions >= 1");
  }
}

// ---------------------------------------------------------------------------
// Gamma function
// ---------------------------------------------------------------------------

namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;
constexpr double kLogSqrtTwoPi = 0.91893853320467274178032973640562;

// Series part A(x) for Gamma(x + 1) = sqrt(2 pi) t^{x+1/2} e^{-t} A(x), t = x + g + 1/2.
double lanczos_series(double x) {
  double a = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) a += kLanczosCoef[i] / (x + static_cast<double>(i));
  return a;
}

// Valid for x >= 0.5.
double gamma_lanczos(double x) {
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  const double half = std::pow(t, 0.5 * (xm1 + 0.5));
  return kSqrtTwoPi * lanczos_series(xm1) * half * (half * std::exp(-t));
}

double log_gamma_lanczos(double x) {
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return kLogSqrtTwoPi + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_series(xm1));
}

constexpr double kGammaOverflow = 171.6243769563027;

}  // namespace

double gamma_fn(double x) {
  if (std::isnan(x) || x <= 0.0) throw DomainError("gamma_fn: argument must be positive");
  if (x > kGammaOverflow) throw OverflowError("gamma_fn: result overflows double");
  // small positive integers are exact
  if (x == std::floor(x) && x <= 20.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) f *= k;
    return f;
  }
  if (x < 0.5) {
    return kPi / (std::sin(kPi * x) * gamma_lanczos(1.0 - x));
  }
  return gamma_lanczos(x);
}

double log_gamma_fn(double x) {
  if (std::isnan(x) || x <= 0.0) throw DomainError("log_gamma_fn: argument must be positive");
  if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - log_gamma_lanczos(1.0 - x);
  if (x <= 20.0) return std::log(gamma_fn(x));
  return log_gamma_lanczos(x);
}

// ---------------------------------------------------------------------------
// Normal distribution
// ---------------------------------------------------------------------------

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double gaussian_tail_1d(double u) { return std::exp(-0.5 * u * u); }

double gaussian_tail_d(double t, double sigma, int d) {
  if (!(sigma > 0.0) || d < 1) throw DomainError("gaussian_tail_d: need sigma > 0 and d >= 1");
  return 2.0 * d * std::exp(-t * t / (2.0 * d * sigma * sigma));
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

double checked(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw IntegrationError("integrate: integrand not finite at x = " + std::to_string(x));
  }
  return v;
}

// QUADPACK qk15 on a finite interval.
Segment gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double fc = checked(f, centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> fv1{}, fv2{};
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    const double f1 = checked(f, centr - absc);
    const double f2 = checked(f, centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * kXgk[jtwm1];
    const double f1 = checked(f, centr - absc);
    const double f2 = checked(f, centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double result = resk * hlgth;
  resabs *= std::abs(hlgth);
  resasc *= std::abs(hlgth);
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    abserr = std::max(kEps * 50.0 * resabs, abserr);
  }
  return {a, b, result, abserr};
}

QuadratureResult adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  heap.push(gauss_kronrod(f, a, b));
  double total = heap.top().value;
  double total_err = heap.top().error;
  double frozen_err = 0.0;  // error of segments too narrow to split
  double frozen_val = 0.0;
  int subdivisions = 0;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (total_err + frozen_err > tolerance()) {
    if (heap.empty()) break;
    if (subdivisions >= spec.max_subdivisions) {
      throw IntegrationError("integrate: no convergence within " +
                             std::to_string(spec.max_subdivisions) + " subdivisions");
    }
    const Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) {
      frozen_err += s.error;
      frozen_val += s.value;
      total_err -= s.error;
      continue;
    }
    const Segment left = gauss_kronrod(f, s.a, mid);
    const Segment right = gauss_kronrod(f, mid, s.b);
    ++subdivisions;
    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    heap.push(left);
    heap.push(right);
    // resum periodically to shed accumulated rounding in the running totals
    if (subdivisions % 64 == 0) {
      auto copy = heap;
      double v = 0.0, e = 0.0;
      while (!copy.empty()) {
        v += copy.top().value;
        e += copy.top().error;
        copy.pop();
      }
      total = v + frozen_val;
      total_err = e;
    }
  }
  if (frozen_err > tolerance()) {
    throw IntegrationError("integrate: error cannot be reduced below tolerance (roundoff)");
  }
  double v = frozen_val, e = frozen_err;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  return {v, e, subdivisions};
}

// Integrand on u in [0,1) for the ray [a, inf) under the chosen map.
std::function<double(double)> ray_integrand(const std::function<double(double)>& f, double a,
                                            double sign, RayMap map) {
  if (map == RayMap::rational) {
    return [&f, a, sign](double u) {
      const double w = 1.0 - u;
      const double s = a + sign * (u / w);
      if (!std::isfinite(s)) return 0.0;
      const double v = f(s);
      return v == 0.0 ? 0.0 : v / (w * w);
    };
  }
  return [&f, a, sign](double u) {
    const double w = 1.0 - u;
    const double y = u / w;
    if (y > 700.0) return 0.0;
    const double s = a + sign * std::expm1(y);
    const double v = f(s);
    return v == 0.0 ? 0.0 : v * std::exp(y) / (w * w);
  };
}

}  // namespace

QuadratureResult integrate_detailed(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec, RayMap map) {
  spec.validate();
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate: NaN bound");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_detailed(f, b, a, spec, map);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) return adaptive(f, a, b, spec);
  if (lo_inf && hi_inf) {
    QuadratureSpec half = spec;
    half.abs_tol = 0.5 * spec.abs_tol;
    const auto left = integrate_detailed(f, -kInf, 0.0, half, map);
    const auto right = integrate_detailed(f, 0.0, kInf, half, map);
    return {left.value + right.value, left.error + right.error,
            left.subdivisions + right.subdivisions};
  }
  if (hi_inf) {
    const auto g = ray_integrand(f, a, 1.0, map);
    return adaptive(g, 0.0, 1.0, spec);
  }
  const auto g = ray_integrand(f, b, -1.0, map);
  return adaptive(g, 0.0, 1.0, spec);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, RayMap map) {
  return integrate_detailed(f, a, b, spec, map).value;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace gswlab
