#include "gswlab/critical.hpp"

#include <algorithm>
#include <cmath>

#include "gswlab/bounds.hpp"
#include "gswlab/errors.hpp"

namespace gswlab {

namespace {

// H and G values span hundreds of orders of magnitude; only relative accuracy matters.
QuadratureSpec relative_only(const QuadratureSpec& quad, double rel = 0.0) {
  QuadratureSpec q = quad;
  q.abs_tol = 1e-300;
  if (rel > 0.0) q.rel_tol = rel;
  return q;
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - mean) * (v[i] - mean);
  const double n = static_cast<double>(v.size());
  return std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
}

}  // namespace

TailFunction::TailFunction(Tail tail, double p, const QuadratureSpec& quad) : tail_(std::move(tail)), p_(p) {
  if (!tail_) throw DomainError("TailFunction: no tail");
  if (!(p_ >= 1.0)) throw DomainError("TailFunction: p must be >= 1");
  if (!(tail_.eval(0.0) <= 1.0 + 1e-15)) throw InvariantError("TailFunction: P(|X| > 0) exceeds 1");
  double prev = tail_.eval(0.0);
  for (int k = -48; k <= 64; ++k) {
    const double v = tail_.eval(std::pow(10.0, k / 8.0));
    if (v > prev * (1.0 + 1e-12) + 1e-300) throw InvariantError("TailFunction: tail is increasing");
    prev = v;
  }
  moment_p_ = tail_power_integral(tail_, p_, 0.0, relative_only(quad));
}

double h_mu(const TailFunction& tail, double t, const QuadratureSpec& quad) {
  if (!(t >= 0.0)) throw DomainError("h_mu: t must be >= 0");
  return tail_power_integral(tail.tail(), tail.p(), t, relative_only(quad));
}

double g_mu_canonical(const TailFunction& tail, double t, const QuadratureSpec& quad) {
  if (!(t >= 0.0)) throw DomainError("g_mu_canonical: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double p = tail.p();
  const auto q = relative_only(quad, std::min(quad.rel_tol, 1e-10));
  const auto h_checked = [&](double s) {
    const double h = h_mu(tail, s, quad);
    if (!(h > 0.0)) throw DomainError("g_mu_canonical: H vanishes (bounded support)");
    return h;
  };
  const auto in_s = [&](double s) { return p * std::pow(s, p - 1.0) / std::sqrt(h_checked(s)); };
  double g = integrate(in_s, 0.0, std::min(t, 1.0), q);
  if (t > 1.0) {
    const auto in_y = [&](double y) {
      const double s = std::exp(y);
      return p * std::pow(s, p) / std::sqrt(h_checked(s));
    };
    g += integrate(in_y, 0.0, std::log(t), q);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Cached canonical calibration
// ---------------------------------------------------------------------------

namespace {

class CanonicalCache {
 public:
  CanonicalCache(TailFunction tail, double t_max) : tail_(std::move(tail)), quad_(relative_only({}, 1e-11)) {
    const double p = tail_.p();
    const double h0 = tail_.moment_p();
    if (!(h0 > 0.0)) throw DomainError("canonical_calibration: M_p vanishes");
    if (!(t_max > 0.0)) {
      t_max = 1.0;
      while (t_max < 1e8 && h_mu(tail_, t_max) >= 1e-30 * h0) t_max *= 2.0;
      t_max = std::min(t_max, 1e8);
    }
    t_max_ = t_max;

    nodes_.push_back(0.0);
    for (double t = kFirstNode; t < t_max_ * (1.0 - 1e-12); t *= kRatio) nodes_.push_back(t);
    nodes_.push_back(t_max_);
    const std::size_t k_last = nodes_.size() - 1;

    h_.assign(nodes_.size(), 0.0);
    h_[k_last] = h_mu(tail_, t_max_);
    if (!(h_[k_last] > 0.0)) throw DomainError("canonical_calibration: H vanishes (bounded support)");
    for (std::size_t k = k_last; k-- > 0;) {
      h_[k] = h_[k + 1] + integrate([&](double s) { return dh(s); }, nodes_[k], nodes_[k + 1], quad_);
    }
    // H(0) from the node sums agrees with M_p^p up to quadrature error; keep the node sums
    g_.assign(nodes_.size(), 0.0);
    slope_.assign(nodes_.size(), 0.0);
    double eg = 0.0;
    for (std::size_t k = 0; k < k_last; ++k) {
      const auto gp = [&, k](double s) { return p * std::pow(s, p - 1.0) / std::sqrt(local_h(k, s)); };
      g_[k + 1] = g_[k] + integrate(gp, nodes_[k], nodes_[k + 1], quad_);
      eg += integrate([&](double s) { return gp(s) * tail_(s); }, nodes_[k], nodes_[k + 1], quad_);
    }
    for (std::size_t k = 0; k <= k_last; ++k) slope_[k] = p * std::pow(nodes_[k], p - 1.0) / std::sqrt(h_[k]);
    // beyond t_max: int G' P(|X|>s) ds = int -H'/sqrt(H) = 2 sqrt(H(t_max))
    expected_g_ = eg + 2.0 * std::sqrt(h_[k_last]);
  }

  double t_max() const { return t_max_; }
  double expected_g() const { return expected_g_; }

  double h(double t) const {
    if (t >= t_max_) return h_mu(tail_, t);
    return local_h(segment(t), t);
  }

  double g(double t) const {
    if (!(t >= 0.0)) throw DomainError("G: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double p = tail_.p();
    if (t >= t_max_) {
      const auto gp = [&](double s) {
        const double hs = h_mu(tail_, s);
        if (!(hs > 0.0)) throw DomainError("G: H vanishes (bounded support)");
        return p * std::pow(s, p - 1.0) / std::sqrt(hs);
      };
      return g_.back() + integrate(gp, t_max_, t, quad_);
    }
    const std::size_t k = segment(t);
    if (k == 0) {
      const auto gp = [&](double s) { return p * std::pow(s, p - 1.0) / std::sqrt(local_h(0, s)); };
      return integrate(gp, 0.0, t, quad_);
    }
    // cubic Hermite of log G on [t_k, t_{k+1}] with exact end slopes G'/G
    const double a = nodes_[k], b = nodes_[k + 1];
    const double w = b - a;
    const double s = (t - a) / w;
    const double s2 = s * s, s3 = s2 * s;
    const double ya = std::log(g_[k]), yb = std::log(g_[k + 1]);
    const double da = slope_[k] / g_[k], db = slope_[k + 1] / g_[k + 1];
    return std::exp((2 * s3 - 3 * s2 + 1) * ya + (s3 - 2 * s2 + s) * w * da + (-2 * s3 + 3 * s2) * yb +
                    (s3 - s2) * w * db);
  }

 private:
  static constexpr double kFirstNode = 1e-6;
  static inline const double kRatio = std::exp2(1.0 / 16.0);

  double dh(double s) const { return tail_.p() * std::pow(s, tail_.p() - 1.0) * tail_(s); }

  std::size_t segment(double t) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
  }

  double local_h(std::size_t k, double s) const {
    const double v = h_[k + 1] + integrate([&](double u) { return dh(u); }, s, nodes_[k + 1], quad_);
    if (!(v > 0.0)) throw DomainError("G: H vanishes (bounded support)");
    return v;
  }

  TailFunction tail_;
  QuadratureSpec quad_;
  double t_max_ = 0.0;
  double expected_g_ = 0.0;
  std::vector<double> nodes_, h_, g_, slope_;
};

}  // namespace

CalibrationFunction canonical_calibration(const TailFunction& tail, double t_max) {
  auto cache = std::make_shared<const CanonicalCache>(tail, t_max);
  CalibrationFunction g;
  g.name = "canonical";
  g.p = tail.p();
  g.eval = [cache](double t) { return cache->g(t); };
  g.expected_g = cache->expected_g();
  g.t_max = cache->t_max();
  return g;
}

// ---------------------------------------------------------------------------
// Zygmund calibration
// ---------------------------------------------------------------------------

double g_mu_zygmund(double p, double alpha, double t) {
  if (!(p >= 1.0) || !(alpha > 0.0) || !(t >= 0.0)) throw DomainError("g_mu_zygmund: need p >= 1, alpha > 0, t >= 0");
  if (t == 0.0) return 0.0;
  return std::pow(t, p) * std::pow(std::log1p(t), alpha);
}

double zygmund_moment(const TailFunction& tail, double alpha, const QuadratureSpec& quad) {
  const double p = tail.p();
  const auto q = relative_only(quad, std::min(quad.rel_tol, 1e-10));
  const auto in_s = [&](double s) {
    const double l = std::log1p(s);
    return (p * std::pow(s, p - 1.0) * std::pow(l, alpha) + std::pow(s, p) * alpha * std::pow(l, alpha - 1.0) / (1.0 + s)) *
           tail(s);
  };
  double total = integrate(in_s, 0.0, 1.0, q);
  // y = log s on [0, inf): G'(e^y) e^y P(|X| > e^y)
  const auto in_y = [&](double y) {
    const double lt = tail.tail().log_at(y);
    if (lt == -kInf) return 0.0;
    const double l = y + std::log1p(std::exp(-y));
    const double frac = 1.0 / (1.0 + std::exp(-y));
    return std::exp(p * y + lt) * (p * std::pow(l, alpha) + alpha * std::pow(l, alpha - 1.0) * frac);
  };
  try {
    total += integrate(in_y, 0.0, kInf, q);
  } catch (const IntegrationError& e) {
    throw DivergenceError(std::string("zygmund_moment: ") + e.what());
  }
  return total;
}

CalibrationFunction zygmund_calibration(const TailFunction& tail, double alpha) {
  CalibrationFunction g;
  g.name = "zygmund";
  g.p = tail.p();
  const double p = tail.p();
  g.eval = [p, alpha](double t) { return g_mu_zygmund(p, alpha, t); };
  g.expected_g = zygmund_moment(tail, alpha);
  g.t_max = 1e8;
  return g;
}

McValue expected_g_monte_carlo(const CalibrationFunction& g, const MeasureSpec& spec, std::size_t n,
                               std::uint64_t seed) {
  const auto cloud = sample(spec, n, seed);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = g(norm2(cloud.points[i]));
  McValue out;
  out.mean = mean_of(v);
  out.std_err = stderr_of(v, out.mean);
  return out;
}

// ---------------------------------------------------------------------------
// Property checks
// ---------------------------------------------------------------------------

PropertyReport check_calibration_properties(const CalibrationFunction& g) {
  PropertyReport rep;
  const double p = g.p;
  for (int k = 0;; ++k) {
    const double t = std::pow(10.0, 0.5 * k);
    if (t > g.t_max * (1.0 + 1e-12)) break;
    rep.grid.push_back(t);
  }
  std::vector<double> fine;
  for (int k = 1; k <= 200; ++k) fine.push_back(0.1 * k);

  rep.positive = true;
  for (double t : fine) rep.positive = rep.positive && g(t) > 0.0;
  for (double t : rep.grid) rep.positive = rep.positive && g(t) > 0.0;
  for (int k = -12; k < 0; ++k) rep.positive = rep.positive && g(std::pow(10.0, 0.5 * k)) > 0.0;

  rep.finite_expectation = std::isfinite(g.expected_g) && g.expected_g >= 0.0;

  std::vector<double> ratio(rep.grid.size()), ratio_q(rep.grid.size());
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    const double t = rep.grid[i];
    const double v = g(t);
    ratio[i] = v / std::pow(t, p);
    ratio_q[i] = v / std::pow(t, p + 1.0);
  }

  rep.superlinear = ratio.size() >= 2 && ratio.back() >= 2.0 * ratio.front();
  for (std::size_t i = 1; i < ratio.size(); ++i) rep.superlinear = rep.superlinear && ratio[i] > ratio[i - 1];

  rep.monotone_ratio = true;
  double prev = 0.0;
  for (double t : fine) {
    if (t > g.t_max) break;
    const double r = g(t) / std::pow(t, p);
    rep.monotone_ratio = rep.monotone_ratio && r >= prev * (1.0 - 1e-9);
    prev = r;
  }
  for (std::size_t i = 1; i < ratio.size(); ++i) {
    rep.monotone_ratio = rep.monotone_ratio && ratio[i] >= ratio[i - 1] * (1.0 - 1e-9);
  }

  rep.subpolynomial = ratio_q.size() >= 2;
  const std::size_t half = ratio_q.size() / 2;
  for (std::size_t i = half + 1; i < ratio_q.size(); ++i) {
    rep.subpolynomial = rep.subpolynomial && ratio_q[i] < ratio_q[i - 1];
  }
  if (!ratio_q.empty()) {
    const double peak = *std::max_element(ratio_q.begin(), ratio_q.end());
    rep.subpolynomial = rep.subpolynomial && ratio_q.back() < 0.5 * peak;
  }
  return rep;
}

TruncationCheck truncation_bound_check(const CalibrationFunction& g, const MeasureSpec& spec, double c,
                                       std::size_t n_mc, std::uint64_t seed) {
  if (!(c > 0.0)) throw DomainError("truncation_bound_check: c must be positive");
  if (n_mc < 2) throw DomainError("truncation_bound_check: need at least two samples");
  const double gc = g(c);
  if (!(gc > 0.0)) throw DomainError("truncation_bound_check: G(c) must be positive");
  const double p = g.p;
  const double factor = std::pow(c, p) / gc;
  const auto cloud = sample(spec, n_mc, seed);
  std::vector<double> l(n_mc), m(n_mc), r(n_mc);
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double x = norm2(cloud.points[i]);
    const double gx = factor * g(x);
    const bool in = x >= c;
    l[i] = in ? std::pow(x, p) : 0.0;
    m[i] = in ? gx : 0.0;
    r[i] = gx;
  }
  TruncationCheck out;
  out.lhs = mean_of(l);
  out.mid = mean_of(m);
  out.rhs = mean_of(r);
  out.lhs_se = stderr_of(l, out.lhs);
  out.mid_se = stderr_of(m, out.mid);
  out.rhs_se = stderr_of(r, out.rhs);
  const double s1 = 3.0 * std::hypot(out.lhs_se, out.mid_se);
  const double s2 = 3.0 * std::hypot(out.mid_se, out.rhs_se);
  out.holds = out.lhs <= out.mid + s1 && out.mid <= out.rhs + s2;
  return out;
}

// ---------------------------------------------------------------------------
// Rate bounds
// ---------------------------------------------------------------------------

double gamma_eps(double p, int d, double eps) {
  if (!(p >= 1.0) || d < 1 || !(eps > 0.0)) throw DomainError("gamma_eps: need p >= 1, d >= 1, eps > 0");
  return p / (2.0 * (p + eps) * (p + d));
}

double rate_g_constant(double p, int d) {
  return std::max(std::pow(2.0, p - 1.0) * std::pow(c_pd(p, d), p), std::pow(2.0, 3.0 * p - 2.0));
}

RateGBound rate_g_bound(double p, int d, double eps, const CalibrationFunction& g, double n) {
  if (!(n >= 2.0)) throw DomainError("rate_g_bound: N must be >= 2");
  const double gamma = gamma_eps(p, d, eps);
  const double t = std::pow(n, gamma);
  const double gt = g(t);
  if (!(gt > 0.0)) throw DomainError("rate_g_bound: G(N^gamma) must be positive");
  const double scale = std::pow(n, p * gamma) / gt;
  RateGBound out;
  out.leading = rate_g_constant(p, d) * (1.0 + g.expected_g) * scale;
  out.remainder = scale * std::pow(gt / std::pow(n, (p + eps) * gamma), (p + d) / p);
  out.sigma_used = t / std::pow(gt, 1.0 / p);
  return out;
}

double zygmund_bound(double p, double alpha, int d, double eps, double zygmund_moment, double n) {
  if (!(n >= 2.0)) throw DomainError("zygmund_bound: N must be >= 2");
  if (!(alpha > 0.0) || !(zygmund_moment >= 0.0)) throw DomainError("zygmund_bound: need alpha > 0, moment >= 0");
  const double gamma = gamma_eps(p, d, eps);
  return rate_g_constant(p, d) * (1.0 + zygmund_moment) / std::pow(std::log1p(std::pow(n, gamma)), alpha);
}

}  // namespace gswlab
