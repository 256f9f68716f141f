#include "gswlab/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gswlab/errors.hpp"
#include "gswlab/parallel.hpp"
#include "gswlab/transport.hpp"

namespace gswlab {

void SmoothingParams::validate() const {
  if (!(sigma > 0.0)) throw InvariantError("SmoothingParams: sigma must be positive");
  if (!(p >= 1.0)) throw InvariantError("SmoothingParams: p must be >= 1");
  if (m_plugin < 2) throw InvariantError("SmoothingParams: m_plugin must be >= 2");
  if (reps < 1) throw InvariantError("SmoothingParams: reps must be >= 1");
}

std::size_t max_plugin_points(std::size_t d) { return d <= 1 ? 4096 : 512; }

double phi_sigma(std::span<const double> x, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("phi_sigma: sigma must be positive");
  const double d = static_cast<double>(x.size());
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::pow(2.0 * kPi * sigma * sigma, -0.5 * d) * std::exp(-0.5 * r2 / (sigma * sigma));
}

double density_g_sigma(std::span<const double> x, const WeightedPoints& mu, double sigma) {
  if (x.size() != mu.dim()) throw InvariantError("density_g_sigma: dimension mismatch");
  std::vector<double> diff(x.size());
  std::vector<double> terms(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto xk = mu.points[k];
    for (std::size_t j = 0; j < x.size(); ++j) diff[j] = x[j] - xk[j];
    terms[k] = mu.weights[k] * phi_sigma(diff, sigma);
  }
  return pairwise_sum(terms);
}

SampleCloud smooth_cloud(const SampleCloud& cloud, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DomainError("smooth_cloud: sigma must be >= 0");
  SampleCloud out = cloud;
  Rng rng(seed);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (double& v : out.points[i]) v += sigma * rng.normal();
  }
  return out;
}

Density1D gaussian_density(double center, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("gaussian_density: sigma must be positive");
  Density1D f;
  f.pdf = [center, sigma](double x) {
    const double z = (x - center) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
  };
  f.tail_moment = [center, sigma, pdf = f.pdf](double r, double p) {
    const auto g = [&](double x) { return std::pow(std::abs(x), p) * pdf(x); };
    QuadratureSpec q;
    q.abs_tol = 1e-14;
    return integrate(g, r, kInf, q) + integrate(g, -kInf, -r, q);
  };
  return f;
}

DensityDiffBound density_diff_bound(const Density1D& f, const Density1D& g, double p, double radius,
                                    const QuadratureSpec& quad) {
  if (!(p >= 1.0) || !(radius > 0.0)) throw DomainError("density_diff_bound: need p >= 1 and R > 0");
  if (!f.tail_moment && !g.tail_moment) throw DomainError("density_diff_bound: no tail majorant declared");
  const auto inner = [&](double x) { return std::pow(std::abs(x), p) * std::abs(f.pdf(x) - g.pdf(x)); };
  const double scale = std::pow(2.0, p - 1.0);
  DensityDiffBound out;
  out.bound = scale * (integrate(inner, -radius, 0.0, quad) + integrate(inner, 0.0, radius, quad));
  const auto tail_of = [&](const Density1D& h) {
    if (h.tail_moment) return h.tail_moment(radius, p);
    const auto w = [&](double x) { return std::pow(std::abs(x), p) * h.pdf(x); };
    return integrate(w, radius, kInf, quad) + integrate(w, -kInf, -radius, quad);
  };
  out.tail_remainder = scale * (tail_of(f) + tail_of(g));
  return out;
}

double cloud_wp_p(const SampleCloud& x, const SampleCloud& y, double p) {
  const double w = x.dim() == 1 ? wasserstein_1d(x, y, p) : wasserstein_discrete(x, y, p).value;
  return std::pow(w, p);
}

namespace {

SmoothedEstimate mean_and_stderr(const std::vector<double>& v) {
  SmoothedEstimate s;
  const double n = static_cast<double>(v.size());
  s.estimate = pairwise_sum(v) / n;
  if (v.size() > 1) {
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - s.estimate) * (v[i] - s.estimate);
    s.std_err = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  }
  return s;
}

void check_capacity(std::size_t d, std::size_t m) {
  if (m > max_plugin_points(d)) throw CapacityError("plug-in cloud exceeds solver capacity for this dimension");
}

}  // namespace

SmoothedEstimate estimate_smoothed_wp_p(const MeasureSpec& spec, std::size_t n, const SmoothingParams& params,
                                        std::uint64_t seed) {
  params.validate();
  if (n == 0) throw DomainError("estimate_smoothed_wp_p: N must be positive");
  if (!spec.sampler) throw DomainError("estimate_smoothed_wp_p: spec has no sampler");
  const std::size_t d = spec.dimension;
  const std::size_t m = params.m_plugin;
  check_capacity(d, m);
  std::vector<double> values(params.reps);
  parallel_for(params.reps, [&](std::size_t r) {
    const SampleCloud mu_n = sample(spec, n, seed, r, 0);

    SampleCloud from_empirical;
    from_empirical.points = PointSet(d, std::vector<double>(m * d));
    Rng noise_n(seed, r, 1);
    for (std::size_t k = 0; k < m; ++k) {
      const auto atom = mu_n.points[noise_n.below(n)];
      auto dst = from_empirical.points[k];
      for (std::size_t j = 0; j < d; ++j) dst[j] = atom[j] + params.sigma * noise_n.normal();
    }

    SampleCloud from_true;
    from_true.points = PointSet(d, std::vector<double>(m * d));
    Rng fresh(seed, r, 2);
    for (std::size_t k = 0; k < m; ++k) {
      auto dst = from_true.points[k];
      spec.sampler(fresh, dst);
      for (std::size_t j = 0; j < d; ++j) dst[j] += params.sigma * fresh.normal();
    }
    values[r] = cloud_wp_p(from_empirical, from_true, params.p);
  });
  return mean_and_stderr(values);
}

PairEstimate estimate_smoothed_pair(const WeightedPoints& a, const WeightedPoints& b, const SmoothingParams& params,
                                    std::uint64_t seed) {
  params.validate();
  const std::size_t d = a.dim();
  const std::size_t m = params.m_plugin;
  check_capacity(d, m);
  const auto opt = wasserstein_discrete(a, b, params.p);
  std::vector<double> cumulative(opt.plan.pairs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < cumulative.size(); ++k) cumulative[k] = acc += opt.plan.pairs[k].mass;

  std::vector<double> values(params.reps);
  parallel_for(params.reps, [&](std::size_t r) {
    Rng rng(seed, r, 3);
    SampleCloud x, y;
    x.points = PointSet(d, std::vector<double>(m * d));
    y.points = PointSet(d, std::vector<double>(m * d));
    for (std::size_t k = 0; k < m; ++k) {
      const double u = rng.uniform() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      const auto& e = opt.plan.pairs[static_cast<std::size_t>(it - cumulative.begin())];
      const auto xa = a.points[e.source];
      const auto yb = b.points[e.target];
      auto dx = x.points[k];
      auto dy = y.points[k];
      for (std::size_t j = 0; j < d; ++j) {
        const double z = params.sigma * rng.normal();
        dx[j] = xa[j] + z;
        dy[j] = yb[j] + z;
      }
    }
    values[r] = cloud_wp_p(x, y, params.p);
  });
  const auto s = mean_and_stderr(values);
  PairEstimate out;
  out.wp_p = s.estimate;
  out.wp_p_stderr = s.std_err;
  out.value = std::pow(s.estimate, 1.0 / params.p);
  if (out.value > 0.0) out.value_stderr = s.std_err / (params.p * std::pow(out.value, params.p - 1.0));
  return out;
}

}  // namespace gswlab
