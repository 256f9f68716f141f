#include "gswlab/sharprate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gswlab/errors.hpp"
#include "gswlab/numerics.hpp"
#include "gswlab/parallel.hpp"

namespace gswlab {

SharpRateQuantities sharp_quantities(double n) {
  if (!(n >= 16.0)) throw DomainError("sharp_quantities: N must be >= 16");
  SharpRateQuantities q;
  q.n = n;
  q.l_n = std::log2(n);
  int k = 0;
  while (std::ldexp(1.0, k + 1) <= q.l_n) ++k;
  q.k_n = k;
  q.x_n = std::ldexp(1.0, k);
  q.r_n = std::ldexp(1.0, k - 3);
  q.w_n = std::ldexp(1.0, -k * k - 1);
  q.c_0 = 0.5 * normal_sf(0.5);
  q.c_1 = std::sqrt(3.0) / 4.0;
  q.v_0 = std::ceil((q.c_be / q.c_0) * (q.c_be / q.c_0));
  return q;
}

double sharp_rate_constant(double p) { return 0.5 * (std::sqrt(3.0) / 4.0) * (0.5 * normal_sf(0.5)) * std::exp2(-3.0 * p - 0.5); }

// ---------------------------------------------------------------------------
// Binomial
// ---------------------------------------------------------------------------

namespace {

// log(n!) - [(n + 1/2) log n - n + log sqrt(2 pi)]
double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0, s1 = 1.0 / 360.0, s2 = 1.0 / 1260.0, s3 = 1.0 / 1680.0, s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    return log_gamma_fn(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.91893853320467274178;
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / m) + m - x, without cancellation when x is close to m
double deviance(double x, double m) {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

}  // namespace

double binomial_pmf(std::int64_t k, std::int64_t n, double prob) {
  if (n < 0 || !(prob >= 0.0 && prob <= 1.0)) throw DomainError("binomial_pmf: invalid parameters");
  if (k < 0 || k > n) return 0.0;
  const double q = 1.0 - prob;
  if (prob == 0.0) return k == 0 ? 1.0 : 0.0;
  if (q == 0.0) return k == n ? 1.0 : 0.0;
  const double nd = static_cast<double>(n), kd = static_cast<double>(k);
  if (k == 0) return std::exp(nd * std::log1p(-prob));
  if (k == n) return std::exp(nd * std::log(prob));
  const double lc = stirling_error(nd) - stirling_error(kd) - stirling_error(nd - kd) - deviance(kd, nd * prob) -
                    deviance(nd - kd, nd * q);
  return std::exp(lc) * std::sqrt(nd / (2.0 * kPi * kd * (nd - kd)));
}

double binomial_upper_tail(std::int64_t k, std::int64_t n, double prob) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  const double ratio = prob / (1.0 - prob);
  const double mean = static_cast<double>(n) * prob;
  double term = binomial_pmf(k, n, prob);
  double sum = 0.0;
  for (std::int64_t j = k; j <= n; ++j) {
    sum += term;
    if (static_cast<double>(j) > mean && term < 1e-18 * sum) break;
    term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * ratio;
    if (term == 0.0 && static_cast<double>(j) > mean) break;
  }
  return std::min(sum, 1.0);
}

BinomialSampler::BinomialSampler(std::int64_t n, double prob) {
  if (n < 0 || !(prob > 0.0 && prob < 1.0)) throw DomainError("BinomialSampler: need n >= 0 and prob in (0,1)");
  const double mean = static_cast<double>(n) * prob;
  const double sd = std::sqrt(mean * (1.0 - prob));
  lo_ = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mean - 40.0 * sd - 10.0)));
  const auto hi = std::min<std::int64_t>(n, static_cast<std::int64_t>(std::ceil(mean + 40.0 * sd + 10.0)));
  cdf_.resize(static_cast<std::size_t>(hi - lo_ + 1));
  double acc = 0.0;
  for (std::int64_t k = lo_; k <= hi; ++k) {
    acc += binomial_pmf(k, n, prob);
    cdf_[static_cast<std::size_t>(k - lo_)] = acc;
  }
}

std::int64_t BinomialSampler::operator()(Rng& rng) const {
  const double u = rng.uniform() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return lo_ + static_cast<std::int64_t>(it - cdf_.begin());
}

BinomialEventProb binomial_event_prob(std::int64_t n, double prob, std::size_t mc_reps, std::uint64_t seed) {
  if (n < 1 || !(prob > 0.0 && prob < 1.0)) throw DomainError("binomial_event_prob: need n >= 1, prob in (0,1)");
  BinomialEventProb out;
  const double nd = static_cast<double>(n);
  out.threshold = static_cast<std::int64_t>(std::ceil(nd * prob + 0.5 * std::sqrt(nd * prob * (1.0 - prob))));
  if (n <= kBinomialExactMax) {
    out.prob = binomial_upper_tail(out.threshold, n, prob);
    return out;
  }
  if (mc_reps < 2) throw DomainError("binomial_event_prob: Monte Carlo fallback needs at least two draws");
  out.exact = false;
  BinomialSampler draw(n, prob);
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < mc_reps; ++i) hits += draw(rng) >= out.threshold ? 1 : 0;
  const double f = static_cast<double>(hits) / static_cast<double>(mc_reps);
  out.prob = f;
  out.std_err = std::sqrt(f * (1.0 - f) / static_cast<double>(mc_reps));
  return out;
}

// ---------------------------------------------------------------------------
// Smoothed masses
// ---------------------------------------------------------------------------

namespace {

// P(lo <= Z <= hi) without cancellation in either tail
double normal_interval(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo >= 0.0) return normal_sf(lo) - normal_sf(hi);
  if (hi <= 0.0) return normal_cdf(hi) - normal_cdf(lo);
  return 1.0 - normal_cdf(lo) - normal_sf(hi);
}

}  // namespace

double mass_smoothed_interval(const WeightedPoints& measure, double sigma, double a, double b) {
  if (measure.dim() != 1) throw InvariantError("mass_smoothed_interval: exact path needs dimension 1");
  if (!(sigma > 0.0)) throw DomainError("mass_smoothed_interval: sigma must be positive");
  std::vector<double> terms(measure.size());
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const double x = measure.points[i][0];
    terms[i] = measure.weights[i] * normal_interval((a - x) / sigma, (b - x) / sigma);
  }
  return pairwise_sum(terms);
}

double sharp_rate_smoothed_mass_ub(double sigma, double a, double b) {
  constexpr int kMax = 7;
  static const DiscreteMeasure truncated = sharp_rate_measure(1, kMax);
  double omitted = 0.0;
  for (int k = kMax + 1; k < 40; ++k) omitted += std::ldexp(1.0, -k * k);
  return mass_smoothed_interval(truncated, sigma, a, b) + omitted;
}

// ---------------------------------------------------------------------------
// Lower-bound experiment
// ---------------------------------------------------------------------------

LowerBoundReport lower_bound_experiment(double n, double sigma, double p, std::size_t reps, std::uint64_t seed) {
  if (!(sigma > 0.0) || !(p >= 1.0) || reps < 1) throw DomainError("lower_bound_experiment: invalid parameters");
  if (!(n <= 9.0e15) || n != std::floor(n)) throw DomainError("lower_bound_experiment: N must be an integer below 2^53");
  LowerBoundReport rep;
  rep.q = sharp_quantities(n);
  const auto& q = rep.q;
  rep.sigma = sigma;
  rep.p = p;
  rep.reps = reps;
  rep.seed = seed;
  const auto n_int = static_cast<std::int64_t>(n);

  rep.eps_n = 2.0 * normal_sf(q.r_n / sigma);
  rep.delta_n = 2.0 * normal_sf(std::ldexp(1.0, q.k_n - 2) / sigma);
  rep.error_budget = 0.25 * q.c_1 * std::sqrt(q.w_n / n);
  rep.errors_ok = rep.eps_n + rep.delta_n <= rep.error_budget;
  rep.gaussian_tail_bound = gaussian_tail_d(q.r_n, sigma, 1);
  rep.tail_bound_dominates = rep.gaussian_tail_bound >= rep.eps_n;

  // E_N = {S_N - N w_N >= c_1 sqrt(N w_N)}
  const double mean = n * q.w_n;
  rep.en_threshold = static_cast<std::int64_t>(std::ceil(mean + q.c_1 * std::sqrt(mean)));
  rep.event_prob = binomial_upper_tail(rep.en_threshold, n_int, q.w_n);
  rep.binomial_prob = binomial_event_prob(n_int, q.w_n, 1'000'000, seed).prob;

  rep.true_mass_ub = sharp_rate_smoothed_mass_ub(sigma, q.x_n - 2.0 * q.r_n, q.x_n + 2.0 * q.r_n);

  const BinomialSampler draw(n_int, q.w_n);
  std::vector<std::int64_t> counts(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed, r, 0);
    counts[r] = draw(rng);
  });
  std::size_t hits = 0;
  double min_gap = kInf;
  for (std::int64_t s : counts) {
    if (s < rep.en_threshold) continue;
    ++hits;
    const double w = static_cast<double>(s) / n;
    min_gap = std::min(min_gap, (1.0 - rep.eps_n) * w - rep.true_mass_ub);
  }
  rep.freq_en = static_cast<double>(hits) / static_cast<double>(reps);
  rep.freq_en_stderr = std::sqrt(rep.freq_en * (1.0 - rep.freq_en) / static_cast<double>(reps));
  rep.min_mass_gap = hits > 0 ? min_gap : 0.0;
  rep.certified_lb = std::pow(q.r_n, p) * std::max(0.0, rep.min_mass_gap) * rep.freq_en;
  rep.closed_form_lb = sharp_rate_constant(p) / std::sqrt(n) * std::exp2(q.k_n * p - 0.5 * q.k_n * q.k_n);
  return rep;
}

std::vector<MassCheck> sharp_mass_checks(double n, double sigma, std::size_t clouds, std::uint64_t seed) {
  const auto q = sharp_quantities(n);
  const double eps_n = 2.0 * normal_sf(q.r_n / sigma);
  const double delta_n = 2.0 * normal_sf(std::ldexp(1.0, q.k_n - 2) / sigma);
  const double true_mass = sharp_rate_smoothed_mass_ub(sigma, q.x_n - 2.0 * q.r_n, q.x_n + 2.0 * q.r_n);
  std::vector<MassCheck> out(clouds);
  parallel_for(clouds, [&](std::size_t c) {
    const auto cloud = sample_sharp_rate(1, static_cast<std::size_t>(n), seed + c);
    std::size_t at_x = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) at_x += cloud.points[i][0] == q.x_n ? 1 : 0;
    MassCheck m;
    m.empirical_mass = mass_smoothed_interval(cloud, sigma, q.x_n - q.r_n, q.x_n + q.r_n);
    m.empirical_lb = (1.0 - eps_n) * static_cast<double>(at_x) / n;
    m.true_mass = true_mass;
    m.true_ub = q.w_n + delta_n;
    m.holds = m.empirical_mass >= m.empirical_lb && m.true_mass <= m.true_ub;
    out[c] = m;
  });
  return out;
}

EpsilonAudit epsilon_vs_rate_audit(double p, double eps, const std::vector<double>& n_grid) {
  if (!(eps > 0.0)) throw DomainError("epsilon_vs_rate_audit: eps must be positive");
  EpsilonAudit audit;
  const double c = sharp_rate_constant(p);
  for (double n : n_grid) {
    const auto q = sharp_quantities(n);
    EpsilonAuditRow row;
    row.n = n;
    row.k_n = q.k_n;
    row.factor = std::exp2(q.k_n * p - 0.5 * q.k_n * q.k_n);
    row.n_pow = std::pow(n, -eps);
    row.holds = row.factor >= row.n_pow;
    row.scaled_lb = c / std::sqrt(n) * row.factor * std::pow(n, 0.5 + eps);
    audit.rows.push_back(row);
  }
  for (std::size_t i = audit.rows.size(); i-- > 0;) {
    if (!audit.rows[i].holds) break;
    audit.threshold_n = audit.rows[i].n;
  }
  return audit;
}

}  // namespace gswlab
