#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gswlab/measures.hpp"
#include "gswlab/rng.hpp"

namespace gswlab {

/// Berry-Esseen constant used to instantiate v_0.
inline constexpr double kBerryEsseen = 0.4748;

/// Parameters of the sharp-rate construction at sample size N.
struct SharpRateQuantities {
  double n = 0.0;
  double l_n = 0.0;  // log2 N
  int k_n = 0;       // floor(log2 L_N)
  double x_n = 0.0;  // 2^{k_N}
  double r_n = 0.0;  // 2^{k_N - 3}
  double w_n = 0.0;  // 2^{-k_N^2 - 1}, mass of x_N
  double c_0 = 0.0;  // (1 - Phi(1/2)) / 2
  double c_1 = 0.0;  // sqrt(3)/4
  double v_0 = 0.0;  // ceil((C_BE / c_0)^2)
  double c_be = kBerryEsseen;
};

/// Throws DomainError for N < 16.
SharpRateQuantities sharp_quantities(double n);

/// Binomial pmf P(Bin(n, prob) = k) via the saddle-point (deviance) form,
/// accurate to a few ulps for all n.
double binomial_pmf(std::int64_t k, std::int64_t n, double prob);

/// P(Bin(n, prob) >= k), summed upward from k with the pmf recurrence.
double binomial_upper_tail(std::int64_t k, std::int64_t n, double prob);

struct BinomialEventProb {
  double prob = 0.0;
  double std_err = 0.0;  // zero on the exact path
  bool exact = true;
  std::int64_t threshold = 0;  // ceil(n prob + sqrt(n prob (1 - prob)) / 2)
};

/// Largest n handled by exact summation.
inline constexpr std::int64_t kBinomialExactMax = 10'000'000;

/// P(Bin(n, prob) >= threshold). Exact for n <= kBinomialExactMax, otherwise
/// mc_reps Monte Carlo draws from stream (seed, 0, 0) with reported stderr.
BinomialEventProb binomial_event_prob(std::int64_t n, double prob, std::size_t mc_reps = 1'000'000,
                                      std::uint64_t seed = 0);

/// Exact binomial draws by inverse CDF over [mean - 40 sd, mean + 40 sd];
/// the table is built once and draws consume one uniform each.
class BinomialSampler {
 public:
  BinomialSampler(std::int64_t n, double prob);
  std::int64_t operator()(Rng& rng) const;

 private:
  std::int64_t lo_ = 0;
  std::vector<double> cdf_;
};

/// Sum of weight * P(atom + sigma Z in [a, b]) over atoms of a 1-d measure.
/// Throws InvariantError for dimension other than 1.
double mass_smoothed_interval(const WeightedPoints& measure, double sigma, double a, double b);

/// Upper bound on mu^sigma([a, b]) for the untruncated sharp-rate measure:
/// the truncation at k_max = 7 plus its omitted mass.
double sharp_rate_smoothed_mass_ub(double sigma, double a, double b);

struct LowerBoundReport {
  SharpRateQuantities q;
  double sigma = 0.0, p = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::int64_t en_threshold = 0;  // smallest S_N in E_N
  double freq_en = 0.0;
  double freq_en_stderr = 0.0;
  double event_prob = 0.0;  // exact P(E_N)
  double binomial_prob = 0.0;  // binomial_event_prob(N, w_N)
  double eps_n = 0.0;       // 2 (1 - Phi(r_N / sigma))
  double delta_n = 0.0;     // 2 (1 - Phi(2^{k_N - 2} / sigma))
  double error_budget = 0.0;  // (c_1/4) sqrt(w_N / N)
  bool errors_ok = false;
  double gaussian_tail_bound = 0.0;  // 2 e^{-r_N^2/(2 sigma^2)}
  bool tail_bound_dominates = false;
  double true_mass_ub = 0.0;  // mu^sigma(B_N^{(r_N)})
  double min_mass_gap = 0.0;  // over replicates in E_N
  double certified_lb = 0.0;
  double closed_form_lb = 0.0;  // C N^{-1/2} 2^{k_N p - k_N^2/2}
};

/// Desk-scale audit of the lower-bound chain in dimension 1. Replicate r draws
/// S_N ~ Bin(N, w_N) from stream (seed, r, 0).
LowerBoundReport lower_bound_experiment(double n, double sigma, double p, std::size_t reps, std::uint64_t seed);

/// Mass inequalities on realized clouds of the sharp-rate measure:
///   mu_N^sigma(B_N) >= (1 - eps_N) W_N   and   mu^sigma(B_N^{(r_N)}) <= w_N + delta_N.
struct MassCheck {
  double empirical_mass = 0.0;  // mu_N^sigma(B_N)
  double empirical_lb = 0.0;    // (1 - eps_N) W_N
  double true_mass = 0.0;       // mu^sigma(B_N^{(r_N)})
  double true_ub = 0.0;         // w_N + delta_N
  bool holds = false;
};
std::vector<MassCheck> sharp_mass_checks(double n, double sigma, std::size_t clouds, std::uint64_t seed);

struct EpsilonAuditRow {
  double n = 0.0;
  int k_n = 0;
  double factor = 0.0;  // 2^{k_N p - k_N^2/2}
  double n_pow = 0.0;   // N^{-eps}
  bool holds = false;   // factor >= n_pow
  double scaled_lb = 0.0;  // closed_form_lb * N^{1/2 + eps}
};

struct EpsilonAudit {
  std::vector<EpsilonAuditRow> rows;
  /// Smallest grid N from which the inequality holds at every larger grid point.
  std::optional<double> threshold_n;
};

EpsilonAudit epsilon_vs_rate_audit(double p, double eps, const std::vector<double>& n_grid);

/// C = (c_1 c_0 / 2) 2^{-3p - 1/2}.
double sharp_rate_constant(double p);

}  // namespace gswlab
