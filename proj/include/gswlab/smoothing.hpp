#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "gswlab/measures.hpp"
#include "gswlab/numerics.hpp"

namespace gswlab {

struct SmoothingParams {
  double sigma = 1.0;
  double p = 1.0;
  std::size_t m_plugin = 256;
  std::size_t reps = 10;

  /// Throws InvariantError unless sigma > 0, p >= 1, m_plugin >= 2, reps >= 1.
  void validate() const;
};

/// Largest plug-in cloud handled by the exact solver: 4096 in d=1, 512 otherwise.
std::size_t max_plugin_points(std::size_t d);

/// Centered isotropic Gaussian density (2 pi)^{-d/2} sigma^{-d} e^{-|x|^2/(2 sigma^2)}.
double phi_sigma(std::span<const double> x, double sigma);

/// Density of mu * N_sigma at x: sum_k w_k phi_sigma(x - x_k).
double density_g_sigma(std::span<const double> x, const WeightedPoints& mu, double sigma);

/// {X_k + sigma Z_k} with Z_k drawn from Rng(seed).
SampleCloud smooth_cloud(const SampleCloud& cloud, double sigma, std::uint64_t seed);

/// One-dimensional density with an optional majorant of its p-th moment tail,
/// tail_moment(R) >= int_{|x|>R} |x|^p f(x) dx.
struct Density1D {
  std::function<double(double)> pdf;
  std::function<double(double, double)> tail_moment;  // (R, p) -> bound
};

/// N(center, sigma^2); tail_moment integrates the Gaussian tail by quadrature.
Density1D gaussian_density(double center, double sigma);

struct DensityDiffBound {
  double bound = 0.0;           // 2^{p-1} int_{|x|<=R} |x|^p |f - g| dx
  double tail_remainder = 0.0;  // 2^{p-1} (tail_f(R) + tail_g(R))
  double total() const { return bound + tail_remainder; }
};

/// 2^{p-1} int |x|^p |f(x) - g(x)| dx split at radius R. A density without
/// tail_moment has its tail integrated numerically; throws DomainError when
/// neither density declares one.
DensityDiffBound density_diff_bound(const Density1D& f, const Density1D& g, double p, double radius,
                                    const QuadratureSpec& quad = {});

struct SmoothedEstimate {
  double estimate = 0.0;  // mean of the per-replicate W_p^p
  double std_err = 0.0;
};

/// Plug-in estimate of E[(W_p^{(sigma)}(mu_N, mu))^p].
///
/// Replicate r draws mu_N from stream (seed, r, 0), m_plugin points of
/// mu_N * N_sigma (uniform atom resampling plus noise) from (seed, r, 1) and
/// m_plugin points of mu * N_sigma from (seed, r, 2), then takes the exact
/// W_p^p between the two clouds. Replicates run in parallel; the result does
/// not depend on the thread count.
SmoothedEstimate estimate_smoothed_wp_p(const MeasureSpec& spec, std::size_t n, const SmoothingParams& params,
                                        std::uint64_t seed);

struct PairEstimate {
  double wp_p = 0.0;  // mean over replicates of the plug-in W_p^p
  double wp_p_stderr = 0.0;
  double value = 0.0;  // wp_p^{1/p}
  double value_stderr = 0.0;  // delta method
};

/// Plug-in estimate of W_p^{(sigma)}(a, b) for two discrete measures using
/// common noise: pairs (i, j) are drawn from an optimal plan of (a, b) and
/// both points receive the same Gaussian perturbation. Each cloud is an
/// i.i.d. sample of its smoothed measure, so the estimate stays upper-biased
/// for W_p^{(sigma)}, while the shared noise keeps it below W_p(a, b) up to
/// sampling error of the plan cost.
PairEstimate estimate_smoothed_pair(const WeightedPoints& a, const WeightedPoints& b, const SmoothingParams& params,
                                    std::uint64_t seed);

/// Exact W_p^p between two equal-size clouds (quantile coupling in d=1,
/// network simplex otherwise).
double cloud_wp_p(const SampleCloud& x, const SampleCloud& y, double p);

}  // namespace gswlab
