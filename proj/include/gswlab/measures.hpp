#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gswlab/numerics.hpp"
#include "gswlab/rng.hpp"

namespace gswlab {

/// Row-major list of points in R^d.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> coords);
  static PointSet from_rows(const std::vector<std::vector<double>>& rows);
  /// One-dimensional points from scalars.
  static PointSet from_scalars(std::span<const double> xs);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  const std::vector<double>& coords() const { return coords_; }
  void push_back(std::span<const double> x);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  bool operator==(const PointSet&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Finitely supported probability measure.
///
/// Invariants: weights are nonnegative and sum to 1 within 1e-12, points are
/// pairwise distinct and share one dimension. Violations throw InvariantError.
class DiscreteMeasure {
 public:
  DiscreteMeasure(PointSet points, std::vector<double> weights);

  /// Uniform weights over the given points (which must be distinct).
  static DiscreteMeasure uniform(PointSet points);
  static DiscreteMeasure dirac(std::span<const double> x);

  const PointSet& points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return points_.dim(); }

 private:
  PointSet points_;
  std::vector<double> weights_;
};

/// Equal-weight i.i.d. sample; the empirical measure of its points.
struct SampleCloud {
  PointSet points;
  std::uint64_t seed = 0;
  std::string source;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.dim(); }
};

/// Weighted support accepted by the transport and smoothing operations.
/// Repeated points are allowed (a SampleCloud may contain ties).
struct WeightedPoints {
  PointSet points;
  std::vector<double> weights;

  WeightedPoints(PointSet pts, std::vector<double> w);
  WeightedPoints(const DiscreteMeasure& m);  // NOLINT(google-explicit-constructor)
  WeightedPoints(const SampleCloud& c);      // NOLINT(google-explicit-constructor)

  std::size_t size() const { return weights.size(); }
  std::size_t dim() const { return points.dim(); }
  bool equal_weights() const;
};

/// Radial tail t -> P(|X| > t), optionally with a log-space form
/// y -> log P(|X| > e^y) that stays finite where e^y overflows.
struct Tail {
  std::function<double(double)> eval;
  std::function<double(double)> log_at_log;

  explicit operator bool() const { return static_cast<bool>(eval); }
  double log_at(double y) const;
};

/// Catalog entry for a sampleable distribution.
struct MeasureSpec {
  std::string name;
  std::size_t dimension = 1;
  std::function<void(Rng&, std::span<double>)> sampler;
  Tail tail;
  std::function<double(std::span<const double>)> density;
  /// q -> M_q^q, possibly +inf.
  std::function<double(double)> known_moment;
};

MeasureSpec dirac_spec(std::size_t d = 1);
MeasureSpec gaussian_spec(std::size_t d = 1);
MeasureSpec exponential_spec(double rate = 1.0);
MeasureSpec discrete_spec(const DiscreteMeasure& m, std::string name = "discrete");

/// The infinite atomic measure a_0 delta_0 + sum_k (a_k/2)(delta_{x_k} + delta_{-x_k})
/// with a_k = 2^{-k^2}, x_k = 2^k e_1, sampled exactly.
MeasureSpec sharp_rate_spec(std::size_t d = 1);

/// Symmetric 1-d law with P(|X| > t) = min(1, t^{-p} log(e + t)^{-(alpha + 2)}).
/// M_p is finite, M_q is infinite for q > p, and E|X|^p log(1+|X|)^alpha < inf.
MeasureSpec zygmund_spec(double p, double alpha);

/// N i.i.d. draws; stream/substream select an independent RNG stream.
SampleCloud sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed,
                   std::uint64_t stream = 0, std::uint64_t substream = 0);

/// Truncation of the sharp-rate measure to k <= k_max; the omitted tail mass
/// sum_{k > k_max} a_k is folded into the atom at the origin.
DiscreteMeasure sharp_rate_measure(std::size_t d, int k_max);

/// Exact inverse-CDF sample of the (untruncated) sharp-rate measure.
SampleCloud sample_sharp_rate(std::size_t d, std::size_t n, std::uint64_t seed);

/// Mass a_0 = 1 - sum_{k>=1} 2^{-k^2} of the origin in the untruncated measure.
double sharp_rate_origin_mass();

/// sum_k 2^{kq - k^2} = M_q^q of the sharp-rate measure (terms summed until < 1e-18).
double sharp_rate_moment_power(double q);

/// E|X|^q = M_q^q.
double moment_power(const WeightedPoints& m, double q);
/// For specs: known_moment when declared, else quadrature of q t^{q-1} tail(t).
/// Throws DivergenceError when the tail integral is not finite.
double moment_power(const MeasureSpec& spec, double q, const QuadratureSpec& quad = {});

/// M_q = (E|X|^q)^{1/q}.
double moment(const WeightedPoints& m, double q);
double moment(const MeasureSpec& spec, double q, const QuadratureSpec& quad = {});

/// Integral of q s^{q-1} P(|X| > s) over [t0, inf).
///
/// The ray beyond max(t0, 1) is integrated in y = log s, using
/// tail.log_at_log when available, so slowly varying tails converge.
/// Throws DivergenceError when the integral is not finite.
double tail_power_integral(const Tail& tail, double q, double t0, const QuadratureSpec& quad = {});

/// CSV layout: header "x_1,...,x_d,weight", one row per atom.
void write_csv(std::ostream& out, const DiscreteMeasure& m);
/// CSV layout: "# source=..." and "# seed=..." comment lines, header "x_1,...,x_d",
/// one row per point.
void write_csv(std::ostream& out, const SampleCloud& c);
/// Throws InvariantError on malformed rows or a weight sum off by more than 1e-9.
DiscreteMeasure read_discrete_measure_csv(std::istream& in);
SampleCloud read_sample_cloud_csv(std::istream& in);

}  // namespace gswlab
