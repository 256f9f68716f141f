#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gswlab/measures.hpp"

namespace gswlab {

struct PlanEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

/// Coupling restricted to its positive entries, sorted by (source, target).
struct TransportPlan {
  std::vector<PlanEntry> pairs;
  double cost_p = 0.0;  // sum of mass * |x - y|^p
};

struct TransportResult {
  double value = 0.0;  // W_p = cost_p^{1/p}
  TransportPlan plan;
};

/// Largest support product m*n accepted by the exact solver.
inline constexpr std::size_t kMaxTransportArcs = 10'000'000;

/// Exact W_p in dimension 1 by the monotone (quantile) coupling.
/// Throws InvariantError unless both inputs are one-dimensional.
double wasserstein_1d(const WeightedPoints& a, const WeightedPoints& b, double p);

/// Same as wasserstein_1d, returning the monotone plan as well.
TransportResult transport_1d(const WeightedPoints& a, const WeightedPoints& b, double p);

/// Exact W_p between finitely supported measures in any dimension.
///
/// Solves the transport linear program with a primal network simplex on the
/// complete bipartite graph. Weights are integerized before solving (equal
/// weights exactly as 1/m, 1/n via supplies n and m; otherwise scaled by 1e9
/// with largest-remainder rounding) and the optimal basis is then re-solved
/// with the real weights, so the plan marginals match the inputs.
/// Throws CapacityError when m*n exceeds kMaxTransportArcs.
TransportResult wasserstein_discrete(const WeightedPoints& a, const WeightedPoints& b, double p);

/// Throws InvariantError when masses are negative, marginals miss the
/// weights by more than tol, or cost_p disagrees with the plan.
void check_plan(const TransportPlan& plan, const WeightedPoints& a, const WeightedPoints& b, double p,
                double tol = 1e-9);

/// Total weight of atoms within distance radius (closed ball) of center.
double ball_mass(const WeightedPoints& m, std::span<const double> center, double radius);

/// r^p max(0, a(B) - b(B^{(r)})) where B is the closed ball of radius
/// radius_b about center and B^{(r)} its closed r-neighborhood.
double neighborhood_lower_bound(const WeightedPoints& a, const WeightedPoints& b,
                                std::span<const double> center, double radius_b, double r, double p);

/// Same bound from precomputed masses a(B) and b(B^{(r)}).
double neighborhood_lower_bound(double mass_a_b, double mass_b_br, double r, double p);

}  // namespace gswlab
