#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gswlab/errors.hpp"
#include "gswlab/rng.hpp"
#include "gswlab/transport.hpp"

using namespace gswlab;

namespace {

WeightedPoints random_measure(Rng& rng, std::size_t d, std::size_t n) {
  PointSet pts(d);
  std::vector<double> x(d), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = rng.normal();
    pts.push_back(x);
    w[i] = 0.05 + rng.uniform();
  }
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= s;
  return {std::move(pts), std::move(w)};
}

WeightedPoints scalars(std::vector<double> xs, std::vector<double> w = {}) {
  if (w.empty()) w.assign(xs.size(), 1.0 / static_cast<double>(xs.size()));
  return {PointSet::from_scalars(xs), std::move(w)};
}

double cost(std::span<const double> x, std::span<const double> y, double p) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return std::pow(std::sqrt(s), p);
}

// Minimum of the transport cost over all basic feasible solutions: every
// spanning tree of the complete bipartite graph whose (unique) tree flow is
// nonnegative.
double brute_force_wp_p(const WeightedPoints& a, const WeightedPoints& b, double p) {
  const std::size_t m = a.size(), n = b.size(), edges = m * n, k = m + n - 1;
  std::vector<int> pick(edges, 0);
  std::fill(pick.end() - static_cast<long>(k), pick.end(), 1);
  double best = INFINITY;
  do {
    std::vector<std::size_t> chosen;
    for (std::size_t e = 0; e < edges; ++e) {
      if (pick[e]) chosen.push_back(e);
    }
    std::vector<std::size_t> parent(m + n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    bool tree = true;
    for (auto e : chosen) {
      const auto r1 = find(e / n), r2 = find(m + e % n);
      if (r1 == r2) {
        tree = false;
        break;
      }
      parent[r1] = r2;
    }
    if (!tree) continue;
    std::vector<double> supply(m + n);
    for (std::size_t i = 0; i < m; ++i) supply[i] = a.weights[i];
    for (std::size_t j = 0; j < n; ++j) supply[m + j] = -b.weights[j];
    std::vector<int> used(chosen.size(), 0);
    std::vector<double> flow(chosen.size(), 0.0);
    for (std::size_t round = 0; round < chosen.size(); ++round) {
      std::vector<int> degree(m + n, 0);
      for (std::size_t t = 0; t < chosen.size(); ++t) {
        if (!used[t]) {
          ++degree[chosen[t] / n];
          ++degree[m + chosen[t] % n];
        }
      }
      for (std::size_t t = 0; t < chosen.size(); ++t) {
        if (used[t]) continue;
        const std::size_t i = chosen[t] / n, j = m + chosen[t] % n;
        if (degree[i] == 1) {
          flow[t] = supply[i];
          supply[j] += supply[i];
          supply[i] = 0.0;
        } else if (degree[j] == 1) {
          flow[t] = -supply[j];
          supply[i] += supply[j];
          supply[j] = 0.0;
        } else {
          continue;
        }
        used[t] = 1;
        break;
      }
    }
    bool feasible = true;
    double c = 0.0;
    for (std::size_t t = 0; t < chosen.size(); ++t) {
      if (flow[t] < -1e-12) feasible = false;
      c += flow[t] * cost(a.points[chosen[t] / n], b.points[chosen[t] % n], p);
    }
    if (feasible) best = std::min(best, c);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_CASE("one-dimensional examples") {
  const auto a = scalars({0.0, 2.0});
  CHECK(wasserstein_1d(a, a, 2.0) == 0.0);
  CHECK(wasserstein_1d(scalars({0.0}), scalars({1.0}), 3.0) == doctest::Approx(1.0));
  CHECK(wasserstein_1d(a, scalars({1.0, 3.0}), 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(wasserstein_1d(WeightedPoints(PointSet::from_rows({{0.0, 0.0}}), {1.0}), scalars({1.0}), 1.0),
                  InvariantError);
}

TEST_CASE("discrete examples") {
  Rng rng(3);
  const auto a = random_measure(rng, 2, 6);
  const auto self = wasserstein_discrete(a, a, 1.5);
  CHECK(std::abs(self.value) <= 1e-12);
  for (const auto& e : self.plan.pairs) CHECK(e.source == e.target);

  const WeightedPoints dirac(PointSet::from_rows({{0.0, 0.0}}), {1.0});
  const WeightedPoints split(PointSet::from_rows({{1.0, 0.0}, {0.0, 1.0}}), {0.5, 0.5});
  const auto r = wasserstein_discrete(dirac, split, 1.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.plan.pairs.size() == 2);
  CHECK(r.plan.pairs[0].mass == doctest::Approx(0.5));
}

TEST_CASE("exact solver matches basic-solution enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_measure(rng, 2, 4);
    const auto b = random_measure(rng, 2, 4);
    const double p = trial % 2 == 0 ? 1.0 : 2.0;
    const auto r = wasserstein_discrete(a, b, p);
    CHECK(r.plan.cost_p == doctest::Approx(brute_force_wp_p(a, b, p)).epsilon(1e-9));
    CHECK_NOTHROW(check_plan(r.plan, a, b, p));
  }
  for (int trial = 0; trial < 2; ++trial) {
    const auto a = random_measure(rng, 2, 5);
    const auto b = random_measure(rng, 2, 5);
    const auto r = wasserstein_discrete(a, b, 1.0);
    CHECK(r.plan.cost_p == doctest::Approx(brute_force_wp_p(a, b, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("equal weights: optimum over permutations") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    PointSet x(3), y(3);
    std::vector<double> v(3);
    for (int i = 0; i < 6; ++i) {
      for (auto& c : v) c = rng.normal();
      x.push_back(v);
      for (auto& c : v) c = rng.normal();
      y.push_back(v);
    }
    const WeightedPoints a(x, std::vector<double>(6, 1.0 / 6)), b(y, std::vector<double>(6, 1.0 / 6));
    std::vector<int> perm{0, 1, 2, 3, 4, 5};
    double best = INFINITY;
    do {
      double c = 0.0;
      for (int i = 0; i < 6; ++i) c += cost(x[i], y[perm[i]], 2.0) / 6.0;
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(wasserstein_discrete(a, b, 2.0).plan.cost_p == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("quantile solver equals flow solver") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_measure(rng, 1, 1 + rng.below(64));
    const auto b = random_measure(rng, 1, 1 + rng.below(64));
    const double p = 1.0 + 2.0 * rng.uniform();
    const double w1 = wasserstein_1d(a, b, p);
    const double w2 = wasserstein_discrete(a, b, p).value;
    CHECK(std::abs(w1 - w2) <= 1e-9);
    CHECK_NOTHROW(check_plan(transport_1d(a, b, p).plan, a, b, p));
  }
}

TEST_CASE("metric axioms") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const double p = trial % 2 == 0 ? 1.0 : 2.0;
    const auto a = random_measure(rng, d, 1 + rng.below(20));
    const auto b = random_measure(rng, d, 1 + rng.below(20));
    const auto c = random_measure(rng, d, 1 + rng.below(20));
    const double ab = wasserstein_discrete(a, b, p).value;
    CHECK(std::abs(ab - wasserstein_discrete(b, a, p).value) <= 1e-9);
    CHECK(wasserstein_discrete(a, c, p).value <= ab + wasserstein_discrete(b, c, p).value + 1e-8);
    CHECK(ab > 0.0);
    CHECK(wasserstein_discrete(a, a, p).value <= 1e-12);
  }
}

TEST_CASE("monotone in p") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_measure(rng, 2, 2 + rng.below(10));
    const auto b = random_measure(rng, 2, 2 + rng.below(10));
    const double p = 1.0 + rng.uniform(), q = p + 2.0 * rng.uniform();
    CHECK(wasserstein_discrete(a, b, p).value <= wasserstein_discrete(a, b, q).value + 1e-12);
  }
}

TEST_CASE("plans are deterministic and tie-free in value") {
  const auto a = scalars({0.0, 1.0, 2.0});
  const auto b = scalars({0.5, 1.5, 2.5});
  const auto r1 = wasserstein_discrete(a, b, 1.0);
  const auto r2 = wasserstein_discrete(a, b, 1.0);
  REQUIRE(r1.plan.pairs.size() == r2.plan.pairs.size());
  for (std::size_t i = 0; i < r1.plan.pairs.size(); ++i) {
    CHECK(r1.plan.pairs[i].source == r2.plan.pairs[i].source);
    CHECK(r1.plan.pairs[i].target == r2.plan.pairs[i].target);
    CHECK(r1.plan.pairs[i].mass == r2.plan.pairs[i].mass);
  }
  CHECK(r1.value == doctest::Approx(0.5));
}

TEST_CASE("check_plan rejects broken plans") {
  const auto a = scalars({0.0, 1.0});
  const auto b = scalars({0.0, 1.0});
  TransportPlan plan{{{0, 0, 0.5}, {1, 1, 0.4}}, 0.0};
  CHECK_THROWS_AS(check_plan(plan, a, b, 1.0), InvariantError);
  TransportPlan neg{{{0, 0, 0.6}, {0, 1, -0.1}, {1, 1, 0.5}}, 0.1};
  CHECK_THROWS_AS(check_plan(neg, a, b, 1.0), InvariantError);
}

TEST_CASE("capacity limit") {
  std::vector<double> xs(4000);
  std::iota(xs.begin(), xs.end(), 0.0);
  const auto a = scalars(xs);
  CHECK_THROWS_AS(wasserstein_discrete(a, a, 1.0), CapacityError);
}

TEST_CASE("neighborhood lower bound") {
  const auto d0 = scalars({0.0});
  const auto d2 = scalars({2.0});
  const double c0[] = {0.0};
  CHECK(neighborhood_lower_bound(d0, d2, c0, 0.5, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(std::pow(wasserstein_1d(d0, d2, 2.0), 2.0) >= neighborhood_lower_bound(d0, d2, c0, 0.5, 1.0, 2.0));
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 2;
    const double p = trial % 3 == 0 ? 2.0 : 1.0;
    const auto a = random_measure(rng, d, 2 + rng.below(10));
    const auto b = random_measure(rng, d, 2 + rng.below(10));
    std::vector<double> center(d);
    for (auto& v : center) v = rng.normal();
    const double rb = 2.0 * rng.uniform(), r = 0.05 + 2.0 * rng.uniform();
    CHECK(neighborhood_lower_bound(a, a, center, rb, r, p) == 0.0);
    CHECK(neighborhood_lower_bound(a, b, center, rb, r, p) <=
          std::pow(wasserstein_discrete(a, b, p).value, p) + 1e-12);
  }
}
