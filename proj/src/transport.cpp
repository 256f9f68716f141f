#include "gswlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "gswlab/errors.hpp"
#include "gswlab/numerics.hpp"

namespace gswlab {

namespace {

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("transport: p must be >= 1");
}

void require_same_dim(const WeightedPoints& a, const WeightedPoints& b) {
  if (a.size() == 0 || b.size() == 0) throw InvariantError("transport: empty measure");
  if (a.dim() != b.dim()) throw InvariantError("transport: dimension mismatch");
}

double distance_power(std::span<const double> x, std::span<const double> y, double p) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double t = x[k] - y[k];
    s += t * t;
  }
  if (p == 2.0) return s;
  if (p == 1.0) return std::sqrt(s);
  return std::pow(s, 0.5 * p);
}

double power_abs(double t, double p) {
  t = std::abs(t);
  if (p == 1.0) return t;
  if (p == 2.0) return t * t;
  return std::pow(t, p);
}

std::vector<std::size_t> sorted_order(const WeightedPoints& m) {
  std::vector<std::size_t> idx(m.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return m.points[i][0] < m.points[j][0]; });
  return idx;
}

double root_p(double cost, double p) {
  cost = std::max(cost, 0.0);
  if (p == 1.0) return cost;
  if (p == 2.0) return std::sqrt(cost);
  return std::pow(cost, 1.0 / p);
}

}  // namespace

// ---------------------------------------------------------------------------
// One dimension
// ---------------------------------------------------------------------------

TransportResult transport_1d(const WeightedPoints& a, const WeightedPoints& b, double p) {
  require_p(p);
  require_same_dim(a, b);
  if (a.dim() != 1) throw InvariantError("transport_1d: inputs must be one-dimensional");
  const auto ia = sorted_order(a);
  const auto ib = sorted_order(b);
  TransportResult res;
  std::vector<double> costs;
  std::size_t s = 0, t = 0;
  double ra = a.weights[ia[0]], rb = b.weights[ib[0]];
  auto emit = [&](double mass) {
    if (mass <= 0.0) return;
    const std::size_t i = ia[s], j = ib[t];
    res.plan.pairs.push_back({i, j, mass});
    costs.push_back(mass * power_abs(a.points[i][0] - b.points[j][0], p));
  };
  while (s < ia.size() && t < ib.size()) {
    if (ra < rb) {
      emit(ra);
      rb -= ra;
      if (++s < ia.size()) ra = a.weights[ia[s]];
    } else if (rb < ra) {
      emit(rb);
      ra -= rb;
      if (++t < ib.size()) rb = b.weights[ib[t]];
    } else {
      emit(ra);
      if (++s < ia.size()) ra = a.weights[ia[s]];
      if (++t < ib.size()) rb = b.weights[ib[t]];
    }
  }
  std::sort(res.plan.pairs.begin(), res.plan.pairs.end(), [](const PlanEntry& x, const PlanEntry& y) {
    return x.source != y.source ? x.source < y.source : x.target < y.target;
  });
  res.plan.cost_p = pairwise_sum(costs);
  res.value = root_p(res.plan.cost_p, p);
  return res;
}

double wasserstein_1d(const WeightedPoints& a, const WeightedPoints& b, double p) {
  require_p(p);
  require_same_dim(a, b);
  if (a.dim() != 1) throw InvariantError("wasserstein_1d: inputs must be one-dimensional");
  if (a.size() == b.size() && a.equal_weights() && b.equal_weights()) {
    std::vector<double> x(a.points.coords()), y(b.points.coords());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::vector<double> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = power_abs(x[i] - y[i], p);
    return root_p(pairwise_sum(c) / static_cast<double>(x.size()), p);
  }
  return transport_1d(a, b, p).value;
}

// ---------------------------------------------------------------------------
// Network simplex
// ---------------------------------------------------------------------------

namespace {

// Supplies for m sources and n sinks with equal totals.
struct IntegerMarginals {
  std::vector<std::int64_t> source, sink;
};

std::vector<std::int64_t> integerize(std::span<const double> w, std::int64_t total) {
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::int64_t> out(w.size());
  std::vector<std::pair<double, std::size_t>> rema(w.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = w[i] / sum * static_cast<double>(total);
    out[i] = static_cast<std::int64_t>(std::floor(x));
    assigned += out[i];
    rema[i] = {x - std::floor(x), i};
  }
  // largest remainders first, lower index on ties
  std::stable_sort(rema.begin(), rema.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[rema[k % rema.size()].second];
  for (std::size_t k = rema.size(); assigned > total; ++k) {
    auto& v = out[rema[rema.size() - 1 - (k % rema.size())].second];
    if (v > 0) {
      --v;
      --assigned;
    }
  }
  return out;
}

IntegerMarginals integer_marginals(const WeightedPoints& a, const WeightedPoints& b) {
  IntegerMarginals im;
  const auto m = static_cast<std::int64_t>(a.size());
  const auto n = static_cast<std::int64_t>(b.size());
  if (a.equal_weights() && b.equal_weights()) {
    im.source.assign(a.size(), n);
    im.sink.assign(b.size(), m);
  } else {
    constexpr std::int64_t kScale = 1'000'000'000;
    im.source = integerize(a.weights, kScale);
    im.sink = integerize(b.weights, kScale);
  }
  return im;
}

// Primal network simplex for the uncapacitated transportation problem,
// started from the artificial-root tree (strongly feasible) and pivoting with
// block search pricing and the strongly-feasible leaving-arc rule.
class NetworkSimplex {
 public:
  static constexpr int kUp = 1;
  static constexpr int kDown = -1;

  NetworkSimplex(std::vector<double> cost, std::size_t m, std::size_t n, const IntegerMarginals& im)
      : m_(m), n_(n), mn_(m * n), nodes_(m + n + 1), root_(m + n), cost_(std::move(cost)) {
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, c);
    max_cost_ = max_cost;
    art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_);
    eps_ = 1e-11 * std::max(max_cost, std::numeric_limits<double>::min());

    flow_.assign(mn_ + nodes_ - 1, 0);
    in_tree_.assign(mn_, 0);
    parent_.assign(nodes_, -1);
    pred_.assign(nodes_, -1);
    dir_.assign(nodes_, 0);
    depth_.assign(nodes_, 0);
    pi_.assign(nodes_, 0.0L);
    first_child_.assign(nodes_, -1);
    next_sib_.assign(nodes_, -1);
    prev_sib_.assign(nodes_, -1);
    supply_.assign(nodes_, 0);
    for (std::size_t i = 0; i < m_; ++i) supply_[i] = im.source[i];
    for (std::size_t j = 0; j < n_; ++j) supply_[m_ + j] = -im.sink[j];

    for (std::size_t v = 0; v < m_ + n_; ++v) {
      const auto e = static_cast<std::int64_t>(mn_ + v);
      parent_[v] = static_cast<std::int64_t>(root_);
      pred_[v] = e;
      depth_[v] = 1;
      if (supply_[v] >= 0) {
        dir_[v] = kUp;
        flow_[e] = supply_[v];
        pi_[v] = -static_cast<long double>(art_cost_);
      } else {
        dir_[v] = kDown;
        flow_[e] = -supply_[v];
        pi_[v] = static_cast<long double>(art_cost_);
      }
      link_child(static_cast<std::int64_t>(root_), static_cast<std::int64_t>(v));
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(mn_)))));
  }

  void solve() {
    for (;;) {
      const std::int64_t in = find_entering();
      if (in < 0) break;
      pivot(in);
    }
    for (std::size_t v = 0; v < m_ + n_; ++v) {
      if (flow_[mn_ + v] != 0) throw InvariantError("network simplex: artificial flow remains (unbalanced input)");
    }
  }

  // Flows on the final basis recomputed from real-valued supplies.
  // Returns false when the basis is infeasible for them beyond rounding.
  bool real_flows(std::span<const double> wa, std::span<const double> wb, std::vector<double>& out) const {
    std::vector<std::int64_t> order;
    order.reserve(nodes_);
    order.push_back(static_cast<std::int64_t>(root_));
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (auto c = first_child_[order[k]]; c >= 0; c = next_sib_[c]) order.push_back(c);
    }
    std::vector<double> net(nodes_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) net[i] = wa[i];
    for (std::size_t j = 0; j < n_; ++j) net[m_ + j] = -wb[j];
    out.assign(mn_, 0.0);
    bool ok = true;
    for (std::size_t k = order.size(); k-- > 1;) {
      const auto u = order[k];
      const double f = dir_[u] == kUp ? net[u] : -net[u];
      net[parent_[u]] += net[u];
      const auto e = static_cast<std::size_t>(pred_[u]);
      if (e >= mn_) {
        if (std::abs(f) > 1e-12) ok = false;
        continue;
      }
      if (f < -1e-13) ok = false;
      out[e] = std::max(f, 0.0);
    }
    return ok;
  }

  std::int64_t flow(std::size_t e) const { return flow_[e]; }

 private:
  std::size_t src(std::size_t e) const { return e < mn_ ? e / n_ : (supply_[e - mn_] >= 0 ? e - mn_ : root_); }
  std::size_t tgt(std::size_t e) const {
    return e < mn_ ? m_ + e % n_ : (supply_[e - mn_] >= 0 ? root_ : e - mn_);
  }
  double arc_cost(std::size_t e) const { return e < mn_ ? cost_[e] : art_cost_; }

  void link_child(std::int64_t p, std::int64_t c) {
    next_sib_[c] = first_child_[p];
    prev_sib_[c] = -1;
    if (first_child_[p] >= 0) prev_sib_[first_child_[p]] = c;
    first_child_[p] = c;
  }

  void unlink_child(std::int64_t p, std::int64_t c) {
    if (prev_sib_[c] >= 0) next_sib_[prev_sib_[c]] = next_sib_[c];
    else first_child_[p] = next_sib_[c];
    if (next_sib_[c] >= 0) prev_sib_[next_sib_[c]] = prev_sib_[c];
    next_sib_[c] = prev_sib_[c] = -1;
  }

  // Most negative reduced cost within the first block holding an eligible
  // arc, scanning cyclically from where the previous search stopped. Among
  // equal reduced costs the earliest scanned arc wins.
  std::int64_t find_entering() {
    long double best_rc = -static_cast<long double>(eps_);
    std::int64_t best = -1;
    std::size_t count = block_;
    std::size_t e = next_arc_;
    std::size_t i = e / n_, j = e % n_;
    for (std::size_t k = 0; k < mn_; ++k) {
      if (!in_tree_[e]) {
        const long double rc = static_cast<long double>(cost_[e]) + pi_[i] - pi_[m_ + j];
        if (rc < best_rc) {
          best_rc = rc;
          best = static_cast<std::int64_t>(e);
        }
      }
      ++e;
      if (++j == n_) {
        j = 0;
        ++i;
      }
      if (e == mn_) {
        e = 0;
        i = 0;
        j = 0;
      }
      if (--count == 0) {
        if (best >= 0) {
          next_arc_ = e;
          return best;
        }
        count = block_;
      }
    }
    next_arc_ = e;
    return best;
  }

  std::int64_t join(std::int64_t u, std::int64_t v) const {
    while (u != v) {
      if (depth_[u] > depth_[v]) u = parent_[u];
      else if (depth_[v] > depth_[u]) v = parent_[v];
      else {
        u = parent_[u];
        v = parent_[v];
      }
    }
    return u;
  }

  void pivot(std::int64_t in) {
    const auto e_in = static_cast<std::size_t>(in);
    const auto first = static_cast<std::int64_t>(src(e_in));
    const auto second = static_cast<std::int64_t>(tgt(e_in));
    const auto top = join(first, second);

    std::int64_t delta = std::numeric_limits<std::int64_t>::max();
    std::int64_t u_out = -1;
    int side = 0;
    for (auto u = first; u != top; u = parent_[u]) {
      if (dir_[u] == kUp && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 1;
      }
    }
    for (auto u = second; u != top; u = parent_[u]) {
      if (dir_[u] == kDown && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 2;
      }
    }
    if (side == 0) throw InvariantError("network simplex: unbounded cycle");

    if (delta > 0) {
      flow_[e_in] += delta;
      for (auto u = first; u != top; u = parent_[u]) flow_[pred_[u]] += dir_[u] == kUp ? -delta : delta;
      for (auto u = second; u != top; u = parent_[u]) flow_[pred_[u]] += dir_[u] == kUp ? delta : -delta;
    }

    const std::int64_t u_in = side == 1 ? first : second;
    const std::int64_t v_in = side == 1 ? second : first;
    const auto leaving = static_cast<std::size_t>(pred_[u_out]);
    if (leaving < mn_) in_tree_[leaving] = 0;
    in_tree_[e_in] = 1;

    // reverse the path u_in .. u_out and hang it below v_in
    std::int64_t prev_node = v_in;
    std::int64_t prev_arc = in;
    int prev_dir = u_in == first ? kUp : kDown;
    std::int64_t w = u_in;
    for (;;) {
      const std::int64_t next = parent_[w];
      const std::int64_t a = pred_[w];
      const int d = dir_[w];
      unlink_child(next, w);
      parent_[w] = prev_node;
      pred_[w] = prev_arc;
      dir_[w] = prev_dir;
      link_child(prev_node, w);
      if (w == u_out) break;
      prev_node = w;
      prev_arc = a;
      prev_dir = -d;
      w = next;
    }
    refresh_subtree(u_in);
  }

  void refresh_subtree(std::int64_t r) {
    stack_.clear();
    stack_.push_back(r);
    while (!stack_.empty()) {
      const auto u = stack_.back();
      stack_.pop_back();
      const auto p = parent_[u];
      depth_[u] = depth_[p] + 1;
      const auto c = static_cast<long double>(arc_cost(static_cast<std::size_t>(pred_[u])));
      pi_[u] = dir_[u] == kUp ? pi_[p] - c : pi_[p] + c;
      for (auto ch = first_child_[u]; ch >= 0; ch = next_sib_[ch]) stack_.push_back(ch);
    }
  }

  std::size_t m_, n_, mn_, nodes_, root_;
  std::vector<double> cost_;
  double max_cost_ = 0.0, art_cost_ = 0.0, eps_ = 0.0;
  std::vector<std::int64_t> flow_, supply_;
  std::vector<char> in_tree_;
  std::vector<std::int64_t> parent_, pred_, depth_, first_child_, next_sib_, prev_sib_, stack_;
  std::vector<int> dir_;
  std::vector<long double> pi_;
  std::size_t block_ = 10, next_arc_ = 0;
};

}  // namespace

TransportResult wasserstein_discrete(const WeightedPoints& a, const WeightedPoints& b, double p) {
  require_p(p);
  require_same_dim(a, b);
  const std::size_t m = a.size(), n = b.size();
  if (m > kMaxTransportArcs / n) throw CapacityError("wasserstein_discrete: m*n exceeds solver capacity");

  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = distance_power(a.points[i], b.points[j], p);
  }
  const auto im = integer_marginals(a, b);
  NetworkSimplex ns(cost, m, n, im);
  ns.solve();

  std::vector<double> flows;
  if (!ns.real_flows(a.weights, b.weights, flows)) {
    // rounding made the basis infeasible for the real weights; use the integer optimum
    const double total = static_cast<double>(std::accumulate(im.source.begin(), im.source.end(), std::int64_t{0}));
    flows.assign(m * n, 0.0);
    for (std::size_t e = 0; e < m * n; ++e) flows[e] = static_cast<double>(ns.flow(e)) / total;
  }

  TransportResult res;
  std::vector<double> terms;
  for (std::size_t e = 0; e < m * n; ++e) {
    if (flows[e] > 0.0) {
      res.plan.pairs.push_back({e / n, e % n, flows[e]});
      terms.push_back(flows[e] * cost[e]);
    }
  }
  res.plan.cost_p = pairwise_sum(terms);
  res.value = root_p(res.plan.cost_p, p);
  return res;
}

void check_plan(const TransportPlan& plan, const WeightedPoints& a, const WeightedPoints& b, double p, double tol) {
  std::vector<double> rows(a.size(), 0.0), cols(b.size(), 0.0);
  double cost = 0.0;
  for (const auto& e : plan.pairs) {
    if (e.source >= a.size() || e.target >= b.size()) throw InvariantError("plan: index out of range");
    if (!(e.mass >= 0.0)) throw InvariantError("plan: negative mass");
    rows[e.source] += e.mass;
    cols[e.target] += e.mass;
    cost += e.mass * distance_power(a.points[e.source], b.points[e.target], p);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(rows[i] - a.weights[i]) > tol) throw InvariantError("plan: source marginal mismatch");
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (std::abs(cols[j] - b.weights[j]) > tol) throw InvariantError("plan: target marginal mismatch");
  }
  if (!(plan.cost_p >= 0.0) || std::abs(cost - plan.cost_p) > tol * std::max(1.0, cost)) {
    throw InvariantError("plan: cost does not match entries");
  }
}

double ball_mass(const WeightedPoints& m, std::span<const double> center, double radius) {
  if (center.size() != m.dim()) throw InvariantError("ball_mass: center dimension mismatch");
  double mass = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (distance_power(m.points[i], center, 2.0) <= radius * radius) mass += m.weights[i];
  }
  return mass;
}

double neighborhood_lower_bound(double mass_a_b, double mass_b_br, double r, double p) {
  require_p(p);
  if (!(r > 0.0)) throw DomainError("neighborhood_lower_bound: r must be positive");
  return std::pow(r, p) * std::max(0.0, mass_a_b - mass_b_br);
}

double neighborhood_lower_bound(const WeightedPoints& a, const WeightedPoints& b, std::span<const double> center,
                                double radius_b, double r, double p) {
  require_same_dim(a, b);
  if (!(radius_b >= 0.0)) throw DomainError("neighborhood_lower_bound: radius must be >= 0");
  return neighborhood_lower_bound(ball_mass(a, center, radius_b), ball_mass(b, center, radius_b + r), r, p);
}

}  // namespace gswlab
