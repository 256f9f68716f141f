#include "gswlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "gswlab/bounds.hpp"
#include "gswlab/errors.hpp"

namespace gswlab {

// ---------------------------------------------------------------------------
// Containers
// ---------------------------------------------------------------------------

PointSet::PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw InvariantError("PointSet: dimension must be positive");
  if (coords_.size() % dim_ != 0) throw InvariantError("PointSet: coordinate count not a multiple of dim");
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw InvariantError("PointSet: no rows");
  PointSet ps(rows.front().size());
  if (ps.dim_ == 0) throw InvariantError("PointSet: dimension must be positive");
  ps.reserve(rows.size());
  for (const auto& r : rows) ps.push_back(r);
  return ps;
}

PointSet PointSet::from_scalars(std::span<const double> xs) {
  return PointSet(1, std::vector<double>(xs.begin(), xs.end()));
}

void PointSet::push_back(std::span<const double> x) {
  if (dim_ == 0) dim_ = x.size();
  if (x.size() != dim_) throw InvariantError("PointSet: dimension mismatch");
  coords_.insert(coords_.end(), x.begin(), x.end());
}

namespace {

void check_weights(std::span<const double> w, double tol) {
  if (w.empty()) throw InvariantError("measure has no atoms");
  double s = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvariantError("weights must be finite and nonnegative");
    s += v;
  }
  if (std::abs(s - 1.0) > tol) {
    std::ostringstream msg;
    msg << "weights sum to " << s << ", not 1";
    throw InvariantError(msg.str());
  }
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(PointSet points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.size() != weights_.size()) throw InvariantError("DiscreteMeasure: points/weights size mismatch");
  check_weights(weights_, 1e-12);
  std::vector<std::size_t> idx(points_.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto lex_less = [this](std::size_t a, std::size_t b) {
    const auto pa = points_[a], pb = points_[b];
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::sort(idx.begin(), idx.end(), lex_less);
  for (std::size_t i = 1; i < idx.size(); ++i) {
    const auto pa = points_[idx[i - 1]], pb = points_[idx[i]];
    if (std::equal(pa.begin(), pa.end(), pb.begin())) throw InvariantError("DiscreteMeasure: repeated atom");
  }
}

DiscreteMeasure DiscreteMeasure::uniform(PointSet points) {
  const std::size_t n = points.size();
  return {std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

DiscreteMeasure DiscreteMeasure::dirac(std::span<const double> x) {
  PointSet ps(x.size());
  ps.push_back(x);
  return {std::move(ps), {1.0}};
}

WeightedPoints::WeightedPoints(PointSet pts, std::vector<double> w) : points(std::move(pts)), weights(std::move(w)) {
  if (points.size() != weights.size()) throw InvariantError("WeightedPoints: size mismatch");
  check_weights(weights, 1e-9);
}

WeightedPoints::WeightedPoints(const DiscreteMeasure& m)
    : points(m.points()), weights(m.weights().begin(), m.weights().end()) {}

WeightedPoints::WeightedPoints(const SampleCloud& c)
    : points(c.points), weights(c.size(), 1.0 / static_cast<double>(c.size())) {
  if (c.size() == 0) throw InvariantError("SampleCloud is empty");
}

bool WeightedPoints::equal_weights() const {
  return std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights.front(); });
}

double Tail::log_at(double y) const {
  if (log_at_log) return log_at_log(y);
  const double t = std::exp(y);
  const double v = eval(t);
  return v > 0.0 ? std::log(v) : -kInf;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

MeasureSpec dirac_spec(std::size_t d) {
  MeasureSpec s;
  s.name = "dirac";
  s.dimension = d;
  s.sampler = [](Rng&, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  s.tail.eval = [](double) { return 0.0; };
  s.known_moment = [](double) { return 0.0; };
  return s;
}

MeasureSpec gaussian_spec(std::size_t d) {
  MeasureSpec s;
  s.name = "gaussian";
  s.dimension = d;
  s.sampler = [](Rng& rng, std::span<double> out) { rng.fill_normal(out); };
  const double half_d = 0.5 * static_cast<double>(d);
  s.tail.eval = [half_d](double t) {
    if (t <= 0.0) return 1.0;
    return boost::math::gamma_q(half_d, 0.5 * t * t);
  };
  s.density = [d](std::span<const double> x) {
    const double r = norm2(x);
    return std::pow(2.0 * kPi, -0.5 * static_cast<double>(d)) * std::exp(-0.5 * r * r);
  };
  s.known_moment = [d](double q) { return gaussian_moment(q, static_cast<int>(d)); };
  return s;
}

MeasureSpec exponential_spec(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential_spec: rate must be positive");
  MeasureSpec s;
  s.name = "exponential";
  s.dimension = 1;
  s.sampler = [rate](Rng& rng, std::span<double> out) { out[0] = -std::log1p(-rng.uniform()) / rate; };
  s.tail.eval = [rate](double t) { return t <= 0.0 ? 1.0 : std::exp(-rate * t); };
  s.tail.log_at_log = [rate](double y) { return -rate * std::exp(y); };
  s.density = [rate](std::span<const double> x) { return x[0] < 0.0 ? 0.0 : rate * std::exp(-rate * x[0]); };
  s.known_moment = [rate](double q) { return gamma_fn(q + 1.0) / std::pow(rate, q); };
  return s;
}

MeasureSpec discrete_spec(const DiscreteMeasure& m, std::string name) {
  auto shared = std::make_shared<DiscreteMeasure>(m);
  std::vector<double> cumulative(m.size());
  std::partial_sum(m.weights().begin(), m.weights().end(), cumulative.begin());
  std::vector<double> norms(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) norms[i] = norm2(m.points()[i]);

  MeasureSpec s;
  s.name = std::move(name);
  s.dimension = m.dim();
  s.sampler = [shared, cumulative](Rng& rng, std::span<double> out) {
    const double u = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    const auto x = shared->points()[static_cast<std::size_t>(it - cumulative.begin())];
    std::copy(x.begin(), x.end(), out.begin());
  };
  s.tail.eval = [shared, norms](double t) {
    double mass = 0.0;
    for (std::size_t i = 0; i < norms.size(); ++i) {
      if (norms[i] > t) mass += shared->weights()[i];
    }
    return mass;
  };
  s.known_moment = [shared](double q) { return moment_power(WeightedPoints(*shared), q); };
  return s;
}

namespace {

// a_k = 2^{-k^2}; zero once it underflows.
double sharp_atom_mass(int k) { return std::ldexp(1.0, -k * k); }

}  // namespace

double sharp_rate_origin_mass() {
  double s = 0.0;
  for (int k = 7; k >= 1; --k) s += sharp_atom_mass(k);
  return 1.0 - s;  // terms with k >= 8 lie below 2^{-64}
}

double sharp_rate_moment_power(double q) {
  double s = 0.0;
  for (int k = 1; k < 4096; ++k) {
    const double term = std::exp2(static_cast<double>(k) * q - static_cast<double>(k) * k);
    s += term;
    if (k > q && term < 1e-18) break;
  }
  return s;
}

namespace {

void sharp_rate_draw(Rng& rng, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double a0 = sharp_rate_origin_mass();
  const double u = rng.uniform();
  if (u < a0) return;
  double v = u - a0;
  int last = 1;
  for (int k = 1; k <= 64; ++k) {
    const double ak = sharp_atom_mass(k);
    if (ak == 0.0) break;
    last = k;
    if (v < ak) {
      out[0] = (v < 0.5 * ak ? 1.0 : -1.0) * std::ldexp(1.0, k);
      return;
    }
    v -= ak;
  }
  out[0] = -std::ldexp(1.0, last);
}

}  // namespace

MeasureSpec sharp_rate_spec(std::size_t d) {
  MeasureSpec s;
  s.name = "sharp_rate";
  s.dimension = d;
  s.sampler = sharp_rate_draw;
  s.tail.eval = [](double t) {
    double mass = 0.0;
    for (int k = 64; k >= 1; --k) {
      if (std::ldexp(1.0, k) > t) mass += sharp_atom_mass(k);
    }
    return mass;
  };
  s.known_moment = sharp_rate_moment_power;
  return s;
}

DiscreteMeasure sharp_rate_measure(std::size_t d, int k_max) {
  if (k_max < 1) throw DomainError("sharp_rate_measure: k_max must be >= 1");
  if (d < 1) throw DomainError("sharp_rate_measure: d must be >= 1");
  PointSet pts(d);
  std::vector<double> w;
  std::vector<double> x(d, 0.0);
  pts.push_back(x);
  double tail_sum = 0.0;
  for (int k = k_max; k >= 1; --k) tail_sum += sharp_atom_mass(k);
  w.push_back(1.0 - tail_sum);
  for (int k = 1; k <= k_max; ++k) {
    const double half = 0.5 * sharp_atom_mass(k);
    x[0] = std::ldexp(1.0, k);
    pts.push_back(x);
    w.push_back(half);
    x[0] = -x[0];
    pts.push_back(x);
    w.push_back(half);
  }
  return {std::move(pts), std::move(w)};
}

SampleCloud sample_sharp_rate(std::size_t d, std::size_t n, std::uint64_t seed) {
  return sample(sharp_rate_spec(d), n, seed);
}

namespace {

// log(log(e + e^y)) without overflow for large y.
double log_log_e_plus_exp(double y) {
  const double inner = y > 1.0 ? y + std::log1p(std::exp(1.0 - y)) : std::log(std::exp(1.0) + std::exp(y));
  return std::log(inner);
}

}  // namespace

MeasureSpec zygmund_spec(double p, double alpha) {
  if (!(p >= 1.0) || !(alpha > 0.0)) throw DomainError("zygmund_spec: need p >= 1 and alpha > 0");
  const double k = alpha + 2.0;
  auto log_tail = [p, k](double y) { return std::min(0.0, -p * y - k * log_log_e_plus_exp(y)); };
  // t0 solves t^{-p} log(e+t)^{-k} = 1; below it the tail is 1
  double lo = -60.0, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (-p * mid - k * log_log_e_plus_exp(mid) > 0.0) lo = mid; else hi = mid;
  }
  const double log_t0 = hi;
  const double t0 = std::exp(log_t0);

  MeasureSpec s;
  std::ostringstream name;
  name << "zygmund(p=" << p << ",alpha=" << alpha << ")";
  s.name = name.str();
  s.dimension = 1;
  s.tail.log_at_log = log_tail;
  s.tail.eval = [p, k](double t) {
    if (t <= 0.0) return 1.0;
    return std::min(1.0, std::pow(t, -p) * std::pow(std::log(std::exp(1.0) + t), -k));
  };
  s.density = [p, k, t0](std::span<const double> x) {
    const double t = std::abs(x[0]);
    if (t <= t0) return 0.0;
    const double l = std::log(std::exp(1.0) + t);
    const double tail = std::pow(t, -p) * std::pow(l, -k);
    return 0.5 * tail * (p / t + k / ((std::exp(1.0) + t) * l));
  };
  s.sampler = [log_tail, log_t0](Rng& rng, std::span<double> out) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double log_u = std::log(rng.uniform_open());
    // smallest t with P(|X| > t) <= u, by bisection in log t
    double lo = log_t0, hi = log_t0 + 1.0;
    while (log_tail(hi) > log_u) {
      lo = hi;
      hi = 2.0 * hi + 1.0;
    }
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (log_tail(mid) > log_u) lo = mid; else hi = mid;
    }
    out[0] = sign * std::exp(0.5 * (lo + hi));
  };
  return s;
}

// ---------------------------------------------------------------------------
// Sampling and moments
// ---------------------------------------------------------------------------

SampleCloud sample(const MeasureSpec& spec, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                   std::uint64_t substream) {
  if (!spec.sampler) throw DomainError("sample: spec '" + spec.name + "' has no sampler");
  if (n == 0) throw DomainError("sample: N must be positive");
  Rng rng(seed, stream, substream);
  SampleCloud c;
  c.seed = seed;
  c.source = spec.name;
  std::vector<double> coords(n * spec.dimension);
  for (std::size_t i = 0; i < n; ++i) {
    spec.sampler(rng, std::span<double>(coords.data() + i * spec.dimension, spec.dimension));
  }
  c.points = PointSet(spec.dimension, std::move(coords));
  return c;
}

double moment_power(const WeightedPoints& m, double q) {
  if (!(q >= 1.0)) throw DomainError("moment: q must be >= 1");
  std::vector<double> terms(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) terms[i] = m.weights[i] * std::pow(norm2(m.points[i]), q);
  return pairwise_sum(terms);
}

double tail_power_integral(const Tail& tail, double q, double t0, const QuadratureSpec& quad) {
  if (!tail) throw DomainError("tail_power_integral: no tail function");
  if (!(q > 0.0) || !(t0 >= 0.0)) throw DomainError("tail_power_integral: need q > 0 and t0 >= 0");
  double total = 0.0;
  try {
    if (t0 < 1.0) {
      total += integrate([&](double s) { return q * std::pow(s, q - 1.0) * tail.eval(s); }, t0, 1.0, quad);
    }
    const double y0 = std::log(std::max(t0, 1.0));
    const auto in_log = [&](double y) {
      const double l = tail.log_at(y);
      if (l == -kInf) return 0.0;
      return q * std::exp(q * y + l);
    };
    total += integrate(in_log, y0, kInf, quad);
    // integrands decaying like y^{-k} leave about f(Y) Y / (k - 1) beyond Y; a
    // tail that still carries that much at Y = 600 is divergent or unresolvable
    constexpr double kProbe = 600.0;
    if (y0 < kProbe && in_log(kProbe) * kProbe > 0.01 * total) {
      throw DivergenceError("tail integral does not converge: integrand does not decay in log scale");
    }
  } catch (const IntegrationError& e) {
    throw DivergenceError(std::string("tail integral does not converge: ") + e.what());
  }
  if (!std::isfinite(total)) throw DivergenceError("tail integral is not finite");
  return total;
}

double moment_power(const MeasureSpec& spec, double q, const QuadratureSpec& quad) {
  if (!(q >= 1.0)) throw DomainError("moment: q must be >= 1");
  if (spec.known_moment) {
    const double v = spec.known_moment(q);
    if (!std::isfinite(v)) throw DivergenceError("moment of order q is infinite for " + spec.name);
    return v;
  }
  return tail_power_integral(spec.tail, q, 0.0, quad);
}

double moment(const WeightedPoints& m, double q) { return std::pow(moment_power(m, q), 1.0 / q); }

double moment(const MeasureSpec& spec, double q, const QuadratureSpec& quad) {
  return std::pow(moment_power(spec, q, quad), 1.0 / q);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

void write_header(std::ostream& out, std::size_t d, bool weight) {
  for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << "x_" << (j + 1);
  if (weight) out << ",weight";
  out << '\n';
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw InvariantError("CSV: cannot parse '" + cell + "'");
    }
    row.push_back(v);
  }
  return row;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;
};

CsvTable read_table(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        auto key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        t.meta.emplace_back(key, line.substr(eq + 1));
      }
      continue;
    }
    if (!have_header) {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) t.header.push_back(cell);
      have_header = true;
      continue;
    }
    auto row = parse_row(line);
    if (row.size() != t.header.size()) throw InvariantError("CSV: row width differs from header");
    t.rows.push_back(std::move(row));
  }
  if (!have_header || t.rows.empty()) throw InvariantError("CSV: no data rows");
  return t;
}

}  // namespace

void write_csv(std::ostream& out, const DiscreteMeasure& m) {
  const auto old = out.precision(17);
  write_header(out, m.dim(), true);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double v : m.points()[i]) out << v << ',';
    out << m.weights()[i] << '\n';
  }
  out.precision(old);
}

void write_csv(std::ostream& out, const SampleCloud& c) {
  const auto old = out.precision(17);
  out << "# source=" << c.source << '\n' << "# seed=" << c.seed << '\n';
  write_header(out, c.dim(), false);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto x = c.points[i];
    for (std::size_t j = 0; j < x.size(); ++j) out << (j ? "," : "") << x[j];
    out << '\n';
  }
  out.precision(old);
}

DiscreteMeasure read_discrete_measure_csv(std::istream& in) {
  const auto t = read_table(in);
  if (t.header.size() < 2 || t.header.back() != "weight") {
    throw InvariantError("CSV: discrete measure needs x_1..x_d and a weight column");
  }
  const std::size_t d = t.header.size() - 1;
  PointSet pts(d);
  std::vector<double> w;
  for (const auto& r : t.rows) {
    pts.push_back(std::span<const double>(r.data(), d));
    w.push_back(r.back());
  }
  check_weights(w, 1e-9);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= s;
  return {std::move(pts), std::move(w)};
}

SampleCloud read_sample_cloud_csv(std::istream& in) {
  const auto t = read_table(in);
  SampleCloud c;
  c.points = PointSet(t.header.size());
  for (const auto& r : t.rows) c.points.push_back(r);
  for (const auto& [k, v] : t.meta) {
    if (k == "seed") c.seed = std::stoull(v);
    if (k == "source") c.source = v;
  }
  return c;
}

}  // namespace gswlab
