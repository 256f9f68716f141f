#include "gswlab/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <sstream>

#include "gswlab/bounds.hpp"
#include "gswlab/critical.hpp"
#include "gswlab/errors.hpp"
#include "gswlab/numerics.hpp"
#include "gswlab/parallel.hpp"
#include "gswlab/smoothing.hpp"
#include "gswlab/transport.hpp"

namespace gswlab {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::lowerbound: return "lowerbound";
    case ExperimentKind::verify: return "verify";
    case ExperimentKind::constants: return "constants";
    case ExperimentKind::gmu: return "gmu";
  }
  return "rate";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::rate, ExperimentKind::lowerbound, ExperimentKind::verify, ExperimentKind::constants,
                 ExperimentKind::gmu}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown experiment kind: " + s);
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("unknown output format: " + s);
}

std::vector<std::int64_t> parse_n_grid(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("malformed N grid entry: '" + item + "'");
    }
    if (pos != item.size()) throw ConfigError("malformed N grid entry: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty N grid");
  return out;
}

void ExperimentConfig::validate() const {
  if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (d < 1) throw ConfigError("d must be >= 1");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (m_plugin < 2) throw ConfigError("m_plugin must be >= 2");
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (n_grid.empty()) throw ConfigError("N grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ConfigError("N grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("N grid must be strictly increasing");
  }
  if (kind == ExperimentKind::rate || kind == ExperimentKind::constants) {
    if (!(q > p)) throw ConfigError("q must exceed p");
    const double upper = (q + d) / (p + d);
    if (!(beta > 1.0 && beta < upper)) throw ConfigError("beta must lie in (1, (q+d)/(p+d))");
  }
  if (kind == ExperimentKind::rate) {
    if (n_grid.size() < 2) throw ConfigError("rate fits need at least two grid points");
    if (reps < 10) throw ConfigError("rate experiments need reps >= 10");
    if (m_plugin > max_plugin_points(static_cast<std::size_t>(d))) throw ConfigError("m_plugin exceeds solver capacity");
  }
  if (kind == ExperimentKind::lowerbound && n_grid.front() < 16) throw ConfigError("lowerbound needs N >= 16");
  if (kind == ExperimentKind::verify) {
    const auto& names = verification_suites();
    if (std::find(names.begin(), names.end(), suite) == names.end()) throw ConfigError("unknown suite: " + suite);
  }
}

// ---------------------------------------------------------------------------
// Measure catalog
// ---------------------------------------------------------------------------

MeasureName parse_measure_name(const std::string& s) {
  MeasureName out;
  const auto colon = s.find(':');
  out.base = s.substr(0, colon);
  if (colon == std::string::npos) return out;
  std::stringstream ss(s.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("malformed measure parameter: '" + item + "'");
    try {
      std::size_t pos = 0;
      const std::string value = item.substr(eq + 1);
      out.params[item.substr(0, eq)] = std::stod(value, &pos);
      if (pos != value.size()) throw ConfigError("malformed measure parameter: '" + item + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("malformed measure parameter: '" + item + "'");
    }
  }
  return out;
}

MeasureSpec make_measure(const std::string& name) {
  const auto m = parse_measure_name(name);
  auto take = [&](const std::string& key, double fallback) {
    auto it = m.params.find(key);
    return it == m.params.end() ? fallback : it->second;
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : m.params) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
        throw ConfigError("unknown parameter '" + k + "' for measure " + m.base);
      }
    }
  };
  auto dim = [&]() {
    const double d = take("d", 1.0);
    if (!(d >= 1.0) || d != std::floor(d)) throw ConfigError("measure dimension must be a positive integer");
    return static_cast<std::size_t>(d);
  };
  try {
    if (m.base == "dirac") {
      only({"d"});
      return dirac_spec(dim());
    }
    if (m.base == "gaussian") {
      only({"d"});
      return gaussian_spec(dim());
    }
    if (m.base == "exponential") {
      only({"rate"});
      return exponential_spec(take("rate", 1.0));
    }
    if (m.base == "sharp_rate") {
      only({"d"});
      return sharp_rate_spec(dim());
    }
    if (m.base == "zygmund") {
      only({"p", "alpha"});
      return zygmund_spec(take("p", 1.0), take("alpha", 1.0));
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid measure parameters: ") + e.what());
  }
  throw ConfigError("unknown measure: " + m.base);
}

// ---------------------------------------------------------------------------
// Rate fit and rate experiment
// ---------------------------------------------------------------------------

RateFitResult rate_fit(const std::vector<double>& ns, const std::vector<double>& estimates,
                       const std::vector<double>& stderrs, bool weighted) {
  const std::size_t k = ns.size();
  if (estimates.size() != k || stderrs.size() != k) throw DomainError("rate_fit: length mismatch");
  if (k < 2) throw DomainError("rate_fit: need at least two points");
  RateFitResult out{ns, estimates, stderrs};
  std::vector<double> x(k), y(k), w(k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(ns[i] > 0.0)) throw DomainError("rate_fit: N must be positive");
    if (!(estimates[i] > 0.0)) throw DomainError("rate_fit: estimates must be positive");
    x[i] = std::log(ns[i]);
    y[i] = std::log(estimates[i]);
    if (weighted) {
      if (!(stderrs[i] > 0.0)) throw DomainError("rate_fit: weighted fit needs positive stderrs");
      w[i] = (estimates[i] / stderrs[i]) * (estimates[i] / stderrs[i]);
    }
  }
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("rate_fit: N values must not all coincide");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - out.intercept - out.slope * x[i];
    sse += w[i] * r * r;
  }
  out.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  // weighted: scale-free residual variance, as for the unweighted fit
  const double s2 = k > 2 ? sse / static_cast<double>(k - 2) : 0.0;
  out.slope_stderr = std::sqrt(s2 / sxx);
  return out;
}

RateExperimentResult run_rate_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.kind = ExperimentKind::rate;
  cfg.validate();
  const MeasureSpec spec = make_measure(cfg.measure);
  if (spec.dimension != static_cast<std::size_t>(cfg.d)) throw ConfigError("measure dimension differs from d");
  const double m_q = moment(spec, cfg.q);
  if (!std::isfinite(m_q)) throw ConfigError("measure has no finite moment of order q");

  SmoothRateConstantSpec cs{cfg.p, cfg.q, cfg.d, cfg.sigma, cfg.beta, m_q, RateVariant::carlson};
  const double c_carlson = rate_smooth_constant(cs);
  cs.variant = RateVariant::dyadic;
  const double c_dyadic = rate_smooth_constant(cs);
  const double exponent = mz_rate_exponent(cfg.beta);

  RateExperimentResult result;
  std::vector<double> ns, est, se;
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const auto n = cfg.n_grid[i];
    const SmoothingParams params{cfg.sigma, cfg.p, cfg.m_plugin, cfg.reps};
    const auto e = estimate_smoothed_wp_p(spec, static_cast<std::size_t>(n), params, cfg.seed + i);
    RateRow row;
    row.experiment = "rate";
    row.measure = cfg.measure;
    row.d = cfg.d;
    row.p = cfg.p;
    row.q = cfg.q;
    row.sigma = cfg.sigma;
    row.beta = cfg.beta;
    row.n = n;
    row.reps = cfg.reps;
    row.m_plugin = cfg.m_plugin;
    row.seed = cfg.seed;
    row.estimate = e.estimate;
    row.std_err = e.std_err;
    const double scale = std::pow(static_cast<double>(n), -exponent);
    row.bound_carlson = c_carlson * scale;
    row.bound_dyadic = c_dyadic * scale;
    try {
      row.bound_fg15_shape = fg15_rate_shape(cfg.p, cfg.q, cfg.d, static_cast<double>(n));
    } catch (const DomainError&) {
      row.bound_fg15_shape = std::nan("");
    }
    result.rows.push_back(row);
    ns.push_back(static_cast<double>(n));
    est.push_back(e.estimate);
    se.push_back(e.std_err);
  }
  result.fit = rate_fit(ns, est, se);
  return result;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_rate_csv(std::ostream& out, const RateExperimentResult& result) {
  out << "experiment,measure,d,p,q,sigma,beta,N,reps,m_plugin,seed,estimate,stderr,bound_carlson,bound_dyadic,"
         "bound_fg15_shape\n";
  for (const auto& r : result.rows) {
    out << csv_field(r.experiment) << ',' << csv_field(r.measure) << ',' << r.d << ',' << format_double(r.p) << ','
        << format_double(r.q) << ',' << format_double(r.sigma) << ',' << format_double(r.beta) << ',' << r.n << ','
        << r.reps << ',' << r.m_plugin << ',' << r.seed << ',' << format_double(r.estimate) << ','
        << format_double(r.std_err) << ',' << format_double(r.bound_carlson) << ',' << format_double(r.bound_dyadic)
        << ',' << format_double(r.bound_fg15_shape) << '\n';
  }
}

nlohmann::ordered_json rate_json(const RateExperimentResult& result) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"experiment", r.experiment},
                    {"measure", r.measure},
                    {"d", r.d},
                    {"p", r.p},
                    {"q", r.q},
                    {"sigma", r.sigma},
                    {"beta", r.beta},
                    {"N", r.n},
                    {"reps", r.reps},
                    {"m_plugin", r.m_plugin},
                    {"seed", r.seed},
                    {"estimate", r.estimate},
                    {"stderr", r.std_err},
                    {"bound_carlson", r.bound_carlson},
                    {"bound_dyadic", r.bound_dyadic},
                    {"bound_fg15_shape", r.bound_fg15_shape}});
  }
  const auto& f = result.fit;
  return {{"rows", rows},
          {"fit", {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr}, {"r2", f.r2}}}};
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

bool VerificationReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const VerificationCase& c) { return c.pass; });
}

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [](const VerificationCase& c) { return !c.pass; }));
}

const std::vector<std::string>& verification_suites() {
  static const std::vector<std::string> names{"carlson",      "mz",         "bound_lemma",    "transport_metric",
                                              "neighborhood", "truncation", "gmu_properties", "sharp_chain"};
  return names;
}

namespace {

VerificationCase leq(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, rhs - lhs, lhs <= rhs};
}

VerificationCase flag(std::string name, bool ok) { return {std::move(name), 1.0, ok ? 1.0 : 0.0, ok ? 0.0 : -1.0, ok}; }

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

WeightedPoints random_measure(Rng& rng, std::size_t d, std::size_t size, double spread) {
  PointSet pts(d);
  std::vector<double> x(d);
  std::vector<double> w(size);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    for (auto& v : x) v = spread * rng.normal();
    pts.push_back(x);
    w[i] = 0.05 + rng.uniform();
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return {std::move(pts), std::move(w)};
}

double exact_wp(const WeightedPoints& a, const WeightedPoints& b, double p) {
  return a.dim() == 1 ? wasserstein_1d(a, b, p) : wasserstein_discrete(a, b, p).value;
}

QuadratureSpec tight_quad() {
  QuadratureSpec q;
  q.abs_tol = 1e-14;
  q.rel_tol = 1e-11;
  return q;
}

VerificationReport suite_carlson() {
  VerificationReport rep{"carlson", {}};
  struct Density {
    std::string name;
    std::function<double(double)> g;  // symmetric
    double support;                    // kInf or the half-width
  };
  std::vector<Density> dens;
  for (double s : {0.5, 1.0, 2.0}) {
    dens.push_back({fmt("gaussian(sigma=%g)", s),
                    [s](double x) { return std::exp(-0.5 * x * x / (s * s)) / (s * std::sqrt(2.0 * kPi)); }, kInf});
  }
  for (double b : {0.5, 1.0, 2.0}) {
    dens.push_back({fmt("laplace(b=%g)", b), [b](double x) { return std::exp(-std::abs(x) / b) / (2.0 * b); }, kInf});
  }
  const auto quad = tight_quad();
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    auto shape = [a](double x) {
      const double u = x / a;
      return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    };
    const double z = 2.0 * integrate(shape, 0.0, a, quad);
    dens.push_back({fmt("bump(a=%g)", a), [shape, z](double x) { return shape(x) / z; }, a});
  }
  const std::vector<std::pair<double, double>> pairs{{2.0, 1.5}, {3.0, 2.0}, {5.0, 2.0}};
  constexpr int d = 1;
  for (const auto& den : dens) {
    const double lhs = 2.0 * integrate(den.g, 0.0, den.support, quad);
    for (auto [alpha, beta] : pairs) {
      const double a = 2.0 * integrate([&](double x) { return std::pow(den.g(x), beta); }, 0.0, den.support, quad);
      const double b = 2.0 * integrate([&](double x) { return std::pow(x, alpha) * std::pow(den.g(x), beta); }, 0.0,
                                       den.support, quad);
      const double e1 = (alpha - d * (beta - 1.0)) / (alpha * beta);
      const double e2 = d * (beta - 1.0) / (alpha * beta);
      const double rhs = carlson_constant(alpha, beta, d) * std::pow(a, e1) * std::pow(b, e2);
      const std::string tag = den.name + fmt(" alpha=%g beta=%g", alpha, beta);
      auto c = leq("inequality " + tag, lhs, rhs);
      c.pass = lhs <= rhs * (1.0 + 1e-6) && rhs - lhs > 0.0;
      rep.cases.push_back(c);
      const double ts = carlson_t_star(alpha, beta, d, a, b);
      const double f0 = carlson_objective(ts, alpha, beta, d, a, b);
      const double f_near = std::min(carlson_objective(1.1 * ts, alpha, beta, d, a, b),
                                     carlson_objective(0.9 * ts, alpha, beta, d, a, b));
      rep.cases.push_back(leq("t* minimality " + tag, f0, f_near));
    }
  }
  return rep;
}

VerificationReport suite_mz(std::uint64_t seed) {
  VerificationReport rep{"mz", {}};
  constexpr std::size_t kReps = 10'000;
  const auto quad = tight_quad();
  for (std::size_t ni = 0; ni < 3; ++ni) {
    const std::size_t n = ni == 0 ? 10 : ni == 1 ? 100 : 1000;
    std::vector<double> means(kReps);
    parallel_for(kReps, [&](std::size_t r) {
      Rng rng(seed, ni, r);
      std::vector<double> xi(n);
      for (auto& v : xi) v = -std::log(rng.uniform_open()) - 1.0;
      means[r] = pairwise_sum(xi) / static_cast<double>(n);
    });
    for (double beta : {1.5, 2.0, 3.0}) {
      std::vector<double> powers(kReps);
      for (std::size_t r = 0; r < kReps; ++r) powers[r] = std::pow(std::abs(means[r]), beta);
      const double norm = std::pow(pairwise_sum(powers) / kReps, 1.0 / beta);
      auto f = [beta](double x) { return std::pow(std::abs(x - 1.0), beta) * std::exp(-x); };
      const double xi_norm = std::pow(integrate(f, 0.0, 1.0, quad) + integrate(f, 1.0, kInf, quad), 1.0 / beta);
      const double bound = mz_constant(beta) * std::pow(static_cast<double>(n), -mz_rate_exponent(beta)) * xi_norm;
      rep.cases.push_back(leq(fmt("beta=%g N=%g", beta, static_cast<double>(n)), norm, bound));
    }
  }
  return rep;
}

VerificationReport suite_bound_lemma(std::uint64_t seed) {
  VerificationReport rep{"bound_lemma", {}};
  constexpr std::size_t kPairs = 50;
  const std::array<double, 3> sigmas{0.1, 0.5, 1.0};
  std::vector<VerificationCase> cases(kPairs * sigmas.size() * 2);
  parallel_for(kPairs * sigmas.size(), [&](std::size_t job) {
    const std::size_t i = job / sigmas.size(), s = job % sigmas.size();
    Rng rng(seed, i, 7);
    const std::size_t d = 1 + i % 2;
    const double p = (i % 4) < 2 ? 1.0 : 2.0;
    const auto a = random_measure(rng, d, 3 + rng.below(6), 1.5);
    const auto b = random_measure(rng, d, 3 + rng.below(6), 1.5);
    const double w = exact_wp(a, b, p);
    const SmoothingParams params{sigmas[s], p, 256, 10};
    const auto est = estimate_smoothed_pair(a, b, params, seed + 1000 * i + s);
    const std::string tag = fmt("pair=%g sigma=%g p=%g", static_cast<double>(i), sigmas[s], p);
    const double cpd = c_pd(p, static_cast<int>(d));
    cases[2 * job] = leq("W <= C sigma + Ws " + tag, w, cpd * sigmas[s] + est.value + 3.0 * est.value_stderr);
    cases[2 * job + 1] = leq("Ws <= W " + tag, est.value, w + 3.0 * est.value_stderr);
  });
  rep.cases = std::move(cases);
  return rep;
}

VerificationReport suite_transport_metric(std::uint64_t seed) {
  VerificationReport rep{"transport_metric", {}};
  constexpr std::size_t kInstances = 200;
  const std::array<double, 4> ps{1.0, 1.5, 2.0, 3.0};
  std::vector<VerificationCase> exact(kInstances);
  parallel_for(kInstances, [&](std::size_t i) {
    Rng rng(seed, i, 11);
    const double p = ps[i % ps.size()];
    const auto a = random_measure(rng, 1, 1 + rng.below(64), 2.0);
    const auto b = random_measure(rng, 1, 1 + rng.below(64), 2.0);
    const double w1 = wasserstein_1d(a, b, p);
    const double w2 = wasserstein_discrete(a, b, p).value;
    exact[i] = leq(fmt("quantile vs flow instance=%g p=%g", static_cast<double>(i), p), std::abs(w1 - w2),
                   1e-9 * std::max(1.0, w1));
  });
  std::vector<VerificationCase> metric(kInstances * 3);
  parallel_for(kInstances, [&](std::size_t i) {
    Rng rng(seed, i, 12);
    const std::size_t d = 1 + i % 3;
    const double p = (i % 2) == 0 ? 1.0 : 2.0;
    const auto a = random_measure(rng, d, 2 + rng.below(19), 1.0);
    const auto b = random_measure(rng, d, 2 + rng.below(19), 1.0);
    const auto c = random_measure(rng, d, 2 + rng.below(19), 1.0);
    const double ab = wasserstein_discrete(a, b, p).value;
    const double bc = wasserstein_discrete(b, c, p).value;
    const double ac = wasserstein_discrete(a, c, p).value;
    const double ba = wasserstein_discrete(b, a, p).value;
    const double aa = wasserstein_discrete(a, a, p).value;
    const std::string tag = fmt("triple=%g d=%g p=%g", static_cast<double>(i), static_cast<double>(d), p);
    metric[3 * i] = leq("triangle " + tag, ac, ab + bc + 1e-8);
    metric[3 * i + 1] = leq("symmetry " + tag, std::abs(ab - ba), 1e-9);
    metric[3 * i + 2] = leq("identity " + tag, aa, 1e-9);
  });
  rep.cases = std::move(exact);
  rep.cases.insert(rep.cases.end(), metric.begin(), metric.end());
  return rep;
}

VerificationReport suite_neighborhood(std::uint64_t seed) {
  VerificationReport rep{"neighborhood", {}};
  constexpr std::size_t kCases = 100;
  std::vector<VerificationCase> cases(kCases);
  parallel_for(kCases, [&](std::size_t i) {
    Rng rng(seed, i, 13);
    const std::size_t d = 1 + i % 2;
    const double p = (i % 4) < 2 ? 1.0 : 2.0;
    const auto a = random_measure(rng, d, 2 + rng.below(12), 1.5);
    const auto b = random_measure(rng, d, 2 + rng.below(12), 1.5);
    std::vector<double> center(d);
    if (rng.uniform() < 0.5) {
      const auto atom = a.points[rng.below(a.size())];
      center.assign(atom.begin(), atom.end());
    } else {
      for (auto& v : center) v = 1.5 * rng.normal();
    }
    const double radius_b = 2.0 * rng.uniform();
    const double r = 0.05 + 2.0 * rng.uniform();
    const double lb = neighborhood_lower_bound(a, b, center, radius_b, r, p);
    const double w = exact_wp(a, b, p);
    cases[i] = leq(fmt("case=%g d=%g p=%g", static_cast<double>(i), static_cast<double>(d), p), lb,
                   std::pow(w, p) + 1e-12);
  });
  rep.cases = std::move(cases);
  return rep;
}

VerificationReport suite_truncation(std::uint64_t seed) {
  VerificationReport rep{"truncation", {}};
  struct Entry {
    MeasureSpec spec;
    CalibrationFunction g;
  };
  std::vector<Entry> entries;
  {
    auto s = exponential_spec(1.0);
    entries.push_back({s, canonical_calibration(TailFunction(s.tail, 1.0))});
  }
  {
    auto s = gaussian_spec(1);
    entries.push_back({s, canonical_calibration(TailFunction(s.tail, 2.0))});
  }
  {
    auto s = zygmund_spec(1.0, 1.0);
    entries.push_back({s, zygmund_calibration(TailFunction(s.tail, 1.0), 1.0)});
  }
  {
    auto s = zygmund_spec(2.0, 0.5);
    entries.push_back({s, zygmund_calibration(TailFunction(s.tail, 2.0), 0.5)});
  }
  Rng rng(seed, 0, 14);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto& e = entries[i % entries.size()];
    const double c = 0.2 + 4.8 * rng.uniform();
    const auto t = truncation_bound_check(e.g, e.spec, c, 100'000, seed + i);
    VerificationCase vc{e.spec.name + " / " + e.g.name + fmt(" c=%.4f", c), t.lhs, t.rhs, t.rhs - t.lhs, t.holds};
    rep.cases.push_back(vc);
  }
  return rep;
}

void add_properties(VerificationReport& rep, const std::string& tag, const CalibrationFunction& g) {
  const auto pr = check_calibration_properties(g);
  rep.cases.push_back(flag(tag + " property 1 (positive)", pr.positive));
  rep.cases.push_back(flag(tag + " property 2 (finite expectation)", pr.finite_expectation));
  rep.cases.push_back(flag(tag + " property 3 (G/t^p unbounded)", pr.superlinear));
  rep.cases.push_back(flag(tag + " property 4 (G/t^p non-decreasing)", pr.monotone_ratio));
  rep.cases.push_back(flag(tag + " property 5 (G/t^q vanishing)", pr.subpolynomial));
}

VerificationReport suite_gmu_properties() {
  VerificationReport rep{"gmu_properties", {}};
  for (auto [p, alpha] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const auto s = zygmund_spec(p, alpha);
    const auto g = canonical_calibration(TailFunction(s.tail, p));
    add_properties(rep, "canonical G of " + s.name, g);
  }
  {
    const auto s = exponential_spec(1.0);
    const auto g = canonical_calibration(TailFunction(s.tail, 1.0));
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
      const double closed = 2.0 * std::expm1(0.5 * t);
      rep.cases.push_back(leq(fmt("exponential(1) G(%g) vs 2(e^{t/2}-1)", t), std::abs(g(t) - closed) / closed, 1e-6));
    }
    add_properties(rep, "canonical G of exponential(1)", g);
  }
  {
    // remainder/leading along N for the canonical Zygmund calibration
    const auto s = zygmund_spec(1.0, 1.0);
    const auto g = canonical_calibration(TailFunction(s.tail, 1.0));
    std::vector<double> ratios;
    for (double e : {10.0, 20.0, 40.0}) {
      const auto b = rate_g_bound(1.0, 1, 1.0, g, std::exp2(e));
      ratios.push_back(b.remainder / b.leading);
      rep.cases.push_back(leq(fmt("remainder/leading at N=2^%g", e), b.remainder / b.leading,
                              ratios.size() > 1 ? ratios[ratios.size() - 2] : kInf));
    }
    rep.cases.push_back(leq("remainder/leading halves across the grid", ratios.back(), 0.5 * ratios.front()));
  }
  for (auto [p, alpha] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const auto s = zygmund_spec(p, alpha);
    const auto g = zygmund_calibration(TailFunction(s.tail, p), alpha);
    for (int d : {1, 3}) {
      for (double e : {10.0, 20.0, 40.0}) {
        const double n = std::exp2(e);
        const double lead = rate_g_bound(p, d, 1.0, g, n).leading;
        const double zb = zygmund_bound(p, alpha, d, 1.0, g.expected_g, n);
        rep.cases.push_back(
            leq(fmt("zygmund_bound vs leading term p=%g alpha=%g N=2^%g", p, alpha, e) + " d=" + std::to_string(d),
                std::abs(zb - lead) / lead, 1e-10));
      }
    }
  }
  return rep;
}

VerificationReport suite_sharp_chain(std::uint64_t seed) {
  VerificationReport rep{"sharp_chain", {}};
  const double n = std::exp2(20.0);
  const auto lb = lower_bound_experiment(n, 0.25, 1.0, 10'000, seed);
  rep.cases.push_back(leq("eps_N + delta_N <= (c_1/4) sqrt(w_N/N)", lb.eps_n + lb.delta_n, lb.error_budget));
  rep.cases.push_back(flag("errors_ok", lb.errors_ok));
  rep.cases.push_back(leq("exact eps_N <= Gaussian tail bound", lb.eps_n, lb.gaussian_tail_bound));
  {
    const double sd = std::sqrt(lb.binomial_prob * (1.0 - lb.binomial_prob) / static_cast<double>(lb.reps));
    rep.cases.push_back(leq("|freq(E_N) - binomial_event_prob| <= 3 stderr", std::abs(lb.freq_en - lb.binomial_prob),
                            3.0 * sd));
    const double var = n * lb.q.w_n * (1.0 - lb.q.w_n);
    if (var >= lb.q.v_0) {
      rep.cases.push_back(leq("c_0 <= freq(E_N)", lb.q.c_0, lb.freq_en));
    } else {
      auto c = leq("c_0 <= freq(E_N) (not required: N w_N (1 - w_N) < v_0)", lb.q.c_0, lb.freq_en);
      c.pass = true;
      rep.cases.push_back(c);
    }
  }
  rep.cases.push_back(leq("0 < certified_lb", 0.0, lb.certified_lb));
  rep.cases.back().pass = lb.certified_lb > 0.0;
  rep.cases.push_back(leq("closed_form_lb / 4 <= certified_lb", 0.25 * lb.closed_form_lb, lb.certified_lb));

  const auto checks = sharp_mass_checks(4096.0, 0.25, 50, seed);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& m = checks[i];
    const std::string tag = " cloud=" + std::to_string(i);
    rep.cases.push_back(leq("(1 - eps_N) W_N <= mu_N^sigma(B_N)" + tag, m.empirical_lb, m.empirical_mass));
    rep.cases.push_back(leq("mu^sigma(B_N^(r)) <= w_N + delta_N" + tag, m.true_mass, m.true_ub));
  }

  std::vector<double> grid;
  for (int e = 8; e <= 60; ++e) grid.push_back(std::exp2(e));
  const auto audit = epsilon_vs_rate_audit(1.0, 0.5, grid);
  for (const auto& row : audit.rows) {
    if (row.n < std::exp2(16.0)) continue;
    rep.cases.push_back(leq(fmt("N^-eps <= 2^{k p - k^2/2} at N=2^%g", std::log2(row.n)), row.n_pow, row.factor));
  }

  for (int i = 0; i < 100; ++i) {
    const double nn = std::floor(16.0 * std::pow(std::exp2(30.0) / 16.0, i / 99.0));
    const auto q = sharp_quantities(nn);
    const double x = std::ldexp(1.0, q.k_n);
    const bool ok = q.l_n / 2.0 <= x && x <= q.l_n && q.r_n == std::ldexp(1.0, q.k_n - 3) &&
                    q.w_n == std::ldexp(1.0, -q.k_n * q.k_n - 1);
    rep.cases.push_back(flag(fmt("quantities sandwich N=%.0f", nn), ok));
  }

  for (int i = 0; i < 50; ++i) {
    const double target = 5.0 + 15.0 * i / 49.0;
    const auto nb = static_cast<std::int64_t>(100 + 40 * i);
    const double prob = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * target / static_cast<double>(nb)));
    const auto ev = binomial_event_prob(nb, prob);
    const double var = static_cast<double>(nb) * prob * (1.0 - prob);
    const auto q = sharp_quantities(16.0);
    auto c = leq(fmt("c_0 <= P(Bin(%g, %.6f) >= threshold)", static_cast<double>(nb), prob), q.c_0, ev.prob);
    if (var < q.v_0) {
      c.name += " (not required: n p (1-p) < v_0)";
      c.pass = true;
    }
    rep.cases.push_back(c);
  }
  return rep;
}

}  // namespace

VerificationReport run_verification_suite(const std::string& suite, std::uint64_t seed) {
  if (suite == "carlson") return suite_carlson();
  if (suite == "mz") return suite_mz(seed);
  if (suite == "bound_lemma") return suite_bound_lemma(seed);
  if (suite == "transport_metric") return suite_transport_metric(seed);
  if (suite == "neighborhood") return suite_neighborhood(seed);
  if (suite == "truncation") return suite_truncation(seed);
  if (suite == "gmu_properties") return suite_gmu_properties();
  if (suite == "sharp_chain") return suite_sharp_chain(seed);
  throw ConfigError("unknown suite: " + suite);
}

nlohmann::ordered_json report_json(const VerificationReport& report) {
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (const auto& c : report.cases) {
    cases.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass}});
  }
  return {{"suite", report.suite},
          {"passed", report.passed()},
          {"cases_total", report.cases.size()},
          {"failures", report.failures()},
          {"cases", cases}};
}

void write_report_csv(std::ostream& out, const VerificationReport& report) {
  out << "suite,case,lhs,rhs,slack,pass\n";
  for (const auto& c : report.cases) {
    out << report.suite << ',' << csv_field(c.name) << ',' << format_double(c.lhs) << ',' << format_double(c.rhs)
        << ',' << format_double(c.slack) << ',' << (c.pass ? "true" : "false") << '\n';
  }
}

// ---------------------------------------------------------------------------
// Constants, lower bound, G tables
// ---------------------------------------------------------------------------

nlohmann::ordered_json constants_json(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.kind = ExperimentKind::constants;
  cfg.validate();
  const auto spec = make_measure(cfg.measure);
  const double m_q = moment(spec, cfg.q);
  const double alpha = cfg.q - cfg.p * cfg.beta;
  SmoothRateConstantSpec cs{cfg.p, cfg.q, cfg.d, cfg.sigma, cfg.beta, m_q, RateVariant::carlson};
  const double cc = rate_smooth_constant(cs);
  cs.variant = RateVariant::dyadic;
  const double cd = rate_smooth_constant(cs);
  return {{"measure", cfg.measure},
          {"p", cfg.p},
          {"q", cfg.q},
          {"d", cfg.d},
          {"sigma", cfg.sigma},
          {"beta", cfg.beta},
          {"alpha", alpha},
          {"m_q", m_q},
          {"c_pd", c_pd(cfg.p, cfg.d)},
          {"gaussian_moment_p", gaussian_moment(cfg.p, cfg.d)},
          {"i_abd", i_abd(alpha, cfg.beta, cfg.d)},
          {"carlson_constant", carlson_constant(alpha, cfg.beta, cfg.d)},
          {"mz_constant", mz_constant(cfg.beta)},
          {"rate_exponent", mz_rate_exponent(cfg.beta)},
          {"c_beta_sigma_carlson", cc},
          {"c_beta_sigma_dyadic", cd}};
}

nlohmann::ordered_json lower_bound_json(const LowerBoundReport& r) {
  const auto& q = r.q;
  return {{"N", q.n},
          {"sigma", r.sigma},
          {"p", r.p},
          {"reps", r.reps},
          {"seed", r.seed},
          {"quantities",
           {{"N", q.n},
            {"L_N", q.l_n},
            {"k_N", q.k_n},
            {"x_N", q.x_n},
            {"r_N", q.r_n},
            {"w_N", q.w_n},
            {"c_0", q.c_0},
            {"c_1", q.c_1},
            {"v_0", q.v_0},
            {"c_be", q.c_be}}},
          {"en_threshold", r.en_threshold},
          {"freq_EN", r.freq_en},
          {"freq_EN_stderr", r.freq_en_stderr},
          {"event_prob_EN", r.event_prob},
          {"binomial_event_prob", r.binomial_prob},
          {"eps_N", r.eps_n},
          {"delta_N", r.delta_n},
          {"error_budget", r.error_budget},
          {"errors_ok", r.errors_ok},
          {"gaussian_tail_bound", r.gaussian_tail_bound},
          {"tail_bound_dominates", r.tail_bound_dominates},
          {"true_mass_ub", r.true_mass_ub},
          {"min_mass_gap", r.min_mass_gap},
          {"certified_lb", r.certified_lb},
          {"closed_form_lb", r.closed_form_lb}};
}

nlohmann::ordered_json lowerbound_json(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.kind = ExperimentKind::lowerbound;
  cfg.validate();
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (auto n : cfg.n_grid) {
    reports.push_back(lower_bound_json(lower_bound_experiment(static_cast<double>(n), cfg.sigma, cfg.p, cfg.reps, cfg.seed)));
  }
  return {{"experiment", "lowerbound"}, {"d", 1}, {"c_be", kBerryEsseen}, {"reports", reports}};
}

void write_gmu_csv(std::ostream& out, const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.kind = ExperimentKind::gmu;
  cfg.validate();
  const auto spec = make_measure(cfg.measure);
  if (!spec.tail) throw ConfigError("measure has no closed-form tail: " + cfg.measure);
  const TailFunction tail(spec.tail, cfg.p);
  const auto g = canonical_calibration(tail);
  out << "measure,p,t,H,G,G_over_tp\n";
  for (int k = -8;; ++k) {
    const double t = std::pow(10.0, k / 4.0);
    if (t > g.t_max) break;
    const double gv = g(t);
    out << csv_field(cfg.measure) << ',' << format_double(cfg.p) << ',' << format_double(t) << ','
        << format_double(h_mu(tail, t)) << ',' << format_double(gv) << ',' << format_double(gv / std::pow(t, cfg.p))
        << '\n';
  }
}

}  // namespace gswlab
