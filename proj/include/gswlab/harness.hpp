#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gswlab/measures.hpp"
#include "gswlab/sharprate.hpp"

namespace gswlab {

enum class ExperimentKind { rate, lowerbound, verify, constants, gmu };
enum class OutputFormat { csv, json };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);
OutputFormat parse_output_format(const std::string& s);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::rate;
  /// Catalog name with optional parameters, e.g. "exponential", "exponential:rate=2",
  /// "zygmund:p=1,alpha=1", "gaussian:d=2", "sharp_rate", "dirac".
  std::string measure = "exponential";
  double p = 1.0;
  double q = 4.0;
  int d = 1;
  double sigma = 1.0;
  double beta = 2.0;
  double eps = 0.5;
  std::vector<std::int64_t> n_grid{32, 64, 128, 256, 512, 1024};
  std::size_t reps = 100;
  std::size_t m_plugin = 2048;
  std::uint64_t seed = 42;
  std::string out;  // empty: standard output
  OutputFormat format = OutputFormat::csv;
  std::string suite;  // for kind == verify

  /// Throws ConfigError on invalid values. Rate experiments additionally need
  /// a strictly increasing grid with at least two entries.
  void validate() const;
};

/// Parses "32,64,128"; throws ConfigError on malformed entries.
std::vector<std::int64_t> parse_n_grid(const std::string& s);

struct MeasureName {
  std::string base;
  std::map<std::string, double> params;
};
MeasureName parse_measure_name(const std::string& s);

/// Catalog lookup; throws ConfigError for unknown names or parameters.
MeasureSpec make_measure(const std::string& name);

struct RateFitResult {
  std::vector<double> n, estimates, stderrs;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
};

/// Least squares of log(estimate) on log(N). With weighted = true each point
/// gets weight (estimate / stderr)^2, the inverse variance of log(estimate)
/// to first order. Throws DomainError for nonpositive estimates or
/// mismatched lengths.
RateFitResult rate_fit(const std::vector<double>& ns, const std::vector<double>& estimates,
                       const std::vector<double>& stderrs, bool weighted = false);

struct RateRow {
  std::string experiment, measure;
  int d = 1;
  double p = 0, q = 0, sigma = 0, beta = 0;
  std::int64_t n = 0;
  std::size_t reps = 0, m_plugin = 0;
  std::uint64_t seed = 0;
  double estimate = 0, std_err = 0;
  double bound_carlson = 0, bound_dyadic = 0, bound_fg15_shape = 0;
};

struct RateExperimentResult {
  std::vector<RateRow> rows;
  RateFitResult fit;
};

/// Plug-in estimates of E[(W_p^{(sigma)}(mu_N, mu))^p] over the grid, with
/// both rate bounds (M_q from the measure catalog) and the comparator shape.
/// Grid point i uses seed + i.
RateExperimentResult run_rate_experiment(const ExperimentConfig& config);

void write_rate_csv(std::ostream& out, const RateExperimentResult& result);
nlohmann::ordered_json rate_json(const RateExperimentResult& result);

struct VerificationCase {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::vector<VerificationCase> cases;
  bool passed() const;
  std::size_t failures() const;
};

/// Names accepted by run_verification_suite.
const std::vector<std::string>& verification_suites();

/// Runs one of carlson, mz, bound_lemma, transport_metric, neighborhood,
/// truncation, gmu_properties, sharp_chain. Throws ConfigError for other names.
VerificationReport run_verification_suite(const std::string& suite, std::uint64_t seed = 42);

nlohmann::ordered_json report_json(const VerificationReport& report);
void write_report_csv(std::ostream& out, const VerificationReport& report);

/// Flat object with c_pd, gaussian_moment_p, i_abd, carlson_constant,
/// mz_constant, rate_exponent, c_beta_sigma_carlson, c_beta_sigma_dyadic for
/// (p, q, d, sigma, beta) with alpha = q - p beta and M_q from the measure.
nlohmann::ordered_json constants_json(const ExperimentConfig& config);

nlohmann::ordered_json lower_bound_json(const LowerBoundReport& report);

/// lower_bound_experiment (dimension 1) at every grid entry, with the
/// quantities used and the Berry-Esseen constant.
nlohmann::ordered_json lowerbound_json(const ExperimentConfig& config);

/// Rows t, H(t), G(t), G(t)/t^p of the canonical calibration of the measure's tail.
void write_gmu_csv(std::ostream& out, const ExperimentConfig& config);

/// Formats a double with %.17g.
std::string format_double(double x);

}  // namespace gswlab
