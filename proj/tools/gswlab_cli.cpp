// gswlab command line: constants, rate, lowerbound, gmu, verify <suite>.
//
// Exit codes: 0 success, 1 verification failure or numerical failure,
// 2 configuration error.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gswlab/errors.hpp"
#include "gswlab/harness.hpp"

namespace {

int run(const gswlab::ExperimentConfig& cfg, std::ostream& out) {
  using gswlab::ExperimentKind;
  using gswlab::OutputFormat;
  switch (cfg.kind) {
    case ExperimentKind::constants:
      out << gswlab::constants_json(cfg).dump(2) << '\n';
      return 0;
    case ExperimentKind::rate: {
      const auto result = gswlab::run_rate_experiment(cfg);
      if (cfg.format == OutputFormat::json) {
        out << gswlab::rate_json(result).dump(2) << '\n';
      } else {
        gswlab::write_rate_csv(out, result);
      }
      return 0;
    }
    case ExperimentKind::lowerbound:
      out << gswlab::lowerbound_json(cfg).dump(2) << '\n';
      return 0;
    case ExperimentKind::gmu:
      gswlab::write_gmu_csv(out, cfg);
      return 0;
    case ExperimentKind::verify: {
      const auto report = gswlab::run_verification_suite(cfg.suite, cfg.seed);
      if (cfg.format == OutputFormat::json) {
        out << gswlab::report_json(report).dump(2) << '\n';
      } else {
        gswlab::write_report_csv(out, report);
      }
      std::cerr << report.suite << ": " << (report.cases.size() - report.failures()) << "/" << report.cases.size()
                << " cases pass\n";
      return report.passed() ? 0 : 1;
    }
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-smoothed Wasserstein rates: constants, experiments and verification suites"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file with the option names below; flags override it");

  gswlab::ExperimentConfig cfg;
  std::string n_grid = "32,64,128,256,512,1024";
  std::string format = "csv";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--measure", cfg.measure, "catalog name, e.g. exponential, zygmund:p=1,alpha=1")
        ->capture_default_str();
    sub->add_option("--p", cfg.p, "order p")->capture_default_str();
    sub->add_option("--q", cfg.q, "moment order q")->capture_default_str();
    sub->add_option("--d", cfg.d, "dimension")->capture_default_str();
    sub->add_option("--sigma", cfg.sigma, "smoothing scale")->capture_default_str();
    sub->add_option("--beta", cfg.beta, "beta in (1, (q+d)/(p+d))")->capture_default_str();
    sub->add_option("--eps", cfg.eps, "epsilon")->capture_default_str();
    sub->add_option("--n-grid,--n_grid", n_grid, "comma separated sample sizes")->capture_default_str();
    sub->add_option("--reps", cfg.reps, "replicates")->capture_default_str();
    sub->add_option("--m-plugin,--m_plugin", cfg.m_plugin, "plug-in cloud size")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output path (default: standard output)");
    sub->add_option("--format", format, "csv or json")->capture_default_str();
  };
  add_common(&app);
  app.fallthrough();
  auto* constants = app.add_subcommand("constants", "print every closed-form constant as JSON");
  auto* rate = app.add_subcommand("rate", "plug-in rate experiment over an N grid");
  auto* lowerbound = app.add_subcommand("lowerbound", "sharp-rate lower-bound audit (JSON)");
  auto* gmu = app.add_subcommand("gmu", "tabulate H, G and G/t^p of the canonical calibration");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", cfg.suite, "carlson | mz | bound_lemma | transport_metric | neighborhood | "
                                         "truncation | gmu_properties | sharp_chain")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (constants->parsed()) cfg.kind = gswlab::ExperimentKind::constants;
    if (rate->parsed()) cfg.kind = gswlab::ExperimentKind::rate;
    if (lowerbound->parsed()) cfg.kind = gswlab::ExperimentKind::lowerbound;
    if (gmu->parsed()) cfg.kind = gswlab::ExperimentKind::gmu;
    if (verify->parsed()) cfg.kind = gswlab::ExperimentKind::verify;
    cfg.n_grid = gswlab::parse_n_grid(n_grid);
    cfg.format = gswlab::parse_output_format(format);
    cfg.validate();

    if (cfg.out.empty()) return run(cfg, std::cout);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw gswlab::ConfigError("cannot open output file: " + cfg.out);
    const int code = run(cfg, file);
    file.close();
    if (!file) throw std::runtime_error("failed writing " + cfg.out);
    return code;
  } catch (const gswlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const gswlab::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
