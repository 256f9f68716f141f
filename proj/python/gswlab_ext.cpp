#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gswlab/bounds.hpp"
#include "gswlab/critical.hpp"
#include "gswlab/errors.hpp"
#include "gswlab/harness.hpp"
#include "gswlab/measures.hpp"
#include "gswlab/sharprate.hpp"
#include "gswlab/transport.hpp"

namespace py = pybind11;
using namespace gswlab;

namespace {

WeightedPoints weighted_1d(const std::vector<double>& xs, const std::vector<double>& w) {
  return {PointSet::from_scalars(xs), w};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian-smoothed Wasserstein rates: constants, transport and experiments";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("c_pd", &c_pd, py::arg("p"), py::arg("d"));
  m.def("gaussian_moment", &gaussian_moment, py::arg("p"), py::arg("d"));
  m.def("i_abd", &i_abd, py::arg("alpha"), py::arg("beta"), py::arg("d"));
  m.def("carlson_constant", &carlson_constant, py::arg("alpha"), py::arg("beta"), py::arg("d"));
  m.def("mz_constant", &mz_constant, py::arg("beta"));
  m.def("mz_rate_exponent", &mz_rate_exponent, py::arg("beta"));
  m.def("gamma_eps", &gamma_eps, py::arg("p"), py::arg("d"), py::arg("eps"));
  m.def("g_mu_zygmund", &g_mu_zygmund, py::arg("p"), py::arg("alpha"), py::arg("t"));

  m.def(
      "wasserstein_1d",
      [](const std::vector<double>& x, const std::vector<double>& wx, const std::vector<double>& y,
         const std::vector<double>& wy, double p) { return wasserstein_1d(weighted_1d(x, wx), weighted_1d(y, wy), p); },
      py::arg("x"), py::arg("wx"), py::arg("y"), py::arg("wy"), py::arg("p") = 1.0);
  m.def(
      "wasserstein_discrete",
      [](const std::vector<std::vector<double>>& x, const std::vector<double>& wx,
         const std::vector<std::vector<double>>& y, const std::vector<double>& wy, double p) {
        return wasserstein_discrete({PointSet::from_rows(x), wx}, {PointSet::from_rows(y), wy}, p).value;
      },
      py::arg("x"), py::arg("wx"), py::arg("y"), py::arg("wy"), py::arg("p") = 1.0);

  m.def(
      "sharp_quantities",
      [](double n) {
        const auto q = sharp_quantities(n);
        py::dict d;
        d["N"] = q.n;
        d["L_N"] = q.l_n;
        d["k_N"] = q.k_n;
        d["x_N"] = q.x_n;
        d["r_N"] = q.r_n;
        d["w_N"] = q.w_n;
        d["c_0"] = q.c_0;
        d["c_1"] = q.c_1;
        d["v_0"] = q.v_0;
        return d;
      },
      py::arg("n"));
  m.def(
      "binomial_event_prob", [](std::int64_t n, double prob) { return binomial_event_prob(n, prob).prob; },
      py::arg("n"), py::arg("prob"));

  m.def(
      "constants_json",
      [](double p, double q, int d, double sigma, double beta, const std::string& measure) {
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::constants;
        cfg.p = p;
        cfg.q = q;
        cfg.d = d;
        cfg.sigma = sigma;
        cfg.beta = beta;
        cfg.measure = measure;
        return constants_json(cfg).dump();
      },
      py::arg("p") = 1.0, py::arg("q") = 4.0, py::arg("d") = 1, py::arg("sigma") = 1.0, py::arg("beta") = 2.0,
      py::arg("measure") = "exponential");
  m.def(
      "rate_csv",
      [](const std::string& measure, std::vector<std::int64_t> n_grid, std::size_t reps, std::size_t m_plugin,
         std::uint64_t seed) {
        ExperimentConfig cfg;
        cfg.kind = ExperimentKind::rate;
        cfg.measure = measure;
        cfg.n_grid = std::move(n_grid);
        cfg.reps = reps;
        cfg.m_plugin = m_plugin;
        cfg.seed = seed;
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          write_rate_csv(os, run_rate_experiment(cfg));
        }
        return os.str();
      },
      py::arg("measure") = "exponential", py::arg("n_grid") = std::vector<std::int64_t>{32, 64},
      py::arg("reps") = 10, py::arg("m_plugin") = 256, py::arg("seed") = 42);
  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed) {
        VerificationReport rep;
        {
          py::gil_scoped_release release;
          rep = run_verification_suite(suite, seed);
        }
        return py::make_tuple(rep.passed(), report_json(rep).dump());
      },
      py::arg("suite"), py::arg("seed") = 42);
}
