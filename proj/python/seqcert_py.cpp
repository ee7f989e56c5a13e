#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "seqcert/intervals.hpp"
#include "seqcert/montecarlo.hpp"
#include "seqcert/pvalues.hpp"
#include "seqcert/supermartingale.hpp"
#include "seqcert/verification.hpp"

namespace py = pybind11;
using namespace seqcert;

namespace {

FactorPolicy policy_of(const std::string& name, Count training) {
  if (name == "point") return PbrPoint{};
  if (name == "clamped") return PbrClamped{};
  if (name == "trained") return TrainedSplit{training};
  throw ConfigurationError("policy must be point, clamped or trained");
}

py::dict endpoint_dict(const EndpointResult& r) {
  py::dict d;
  d["phi_endpoint"] = r.phi_endpoint;
  d["gamma"] = r.gamma;
  d["sigma_hat"] = r.sigma_hat;
  d["theta_hat"] = r.theta_hat;
  d["converged"] = r.converged();
  d["iterations"] = r.iterations;
  d["bracket_width"] = r.bracket_width;
  d["residual"] = r.residual;
  d["boundary"] = r.boundary;
  return d;
}

py::dict rate_dict(const RateEstimate& r) {
  py::dict d;
  d["rate"] = r.rate;
  d["std_error"] = r.std_error;
  d["hits"] = r.hits;
  d["reps"] = r.reps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_seqcert, m) {
  m.doc() = "Anytime-valid and fixed-n p-values for Bernoulli trials";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<HypothesisViolated>(m, "HypothesisViolated", PyExc_ArithmeticError);

  m.def(
      "neg_log_p",
      [](const std::string& test, Count n, Count k, double phi) {
        return log_p(parse_test_kind(test), n, k, phi).value();
      },
      py::arg("test"), py::arg("n"), py::arg("k"), py::arg("phi"));

  m.def(
      "martingale",
      [](const std::vector<int>& bits, double phi, const std::string& policy, Count training) {
        SupermartingaleState s(phi, policy_of(policy, training));
        for (int b : bits) s.advance(b);
        return py::make_tuple(s.log_t(), s.log_t_max());
      },
      py::arg("bits"), py::arg("phi"), py::arg("policy") = "point", py::arg("training") = 1);

  m.def(
      "closed_form_check",
      [](const std::vector<int>& bits, double phi) {
        return closed_form_check(TrialSequence(std::span<const int>(bits)), phi);
      },
      py::arg("bits"), py::arg("phi"));

  m.def(
      "endpoint",
      [](const std::string& test, Count n, Count k, double a) {
        return endpoint_dict(endpoint(parse_test_kind(test), n, k, ConfidenceLevel(a)));
      },
      py::arg("test"), py::arg("n"), py::arg("k"), py::arg("a") = 0.01);

  m.def(
      "two_sided",
      [](const std::string& test, Count n, Count k, double a) {
        const auto iv = two_sided(parse_test_kind(test), n, k, ConfidenceLevel(a));
        return py::make_tuple(iv.lower, iv.upper);
      },
      py::arg("test"), py::arg("n"), py::arg("k"), py::arg("a") = 0.05);

  m.def(
      "verify_bounds",
      [](std::vector<Count> ns, std::vector<double> phis, std::vector<double> levels) {
        BoundGrid grid;
        grid.ns = std::move(ns);
        grid.phis = std::move(phis);
        grid.levels = std::move(levels);
        const auto report = verify_bounds(grid);
        return py::make_tuple(report.records.size(), report.failures);
      },
      py::arg("ns"), py::arg("phis"), py::arg("levels") = std::vector<double>{});

  m.def(
      "validity",
      [](Count reps, std::uint64_t seed, double theta, double phi, double a, Count max_n,
         const std::string& evidence) {
        const ReplicationPlan plan{reps, seed, Iid{theta}, MaxOverRun{max_n}};
        py::gil_scoped_release release;
        return run_validity(plan, phi, ConfidenceLevel(a), {parse_evidence(evidence), 0.5});
      },
      py::arg("reps"), py::arg("seed"), py::arg("theta"), py::arg("phi"), py::arg("a"),
      py::arg("max_n"), py::arg("evidence") = "pbr-clamped");

  m.def(
      "coverage",
      [](Count reps, std::uint64_t seed, double theta, Count n, const std::string& test, double a) {
        const ReplicationPlan plan{reps, seed, Iid{theta}, FixedN{n}};
        py::gil_scoped_release release;
        return run_coverage(plan, parse_test_kind(test), ConfidenceLevel(a));
      },
      py::arg("reps"), py::arg("seed"), py::arg("theta"), py::arg("n"), py::arg("test"),
      py::arg("a"));

  py::class_<RateEstimate>(m, "RateEstimate")
      .def_readonly("rate", &RateEstimate::rate)
      .def_readonly("std_error", &RateEstimate::std_error)
      .def_readonly("hits", &RateEstimate::hits)
      .def_readonly("reps", &RateEstimate::reps)
      .def("as_dict", &rate_dict);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
