// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "certlab/certifier.hpp"
#include "certlab/complexity.hpp"
#include "certlab/corpus.hpp"
#include "certlab/divergence.hpp"
#include "certlab/haar.hpp"
#include "certlab/verify.hpp"

namespace py = pybind11;
using namespace certlab;

namespace {

Spectrum spectrum_from(const std::vector<double>& values) {
  return Spectrum{values, SpectrumOrder::unspecified};
}

py::dict report_dict(const ComplexityReport& r) {
  py::dict d;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) {
      d[key] = *v;
    } else {
      d[key] = py::none();
    }
  };
  put("lower_tuned", r.lower_tuned);
  put("lower_classical", r.lower_classical);
  put("lower_corner", r.lower_corner);
  put("lower_nearly_mixed", r.lower_nearly_mixed);
  d["lower_best"] = r.lower_best;
  put("upper", r.upper);
  d["regime_flags"] = r.regime_flags;
  d["sigma_star_half"] = r.sigma_star_half;
  d["sigma_prime_half"] = r.sigma_prime_half;
  return d;
}

py::dict certify_dict(const CertifyResult& r) {
  py::dict d;
  d["verdict"] = r.verdict == Verdict::equal ? "equal" : "far";
  d["m"] = r.m;
  d["sigma_star_half"] = r.sigma_star_half;
  d["total_copies"] = r.ledger.total;
  d["tail_copies"] = r.ledger.tail_test;
  d["trace_copies"] = r.ledger.trace_estimates;
  py::list trace;
  for (const auto& rec : r.case_trace) {
    py::dict row;
    row["stage"] = rec.stage;
    row["j"] = rec.j;
    row["j2"] = rec.j2;
    row["statistic"] = rec.statistic;
    row["threshold"] = rec.threshold;
    row["rejected"] = rec.rejected;
    row["copies"] = rec.copies;
    trace.append(row);
  }
  d["case_trace"] = trace;
  return d;
}

}  // namespace

PYBIND11_MODULE(_certlab, m) {
  m.doc() = "instance-optimal state certification lab";

  py::register_exception<Error>(m, "CertlabError");

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def_property_readonly("dim", &DensityMatrix::dim)
      .def_property_readonly("matrix", [](const DensityMatrix& d) { return d.matrix(); })
      .def_property_readonly("eigenvalues",
                             [](const DensityMatrix& d) { return d.eigenvalues(); })
      .def("__repr__", [](const DensityMatrix& d) {
        return "<DensityMatrix dim=" + std::to_string(d.dim()) + ">";
      });

  m.def("validate_density", &validate_density, py::arg("matrix"),
        py::arg("tol") = kDefaultTol,
        "Validate a Hermitian psd unit-trace matrix into a DensityMatrix.");
  m.def("diagonal_density", &diagonal_density, py::arg("values"),
        py::arg("tol") = kDefaultTol);
  m.def("trace_distance",
        py::overload_cast<const DensityMatrix&, const DensityMatrix&>(&trace_distance));
  m.def("fidelity", &fidelity);
  m.def("schatten",
        py::overload_cast<const Mat&, double>(&schatten), py::arg("hermitian"), py::arg("p"));
  m.def("quantum_chi2", &quantum_chi2, py::arg("rho"), py::arg("sigma"),
        py::arg("tol") = kDefaultTol);

  m.def(
      "sample_haar",
      [](int dim, std::uint64_t seed, std::uint32_t stream) {
        RngStream rng(seed, stream);
        return sample_haar(dim, rng).matrix;
      },
      py::arg("dim"), py::arg("seed"), py::arg("stream") = 0,
      "Haar-distributed unitary, deterministic per (seed, stream).");

  m.def(
      "quantum_paninski",
      [](int d, double eps, std::uint64_t seed, std::uint32_t stream) {
        RngStream rng(seed, stream);
        return quantum_paninski(d, eps, sample_haar(d, rng));
      },
      py::arg("d"), py::arg("eps"), py::arg("seed"), py::arg("stream") = 0);

  m.def(
      "analyze",
      [](const std::vector<double>& spectrum, double eps) {
        return report_dict(analyze(spectrum_from(spectrum), eps));
      },
      py::arg("spectrum"), py::arg("eps"),
      "Copy-complexity report (all lower-bound branches plus the upper functional).");

  m.def(
      "upper_functional",
      [](const std::vector<double>& spectrum, double eps) {
        return upper_report(spectrum_from(spectrum), eps).upper;
      },
      py::arg("spectrum"), py::arg("eps"));

  m.def(
      "lower_bucketing_summary",
      [](const std::vector<double>& spectrum, double eps) {
        const LowerBucketing b = lower_bucketing(spectrum_from(spectrum), eps);
        py::dict d;
        py::dict buckets;
        for (const auto& [j, members] : b.buckets) {
          buckets[py::int_(j)] = members;
        }
        d["buckets"] = buckets;
        d["tail"] = b.tail;
        d["i_max"] = b.i_max;
        d["sigma_star_half"] = quasinorm_half(b.sigma_star);
        d["sigma_prime_half"] = quasinorm_half(b.sigma_prime);
        return d;
      },
      py::arg("spectrum"), py::arg("eps"));

  m.def(
      "chi2_kernel_exact",
      [](const std::string& family, const std::vector<double>& sigma_spectrum, double eps,
         int n) {
        const DensityMatrix sigma = diagonal_density(sigma_spectrum);
        PerturbationFamily fam = [&] {
          if (family == "two-by-two") return PerturbationFamily::make_two_by_two(sigma, eps);
          if (family == "rotation") return PerturbationFamily::make_rotation_pair(sigma, eps);
          if (family == "classical") {
            return PerturbationFamily::make_classical_paninski(sigma.dim(), eps);
          }
          fail(ErrorKind::ConfigInvalid, "finite families: two-by-two, rotation, classical");
        }();
        return chi2_kernel_exact(fam, sigma, n).value;
      },
      py::arg("family"), py::arg("sigma_spectrum"), py::arg("eps"), py::arg("n"));

  m.def(
      "certify",
      [](const DensityMatrix& rho, const DensityMatrix& sigma, double eps, double delta,
         std::uint64_t seed, const std::string& oracle) {
        CertifierConfig config;
        config.eps = eps;
        config.delta = delta;
        config.seed = RngSeed{seed, 0};
        if (oracle == "ideal") {
          config.oracle = {HSOracleSpec::Kind::ideal, 0.0};
        } else if (oracle == "statistical") {
          config.oracle = {HSOracleSpec::Kind::statistical, 0.0};
        } else if (oracle.rfind("noisy:", 0) == 0) {
          config.oracle = {HSOracleSpec::Kind::noisy, std::stod(oracle.substr(6))};
        } else {
          fail(ErrorKind::ConfigInvalid, "oracle must be ideal, statistical or noisy:p");
        }
        return certify_dict(certify(rho, sigma, config));
      },
      py::arg("rho"), py::arg("sigma"), py::arg("eps"), py::arg("delta") = 0.05,
      py::arg("seed") = 20250809ULL, py::arg("oracle") = "ideal",
      "Run the three-case certification simulation.");

  m.def(
      "verify_all",
      [](std::uint64_t seed, const std::string& level) {
        const auto results = run_battery(
            seed, level == "full" ? VerifyLevel::full : VerifyLevel::quick);
        py::list rows;
        for (const auto& r : results) {
          py::dict row;
          row["name"] = r.name;
          row["pass"] = r.pass;
          row["margin"] = r.margin;
          row["detail"] = r.detail;
          rows.append(row);
        }
        return rows;
      },
      py::arg("seed") = 20250809ULL, py::arg("level") = "quick");

  m.attr("__version__") = "0.1.0";
}
