// SPDX-License-Identifier: Apache-2.0
#include "certlab/io.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace certlab {

Json density_to_json(const DensityMatrix& rho) {
  Json j;
  j["dim"] = rho.dim();
  Json rows = Json::array();
  for (int r = 0; r < rho.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < rho.dim(); ++c) {
      row.push_back({rho.matrix()(r, c).real(), rho.matrix()(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

DensityMatrix density_from_json(const Json& j, double tol) {
  if (!j.contains("dim") || !j.contains("matrix")) {
    fail(ErrorKind::ParseError, "density matrix needs 'dim' and 'matrix' fields");
  }
  const int d = j.at("dim").get<int>();
  const auto& rows = j.at("matrix");
  if (!rows.is_array() || static_cast<int>(rows.size()) != d) {
    fail(ErrorKind::ParseError, "'matrix' must hold " + std::to_string(d) + " rows");
  }
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    const auto& row = rows.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != d) {
      fail(ErrorKind::ParseError, "row " + std::to_string(r) + " must hold " +
                                      std::to_string(d) + " [re, im] pairs");
    }
    for (int c = 0; c < d; ++c) {
      const auto& cell = row.at(c);
      if (!cell.is_array() || cell.size() != 2) {
        fail(ErrorKind::ParseError, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                                        ") must be an [re, im] pair");
      }
      m(r, c) = Cplx(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  try {
    return validate_density(m, tol);
  } catch (const Error& e) {
    fail(ErrorKind::InvariantViolation, e.what());
  }
}

Json spectrum_to_json(const Spectrum& s) {
  Json j;
  j["values"] = s.values;
  return j;
}

namespace {

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  return j;
}

}  // namespace

Spectrum parse_spectrum(const std::string& path, double tol) {
  const Json j = load_json(path);
  if (j.contains("values")) {
    const auto& vals = j.at("values");
    if (!vals.is_array()) fail(ErrorKind::ParseError, path + ": 'values' must be an array");
    std::vector<double> v;
    for (const auto& x : vals) v.push_back(x.get<double>());
    try {
      return Spectrum::validated(std::move(v), SpectrumOrder::unspecified, 1.0, tol);
    } catch (const Error& e) {
      fail(ErrorKind::InvariantViolation, path + ": " + e.what());
    }
  }
  if (j.contains("matrix")) {
    return density_from_json(j, tol).spectrum_descending();
  }
  fail(ErrorKind::ParseError, path + ": expected 'values' or a density-matrix file");
}

DensityMatrix load_density(const std::string& path, double tol) {
  return density_from_json(load_json(path), tol);
}

void save_density(const DensityMatrix& rho, const std::string& path) {
  emit_json(density_to_json(rho), path);
}

Json report_to_json(const ComplexityReport& report) {
  Json j;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) {
      j[key] = *v;
    } else {
      j[key] = nullptr;
    }
  };
  put("lower_tuned", report.lower_tuned);
  put("lower_classical", report.lower_classical);
  put("lower_corner", report.lower_corner);
  put("lower_nearly_mixed", report.lower_nearly_mixed);
  j["lower_best"] = report.lower_best;
  put("upper", report.upper);
  j["regime_flags"] = report.regime_flags;
  j["sigma_star_half"] = report.sigma_star_half;
  j["sigma_prime_half"] = report.sigma_prime_half;
  j["singleton_sum"] = report.singleton_sum;
  return j;
}

Json upper_report_to_json(const UpperReport& report) {
  Json j;
  j["upper"] = report.upper;
  j["quasinorm_half"] = report.quasinorm_half;
  j["bucket_diag_sum"] = report.bucket_diag_sum;
  j["m"] = report.m;
  return j;
}

Json divergence_to_json(const DivergenceEstimate& est) {
  Json j;
  j["value"] = est.value;
  j["mode"] = est.mode == DivergenceEstimate::Mode::exact ? "exact" : "monte_carlo";
  j["n_copies"] = est.n_copies;
  if (est.mode == DivergenceEstimate::Mode::monte_carlo) {
    j["samples"] = est.samples;
    j["std_error"] = est.std_error.value_or(0.0);
  }
  return j;
}

Json ledger_to_json(const CopyLedger& ledger) {
  Json j;
  j["tail_test"] = ledger.tail_test;
  j["trace_estimates"] = ledger.trace_estimates;
  Json c2 = Json::object();
  for (const auto& [j2, v] : ledger.case2) c2[std::to_string(j2)] = v;
  j["case2"] = std::move(c2);
  Json c3 = Json::object();
  for (const auto& [key, v] : ledger.case3) {
    c3[std::to_string(key.first) + "," + std::to_string(key.second)] = v;
  }
  j["case3"] = std::move(c3);
  j["total"] = ledger.total;
  return j;
}

Json certify_to_json(const CertifyResult& result) {
  Json j;
  j["verdict"] = result.verdict == Verdict::equal ? "equal" : "far";
  j["m"] = result.m;
  j["sigma_star_half"] = result.sigma_star_half;
  j["ledger"] = ledger_to_json(result.ledger);
  Json trace = Json::array();
  for (const auto& rec : result.case_trace) {
    Json r;
    r["stage"] = rec.stage;
    r["j"] = rec.j;
    r["j2"] = rec.j2;
    r["statistic"] = rec.statistic;
    r["threshold"] = rec.threshold;
    r["rejected"] = rec.rejected;
    r["copies"] = rec.copies;
    trace.push_back(std::move(r));
  }
  j["case_trace"] = std::move(trace);
  return j;
}

void emit_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) fail(ErrorKind::IoError, "short write to " + path);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
  }
  if (!out) fail(ErrorKind::IoError, "short write to " + path);
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  std::uint64_t hash = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Json manifest_to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["args"] = m.args;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["timestamp"] = m.timestamp;
  Json inputs = Json::array();
  for (const auto& [path, digest] : m.inputs) {
    inputs.push_back({{"path", path}, {"digest", digest}});
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = m.outputs;
  return j;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  emit_json(manifest_to_json(m), path);
}

}  // namespace certlab
