// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "certlab/certifier.hpp"
#include "certlab/complexity.hpp"
#include "certlab/divergence.hpp"
#include "certlab/linalg.hpp"

namespace certlab {

using Json = nlohmann::ordered_json;

/// Shared density-matrix schema: {"dim": d, "matrix": [[[re, im], ...], ...]}
/// row-major.
Json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const Json& j, double tol = kDefaultTol);

Json spectrum_to_json(const Spectrum& s);

/// Reads {"values": [...]} or a density-matrix file (eigenvalues extracted,
/// descending). Parse failures carry field context.
Spectrum parse_spectrum(const std::string& path, double tol = kDefaultTol);

DensityMatrix load_density(const std::string& path, double tol = kDefaultTol);
void save_density(const DensityMatrix& rho, const std::string& path);

Json report_to_json(const ComplexityReport& report);
Json upper_report_to_json(const UpperReport& report);
Json divergence_to_json(const DivergenceEstimate& est);
Json certify_to_json(const CertifyResult& result);
Json ledger_to_json(const CopyLedger& ledger);

/// Writes JSON (stable field order) or CSV rows; floats at 17 significant
/// digits in CSV. Throws IoError on unwritable paths.
void emit_json(const Json& j, const std::string& path);
void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows, const std::string& path);
std::string format_double(double v);

/// FNV-1a 64-bit digest of a file, hex-encoded.
std::string file_digest(const std::string& path);

struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::vector<std::string> outputs;
};

Json manifest_to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& path);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace certlab
