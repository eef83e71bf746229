// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "certlab/io.hpp"
#include "certlab/verify.hpp"

using namespace certlab;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("certlab_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("density matrix json round trip is exact") {
  RngStream rng(31, 0);
  const DensityMatrix rho = random_density(5, rng);
  const Json j = density_to_json(rho);
  const DensityMatrix back = density_from_json(j);
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectrum parsing from both formats") {
  TempDir dir;
  {
    std::ofstream out(dir.file("spec.json"));
    out << R"({"values": [0.5, 0.5]})";
  }
  const Spectrum s = parse_spectrum(dir.file("spec.json"));
  CHECK(s.values == std::vector<double>{0.5, 0.5});

  // Emit-then-parse reproduces the values exactly.
  const Spectrum odd{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, SpectrumOrder::unspecified};
  emit_json(spectrum_to_json(odd), dir.file("odd.json"));
  CHECK(parse_spectrum(dir.file("odd.json")).values == odd.values);

  const DensityMatrix rho = diagonal_density({0.25, 0.75});
  save_density(rho, dir.file("rho.json"));
  const Spectrum from_density = parse_spectrum(dir.file("rho.json"));
  CHECK(from_density.values.front() == doctest::Approx(0.75));
  CHECK(from_density.values.back() == doctest::Approx(0.25));
}

TEST_CASE("invalid spectra carry context") {
  TempDir dir;
  {
    std::ofstream out(dir.file("bad.json"));
    out << R"({"values": [0.5, 0.4]})";
  }
  try {
    (void)parse_spectrum(dir.file("bad.json"));
    FAIL("expected InvariantViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvariantViolation);
  }
  {
    std::ofstream out(dir.file("garbled.json"));
    out << "{not json";
  }
  try {
    (void)parse_spectrum(dir.file("garbled.json"));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("csv output uses 17 significant digits") {
  TempDir dir;
  emit_csv({"a", "b"}, {{1.0 / 3.0, 2.0}}, dir.file("t.csv"));
  std::ifstream in(dir.file("t.csv"));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "a,b");
  CHECK(row.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("io errors on unwritable paths") {
  try {
    emit_json(Json::object(), "/nonexistent_dir_zz/x.json");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
  }
}

TEST_CASE("manifest digests inputs") {
  TempDir dir;
  {
    std::ofstream out(dir.file("in.json"));
    out << "{}";
  }
  RunManifest m;
  m.command = "analyze";
  m.seed = 7;
  m.version = kToolVersion;
  m.timestamp = "2025-01-01T00:00:00Z";
  m.inputs = {{dir.file("in.json"), file_digest(dir.file("in.json"))}};
  m.outputs = {dir.file("out.json")};
  write_manifest(m, dir.file("m.json"));
  std::ifstream in(dir.file("m.json"));
  Json j;
  in >> j;
  CHECK(j["seed"] == 7);
  CHECK(j["inputs"][0]["digest"] == file_digest(dir.file("in.json")));
}

TEST_CASE("battery fault injection flips one row") {
  const auto base = run_battery(5, VerifyLevel::quick, "fidelity/tensorization");
  int flipped = 0;
  for (const auto& r : base) {
    if (r.name == "fidelity/tensorization") {
      CHECK_FALSE(r.pass);
      ++flipped;
    }
  }
  CHECK(flipped == 1);
}

}  // TEST_SUITE
