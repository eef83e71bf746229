// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "certlab/linalg.hpp"

using namespace certlab;

namespace {

Mat real_mat(std::initializer_list<std::initializer_list<double>> rows) {
  const int d = static_cast<int>(rows.size());
  Mat m(d, d);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("validate accepts the maximally mixed qubit") {
  const DensityMatrix dm = validate_density(real_mat({{0.5, 0.0}, {0.0, 0.5}}));
  CHECK(dm.dim() == 2);
  CHECK(dm.eigenvalues()(0) == doctest::Approx(0.5));
  CHECK(dm.eigenvalues()(1) == doctest::Approx(0.5));
}

TEST_CASE("validate rejects trace and psd violations with the right kinds") {
  CHECK(kind_of([] { validate_density(real_mat({{0.6, 0.0}, {0.0, 0.5}})); }) ==
        ErrorKind::BadTrace);
  // Eigenvalues of [[.5,.6],[.6,.5]] are 1.1 and -0.1.
  CHECK(kind_of([] { validate_density(real_mat({{0.5, 0.6}, {0.6, 0.5}})); }) ==
        ErrorKind::NotPSD);
  Mat non_herm = real_mat({{0.5, 0.2}, {0.0, 0.5}});
  CHECK(kind_of([&] { validate_density(non_herm); }) == ErrorKind::NotHermitian);
}

TEST_CASE("trace distance basics") {
  const DensityMatrix a = diagonal_density({1.0, 0.0});
  const DensityMatrix b = diagonal_density({0.0, 1.0});
  CHECK(trace_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  const DensityMatrix mixed = diagonal_density({0.5, 0.5});
  const DensityMatrix shifted = diagonal_density({0.45, 0.55});
  CHECK(trace_distance(shifted, mixed) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(kind_of([&] { trace_distance(a, diagonal_density({1.0, 0.0, 0.0})); }) ==
        ErrorKind::DimMismatch);
}

TEST_CASE("schatten quasinorm values") {
  const DensityMatrix mixed4 = diagonal_density({0.25, 0.25, 0.25, 0.25});
  CHECK(schatten(mixed4.matrix(), 0.5) == doctest::Approx(4.0));
  const DensityMatrix pure = diagonal_density({1.0, 0.0, 0.0});
  CHECK(schatten(pure.matrix(), 0.5) == doctest::Approx(1.0));
  const DensityMatrix three = diagonal_density({0.5, 0.25, 0.25});
  CHECK(schatten(three.matrix(), 0.5) == doctest::Approx(2.914213562373095));
  CHECK(kind_of([&] { schatten(three.matrix(), 0.0); }) == ErrorKind::NonPositiveP);
  CHECK(quasinorm_half(three.spectrum_descending()) == doctest::Approx(2.914213562373095));
}

TEST_CASE("fidelity endpoints and the maximally mixed identity") {
  const DensityMatrix a = diagonal_density({1.0, 0.0});
  const DensityMatrix b = diagonal_density({0.0, 1.0});
  CHECK(fidelity(a, a) == doctest::Approx(1.0));
  CHECK(fidelity(a, b) == doctest::Approx(0.0).epsilon(1e-10));
  RngStream rng(7, 0);
  for (int d : {2, 3, 4, 6}) {
    const DensityMatrix sigma = random_density(d, rng);
    std::vector<double> flat(d, 1.0 / d);
    const double f = fidelity(sigma, diagonal_density(flat));
    CHECK(f == doctest::Approx(quasinorm_half(sigma.spectrum_descending()) / d).epsilon(1e-9));
  }
}

TEST_CASE("qubit fidelity from Bloch vectors") {
  CHECK(fidelity_qubit({0, 0, 1}, {0, 0, 1}) == doctest::Approx(1.0));
  CHECK(fidelity_qubit({0, 0, 1}, {0, 0, -1}) == doctest::Approx(0.0));
  CHECK(fidelity_qubit({0, 0, 0}, {0, 0, 0.5}) == doctest::Approx(0.9330127018922193));
  CHECK(kind_of([] { fidelity_qubit({1.1, 0, 0}, {0, 0, 0}); }) == ErrorKind::OutsideBlochBall);

  RngStream rng(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    BlochVector a{rng.normal(), rng.normal(), rng.normal()};
    BlochVector b{rng.normal(), rng.normal(), rng.normal()};
    const double na = std::sqrt(a.norm2()) * (1.0 + 0.2 * rng.uniform());
    const double nb = std::sqrt(b.norm2()) * (1.0 + 0.2 * rng.uniform());
    a = {a.x / na, a.y / na, a.z / na};
    b = {b.x / nb, b.y / nb, b.z / nb};
    const double from_bloch = fidelity_qubit(a, b);
    const double from_states = fidelity(qubit_from_bloch(a), qubit_from_bloch(b));
    CHECK(std::abs(from_bloch - from_states) <= 1e-9);
  }
}

TEST_CASE("quantum chi2 including singular reference") {
  const DensityMatrix mixed = diagonal_density({0.5, 0.5});
  const DensityMatrix pure = diagonal_density({1.0, 0.0});
  CHECK(quantum_chi2(mixed, mixed) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(quantum_chi2(pure, mixed) == doctest::Approx(1.0));
  CHECK(std::isinf(quantum_chi2(mixed, pure)));
  // Kernel-aligned states restrict to the image.
  CHECK(quantum_chi2(pure, pure) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("trace distance bounded by chi2 and infidelity") {
  RngStream rng(13, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(5));
    const DensityMatrix rho = random_density(d, rng);
    const DensityMatrix sigma = random_density(d, rng);
    const double dtr = trace_distance(rho, sigma);
    CHECK(dtr <= 0.5 * std::sqrt(quantum_chi2(rho, sigma)) + 1e-9);
    CHECK(dtr <= std::sqrt(1.0 - fidelity(rho, sigma)) + 1e-9);
  }
}

TEST_CASE("block views reproduce parent entries and normalize") {
  RngStream rng(17, 0);
  const DensityMatrix rho = random_density(5, rng);
  const auto view = HermitianBlockView::principal(rho, {1, 3});
  const Mat m = view.materialize();
  CHECK(m(1, 3) == rho.matrix()(1, 3));
  CHECK(m(3, 1) == rho.matrix()(3, 1));
  CHECK(std::abs(m(0, 0)) == 0.0);
  CHECK(view.trace() ==
        doctest::Approx(rho.matrix()(1, 1).real() + rho.matrix()(3, 3).real()));
  CHECK(view.normalized().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("tensor power and kron shapes") {
  const DensityMatrix q = diagonal_density({0.25, 0.75});
  const Mat t = tensor_power(q.matrix(), 3);
  CHECK(t.rows() == 8);
  CHECK(t.trace().real() == doctest::Approx(1.0));
  CHECK(t(7, 7).real() == doctest::Approx(0.75 * 0.75 * 0.75));
}

}  // TEST_SUITE
