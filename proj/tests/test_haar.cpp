// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "certlab/haar.hpp"
#include "certlab/instances.hpp"

using namespace certlab;

TEST_SUITE("haar") {

TEST_CASE("dim 1 gives a unit-modulus scalar") {
  RngStream rng(1, 0);
  const HaarSample s = sample_haar(1, rng);
  CHECK(std::abs(std::abs(s.matrix(0, 0)) - 1.0) <= 1e-12);
}

TEST_CASE("sampling is deterministic per seed and stream") {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  const HaarSample ua = sample_haar(4, a);
  const HaarSample ub = sample_haar(4, b);
  const HaarSample uc = sample_haar(4, c);
  CHECK((ua.matrix - ub.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ua.matrix - uc.matrix).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("samples are unitary across dimensions") {
  RngStream rng(5, 0);
  for (int d : {2, 3, 8, 33, 64}) {
    const HaarSample s = sample_haar(d, rng);
    CHECK(s.unitarity_defect <= 1e-9);
  }
  CHECK_THROWS_AS((void)sample_haar(0, rng), Error);
}

TEST_CASE("mgf check at t = 0 is exact") {
  RngStream rng(9, 0);
  const SignedDiagonal sd = SignedDiagonal::make(4, 1.0);
  const MgfCheck check = verify_mgf_bound(4, sd.entries, 0.0, 100, rng);
  CHECK(check.empirical_mgf == doctest::Approx(1.0));
  CHECK(check.bound >= 1.0);
  CHECK(check.pass);
}

TEST_CASE("mgf check rejects non-traceless diagonals") {
  RngStream rng(9, 1);
  CHECK_THROWS_AS((void)verify_mgf_bound(2, {1.0, 1.0}, 0.1, 10, rng), Error);
}

TEST_CASE("mgf bound holds for the signed diagonal at moderate t") {
  RngStream rng(9, 2);
  const SignedDiagonal sd = SignedDiagonal::make(8, 1.0);
  const MgfCheck check = verify_mgf_bound(8, sd.entries, 0.2, 10000, rng);
  CHECK(check.bound == doctest::Approx(std::exp(0.48)));
  CHECK(check.pass);
}

}  // TEST_SUITE
