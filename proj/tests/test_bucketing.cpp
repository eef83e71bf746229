// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numeric>

#include "certlab/bucketing.hpp"

using namespace certlab;

TEST_SUITE("bucketing") {

TEST_CASE("lower scheme on the worked four-entry spectrum") {
  const Spectrum spec{{0.5, 0.25, 0.125, 0.125}, SpectrumOrder::unspecified};
  const LowerBucketing b = lower_bucketing(spec, 0.02);

  CHECK(b.buckets.at(1) == std::vector<int>{0});
  CHECK(b.buckets.at(2) == std::vector<int>{1});
  CHECK(b.buckets.at(3) == std::vector<int>{2, 3});
  // Sort keys 0.0625, 0.0625, 0.25, 0.5 with index tie-break.
  CHECK(b.sort_permutation == std::vector<int>{2, 3, 1, 0});
  // Budget 12 eps = 0.24 admits exactly one 0.125 entry.
  CHECK(b.d_prime == 1);
  CHECK(b.tail == std::vector<int>{2});
  CHECK(b.i_max == 0);
  CHECK(b.sigma_star.values == std::vector<double>{0.5, 0.25, 0.0, 0.125});
  CHECK(b.sigma_prime.values == std::vector<double>{0.0, 0.25, 0.0, 0.125});
  CHECK(b.J_star == std::vector<int>{1, 2, 3});
  CHECK(b.J_prime == std::vector<int>{2, 3});
  CHECK(b.singletons == std::vector<int>{0, 1});
  CHECK(b.many == std::vector<int>{2, 3});
}

TEST_CASE("lower scheme keeps everything when nothing is removable") {
  const Spectrum spec{{0.25, 0.25, 0.25, 0.25}, SpectrumOrder::unspecified};
  const LowerBucketing b = lower_bucketing(spec, 0.001);
  CHECK(b.buckets.size() == 1);
  CHECK(b.buckets.count(2) == 1);
  CHECK(b.tail.empty());
  CHECK(b.sigma_star.values == spec.values);
}

TEST_CASE("lower scheme guards") {
  const Spectrum spec{{0.5, 0.5}, SpectrumOrder::unspecified};
  CHECK_THROWS_AS((void)lower_bucketing(spec, 0.5), Error);
  const Spectrum with_zero{{1.0, 0.0}, SpectrumOrder::unspecified};
  try {
    (void)lower_bucketing(with_zero, 0.01);
    FAIL("expected ZeroEigenvalue");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroEigenvalue);
  }
}

TEST_CASE("upper scheme on the worked spectrum") {
  const Spectrum spec{{0.5, 0.25, 0.125, 0.125}, SpectrumOrder::unspecified};
  const UpperBucketing b = upper_bucketing(spec, 0.4);
  CHECK(b.d_star == 0);
  CHECK(b.m == 3);
  CHECK(b.buckets.at(1) == std::vector<int>{0});
  CHECK(b.buckets.at(2) == std::vector<int>{1});
  CHECK(b.buckets.at(3) == std::vector<int>{2, 3});
}

TEST_CASE("upper scheme sends a pure state to one bucket") {
  const Spectrum spec{{1.0, 0.0, 0.0}, SpectrumOrder::unspecified};
  const UpperBucketing b = upper_bucketing(spec, 0.3);
  CHECK(b.m == 1);
  CHECK(b.buckets.at(0) == std::vector<int>{0});
  CHECK(quasinorm_half(b.sigma_star) == doctest::Approx(1.0));
  // Zero entries carry no mass and sit in the tail.
  CHECK(b.tail.size() == 2);
}

TEST_CASE("upper tail matches an independent prefix scan") {
  std::vector<double> vals{0.3, 1e-6, 0.2, 2e-6, 0.5 - 3e-6};
  const double eps = 0.3;
  const UpperBucketing b = upper_bucketing(Spectrum{vals, SpectrumOrder::unspecified}, eps);
  // Oracle: sort ascending, take the longest prefix of mass <= eps^2/20.
  std::vector<double> sorted = vals;
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  int expect = 0;
  for (double v : sorted) {
    if (acc + v > eps * eps / 20.0) break;
    acc += v;
    ++expect;
  }
  CHECK(static_cast<int>(b.tail.size()) == expect);
  for (int i : b.tail) CHECK(vals[i] <= 2e-6);
}

TEST_CASE("bucket count bound") {
  const Spectrum mixed{{0.25, 0.25, 0.25, 0.25}, SpectrumOrder::unspecified};
  const LowerBucketing bm = lower_bucketing(mixed, 0.001);
  const BucketCountBound cm = bucket_count_bound(bm, 0.001);
  CHECK(cm.count_disjoint_from_tail == 1);
  CHECK(cm.count_disjoint_from_tail <= cm.bound);

  std::vector<double> geo(16);
  for (int i = 0; i < 15; ++i) geo[i] = std::ldexp(1.0, -(i + 1));
  geo[15] = geo[14];
  const LowerBucketing bg = lower_bucketing(Spectrum{geo, SpectrumOrder::unspecified}, 0.01);
  const BucketCountBound cg = bucket_count_bound(bg, 0.01);
  CHECK(cg.bound == static_cast<int>(std::ceil(std::log2(256.0 / 0.01))) + 2);
  CHECK(cg.count_disjoint_from_tail <= cg.bound);
}

TEST_CASE("sorted sequences fact: minimal and guard cases") {
  const SortedSequencesResult tiny =
      sorted_sequences_property({1.0}, {1.0}, {1}, 10.0);
  CHECK(tiny.holds);
  CHECK(tiny.b == 1);

  CHECK_NOTHROW((void)sorted_sequences_property({1.0, 3.0}, {1.0}, {1}, 1.0));
  try {
    (void)sorted_sequences_property({1.0, 1.5}, {1.0}, {1}, 1.0);
    FAIL("expected PreconditionViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolated);
  }
}

TEST_CASE("threshold table formulas") {
  const ThresholdTable t = ThresholdTable::make(0.2, 3);
  CHECK(t.tail_reject == doctest::Approx(0.125 * 0.04));
  CHECK(t.case2_far == doctest::Approx(0.05 * 0.2 / 9.0));
  CHECK(t.case3_far == doctest::Approx(0.2 * 0.2 / 9.0));
  CHECK(t.trace_est_err_case2 == doctest::Approx(0.005 * 0.2 / 9.0));
  CHECK(t.small_block_case3 == doctest::Approx(0.1 * 0.2 / 9.0));
}

TEST_CASE("block extraction selectors") {
  // Diagonal state with a tail entry at index 2.
  std::vector<double> vals{0.6, 0.3999995, 5e-7};
  const DensityMatrix rho = diagonal_density(vals);
  const UpperBucketing b = upper_bucketing(Spectrum{vals, SpectrumOrder::unspecified}, 0.1);
  REQUIRE(b.tail == std::vector<int>{2});

  const auto junk = extract_block(rho, b, BlockSelector::junk_diag());
  CHECK(junk.trace() == doctest::Approx(5e-7));

  const int j_top = b.bucket_of[0];
  const int j_mid = b.bucket_of[1];
  REQUIRE(j_top != j_mid);
  const auto off = extract_block(rho, b, BlockSelector::offdiag(j_top, j_mid));
  CHECK(off.materialize().cwiseAbs().maxCoeff() == 0.0);  // diagonal parent

  const auto pair = extract_block(rho, b, BlockSelector::principal_pair(j_top, j_mid));
  CHECK(pair.trace() == doctest::Approx(0.6 + 0.3999995));

  CHECK_THROWS_AS((void)extract_block(rho, b, BlockSelector::diag(99)), Error);
}

}  // TEST_SUITE
