// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "certlab/certifier.hpp"
#include "certlab/corpus.hpp"

using namespace certlab;

namespace {

CertifierConfig base_config(std::uint64_t seed) {
  CertifierConfig c;
  c.eps = 0.2;
  c.delta = 0.02;
  c.seed = RngSeed{seed, 0};
  return c;
}

}  // namespace

TEST_SUITE("certifier") {

TEST_CASE("equal states in diagnostic mode accept deterministically") {
  CertifierConfig config = base_config(1);
  config.exact_statistics = true;
  for (const auto& vals : {std::vector<double>{0.25, 0.25, 0.25, 0.25},
                           std::vector<double>{0.5, 0.25, 0.125, 0.125},
                           std::vector<double>{1.0, 0.0, 0.0, 0.0}}) {
    const DensityMatrix sigma = diagonal_density(vals);
    const CertifyResult res = certify(sigma, sigma, config);
    CHECK(res.verdict == Verdict::equal);
  }
}

TEST_CASE("equal states accept under sampling noise") {
  const DensityMatrix sigma = diagonal_density({0.5, 0.25, 0.125, 0.125});
  int correct = 0;
  for (int k = 0; k < 20; ++k) {
    CertifierConfig config = base_config(100 + k);
    const CertifyResult res = certify(sigma, sigma, config);
    if (res.verdict == Verdict::equal) ++correct;
  }
  CHECK(correct >= 19);
}

TEST_CASE("block-perturbed far states reject") {
  const auto& states = corpus_states();
  const CorpusState* flat8 = nullptr;
  for (const auto& s : states) {
    if (s.name == "flat8") flat8 = &s;
  }
  REQUIRE(flat8 != nullptr);
  const DensityMatrix sigma = diagonal_density(flat8->spectrum);
  int far = 0;
  for (int k = 0; k < 20; ++k) {
    const FarInstance inst = corpus_far_instance(*flat8, 1, 0.2, RngSeed{7, (std::uint32_t)k});
    CHECK(inst.farness >= 0.2);
    CertifierConfig config = base_config(200 + k);
    if (certify(inst.rho, sigma, config).verdict == Verdict::far) ++far;
  }
  CHECK(far >= 19);
}

TEST_CASE("tail test accepts an empty tail at zero cost") {
  const std::vector<double> flat(4, 0.25);
  const DensityMatrix sigma = diagonal_density(flat);
  const UpperBucketing b =
      upper_bucketing(Spectrum{flat, SpectrumOrder::unspecified}, 0.2);
  REQUIRE(b.tail.empty());
  RngStream rng(3, 0);
  const TailTestResult res = case1_tail_test(sigma.matrix(), b, base_config(3), rng);
  CHECK(res.accept);
  CHECK(res.copies == 0.0);
}

TEST_CASE("tail test flags heavy tails and passes honest ones") {
  // sigma has a light tail; rho parks 0.2 mass on it.
  const std::vector<double> sigma_vals{0.6, 0.3999, 5e-5, 5e-5};
  const DensityMatrix sigma = diagonal_density(sigma_vals);
  const UpperBucketing b =
      upper_bucketing(Spectrum{sigma_vals, SpectrumOrder::unspecified}, 0.5);
  REQUIRE(b.tail.size() == 2);
  const DensityMatrix heavy = diagonal_density({0.5, 0.3, 0.1, 0.1});
  CertifierConfig config = base_config(4);
  config.eps = 0.5;
  int rejects = 0, false_rejects = 0;
  for (int k = 0; k < 30; ++k) {
    RngStream rng(10 + k, 0);
    if (!case1_tail_test(heavy.matrix(), b, config, rng).accept) ++rejects;
    RngStream rng2(10 + k, 1);
    if (!case1_tail_test(sigma.matrix(), b, config, rng2).accept) ++false_rejects;
  }
  CHECK(rejects == 30);
  CHECK(false_rejects == 0);
}

TEST_CASE("conditional block preparation") {
  RngStream rng(6, 0);
  const BlockPrepResult all = conditional_block_prepare(1.0, 50, rng);
  CHECK(all.prepared == 50);
  CHECK(all.consumed == 50);
  CHECK_FALSE(all.shortfall);

  // Mean 400, sd ~ 34.6; allow five sigmas.
  const BlockPrepResult quarter = conditional_block_prepare(0.25, 100, rng);
  CHECK(quarter.prepared == 100);
  CHECK(std::abs(quarter.consumed - 400.0) <= 175.0);

  try {
    (void)conditional_block_prepare(0.0, 10, rng);
    FAIL("expected ZeroMassBlock");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroMassBlock);
  }
}

TEST_CASE("decisions depend only on sampled statistics") {
  // Rotate a far instance inside the flat bucket: every projector statistic
  // and block distance the protocol looks at is unchanged, so the verdict,
  // ledger and transcript must replay identically.
  const auto& states = corpus_states();
  const CorpusState* flat4 = nullptr;
  for (const auto& s : states) {
    if (s.name == "flat4") flat4 = &s;
  }
  REQUIRE(flat4 != nullptr);
  const DensityMatrix sigma = diagonal_density(flat4->spectrum);
  const FarInstance inst = corpus_far_instance(*flat4, 1, 0.2, RngSeed{11, 0});

  RngStream block_rng(99, 0);
  const HaarSample v = sample_haar(4, block_rng);
  const Mat tampered = v.matrix * inst.rho.matrix() * v.matrix.adjoint();
  const DensityMatrix rho2 = validate_density(tampered, 1e-7);

  const CertifierConfig config = base_config(12);
  const CertifyResult r1 = certify(inst.rho, sigma, config);
  const CertifyResult r2 = certify(rho2, sigma, config);
  CHECK(r1.verdict == r2.verdict);
  CHECK(r1.ledger.total == doctest::Approx(r2.ledger.total).epsilon(1e-12));
  REQUIRE(r1.case_trace.size() == r2.case_trace.size());
  for (std::size_t i = 0; i < r1.case_trace.size(); ++i) {
    CHECK(r1.case_trace[i].rejected == r2.case_trace[i].rejected);
    CHECK(r1.case_trace[i].copies ==
          doctest::Approx(r2.case_trace[i].copies).epsilon(1e-12));
  }
}

TEST_CASE("trichotomy witness fires on far instances") {
  const auto& states = corpus_states();
  for (const auto& s : states) {
    const DensityMatrix sigma = diagonal_density(s.spectrum);
    for (int slot = 0; slot < kCorpusFarSlots; ++slot) {
      const FarInstance inst = corpus_far_instance(s, slot, 0.2, RngSeed{13, 1});
      const TrichotomyWitness w = trichotomy_witness(inst.rho, sigma, 0.2);
      CHECK(w.any());
    }
    const TrichotomyWitness self = trichotomy_witness(sigma, sigma, 0.2);
    CHECK_FALSE(self.case2);
    CHECK_FALSE(self.case3);
  }
}

TEST_CASE("noisy oracle with zero flip matches ideal") {
  const DensityMatrix sigma = diagonal_density({0.5, 0.25, 0.125, 0.125});
  CertifierConfig ideal = base_config(21);
  CertifierConfig noisy = base_config(21);
  noisy.oracle = {HSOracleSpec::Kind::noisy, 0.0};
  CHECK(certify(sigma, sigma, ideal).verdict == certify(sigma, sigma, noisy).verdict);
}

TEST_CASE("config validation") {
  const DensityMatrix sigma = diagonal_density({0.5, 0.5});
  CertifierConfig config = base_config(1);
  config.eps = 0.0;
  CHECK_THROWS_AS((void)certify(sigma, sigma, config), Error);
}

}  // TEST_SUITE
