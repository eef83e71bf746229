// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "certlab/bucketing.hpp"
#include "certlab/rng.hpp"

namespace certlab {

/// Black-box block certifier honoring the promise "equal when the states
/// match, far when their 2-norm distance exceeds eps'", at a stated copy
/// cost of O(log(1/delta)/eps'^2). The ideal kind answers from the true
/// distance at the midpoint eps'/2; noisy flips the ideal answer with a
/// fixed probability; statistical flips with the per-call confidence
/// parameter, i.e. it errs exactly as often as the guarantee allows.
struct HSOracleSpec {
  enum class Kind { ideal, noisy, statistical };
  Kind kind = Kind::ideal;
  double flip_prob = 0.0;  // noisy only
};

struct CopyLedger {
  double tail_test = 0.0;
  double trace_estimates = 0.0;
  std::map<int, double> case2;                        // per bucket
  std::map<std::pair<int, int>, double> case3;        // per pair
  double total = 0.0;

  void charge_tail(double copies);
  void charge_trace(double copies);
  void charge_case2(int j, double copies);
  void charge_case3(int j, int j2, double copies);
};

/// Per-subroutine sample-count multipliers (the O(1) constants on top of the
/// concentration-calibrated base counts).
struct UnitConstants {
  double tail = 8.0;
  double trace = 8.0;
  double oracle = 8.0;
};

struct CertifierConfig {
  double eps = 0.1;
  double delta = 0.1;
  HSOracleSpec oracle;
  RngSeed seed;
  UnitConstants units;
  /// Diagnostic mode: estimators return exact values, no sampling noise.
  bool exact_statistics = false;
};

enum class Verdict { equal, far };

struct CaseRecord {
  std::string stage;   // "tail", "trace2", "oracle2", "trace3", "oracle3"
  int j = -1;
  int j2 = -1;
  double statistic = 0.0;
  double threshold = 0.0;
  bool rejected = false;
  double copies = 0.0;
};

struct CertifyResult {
  Verdict verdict = Verdict::equal;
  CopyLedger ledger;
  std::vector<CaseRecord> case_trace;
  ThresholdTable thresholds;
  int m = 0;
  double sigma_star_half = 0.0;
};

/// Runs the three-case certification protocol against sampled measurement
/// outcomes of rho_true. The decision logic sees only projector statistics
/// and oracle answers; rho_true feeds the samplers and the oracle, never the
/// decisions directly.
CertifyResult certify(const DensityMatrix& rho_true, const DensityMatrix& sigma,
                      const CertifierConfig& config);

struct TailTestResult {
  bool accept = true;
  double copies = 0.0;
  double estimate = 0.0;
  double threshold = 0.0;
};

/// Bernoulli test of the tail projector mass against the reject threshold
/// tr(sigma_tail) + eps^2/16 (midpoint between the tail-mass promise and the
/// far-case floor).
TailTestResult case1_tail_test(const Mat& rho_in_sigma_basis, const UpperBucketing& bucketing,
                               const CertifierConfig& config, RngStream& rng);

struct BlockPrepResult {
  long long prepared = 0;
  long long consumed = 0;
  bool shortfall = false;
};

/// Simulates projective post-selection: each source copy yields a block copy
/// with probability block_prob. Aborts with a shortfall once consumption
/// exceeds ten times the expected count.
BlockPrepResult conditional_block_prepare(double block_prob, long long budget, RngStream& rng);

struct TrichotomyWitness {
  bool case1 = false;
  bool case2 = false;
  bool case3 = false;
  double tail_mass = 0.0;
  double worst_case2 = 0.0;
  double worst_case3 = 0.0;
  bool any() const { return case1 || case2 || case3; }
};

/// Exact evaluation of the three far-case conditions (no sampling).
TrichotomyWitness trichotomy_witness(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     double eps);

}  // namespace certlab
