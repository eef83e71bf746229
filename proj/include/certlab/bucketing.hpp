// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <vector>

#include "certlab/linalg.hpp"

namespace certlab {

/// Dyadic bucket index j such that lambda lies in (2^{-j-1}, 2^{-j}].
int dyadic_bucket(double lambda);

/// Mass-removal scheme feeding the lower-bound constructions. Indices are
/// positions into the input spectrum (original order).
struct LowerBucketing {
  double eps = 0.0;
  Spectrum input;
  std::vector<int> bucket_of;                // j(i)
  std::map<int, std::vector<int>> buckets;   // j -> S_j
  std::vector<int> nonempty;                 // ascending bucket ids
  std::vector<int> singletons;               // S_sing
  std::vector<int> many;                     // S_many
  std::vector<int> sort_permutation;         // indices by lambda_i / d_{j(i)} increasing
  int d_prime = 0;                           // |S_tail|
  std::vector<int> tail;                     // S_tail
  int i_max = -1;                            // largest surviving eigenvalue's index
  std::vector<int> peripheral;               // S_tail plus i_max
  Spectrum sigma_star;                       // tail zeroed
  Spectrum sigma_prime;                      // tail and i_max zeroed
  std::vector<int> J_star;                   // buckets meeting [d] \ S_tail
  std::vector<int> J_prime;                  // buckets meeting [d] \ (S_tail + i_max)

  int bucket_size(int j) const;
};

/// Buckets a strictly positive spectrum for 0 < eps < 1/12. The tail is the
/// longest prefix (in lambda_i / d_{j(i)} increasing order, ties by original
/// index) of mass at most 12 eps, capped below the full dimension.
LowerBucketing lower_bucketing(const Spectrum& spectrum, double eps);

/// Tail-plus-dyadic scheme for the certification algorithm. Tail holds the
/// smallest eigenvalues with total mass at most eps^2/20.
struct UpperBucketing {
  double eps = 0.0;
  Spectrum input;
  int d_star = 0;
  std::vector<int> tail;                     // S_tail (ascending lambda)
  std::vector<int> bucket_of;                // j(i), -1 for tail indices
  std::map<int, std::vector<int>> buckets;
  std::vector<int> nonempty;
  int m = 0;
  Spectrum sigma_star;

  const std::vector<int>& bucket(int j) const;  // throws UnknownBucket
};

UpperBucketing upper_bucketing(const Spectrum& spectrum, double eps);

struct BucketCountBound {
  int count_disjoint_from_tail = 0;
  int bound = 0;  // ceil(log2(d^2/eps)) + 2
};

/// Counts buckets disjoint from the lower scheme's tail and the closed-form
/// cap they must respect.
BucketCountBound bucket_count_bound(const LowerBucketing& bucketing, double eps);

struct SortedSequencesResult {
  bool holds = false;
  int s = 0;  // largest prefix of the merged sequence with weighted sum <= 3 eps'
  int a = 0;  // largest u-index inside that prefix (0 if none)
  int b = 0;  // largest v-index inside that prefix (0 if none)
};

/// Merge-and-scan evaluation of the sorted-sequences property: with u
/// strictly increasing and at-least-doubling, v nondecreasing, and weights
/// dvals for v, either b = |v| or sum_{i<=b+1} v_i d_i > eps'.
SortedSequencesResult sorted_sequences_property(const std::vector<double>& u,
                                                const std::vector<double>& v,
                                                const std::vector<long long>& dvals,
                                                double eps_prime);

/// Decision thresholds for the certifier, all derived from (eps, m).
struct ThresholdTable {
  double eps = 0.0;
  int m = 0;
  double tail_reject = 0.0;          // 0.125 eps^2
  double case2_far = 0.0;            // 0.05  eps / m^2
  double case3_far = 0.0;            // 0.2   eps / m^2
  double trace_est_err_case2 = 0.0;  // 0.005 eps / m^2
  double trace_close_case2 = 0.0;    // 0.01  eps / m^2
  double small_block_case2 = 0.0;    // 0.02  eps / m^2
  double trace_est_err_case3 = 0.0;  // 0.025 eps / m^2
  double trace_close_case3 = 0.0;    // 0.05  eps / m^2
  double small_block_case3 = 0.0;    // 0.1   eps / m^2

  static ThresholdTable make(double eps, int m);
};

struct BlockSelector {
  enum class Kind { diag, offdiag, junk_diag, junk_off, principal_pair };
  Kind kind = Kind::diag;
  int j = -1;
  int j2 = -1;

  static BlockSelector diag(int j) { return {Kind::diag, j, -1}; }
  static BlockSelector offdiag(int j, int j2) { return {Kind::offdiag, j, j2}; }
  static BlockSelector junk_diag() { return {Kind::junk_diag, -1, -1}; }
  static BlockSelector junk_off() { return {Kind::junk_off, -1, -1}; }
  static BlockSelector principal_pair(int j, int j2) { return {Kind::principal_pair, j, j2}; }
};

/// Zeroed-complement block extraction over an upper bucketing.
HermitianBlockView extract_block(const DensityMatrix& rho, const UpperBucketing& bucketing,
                                 const BlockSelector& selector);

}  // namespace certlab
