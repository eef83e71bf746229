// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "certlab/bucketing.hpp"
#include "certlab/haar.hpp"
#include "certlab/linalg.hpp"

namespace certlab {

/// Traceless diagonal (-delta, +delta, ..., last entry 0 when dim is odd).
struct SignedDiagonal {
  int dim = 0;
  double magnitude = 0.0;
  std::vector<double> entries;

  static SignedDiagonal make(int dim, double magnitude);
  double trace_norm() const;  // 2 floor(dim/2) delta
  double op_norm() const;
  Mat matrix() const;
};

/// 1/d + (eps/d) U S U^dag with S the unit signed diagonal; exactly eps-far
/// from the maximally mixed state in trace norm.
DensityMatrix quantum_paninski(int d, double eps, const HaarSample& unitary);

/// sigma + U S(d, 2 eps/d) U^dag; requires min eigenvalue of sigma at least
/// 2 eps / d so the output stays psd.
DensityMatrix nearly_mixed(const DensityMatrix& sigma, double eps, const HaarSample& unitary);

/// Independent signed-diagonal perturbations on the multi-entry buckets of a
/// diagonal state. eps_j maps bucket id to magnitude (<= 2^{-j-1}); the total
/// farness sum_j 2 floor(d_j/2) eps_j must reach the bucketing's eps.
DensityMatrix bucketed_block(const LowerBucketing& bucketing,
                             const std::map<int, double>& eps_j,
                             const std::map<int, HaarSample>& unitaries);

/// Rotates the top-two eigenvectors (descending order) by a real Givens
/// rotation with sine 2*eps. Requires lambda1 >= 1/2, lambda2 <= 1/4 and
/// eps < 1/(2 sqrt 2); the construction checks its farness and fidelity
/// certificates before returning.
DensityMatrix rotation_instance(const DensityMatrix& sigma, double eps);

/// Closed-form F(sigma, sigma') for the rotation instance.
double rotation_fidelity_closed_form(double lambda1, double lambda2, double eps);

/// sigma + tau_u on the top-two eigenspace, tau_u = [[-e^2, u e/2],[u e/2, e^2]].
/// Requires lambda2 > 1/4 and eps < 1/(2 sqrt 2).
DensityMatrix two_by_two_sign(const DensityMatrix& sigma, double eps, int u);

/// Paninski pair construction ((1 + theta_k eps)/d, (1 - theta_k eps)/d).
std::vector<double> classical_paninski(int d, double eps, const std::vector<int>& theta);

/// A parameterized alternative family around a base state, with a farness
/// certificate per sampled member. Finite kinds enumerate their support;
/// Haar kinds sample.
class PerturbationFamily {
 public:
  enum class Kind {
    quantum_paninski,
    nearly_mixed,
    bucketed_block,
    rotation_pair,
    two_by_two_sign,
    classical_paninski,
  };

  static PerturbationFamily make_quantum_paninski(int d, double eps);
  static PerturbationFamily make_nearly_mixed(DensityMatrix sigma, double eps);
  static PerturbationFamily make_bucketed(LowerBucketing bucketing,
                                          std::map<int, double> eps_j);
  static PerturbationFamily make_rotation_pair(DensityMatrix sigma, double eps);
  static PerturbationFamily make_two_by_two(DensityMatrix sigma, double eps);
  static PerturbationFamily make_classical_paninski(int d, double eps);

  Kind kind() const { return kind_; }
  std::string name() const;
  const DensityMatrix& base() const { return base_; }
  double eps() const { return eps_; }
  bool finite_support() const;
  std::size_t support_size() const;
  const DensityMatrix& member(std::size_t idx) const;
  double weight(std::size_t idx) const;
  DensityMatrix sample(RngStream& rng) const;
  /// Certified lower bound on |rho_theta - sigma|_1, exact for the
  /// constructions that admit one.
  double farness() const { return farness_; }
  bool mean_zero() const { return mean_zero_; }

 private:
  PerturbationFamily() = default;
  Kind kind_ = Kind::quantum_paninski;
  DensityMatrix base_;
  double eps_ = 0.0;
  double farness_ = 0.0;
  bool mean_zero_ = false;
  std::vector<DensityMatrix> members_;  // finite kinds only
  // haar kinds
  LowerBucketing bucketing_;
  std::map<int, double> eps_j_;
};

struct FamilyCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct FamilyReport {
  bool pass = false;
  std::vector<FamilyCheck> checks;
};

/// Validates every finite-support member (or n_samples draws): psd/trace,
/// farness certificate, and the mean-zero claim where the kind makes one.
FamilyReport validate_family(const PerturbationFamily& family, std::size_t n_samples,
                             RngStream& rng);

}  // namespace certlab
