// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "certlab/bucketing.hpp"

namespace certlab {

/// Per-bucket perturbation magnitudes eps_j = min(2^{-j-1},
/// alpha d_j^{1/3} 2^{-2(j+1)/3}) with alpha normalizing the total farness.
struct TunedPerturbation {
  std::map<int, double> eps_j;       // multi-entry buckets only
  std::map<int, bool> cap_active;    // whether the 2^{-j-1} cap binds
  double alpha = 0.0;
  double residual = 0.0;             // sum_j 2 floor(d_j/2) eps_j - eps
  bool all_caps_insufficient = false;
};

/// Finds alpha by bisection so that sum_j 2 floor(d_j/2) eps_j = eps
/// (residual below 1e-12 * eps). If even all caps cannot reach eps, returns
/// the all-caps assignment with the flag set.
TunedPerturbation tune_perturbations(const LowerBucketing& bucketing, double eps);

/// (sum_j eps_j^4 2^{2j})^{-1/2} over the tuned buckets, unit constant.
double lower_tuned_functional(const TunedPerturbation& tuned);

/// Sorts ascending, removes the maximal prefix of mass <= eps, removes the
/// single largest remaining entry, and returns the 2/3-quasinorm over eps^2.
double classical_functional(const std::vector<double>& q, double eps);

struct ComplexityReport {
  std::optional<double> lower_tuned;
  std::optional<double> lower_classical;
  std::optional<double> lower_corner;
  std::optional<double> lower_nearly_mixed;
  double lower_best = 0.0;
  std::optional<double> upper;
  std::vector<std::string> regime_flags;
  // Lower-scheme diagnostics.
  double sigma_star_half = 0.0;
  double sigma_prime_half = 0.0;
  double singleton_sum = 0.0;  // sum of sqrt(lambda) over surviving singletons
};

/// Evaluates every applicable lower-bound branch for 0 < eps < 1/12 and
/// reports the max. Branch selection: the mass-removed bound applies when
/// |sigma'|_{1/2} >= |sigma*|_{1/2} / 2 (within it, the classical functional
/// when surviving singletons dominate, the tuned functional otherwise); in
/// the complementary regime the largest eigenvalue is at least 1/2 and the
/// corner bound 1/eps^2 takes over.
ComplexityReport lower_report(const DensityMatrix& sigma, double eps);
ComplexityReport lower_report(const Spectrum& spectrum, double eps);

struct UpperReport {
  double upper = 0.0;            // |sigma*|_{1/2} / eps^2
  double quasinorm_half = 0.0;   // |sigma*|_{1/2}
  double bucket_diag_sum = 0.0;  // sum_j d_j^2 2^{-j}
  int m = 0;
};

UpperReport upper_report(const DensityMatrix& sigma, double eps);
UpperReport upper_report(const Spectrum& spectrum, double eps);

/// Full report: lower_report plus the upper functional.
ComplexityReport analyze(const DensityMatrix& sigma, double eps);
ComplexityReport analyze(const Spectrum& spectrum, double eps);

}  // namespace certlab
