// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "certlab/linalg.hpp"
#include "certlab/rng.hpp"

namespace certlab {

/// Unitary sample with its unitarity defect recorded at construction.
struct HaarSample {
  int dim = 0;
  Mat matrix;
  double unitarity_defect = 0.0;  // max |U^dag U - I|
};

/// Draws from the Haar measure on U(d): complex Ginibre matrix, Householder
/// QR, then per-column phase normalization by the sign of R's diagonal. The
/// phase step is required for the exact Haar law, not just unitarity.
HaarSample sample_haar(int dim, RngStream& rng);

struct MgfCheck {
  double empirical_mgf = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  double lipschitz = 0.0;
  bool pass = false;
};

/// Estimates E exp(t * tr(U^dag S U S)) over Haar U for a signed diagonal S
/// (which must be traceless so the statistic has mean zero) and compares it
/// against exp(3 L^2 / d) with L = 2 |t| sqrt(d) |S|_op^2. One-sided check:
/// pass iff empirical <= bound * (1 + 3 * std_error).
MgfCheck verify_mgf_bound(int dim, const std::vector<double>& sigma_diag, double t,
                          std::size_t n_samples, RngStream& rng);

}  // namespace certlab
