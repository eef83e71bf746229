// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "certlab/instances.hpp"

namespace certlab {

struct DivergenceEstimate {
  enum class Mode { exact, monte_carlo };
  double value = 0.0;
  Mode mode = Mode::exact;
  double n_copies = 0.0;
  std::size_t samples = 0;               // MC only
  std::optional<double> std_error;       // MC only
};

/// Pairwise kernel tr(sigma^{-1} (rho_a - sigma)(rho_b - sigma)). Requires
/// sigma nonsingular on the states' joint support.
double kernel_Z(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                const DensityMatrix& sigma, double tol = kDefaultTol);

/// Cached sigma^{-1} (pseudo-inverse on the image) for repeated kernel
/// evaluations against one reference state.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(const DensityMatrix& sigma, double tol = kDefaultTol);
  double operator()(const DensityMatrix& rho_a, const DensityMatrix& rho_b) const;

 private:
  Mat inv_;          // pseudo-inverse of sigma
  Mat kernel_proj_;  // projector onto ker(sigma), empty when nonsingular
  Mat sigma_;
  double tol_;
};

/// Brute-force divergence of the n-fold mixture from sigma^{otimes n},
/// evaluated directly on the tensor-power matrices. Independent oracle for
/// the kernel identity; requires finite support and d^n <= 512.
DivergenceEstimate chi2_tensor_exact(const PerturbationFamily& family,
                                     const DensityMatrix& sigma, int n);

/// E_{theta,theta'} (1 + Z)^n - 1 summed exactly over the support pairs.
DivergenceEstimate chi2_kernel_exact(const PerturbationFamily& family,
                                     const DensityMatrix& sigma, int n);

struct PairEstimates {
  DivergenceEstimate kernel;
  DivergenceEstimate exp_upper;
  bool exp_dominates_pointwise = true;
};

/// Monte Carlo estimates of the kernel form and its exponential-moment upper
/// variant on a common pair stream, so the pointwise inequality
/// (1+z)^n <= e^{nz} is checked per sample. Samples are drawn in fixed-size
/// blocks with per-block substreams and combined in block order, so results
/// are bit-identical for any worker count.
PairEstimates chi2_pair_mc(const PerturbationFamily& family, const DensityMatrix& sigma,
                           double n, std::size_t samples, RngSeed seed, int workers = 1);

DivergenceEstimate chi2_kernel_mc(const PerturbationFamily& family, const DensityMatrix& sigma,
                                  double n, std::size_t samples, RngSeed seed, int workers = 1);

/// exp(n * Z) variant; dominates the kernel estimate on the same seed.
DivergenceEstimate chi2_exp_upper(const PerturbationFamily& family, const DensityMatrix& sigma,
                                  double n, std::size_t samples, RngSeed seed, int workers = 1);

/// Finite family of distributions around a base distribution.
struct ClassicalFamily {
  std::vector<double> base;
  std::vector<std::vector<double>> support;  // uniform weights

  static ClassicalFamily paninski(int d, double eps);
};

/// Pairwise kernel H = sum_x (p(x) - u(x)) (p'(x) - u(x)) / u(x).
double classical_H(const std::vector<double>& p, const std::vector<double>& p2,
                   const std::vector<double>& u);

DivergenceEstimate classical_chi2_exact(const ClassicalFamily& family,
                                        const std::vector<double>& u, int n);
DivergenceEstimate classical_chi2_mc(const ClassicalFamily& family,
                                     const std::vector<double>& u, int n,
                                     std::size_t samples, RngSeed seed);

/// Exhaustive sum over all d^n sample sequences; requires d^n <= 4096.
double classical_chi2_bruteforce(const ClassicalFamily& family, const std::vector<double>& u,
                                 int n);

/// Optimal distinguishing probability 1/2 + dtr(E rho^n, sigma^n) / 2 for
/// finite families with d^n <= 512.
double helstrom_success(const PerturbationFamily& family, const DensityMatrix& sigma, int n);

}  // namespace certlab
