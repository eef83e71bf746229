// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "certlab/common.hpp"
#include "certlab/rng.hpp"

namespace certlab {

using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using Cplx = std::complex<double>;

enum class SpectrumOrder { descending, lower_scheme, unspecified };

/// Eigenvalue list. `values` may be subnormalized when it represents a
/// mass-removed variant of a state; `expected_mass` records the stated mass.
struct Spectrum {
  std::vector<double> values;
  SpectrumOrder order = SpectrumOrder::unspecified;

  int dim() const { return static_cast<int>(values.size()); }
  double mass() const;

  /// Validates nonnegativity and total mass against `expected_mass`.
  static Spectrum validated(std::vector<double> values,
                            SpectrumOrder order = SpectrumOrder::unspecified,
                            double expected_mass = 1.0, double tol = kDefaultTol);
};

/// Validated Hermitian psd unit-trace matrix. Immutable after construction;
/// the eigendecomposition is computed once, with eigenvalues within `tol` of
/// zero clamped to zero so downstream psd-dependent functionals are stable.
class DensityMatrix {
 public:
  /// Empty placeholder; every populated instance comes from validate_density.
  DensityMatrix() = default;

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Mat& matrix() const { return mat_; }
  /// Eigenvalues in ascending order (clamped at zero).
  const RealVec& eigenvalues() const { return evals_; }
  /// Unitary of eigenvectors, columns matching eigenvalues().
  const Mat& eigenvectors() const { return evecs_; }
  Spectrum spectrum_descending() const;
  double min_eigenvalue() const { return evals_(0); }
  double max_eigenvalue() const { return evals_(dim() - 1); }

  friend DensityMatrix validate_density(const Mat& raw, double tol);

 private:
  Mat mat_;
  RealVec evals_;
  Mat evecs_;
};

/// Checks Hermiticity, unit trace and positive semidefiniteness (in that
/// order) against `tol`; throws NotHermitian / BadTrace / NotPSD naming the
/// violating magnitude.
DensityMatrix validate_density(const Mat& raw, double tol = kDefaultTol);

/// Convenience: diagonal state from a spectrum (validated).
DensityMatrix diagonal_density(const std::vector<double>& values, double tol = kDefaultTol);

/// Half the Schatten-1 norm of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const Mat& a, const Mat& b);

/// (sum_i |mu_i|^p)^(1/p) over eigenvalues of a Hermitian matrix; a
/// quasinorm for p < 1.
double schatten(const Mat& hermitian, double p);
double schatten(const Spectrum& spectrum, double p);
/// Schatten-1/2 quasinorm, (sum_i sqrt(lambda_i))^2.
double quasinorm_half(const Spectrum& spectrum);

/// Uhlmann fidelity |sqrt(rho) sqrt(sigma)|_1^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct BlochVector {
  double x = 0, y = 0, z = 0;
  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
};

/// Qubit fidelity from Bloch vectors: (1 + a.b + sqrt((1-a.a)(1-b.b))) / 2.
double fidelity_qubit(const BlochVector& a, const BlochVector& b);
/// 2x2 state (I + a.x X + a.y Y + a.z Z) / 2.
DensityMatrix qubit_from_bloch(const BlochVector& a);

/// tr(sigma^{-1} (rho - sigma)^2). Infinite when sigma's kernel carries any
/// rho mass (operator norm above tol on the kernel projector); otherwise the
/// divergence is evaluated on the image of sigma.
double quantum_chi2(const DensityMatrix& rho, const DensityMatrix& sigma,
                    double tol = kDefaultTol);

/// View of a masked subset of a density matrix's entries. Extraction keeps
/// the parent's entries bit-for-bit and zeroes the complement.
class HermitianBlockView {
 public:
  HermitianBlockView(const DensityMatrix& parent, std::vector<std::uint8_t> mask);

  const DensityMatrix& parent() const { return *parent_; }
  Mat materialize() const;
  double trace() const;
  /// Trace-normalized extraction; requires trace above tol.
  Mat normalized(double tol = kDefaultTol) const;

  /// Mask over a single principal block.
  static HermitianBlockView principal(const DensityMatrix& parent, const std::vector<int>& idx);
  /// Mask over the two off-diagonal rectangles between two index sets.
  static HermitianBlockView cross(const DensityMatrix& parent, const std::vector<int>& rows,
                                  const std::vector<int>& cols);

 private:
  const DensityMatrix* parent_;
  std::vector<std::uint8_t> mask_;  // row-major d*d
};

/// Tensor (Kronecker) product.
Mat kron(const Mat& a, const Mat& b);
/// n-fold tensor power.
Mat tensor_power(const Mat& a, int n);

/// Principal square root of a psd Hermitian matrix (negative eigenvalues
/// clamped to zero).
Mat psd_sqrt(const Mat& hermitian);

/// Haar-rotated random mixed state of the given rank (full rank by default).
DensityMatrix random_density(int dim, RngStream& rng, int rank = -1);

}  // namespace certlab
