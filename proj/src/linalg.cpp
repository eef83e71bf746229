// SPDX-License-Identifier: Apache-2.0
#include "certlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace certlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::BadTrace: return "BadTrace";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NonPositiveP: return "NonPositiveP";
    case ErrorKind::OutsideBlochBall: return "OutsideBlochBall";
    case ErrorKind::BadDim: return "BadDim";
    case ErrorKind::NonTraceless: return "NonTraceless";
    case ErrorKind::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorKind::ZeroEigenvalue: return "ZeroEigenvalue";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::UnknownBucket: return "UnknownBucket";
    case ErrorKind::OddDim: return "OddDim";
    case ErrorKind::EigTooSmall: return "EigTooSmall";
    case ErrorKind::MagnitudeTooLarge: return "MagnitudeTooLarge";
    case ErrorKind::FarnessDeficit: return "FarnessDeficit";
    case ErrorKind::SpectrumOutOfRegime: return "SpectrumOutOfRegime";
    case ErrorKind::SingularSigma: return "SingularSigma";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InfiniteSupport: return "InfiniteSupport";
    case ErrorKind::ZeroMassCell: return "ZeroMassCell";
    case ErrorKind::NoMultiBuckets: return "NoMultiBuckets";
    case ErrorKind::EmptySum: return "EmptySum";
    case ErrorKind::ZeroMassBlock: return "ZeroMassBlock";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::IoError: return "IoError";
  }
  return "UnknownError";
}

double Spectrum::mass() const { return std::accumulate(values.begin(), values.end(), 0.0); }

Spectrum Spectrum::validated(std::vector<double> values, SpectrumOrder order,
                             double expected_mass, double tol) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < -tol) {
      fail(ErrorKind::InvariantViolation,
           "negative spectrum entry " + std::to_string(values[i]) + " at index " +
               std::to_string(i));
    }
    values[i] = std::max(values[i], 0.0);
  }
  Spectrum s{std::move(values), order};
  const double m = s.mass();
  if (std::abs(m - expected_mass) > tol) {
    fail(ErrorKind::InvariantViolation, "spectrum mass " + std::to_string(m) +
                                            " differs from expected " +
                                            std::to_string(expected_mass));
  }
  return s;
}

DensityMatrix validate_density(const Mat& raw, double tol) {
  if (raw.rows() != raw.cols()) {
    fail(ErrorKind::BadDim, "matrix is not square");
  }
  const double herm_err = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > tol) {
    fail(ErrorKind::NotHermitian, "max |M - M^dag| = " + std::to_string(herm_err));
  }
  const double tr = raw.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    fail(ErrorKind::BadTrace, "trace = " + std::to_string(tr));
  }
  DensityMatrix dm;
  dm.mat_ = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(dm.mat_);
  RealVec ev = es.eigenvalues();
  if (ev(0) < -tol) {
    fail(ErrorKind::NotPSD, "min eigenvalue = " + std::to_string(ev(0)));
  }
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), 0.0);
  dm.evals_ = ev;
  dm.evecs_ = es.eigenvectors();
  return dm;
}

DensityMatrix diagonal_density(const std::vector<double>& values, double tol) {
  const int d = static_cast<int>(values.size());
  Mat m = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = values[i];
  return validate_density(m, tol);
}

Spectrum DensityMatrix::spectrum_descending() const {
  std::vector<double> v(evals_.data(), evals_.data() + evals_.size());
  std::sort(v.begin(), v.end(), std::greater<double>());
  return Spectrum{std::move(v), SpectrumOrder::descending};
}

namespace {

RealVec hermitian_eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void check_same_dim(int a, int b) {
  if (a != b) {
    fail(ErrorKind::DimMismatch,
         "dimensions " + std::to_string(a) + " and " + std::to_string(b));
  }
}

}  // namespace

double trace_distance(const Mat& a, const Mat& b) {
  check_same_dim(static_cast<int>(a.rows()), static_cast<int>(b.rows()));
  return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_distance(rho.matrix(), sigma.matrix());
}

double schatten(const Mat& hermitian, double p) {
  if (p <= 0.0) fail(ErrorKind::NonPositiveP, "p = " + std::to_string(p));
  const RealVec ev = hermitian_eigenvalues(hermitian);
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i) s += std::pow(std::abs(ev(i)), p);
  return std::pow(s, 1.0 / p);
}

double schatten(const Spectrum& spectrum, double p) {
  if (p <= 0.0) fail(ErrorKind::NonPositiveP, "p = " + std::to_string(p));
  double s = 0.0;
  for (double v : spectrum.values) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

double quasinorm_half(const Spectrum& spectrum) {
  double s = 0.0;
  for (double v : spectrum.values) s += std::sqrt(std::max(v, 0.0));
  return s * s;
}

Mat psd_sqrt(const Mat& hermitian) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
  RealVec ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_same_dim(rho.dim(), sigma.dim());
  // F = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, via spectral square roots.
  const Mat root = psd_sqrt(rho.matrix());
  const Mat inner = root * sigma.matrix() * root;
  const RealVec ev = hermitian_eigenvalues(inner);
  double s = 0.0;
  for (int i = 0; i < ev.size(); ++i) s += std::sqrt(std::max(ev(i), 0.0));
  return std::min(s * s, 1.0 + 10 * kDefaultTol);
}

double fidelity_qubit(const BlochVector& a, const BlochVector& b) {
  constexpr double ball_tol = 1e-12;
  if (a.norm2() > 1.0 + ball_tol || b.norm2() > 1.0 + ball_tol) {
    fail(ErrorKind::OutsideBlochBall,
         "|a|^2 = " + std::to_string(a.norm2()) + ", |b|^2 = " + std::to_string(b.norm2()));
  }
  const double ra = std::max(1.0 - a.norm2(), 0.0);
  const double rb = std::max(1.0 - b.norm2(), 0.0);
  return 0.5 * (1.0 + a.dot(b) + std::sqrt(ra * rb));
}

DensityMatrix qubit_from_bloch(const BlochVector& a) {
  Mat m(2, 2);
  m(0, 0) = Cplx(0.5 * (1.0 + a.z), 0.0);
  m(1, 1) = Cplx(0.5 * (1.0 - a.z), 0.0);
  m(0, 1) = Cplx(0.5 * a.x, -0.5 * a.y);
  m(1, 0) = Cplx(0.5 * a.x, 0.5 * a.y);
  return validate_density(m, 1e-9);
}

double quantum_chi2(const DensityMatrix& rho, const DensityMatrix& sigma, double tol) {
  check_same_dim(rho.dim(), sigma.dim());
  const int d = sigma.dim();
  // Kernel of sigma = eigenvalues at (clamped) zero.
  constexpr double kernel_cut = 1e-12;
  std::vector<int> image;
  image.reserve(d);
  for (int i = 0; i < d; ++i) {
    if (sigma.eigenvalues()(i) > kernel_cut) image.push_back(i);
  }
  const int r = static_cast<int>(image.size());
  if (r < d) {
    Mat kernel(d, d - r);
    int k = 0;
    for (int i = 0; i < d; ++i) {
      if (sigma.eigenvalues()(i) <= kernel_cut) kernel.col(k++) = sigma.eigenvectors().col(i);
    }
    const Mat on_kernel = kernel.adjoint() * rho.matrix() * kernel;
    const double leak = hermitian_eigenvalues(0.5 * (on_kernel + on_kernel.adjoint()))
                            .cwiseAbs()
                            .maxCoeff();
    if (leak > tol) return std::numeric_limits<double>::infinity();
  }
  Mat image_basis(d, r);
  RealVec image_vals(r);
  for (int i = 0; i < r; ++i) {
    image_basis.col(i) = sigma.eigenvectors().col(image[i]);
    image_vals(i) = sigma.eigenvalues()(image[i]);
  }
  const Mat rho_r = image_basis.adjoint() * rho.matrix() * image_basis;
  Mat diff = rho_r;
  for (int i = 0; i < r; ++i) diff(i, i) -= image_vals(i);
  double total = 0.0;
  for (int i = 0; i < r; ++i) {
    total += (diff.row(i) * diff.col(i))(0, 0).real() / image_vals(i);
  }
  return std::max(total, 0.0);
}

HermitianBlockView::HermitianBlockView(const DensityMatrix& parent,
                                       std::vector<std::uint8_t> mask)
    : parent_(&parent), mask_(std::move(mask)) {
  const std::size_t need = static_cast<std::size_t>(parent.dim()) * parent.dim();
  if (mask_.size() != need) {
    fail(ErrorKind::DimMismatch, "mask size does not match parent dimension");
  }
}

Mat HermitianBlockView::materialize() const {
  const int d = parent_->dim();
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (mask_[static_cast<std::size_t>(i) * d + j]) out(i, j) = parent_->matrix()(i, j);
    }
  }
  return out;
}

double HermitianBlockView::trace() const {
  const int d = parent_->dim();
  double t = 0.0;
  for (int i = 0; i < d; ++i) {
    if (mask_[static_cast<std::size_t>(i) * d + i]) t += parent_->matrix()(i, i).real();
  }
  return t;
}

Mat HermitianBlockView::normalized(double tol) const {
  const double t = trace();
  if (t <= tol) fail(ErrorKind::ZeroMassBlock, "block trace = " + std::to_string(t));
  return materialize() / t;
}

HermitianBlockView HermitianBlockView::principal(const DensityMatrix& parent,
                                                 const std::vector<int>& idx) {
  const int d = parent.dim();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(d) * d, 0);
  for (int i : idx) {
    for (int j : idx) mask[static_cast<std::size_t>(i) * d + j] = 1;
  }
  return HermitianBlockView(parent, std::move(mask));
}

HermitianBlockView HermitianBlockView::cross(const DensityMatrix& parent,
                                             const std::vector<int>& rows,
                                             const std::vector<int>& cols) {
  const int d = parent.dim();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(d) * d, 0);
  for (int i : rows) {
    for (int j : cols) {
      mask[static_cast<std::size_t>(i) * d + j] = 1;
      mask[static_cast<std::size_t>(j) * d + i] = 1;
    }
  }
  return HermitianBlockView(parent, std::move(mask));
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Mat tensor_power(const Mat& a, int n) {
  if (n < 0) fail(ErrorKind::PreconditionViolated, "negative tensor power");
  Mat out = Mat::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

DensityMatrix random_density(int dim, RngStream& rng, int rank) {
  if (dim < 1) fail(ErrorKind::BadDim, "dim = " + std::to_string(dim));
  if (rank < 1 || rank > dim) rank = dim;
  Mat g(dim, rank);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < rank; ++j) g(i, j) = Cplx(rng.normal(), rng.normal());
  }
  Mat m = g * g.adjoint();
  m /= m.trace().real();
  return validate_density(m, 1e-7);
}

}  // namespace certlab
