// SPDX-License-Identifier: Apache-2.0
#include "certlab/haar.hpp"

#include <cmath>
#include <numeric>

namespace certlab {

HaarSample sample_haar(int dim, RngStream& rng) {
  if (dim < 1) fail(ErrorKind::BadDim, "dim = " + std::to_string(dim));
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Cplx(rng.normal(), rng.normal());
    }
  }
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Cplx rjj = r(j, j);
    const double mag = std::abs(rjj);
    const Cplx phase = mag > 0.0 ? rjj / mag : Cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  HaarSample s;
  s.dim = dim;
  s.matrix = std::move(q);
  s.unitarity_defect =
      (s.matrix.adjoint() * s.matrix - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
  return s;
}

MgfCheck verify_mgf_bound(int dim, const std::vector<double>& sigma_diag, double t,
                          std::size_t n_samples, RngStream& rng) {
  if (dim < 1) fail(ErrorKind::BadDim, "dim = " + std::to_string(dim));
  if (static_cast<int>(sigma_diag.size()) != dim) {
    fail(ErrorKind::DimMismatch, "diagonal length does not match dim");
  }
  double trace = 0.0, op = 0.0;
  for (double v : sigma_diag) {
    trace += v;
    op = std::max(op, std::abs(v));
  }
  if (std::abs(trace) > 1e-9 * std::max(1.0, op * dim)) {
    fail(ErrorKind::NonTraceless, "tr(S) = " + std::to_string(trace));
  }
  Mat s = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) s(i, i) = sigma_diag[i];

  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const HaarSample u = sample_haar(dim, rng);
    const Mat conj = u.matrix.adjoint() * s * u.matrix;
    const double f = t * (conj * s).trace().real();
    const double e = std::exp(f);
    sum += e;
    sum2 += e * e;
  }
  MgfCheck out;
  const double n = static_cast<double>(n_samples);
  out.empirical_mgf = sum / n;
  const double var = std::max(sum2 / n - out.empirical_mgf * out.empirical_mgf, 0.0);
  out.std_error = std::sqrt(var / n);
  out.lipschitz = 2.0 * std::abs(t) * std::sqrt(static_cast<double>(dim)) * op * op;
  out.bound = std::exp(3.0 * out.lipschitz * out.lipschitz / dim);
  out.pass = out.empirical_mgf <= out.bound * (1.0 + 3.0 * out.std_error);
  return out;
}

}  // namespace certlab
