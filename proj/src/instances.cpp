// SPDX-License-Identifier: Apache-2.0
#include "certlab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace certlab {

namespace {

constexpr double kCornerEpsCap = 0.35355339059327373;  // 1/(2 sqrt 2)

/// Eigen-descending basis of sigma; columns ordered by decreasing eigenvalue.
struct DescendingBasis {
  RealVec values;
  Mat vectors;
};

DescendingBasis descending_basis(const DensityMatrix& sigma) {
  const int d = sigma.dim();
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  // Stable descending sort so degenerate eigenvalues keep the solver's
  // original column order (identity for diagonal inputs).
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sigma.eigenvalues()(a) > sigma.eigenvalues()(b);
  });
  DescendingBasis out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (int i = 0; i < d; ++i) {
    out.values(i) = sigma.eigenvalues()(order[i]);
    out.vectors.col(i) = sigma.eigenvectors().col(order[i]);
  }
  return out;
}

}  // namespace

SignedDiagonal SignedDiagonal::make(int dim, double magnitude) {
  if (dim < 1) fail(ErrorKind::BadDim, "dim = " + std::to_string(dim));
  if (magnitude < 0.0) fail(ErrorKind::MagnitudeTooLarge, "negative magnitude");
  SignedDiagonal s;
  s.dim = dim;
  s.magnitude = magnitude;
  s.entries.resize(dim, 0.0);
  for (int i = 0; i + 1 < dim; i += 2) {
    s.entries[i] = -magnitude;
    s.entries[i + 1] = magnitude;
  }
  return s;
}

double SignedDiagonal::trace_norm() const { return 2.0 * (dim / 2) * magnitude; }

double SignedDiagonal::op_norm() const { return dim >= 2 ? magnitude : 0.0; }

Mat SignedDiagonal::matrix() const {
  Mat m = Mat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) m(i, i) = entries[i];
  return m;
}

DensityMatrix quantum_paninski(int d, double eps, const HaarSample& unitary) {
  if (d % 2 != 0 || d < 2) {
    fail(ErrorKind::OddDim,
         "d = " + std::to_string(d) + " (use the nearly-mixed family for odd dimensions)");
  }
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps));
  if (unitary.dim != d) fail(ErrorKind::DimMismatch, "unitary dimension");
  const SignedDiagonal s = SignedDiagonal::make(d, 1.0);
  const Mat delta = unitary.matrix * s.matrix() * unitary.matrix.adjoint();
  Mat rho = Mat::Identity(d, d) / static_cast<double>(d) + (eps / d) * delta;
  return validate_density(rho, 1e-7);
}

DensityMatrix nearly_mixed(const DensityMatrix& sigma, double eps, const HaarSample& unitary) {
  const int d = sigma.dim();
  if (!(eps > 0.0 && eps <= 0.5)) fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps));
  if (unitary.dim != d) fail(ErrorKind::DimMismatch, "unitary dimension");
  const double delta = 2.0 * eps / d;
  if (sigma.min_eigenvalue() < delta - 1e-12) {
    fail(ErrorKind::EigTooSmall, "min eigenvalue " + std::to_string(sigma.min_eigenvalue()) +
                                     " below 2 eps/d = " + std::to_string(delta));
  }
  const SignedDiagonal s = SignedDiagonal::make(d, delta);
  const Mat perturb = unitary.matrix * s.matrix() * unitary.matrix.adjoint();
  return validate_density(sigma.matrix() + perturb, 1e-7);
}

DensityMatrix bucketed_block(const LowerBucketing& bucketing,
                             const std::map<int, double>& eps_j,
                             const std::map<int, HaarSample>& unitaries) {
  const int d = bucketing.input.dim();
  double farness = 0.0;
  for (const auto& [j, mag] : eps_j) {
    const int dj = bucketing.bucket_size(j);
    if (dj == 0) fail(ErrorKind::UnknownBucket, "bucket " + std::to_string(j));
    if (mag < 0.0) fail(ErrorKind::MagnitudeTooLarge, "negative magnitude");
    if (dj == 1 && mag > 0.0) {
      fail(ErrorKind::PreconditionViolated,
           "singleton bucket " + std::to_string(j) + " must stay unperturbed");
    }
    const double cap = std::ldexp(1.0, -j - 1);
    if (mag > cap + 1e-15) {
      fail(ErrorKind::MagnitudeTooLarge, "eps_j = " + std::to_string(mag) +
                                             " exceeds bucket floor " + std::to_string(cap));
    }
    farness += mag * 2.0 * (dj / 2);
  }
  if (farness + 1e-12 < bucketing.eps) {
    fail(ErrorKind::FarnessDeficit, "total farness " + std::to_string(farness) +
                                        " below eps = " + std::to_string(bucketing.eps));
  }

  Mat rho = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) rho(i, i) = bucketing.input.values[i];
  for (const auto& [j, mag] : eps_j) {
    if (mag == 0.0) continue;
    const auto& members = bucketing.buckets.at(j);
    const int dj = static_cast<int>(members.size());
    auto it = unitaries.find(j);
    if (it == unitaries.end() || it->second.dim != dj) {
      fail(ErrorKind::DimMismatch, "missing or mis-sized unitary for bucket " + std::to_string(j));
    }
    const SignedDiagonal s = SignedDiagonal::make(dj, mag);
    const Mat block = it->second.matrix * s.matrix() * it->second.matrix.adjoint();
    for (int a = 0; a < dj; ++a) {
      for (int b = 0; b < dj; ++b) {
        rho(members[a], members[b]) += block(a, b);
      }
    }
  }
  return validate_density(rho, 1e-7);
}

double rotation_fidelity_closed_form(double lambda1, double lambda2, double eps) {
  const double tau = lambda1 + lambda2;
  const double inner =
      std::sqrt(tau * tau - 4.0 * eps * eps * (lambda1 - lambda2) * (lambda1 - lambda2));
  const double root = inner + 1.0 - tau;
  return root * root;
}

DensityMatrix rotation_instance(const DensityMatrix& sigma, double eps) {
  const int d = sigma.dim();
  if (d < 2) fail(ErrorKind::BadDim, "need dimension at least 2");
  if (!(eps >= 0.0 && eps < kCornerEpsCap)) {
    fail(ErrorKind::SpectrumOutOfRegime, "eps = " + std::to_string(eps));
  }
  const DescendingBasis basis = descending_basis(sigma);
  const double l1 = basis.values(0), l2 = basis.values(1);
  if (l1 < 0.5 || l2 > 0.25) {
    fail(ErrorKind::SpectrumOutOfRegime,
         "lambda1 = " + std::to_string(l1) + ", lambda2 = " + std::to_string(l2));
  }
  const double s = 2.0 * eps;
  const double c = std::sqrt(1.0 - s * s);
  Mat rotated = Mat::Zero(d, d);
  for (int i = 2; i < d; ++i) rotated(i, i) = basis.values(i);
  rotated(0, 0) = l1 * c * c + l2 * s * s;
  rotated(1, 1) = l1 * s * s + l2 * c * c;
  rotated(0, 1) = (l1 - l2) * s * c;
  rotated(1, 0) = rotated(0, 1);
  const Mat out = basis.vectors * rotated * basis.vectors.adjoint();
  DensityMatrix result = validate_density(out, 1e-7);

  const double far = 2.0 * trace_distance(result, sigma);
  if (far + 1e-12 < eps) {
    fail(ErrorKind::InvariantViolation, "rotation farness " + std::to_string(far));
  }
  const double fid = fidelity(result, sigma);
  const double target = (1.0 - 4.0 * eps * eps) * (1.0 - 4.0 * eps * eps);
  if (fid + 1e-9 < target) {
    fail(ErrorKind::InvariantViolation, "rotation fidelity " + std::to_string(fid));
  }
  return result;
}

DensityMatrix two_by_two_sign(const DensityMatrix& sigma, double eps, int u) {
  const int d = sigma.dim();
  if (d < 2) fail(ErrorKind::BadDim, "need dimension at least 2");
  if (u != 1 && u != -1) fail(ErrorKind::PreconditionViolated, "u must be +1 or -1");
  if (!(eps >= 0.0 && eps < kCornerEpsCap)) {
    fail(ErrorKind::SpectrumOutOfRegime, "eps = " + std::to_string(eps));
  }
  const DescendingBasis basis = descending_basis(sigma);
  const double l2 = basis.values(1);
  if (!(l2 > 0.25)) {
    fail(ErrorKind::SpectrumOutOfRegime, "lambda2 = " + std::to_string(l2));
  }
  Mat tau = Mat::Zero(d, d);
  tau(0, 0) = -eps * eps;
  tau(1, 1) = eps * eps;
  tau(0, 1) = u * eps / 2.0;
  tau(1, 0) = u * eps / 2.0;
  const Mat out =
      sigma.matrix() + basis.vectors * tau * basis.vectors.adjoint();
  return validate_density(out, 1e-7);
}

std::vector<double> classical_paninski(int d, double eps, const std::vector<int>& theta) {
  if (d % 2 != 0 || d < 2) fail(ErrorKind::OddDim, "d = " + std::to_string(d));
  if (!(eps >= 0.0 && eps <= 1.0)) fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps));
  if (static_cast<int>(theta.size()) != d / 2) {
    fail(ErrorKind::DimMismatch, "theta length must be d/2");
  }
  std::vector<double> p(d);
  for (int k = 0; k < d / 2; ++k) {
    if (theta[k] != 1 && theta[k] != -1) {
      fail(ErrorKind::PreconditionViolated, "theta entries must be +1 or -1");
    }
    p[2 * k] = (1.0 + theta[k] * eps) / d;
    p[2 * k + 1] = (1.0 - theta[k] * eps) / d;
  }
  return p;
}

PerturbationFamily PerturbationFamily::make_quantum_paninski(int d, double eps) {
  PerturbationFamily f;
  f.kind_ = Kind::quantum_paninski;
  f.eps_ = eps;
  std::vector<double> flat(d, 1.0 / d);
  f.base_ = diagonal_density(flat);
  if (d % 2 != 0) fail(ErrorKind::OddDim, "d = " + std::to_string(d));
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps));
  f.farness_ = eps;
  f.mean_zero_ = true;
  return f;
}

PerturbationFamily PerturbationFamily::make_nearly_mixed(DensityMatrix sigma, double eps) {
  PerturbationFamily f;
  f.kind_ = Kind::nearly_mixed;
  f.eps_ = eps;
  const int d = sigma.dim();
  const double delta = 2.0 * eps / d;
  if (!(eps > 0.0 && eps <= 0.5)) fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps));
  if (sigma.min_eigenvalue() < delta - 1e-12) {
    fail(ErrorKind::EigTooSmall, "min eigenvalue below 2 eps/d");
  }
  f.farness_ = 2.0 * (d / 2) * delta;
  f.mean_zero_ = true;
  f.base_ = std::move(sigma);
  return f;
}

PerturbationFamily PerturbationFamily::make_bucketed(LowerBucketing bucketing,
                                                     std::map<int, double> eps_j) {
  PerturbationFamily f;
  f.kind_ = Kind::bucketed_block;
  f.eps_ = bucketing.eps;
  f.base_ = diagonal_density(bucketing.input.values);
  double farness = 0.0;
  for (const auto& [j, mag] : eps_j) {
    const int dj = bucketing.bucket_size(j);
    if (dj == 0) fail(ErrorKind::UnknownBucket, "bucket " + std::to_string(j));
    if (dj == 1 && mag > 0.0) {
      fail(ErrorKind::PreconditionViolated, "singleton bucket must stay unperturbed");
    }
    if (mag > std::ldexp(1.0, -j - 1) + 1e-15) {
      fail(ErrorKind::MagnitudeTooLarge, "eps_j exceeds bucket floor");
    }
    farness += mag * 2.0 * (dj / 2);
  }
  if (farness + 1e-12 < bucketing.eps) {
    fail(ErrorKind::FarnessDeficit, "farness " + std::to_string(farness));
  }
  f.farness_ = farness;
  f.mean_zero_ = true;
  f.bucketing_ = std::move(bucketing);
  f.eps_j_ = std::move(eps_j);
  return f;
}

PerturbationFamily PerturbationFamily::make_rotation_pair(DensityMatrix sigma, double eps) {
  PerturbationFamily f;
  f.kind_ = Kind::rotation_pair;
  f.eps_ = eps;
  f.members_.push_back(rotation_instance(sigma, eps));
  f.farness_ = eps;
  f.mean_zero_ = false;
  f.base_ = std::move(sigma);
  return f;
}

PerturbationFamily PerturbationFamily::make_two_by_two(DensityMatrix sigma, double eps) {
  PerturbationFamily f;
  f.kind_ = Kind::two_by_two_sign;
  f.eps_ = eps;
  f.members_.push_back(two_by_two_sign(sigma, eps, +1));
  f.members_.push_back(two_by_two_sign(sigma, eps, -1));
  f.farness_ = std::sqrt(1.0 + 4.0 * eps * eps) * eps;
  // The sign flips only the off-diagonal entries; the eps^2 diagonal part is
  // common to both members, so the mixture mean is not the base state.
  f.mean_zero_ = false;
  f.base_ = std::move(sigma);
  return f;
}

PerturbationFamily PerturbationFamily::make_classical_paninski(int d, double eps) {
  if (d % 2 != 0 || d < 2) fail(ErrorKind::OddDim, "d = " + std::to_string(d));
  if (d > 24) fail(ErrorKind::TooLarge, "support 2^{d/2} too large to enumerate");
  PerturbationFamily f;
  f.kind_ = Kind::classical_paninski;
  f.eps_ = eps;
  std::vector<double> flat(d, 1.0 / d);
  f.base_ = diagonal_density(flat);
  const std::size_t count = std::size_t{1} << (d / 2);
  f.members_.reserve(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    std::vector<int> theta(d / 2);
    for (int k = 0; k < d / 2; ++k) theta[k] = (bits >> k) & 1 ? 1 : -1;
    f.members_.push_back(diagonal_density(classical_paninski(d, eps, theta)));
  }
  f.farness_ = eps;
  f.mean_zero_ = true;
  return f;
}

std::string PerturbationFamily::name() const {
  switch (kind_) {
    case Kind::quantum_paninski: return "quantum_paninski";
    case Kind::nearly_mixed: return "nearly_mixed";
    case Kind::bucketed_block: return "bucketed_block";
    case Kind::rotation_pair: return "rotation_pair";
    case Kind::two_by_two_sign: return "two_by_two_sign";
    case Kind::classical_paninski: return "classical_paninski";
  }
  return "unknown";
}

bool PerturbationFamily::finite_support() const { return !members_.empty(); }

std::size_t PerturbationFamily::support_size() const {
  if (!finite_support()) fail(ErrorKind::InfiniteSupport, name());
  return members_.size();
}

const DensityMatrix& PerturbationFamily::member(std::size_t idx) const {
  if (!finite_support()) fail(ErrorKind::InfiniteSupport, name());
  return members_.at(idx);
}

double PerturbationFamily::weight(std::size_t) const {
  return 1.0 / static_cast<double>(support_size());
}

DensityMatrix PerturbationFamily::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::quantum_paninski:
      return quantum_paninski(base_.dim(), eps_, sample_haar(base_.dim(), rng));
    case Kind::nearly_mixed:
      return nearly_mixed(base_, eps_, sample_haar(base_.dim(), rng));
    case Kind::bucketed_block: {
      std::map<int, HaarSample> unitaries;
      for (const auto& [j, mag] : eps_j_) {
        if (mag > 0.0) unitaries.emplace(j, sample_haar(bucketing_.bucket_size(j), rng));
      }
      return bucketed_block(bucketing_, eps_j_, unitaries);
    }
    default:
      return members_[rng.below(members_.size())];
  }
}

FamilyReport validate_family(const PerturbationFamily& family, std::size_t n_samples,
                             RngStream& rng) {
  FamilyReport report;
  const DensityMatrix& sigma = family.base();
  const int d = sigma.dim();

  double worst_valid = 0.0;
  double worst_far = std::numeric_limits<double>::infinity();
  bool all_valid = true;

  auto inspect = [&](const DensityMatrix& rho) {
    const double herm = (rho.matrix() - rho.matrix().adjoint()).cwiseAbs().maxCoeff();
    const double tr_err = std::abs(rho.matrix().trace().real() - 1.0);
    const double neg = std::max(0.0, -rho.min_eigenvalue());
    worst_valid = std::max({worst_valid, herm, tr_err, neg});
    if (worst_valid > kDefaultTol) all_valid = false;
    worst_far = std::min(worst_far, 2.0 * trace_distance(rho, sigma));
  };

  Mat mean = Mat::Zero(d, d);
  std::size_t count = 0;
  if (family.finite_support()) {
    for (std::size_t i = 0; i < family.support_size(); ++i) {
      inspect(family.member(i));
      mean += family.weight(i) * family.member(i).matrix();
      ++count;
    }
  } else {
    for (std::size_t i = 0; i < n_samples; ++i) {
      const DensityMatrix rho = family.sample(rng);
      inspect(rho);
      mean += rho.matrix();
      ++count;
    }
    mean /= static_cast<double>(count);
  }

  report.checks.push_back({"members_valid", all_valid, worst_valid,
                           "worst hermiticity/trace/psd violation"});
  const double far_slack = worst_far - family.farness();
  report.checks.push_back({"farness_certificate", far_slack >= -1e-9, far_slack,
                           "min |rho - sigma|_1 minus certificate"});
  if (family.mean_zero()) {
    const double dev = (mean - sigma.matrix()).cwiseAbs().maxCoeff();
    if (family.finite_support()) {
      report.checks.push_back({"mean_zero_exact", dev <= 1e-9, dev, "max |E rho - sigma|"});
    } else {
      // Entry-wise CLT scale for Haar families: entries have variance
      // O(delta^2/d), so allow five standard errors.
      const double se = 5.0 * family.farness() /
                        std::sqrt(static_cast<double>(count) * d);
      report.checks.push_back(
          {"mean_zero_statistical", dev <= se, se - dev, "max |mean - sigma| vs 5 se"});
    }
  }
  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const FamilyCheck& c) { return c.pass; });
  return report;
}

}  // namespace certlab
