// SPDX-License-Identifier: Apache-2.0
#include "certlab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

namespace certlab {

namespace {

constexpr double kKernelCut = 1e-12;

double pow_for_exponent(double base, double n) {
  const double rounded = std::nearbyint(n);
  if (std::abs(n - rounded) < 1e-12) {
    return std::pow(base, static_cast<int>(rounded));
  }
  return std::pow(base, n);
}

double tensor_cardinality(int d, int n) { return std::pow(static_cast<double>(d), n); }

}  // namespace

KernelEvaluator::KernelEvaluator(const DensityMatrix& sigma, double tol)
    : sigma_(sigma.matrix()), tol_(tol) {
  const int d = sigma.dim();
  inv_ = Mat::Zero(d, d);
  Mat kernel_cols(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) {
    const double ev = sigma.eigenvalues()(i);
    const Mat v = sigma.eigenvectors().col(i);
    if (ev > kKernelCut) {
      inv_ += (1.0 / ev) * (v * v.adjoint());
    } else {
      kernel_cols.col(k++) = v;
    }
  }
  if (k > 0) {
    const Mat kc = kernel_cols.leftCols(k);
    kernel_proj_ = kc * kc.adjoint();
  }
}

double KernelEvaluator::operator()(const DensityMatrix& rho_a,
                                   const DensityMatrix& rho_b) const {
  if (rho_a.dim() != sigma_.rows() || rho_b.dim() != sigma_.rows()) {
    fail(ErrorKind::DimMismatch, "kernel operands");
  }
  if (kernel_proj_.size() > 0) {
    const double leak_a = (kernel_proj_ * rho_a.matrix() * kernel_proj_).norm();
    const double leak_b = (kernel_proj_ * rho_b.matrix() * kernel_proj_).norm();
    if (leak_a > tol_ || leak_b > tol_) {
      fail(ErrorKind::SingularSigma, "family member leaks outside sigma's support");
    }
  }
  const Mat da = rho_a.matrix() - sigma_;
  const Mat db = rho_b.matrix() - sigma_;
  return ((inv_ * da).transpose().cwiseProduct(db)).sum().real();
}

double kernel_Z(const DensityMatrix& rho_a, const DensityMatrix& rho_b,
                const DensityMatrix& sigma, double tol) {
  return KernelEvaluator(sigma, tol)(rho_a, rho_b);
}

DivergenceEstimate chi2_tensor_exact(const PerturbationFamily& family,
                                     const DensityMatrix& sigma, int n) {
  if (!family.finite_support()) fail(ErrorKind::InfiniteSupport, family.name());
  if (n < 0) fail(ErrorKind::PreconditionViolated, "negative n");
  if (tensor_cardinality(sigma.dim(), n) > 512.0) {
    fail(ErrorKind::TooLarge, "d^n exceeds 512");
  }
  const std::size_t count = family.support_size();
  const int dn = static_cast<int>(tensor_cardinality(sigma.dim(), n));
  Mat mix = Mat::Zero(dn, dn);
  for (std::size_t i = 0; i < count; ++i) {
    mix += family.weight(i) * tensor_power(family.member(i).matrix(), n);
  }
  const DensityMatrix mixture = validate_density(mix, 1e-7);
  const DensityMatrix reference = validate_density(tensor_power(sigma.matrix(), n), 1e-7);
  DivergenceEstimate out;
  out.value = quantum_chi2(mixture, reference);
  out.mode = DivergenceEstimate::Mode::exact;
  out.n_copies = n;
  return out;
}

DivergenceEstimate chi2_kernel_exact(const PerturbationFamily& family,
                                     const DensityMatrix& sigma, int n) {
  if (!family.finite_support()) fail(ErrorKind::InfiniteSupport, family.name());
  if (n < 0) fail(ErrorKind::PreconditionViolated, "negative n");
  const KernelEvaluator kernel(sigma);
  const std::size_t count = family.support_size();
  double total = 0.0;
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < count; ++b) {
      const double z = kernel(family.member(a), family.member(b));
      total += family.weight(a) * family.weight(b) * std::pow(1.0 + z, n);
    }
  }
  DivergenceEstimate out;
  out.value = std::max(total - 1.0, -kDefaultTol);
  out.mode = DivergenceEstimate::Mode::exact;
  out.n_copies = n;
  return out;
}

PairEstimates chi2_pair_mc(const PerturbationFamily& family, const DensityMatrix& sigma,
                           double n, std::size_t samples, RngSeed seed, int workers) {
  if (samples == 0) fail(ErrorKind::PreconditionViolated, "samples = 0");
  const KernelEvaluator kernel(sigma);

  constexpr std::size_t kBlock = 256;
  const std::size_t nblocks = (samples + kBlock - 1) / kBlock;

  struct BlockAcc {
    double k_sum = 0, k_sum2 = 0, e_sum = 0, e_sum2 = 0;
    bool dominates = true;
  };
  std::vector<BlockAcc> acc(nblocks);

  auto run_block = [&](std::size_t b) {
    RngStream rng(seed.substream(static_cast<std::uint32_t>(b)));
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(samples, lo + kBlock);
    BlockAcc a;
    for (std::size_t i = lo; i < hi; ++i) {
      const DensityMatrix ra = family.sample(rng);
      const DensityMatrix rb = family.sample(rng);
      const double z = kernel(ra, rb);
      const double kv = pow_for_exponent(1.0 + z, n);
      const double ev = std::exp(n * z);
      a.k_sum += kv;
      a.k_sum2 += kv * kv;
      a.e_sum += ev;
      a.e_sum2 += ev * ev;
      if (ev + 1e-12 < kv) a.dominates = false;
    }
    acc[b] = a;
  };

  if (workers <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t b;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= nblocks) return;
            b = next++;
          }
          run_block(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Fixed-order reduction over blocks.
  double k_sum = 0, k_sum2 = 0, e_sum = 0, e_sum2 = 0;
  bool dominates = true;
  for (const BlockAcc& a : acc) {
    k_sum += a.k_sum;
    k_sum2 += a.k_sum2;
    e_sum += a.e_sum;
    e_sum2 += a.e_sum2;
    dominates = dominates && a.dominates;
  }

  const double count = static_cast<double>(samples);
  auto finish = [&](double sum, double sum2) {
    DivergenceEstimate est;
    est.mode = DivergenceEstimate::Mode::monte_carlo;
    est.n_copies = n;
    est.samples = samples;
    const double mean = sum / count;
    const double var = std::max(sum2 / count - mean * mean, 0.0);
    est.value = mean - 1.0;
    est.std_error = std::sqrt(var / count);
    return est;
  };

  PairEstimates out;
  out.kernel = finish(k_sum, k_sum2);
  out.exp_upper = finish(e_sum, e_sum2);
  out.exp_dominates_pointwise = dominates;
  return out;
}

DivergenceEstimate chi2_kernel_mc(const PerturbationFamily& family, const DensityMatrix& sigma,
                                  double n, std::size_t samples, RngSeed seed, int workers) {
  return chi2_pair_mc(family, sigma, n, samples, seed, workers).kernel;
}

DivergenceEstimate chi2_exp_upper(const PerturbationFamily& family, const DensityMatrix& sigma,
                                  double n, std::size_t samples, RngSeed seed, int workers) {
  return chi2_pair_mc(family, sigma, n, samples, seed, workers).exp_upper;
}

ClassicalFamily ClassicalFamily::paninski(int d, double eps) {
  if (d % 2 != 0 || d < 2) fail(ErrorKind::OddDim, "d = " + std::to_string(d));
  if (d > 24) fail(ErrorKind::TooLarge, "support too large");
  ClassicalFamily f;
  f.base.assign(d, 1.0 / d);
  const std::size_t count = std::size_t{1} << (d / 2);
  for (std::size_t bits = 0; bits < count; ++bits) {
    std::vector<int> theta(d / 2);
    for (int k = 0; k < d / 2; ++k) theta[k] = (bits >> k) & 1 ? 1 : -1;
    f.support.push_back(classical_paninski(d, eps, theta));
  }
  return f;
}

double classical_H(const std::vector<double>& p, const std::vector<double>& p2,
                   const std::vector<double>& u) {
  if (p.size() != u.size() || p2.size() != u.size()) {
    fail(ErrorKind::DimMismatch, "distribution lengths");
  }
  double h = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x) {
    if (u[x] <= 0.0) fail(ErrorKind::ZeroMassCell, "cell " + std::to_string(x));
    h += (p[x] - u[x]) * (p2[x] - u[x]) / u[x];
  }
  return h;
}

DivergenceEstimate classical_chi2_exact(const ClassicalFamily& family,
                                        const std::vector<double>& u, int n) {
  const std::size_t count = family.support.size();
  const double w = 1.0 / static_cast<double>(count);
  double total = 0.0;
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = 0; b < count; ++b) {
      total += w * w * std::pow(1.0 + classical_H(family.support[a], family.support[b], u), n);
    }
  }
  DivergenceEstimate out;
  out.value = std::max(total - 1.0, -kDefaultTol);
  out.mode = DivergenceEstimate::Mode::exact;
  out.n_copies = n;
  return out;
}

DivergenceEstimate classical_chi2_mc(const ClassicalFamily& family,
                                     const std::vector<double>& u, int n,
                                     std::size_t samples, RngSeed seed) {
  RngStream rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto& pa = family.support[rng.below(family.support.size())];
    const auto& pb = family.support[rng.below(family.support.size())];
    const double v = std::pow(1.0 + classical_H(pa, pb, u), n);
    sum += v;
    sum2 += v * v;
  }
  DivergenceEstimate out;
  out.mode = DivergenceEstimate::Mode::monte_carlo;
  out.n_copies = n;
  out.samples = samples;
  const double mean = sum / static_cast<double>(samples);
  out.value = mean - 1.0;
  out.std_error =
      std::sqrt(std::max(sum2 / static_cast<double>(samples) - mean * mean, 0.0) /
                static_cast<double>(samples));
  return out;
}

double classical_chi2_bruteforce(const ClassicalFamily& family, const std::vector<double>& u,
                                 int n) {
  const int d = static_cast<int>(u.size());
  if (std::pow(static_cast<double>(d), n) > 4096.0) fail(ErrorKind::TooLarge, "d^n > 4096");
  for (double cell : u) {
    if (cell <= 0.0) fail(ErrorKind::ZeroMassCell, "zero base cell");
  }
  const std::size_t count = family.support.size();
  const double w = 1.0 / static_cast<double>(count);
  std::vector<int> idx(n, 0);
  double total = 0.0;
  for (;;) {
    double mix = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
      double prod = w;
      for (int k = 0; k < n; ++k) prod *= family.support[a][idx[k]];
      mix += prod;
    }
    double uprod = 1.0;
    for (int k = 0; k < n; ++k) uprod *= u[idx[k]];
    const double diff = mix - uprod;
    total += diff * diff / uprod;
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == d) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

double helstrom_success(const PerturbationFamily& family, const DensityMatrix& sigma, int n) {
  if (!family.finite_support()) fail(ErrorKind::InfiniteSupport, family.name());
  if (tensor_cardinality(sigma.dim(), n) > 512.0) fail(ErrorKind::TooLarge, "d^n > 512");
  const int dn = static_cast<int>(tensor_cardinality(sigma.dim(), n));
  Mat mix = Mat::Zero(dn, dn);
  for (std::size_t i = 0; i < family.support_size(); ++i) {
    mix += family.weight(i) * tensor_power(family.member(i).matrix(), n);
  }
  return 0.5 + 0.5 * trace_distance(mix, tensor_power(sigma.matrix(), n));
}

}  // namespace certlab
