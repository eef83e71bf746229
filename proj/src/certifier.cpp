// SPDX-License-Identifier: Apache-2.0
#include "certlab/certifier.hpp"

#include <algorithm>
#include <cmath>

namespace certlab {

namespace {

void check_config(const CertifierConfig& c) {
  if (!(c.eps > 0.0 && c.eps < 1.0) || !(c.delta > 0.0 && c.delta < 1.0)) {
    fail(ErrorKind::ConfigInvalid,
         "eps = " + std::to_string(c.eps) + ", delta = " + std::to_string(c.delta));
  }
  if (c.oracle.flip_prob < 0.0 || c.oracle.flip_prob > 0.5) {
    fail(ErrorKind::ConfigInvalid, "flip_prob = " + std::to_string(c.oracle.flip_prob));
  }
  if (c.units.tail <= 0.0 || c.units.trace <= 0.0 || c.units.oracle <= 0.0) {
    fail(ErrorKind::ConfigInvalid, "unit constants must be positive");
  }
}

/// Bernstein-calibrated Bernoulli count: enough draws that the empirical
/// mean of a Bernoulli with variance proxy p_ref deviates by more than
/// `margin` with probability at most delta_share.
double bernstein_count(double p_ref, double margin, double delta_share) {
  const double numer = (2.0 * p_ref + 2.0 * margin / 3.0) * std::log(2.0 / delta_share);
  return std::ceil(numer / (margin * margin));
}

/// Distribution-free (worst-case variance) count for additive accuracy.
double hoeffding_count(double margin, double delta_share) {
  return std::ceil(std::log(2.0 / delta_share) / (2.0 * margin * margin));
}

double clamp_prob(double p) { return std::min(1.0, std::max(0.0, p)); }

struct Sampler {
  const Mat* rho;  // in sigma's eigenbasis
  bool exact;

  double block_trace(const std::vector<int>& idx) const {
    double t = 0.0;
    for (int i : idx) t += (*rho)(i, i).real();
    return clamp_prob(t);
  }
  double estimate(double p, double k, RngStream& rng) const {
    if (exact) return p;
    const long long trials = static_cast<long long>(k);
    return static_cast<double>(rng.binomial(trials, p)) / static_cast<double>(trials);
  }
};

struct OracleCall {
  bool says_far = false;
  double block_copies = 0.0;
};

/// One majority-vote oracle chain at accuracy eps_prime. `dist2` is the true
/// 2-norm distance between the normalized blocks. Per-call confidence is
/// 0.9; the chain repeats ceil(18 ln(3 m^2 / delta)) times.
OracleCall run_oracle_chain(double dist2, double eps_prime, const CertifierConfig& config,
                            int m, RngStream& rng) {
  OracleCall out;
  if (eps_prime >= 2.0) {
    // No two states can be this far apart in 2-norm; the call is vacuous.
    out.says_far = false;
    out.block_copies = 0.0;
    return out;
  }
  constexpr double kPerCallDelta = 0.1;
  const double per_call =
      config.units.oracle * std::ceil(std::log(1.0 / kPerCallDelta) / (eps_prime * eps_prime));
  const int reps = static_cast<int>(
      std::ceil(18.0 * std::log(3.0 * m * m / config.delta)));
  out.block_copies = per_call * reps;

  const bool ideal_far = dist2 > eps_prime / 2.0;
  double flip = 0.0;
  if (config.oracle.kind == HSOracleSpec::Kind::noisy) flip = config.oracle.flip_prob;
  if (config.oracle.kind == HSOracleSpec::Kind::statistical) flip = kPerCallDelta;
  if (flip <= 0.0 || config.exact_statistics) {
    out.says_far = ideal_far;
    return out;
  }
  int far_votes = 0;
  for (int i = 0; i < reps; ++i) {
    const bool answer = rng.bernoulli(flip) ? !ideal_far : ideal_far;
    if (answer) ++far_votes;
  }
  out.says_far = far_votes * 2 > reps;
  return out;
}

Mat principal_block(const Mat& rho, const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  Mat out(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out(a, b) = rho(idx[a], idx[b]);
  }
  return out;
}

double trace_norm_hermitian(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

void CopyLedger::charge_tail(double copies) {
  tail_test += copies;
  total += copies;
}
void CopyLedger::charge_trace(double copies) {
  trace_estimates += copies;
  total += copies;
}
void CopyLedger::charge_case2(int j, double copies) {
  case2[j] += copies;
  total += copies;
}
void CopyLedger::charge_case3(int j, int j2, double copies) {
  case3[{j, j2}] += copies;
  total += copies;
}

TailTestResult case1_tail_test(const Mat& rho_in_sigma_basis, const UpperBucketing& bucketing,
                               const CertifierConfig& config, RngStream& rng) {
  TailTestResult out;
  if (bucketing.tail.empty()) return out;

  double sigma_tail = 0.0;
  for (int i : bucketing.tail) sigma_tail += bucketing.input.values[i];
  const double eps = config.eps;
  const double margin = 0.0625 * eps * eps;
  out.threshold = sigma_tail + margin;

  const double delta_share = config.delta / 3.0;
  const double p_ref = sigma_tail + 2.0 * margin;
  const double k = config.units.tail * bernstein_count(p_ref, margin, delta_share);

  Sampler sampler{&rho_in_sigma_basis, config.exact_statistics};
  const double p = sampler.block_trace(bucketing.tail);
  out.estimate = sampler.estimate(p, k, rng);
  out.copies = k;
  out.accept = out.estimate < out.threshold;
  return out;
}

BlockPrepResult conditional_block_prepare(double block_prob, long long budget, RngStream& rng) {
  if (block_prob <= 1e-15) fail(ErrorKind::ZeroMassBlock, "block probability is zero");
  if (budget < 0) fail(ErrorKind::PreconditionViolated, "negative budget");
  block_prob = std::min(block_prob, 1.0);
  BlockPrepResult out;
  const double cap = 10.0 * static_cast<double>(budget) / block_prob;
  std::geometric_distribution<long long> failures(block_prob);
  while (out.prepared < budget) {
    const long long cost = failures(rng.engine()) + 1;
    if (static_cast<double>(out.consumed + cost) > cap) {
      out.consumed = static_cast<long long>(cap);
      out.shortfall = true;
      return out;
    }
    out.consumed += cost;
    ++out.prepared;
  }
  return out;
}

CertifyResult certify(const DensityMatrix& rho_true, const DensityMatrix& sigma,
                      const CertifierConfig& config) {
  check_config(config);
  if (rho_true.dim() != sigma.dim()) fail(ErrorKind::DimMismatch, "state dimensions");

  // Work in sigma's eigenbasis; the tester knows sigma exactly.
  const Mat basis = sigma.eigenvectors();
  const Mat rho = basis.adjoint() * rho_true.matrix() * basis;
  std::vector<double> lambda(sigma.dim());
  for (int i = 0; i < sigma.dim(); ++i) lambda[i] = sigma.eigenvalues()(i);

  const UpperBucketing bucketing =
      upper_bucketing(Spectrum{lambda, SpectrumOrder::unspecified}, config.eps);
  const ThresholdTable th = ThresholdTable::make(config.eps, bucketing.m);

  CertifyResult result;
  result.thresholds = th;
  result.m = bucketing.m;
  result.sigma_star_half = quasinorm_half(bucketing.sigma_star);

  Sampler sampler{&rho, config.exact_statistics};
  const double m = static_cast<double>(bucketing.m);
  const double case2_delta = 0.5 * (config.delta / 3.0) / m;
  const double case3_delta = 0.5 * (config.delta / 3.0) / (m * m);

  // Case 1: tail mass.
  {
    RngStream rng(config.seed.substream(1));
    const TailTestResult tail = case1_tail_test(rho, bucketing, config, rng);
    result.ledger.charge_tail(tail.copies);
    result.case_trace.push_back(
        {"tail", -1, -1, tail.estimate, tail.threshold, !tail.accept, tail.copies});
    if (!tail.accept) result.verdict = Verdict::far;
  }

  // Case 2: per-bucket principal blocks.
  int stream = 100;
  for (int j : bucketing.nonempty) {
    RngStream rng(config.seed.substream(static_cast<std::uint32_t>(stream++)));
    const auto& members = bucketing.bucket(j);
    double sigma_block = 0.0;
    for (int i : members) sigma_block += lambda[i];

    const double k = config.units.trace *
                     hoeffding_count(th.trace_est_err_case2, case2_delta);
    const double p = sampler.block_trace(members);
    const double est = sampler.estimate(p, k, rng);
    result.ledger.charge_trace(k);
    const bool trace_reject = std::abs(est - sigma_block) > th.trace_est_err_case2;
    result.case_trace.push_back(
        {"trace2", j, -1, std::abs(est - sigma_block), th.trace_est_err_case2, trace_reject, k});
    if (trace_reject) {
      result.verdict = Verdict::far;
      continue;
    }
    if (sigma_block <= th.small_block_case2) continue;

    const int dj = static_cast<int>(members.size());
    const double eps_prime = 0.025 * config.eps /
                             (m * m * std::pow(dj, 1.5) * std::ldexp(1.0, -j));
    const Mat rho_block = principal_block(rho, members);
    const double rho_trace = std::max(rho_block.trace().real(), 1e-12);
    Mat sigma_block_mat = Mat::Zero(dj, dj);
    for (int a = 0; a < dj; ++a) sigma_block_mat(a, a) = lambda[members[a]];
    const double dist2 =
        (rho_block / rho_trace - sigma_block_mat / sigma_block).norm();

    const OracleCall call = run_oracle_chain(dist2, eps_prime, config, bucketing.m, rng);
    const double source_copies = call.block_copies / std::max(p, 1e-12);
    result.ledger.charge_case2(j, source_copies);
    result.case_trace.push_back(
        {"oracle2", j, -1, dist2, eps_prime / 2.0, call.says_far, source_copies});
    if (call.says_far) result.verdict = Verdict::far;
  }

  // Case 3: bucket pairs, larger bucket first.
  stream = 10000;
  for (std::size_t a = 0; a < bucketing.nonempty.size(); ++a) {
    for (std::size_t b = a + 1; b < bucketing.nonempty.size(); ++b) {
      int j = bucketing.nonempty[a], j2 = bucketing.nonempty[b];
      if (bucketing.bucket(j2).size() > bucketing.bucket(j).size()) std::swap(j, j2);
      RngStream rng(config.seed.substream(static_cast<std::uint32_t>(stream++)));

      double sigma_pair = 0.0;
      std::vector<int> idx = bucketing.bucket(j);
      for (int i : bucketing.bucket(j2)) idx.push_back(i);
      std::sort(idx.begin(), idx.end());
      for (int i : idx) sigma_pair += lambda[i];
      if (sigma_pair < th.small_block_case3) continue;

      const double k = config.units.trace *
                       hoeffding_count(th.trace_est_err_case3, case3_delta);
      const double p = sampler.block_trace(idx);
      const double est = sampler.estimate(p, k, rng);
      result.ledger.charge_trace(k);
      const bool trace_reject = std::abs(est - sigma_pair) > th.trace_est_err_case3;
      result.case_trace.push_back({"trace3", j, j2, std::abs(est - sigma_pair),
                                   th.trace_est_err_case3, trace_reject, k});
      if (trace_reject) {
        result.verdict = Verdict::far;
        continue;
      }

      const double dja = static_cast<double>(bucketing.bucket(j).size());
      const double djb = static_cast<double>(bucketing.bucket(j2).size());
      const double scale = dja * std::ldexp(1.0, -j) + djb * std::ldexp(1.0, -j2);
      const double eps_prime = config.eps / (m * m * std::sqrt(djb) * scale);

      const int n = static_cast<int>(idx.size());
      const Mat rho_block = principal_block(rho, idx);
      const double rho_trace = std::max(rho_block.trace().real(), 1e-12);
      Mat sigma_block_mat = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) sigma_block_mat(i, i) = lambda[idx[i]];
      const double dist2 = (rho_block / rho_trace - sigma_block_mat / sigma_pair).norm();

      const OracleCall call = run_oracle_chain(dist2, eps_prime, config, bucketing.m, rng);
      const double source_copies = call.block_copies / std::max(p, 1e-12);
      result.ledger.charge_case3(j, j2, source_copies);
      result.case_trace.push_back(
          {"oracle3", j, j2, dist2, eps_prime / 2.0, call.says_far, source_copies});
      if (call.says_far) result.verdict = Verdict::far;
    }
  }
  return result;
}

TrichotomyWitness trichotomy_witness(const DensityMatrix& rho, const DensityMatrix& sigma,
                                     double eps) {
  const Mat basis = sigma.eigenvectors();
  const Mat rho_t = basis.adjoint() * rho.matrix() * basis;
  std::vector<double> lambda(sigma.dim());
  for (int i = 0; i < sigma.dim(); ++i) lambda[i] = sigma.eigenvalues()(i);
  const UpperBucketing bucketing =
      upper_bucketing(Spectrum{lambda, SpectrumOrder::unspecified}, eps);
  const ThresholdTable th = ThresholdTable::make(eps, bucketing.m);

  TrichotomyWitness w;
  if (!bucketing.tail.empty()) {
    // The tail block of a psd matrix has trace norm equal to its trace.
    for (int i : bucketing.tail) w.tail_mass += rho_t(i, i).real();
    w.case1 = w.tail_mass >= th.tail_reject;
  }
  for (int j : bucketing.nonempty) {
    const auto& members = bucketing.bucket(j);
    Mat diff = principal_block(rho_t, members);
    for (std::size_t i = 0; i < members.size(); ++i) diff(i, i) -= lambda[members[i]];
    w.worst_case2 = std::max(w.worst_case2, trace_norm_hermitian(diff));
  }
  w.case2 = w.worst_case2 > th.case2_far;
  for (std::size_t a = 0; a < bucketing.nonempty.size(); ++a) {
    for (std::size_t b = a + 1; b < bucketing.nonempty.size(); ++b) {
      const auto& ja = bucketing.bucket(bucketing.nonempty[a]);
      const auto& jb = bucketing.bucket(bucketing.nonempty[b]);
      const int d = sigma.dim();
      Mat cross = Mat::Zero(d, d);
      for (int r : ja) {
        for (int c : jb) {
          cross(r, c) = rho_t(r, c);
          cross(c, r) = rho_t(c, r);
        }
      }
      w.worst_case3 = std::max(w.worst_case3, trace_norm_hermitian(cross));
    }
  }
  w.case3 = w.worst_case3 > th.case3_far;
  return w;
}

}  // namespace certlab
