// SPDX-License-Identifier: Apache-2.0
#include "certlab/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace certlab {

namespace {

struct TermTable {
  std::vector<int> ids;
  std::vector<double> caps;
  std::vector<double> coeffs;   // d_j^{1/3} 2^{-2(j+1)/3}
  std::vector<double> weights;  // 2 floor(d_j/2)
};

TermTable multi_bucket_terms(const LowerBucketing& bucketing) {
  TermTable t;
  for (const auto& [j, members] : bucketing.buckets) {
    const int dj = static_cast<int>(members.size());
    if (dj < 2) continue;
    t.ids.push_back(j);
    t.caps.push_back(std::ldexp(1.0, -j - 1));
    t.coeffs.push_back(std::cbrt(static_cast<double>(dj)) *
                       std::pow(2.0, -2.0 * (j + 1) / 3.0));
    t.weights.push_back(2.0 * (dj / 2));
  }
  return t;
}

double farness_at(const TermTable& t, double alpha) {
  double sum = 0.0;
  for (std::size_t k = 0; k < t.ids.size(); ++k) {
    sum += t.weights[k] * std::min(t.caps[k], alpha * t.coeffs[k]);
  }
  return sum;
}

}  // namespace

TunedPerturbation tune_perturbations(const LowerBucketing& bucketing, double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 12.0)) {
    fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps));
  }
  const TermTable t = multi_bucket_terms(bucketing);
  if (t.ids.empty()) fail(ErrorKind::NoMultiBuckets, "all buckets are singletons");

  double alpha_max = 0.0;
  for (std::size_t k = 0; k < t.ids.size(); ++k) {
    alpha_max = std::max(alpha_max, t.caps[k] / t.coeffs[k]);
  }

  TunedPerturbation out;
  double alpha;
  if (farness_at(t, alpha_max) < eps) {
    out.all_caps_insufficient = true;
    alpha = alpha_max;
  } else {
    double lo = 0.0, hi = alpha_max;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (farness_at(t, mid) < eps) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (std::abs(farness_at(t, 0.5 * (lo + hi)) - eps) <= 1e-12 * eps) break;
    }
    alpha = 0.5 * (lo + hi);
  }
  out.alpha = alpha;
  for (std::size_t k = 0; k < t.ids.size(); ++k) {
    const double uncapped = alpha * t.coeffs[k];
    out.eps_j[t.ids[k]] = std::min(t.caps[k], uncapped);
    out.cap_active[t.ids[k]] = uncapped >= t.caps[k];
  }
  out.residual = farness_at(t, alpha) - eps;
  return out;
}

double lower_tuned_functional(const TunedPerturbation& tuned) {
  if (tuned.eps_j.empty()) fail(ErrorKind::EmptySum, "no tuned buckets");
  double sum = 0.0;
  for (const auto& [j, ej] : tuned.eps_j) {
    sum += std::pow(ej, 4.0) * std::ldexp(1.0, 2 * j);
  }
  if (sum <= 0.0) fail(ErrorKind::EmptySum, "zero perturbation sum");
  return 1.0 / std::sqrt(sum);
}

double classical_functional(const std::vector<double>& q, double eps) {
  std::vector<double> sorted = q;
  std::sort(sorted.begin(), sorted.end());
  std::size_t start = 0;
  double removed = 0.0;
  while (start < sorted.size() && removed + sorted[start] <= eps) {
    removed += sorted[start];
    ++start;
  }
  if (start >= sorted.size()) return 0.0;
  // Drop the largest remaining entry (the back of the ascending order).
  double sum = 0.0;
  for (std::size_t i = start; i + 1 < sorted.size(); ++i) {
    sum += std::pow(sorted[i], 2.0 / 3.0);
  }
  return std::pow(sum, 1.5) / (eps * eps);
}

ComplexityReport lower_report(const Spectrum& spectrum, double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 12.0)) {
    fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps));
  }
  const int d = spectrum.dim();
  std::vector<double> positive;
  for (double v : spectrum.values) {
    if (v > 1e-12) positive.push_back(v);
  }
  if (positive.empty()) fail(ErrorKind::ZeroEigenvalue, "empty support");

  ComplexityReport report;
  const LowerBucketing bucketing =
      lower_bucketing(Spectrum{positive, SpectrumOrder::unspecified}, eps);
  report.sigma_star_half = quasinorm_half(bucketing.sigma_star);
  report.sigma_prime_half = quasinorm_half(bucketing.sigma_prime);

  std::vector<bool> periph(positive.size(), false);
  for (int i : bucketing.peripheral) periph[i] = true;
  for (int i : bucketing.singletons) {
    if (!periph[i]) report.singleton_sum += std::sqrt(positive[i]);
  }

  report.lower_classical = classical_functional(positive, eps);

  bool has_multi = false;
  for (const auto& [j, members] : bucketing.buckets) {
    if (members.size() > 1) has_multi = true;
  }
  if (has_multi) {
    report.lower_tuned = lower_tuned_functional(tune_perturbations(bucketing, eps));
  }

  const double max_eig = *std::max_element(positive.begin(), positive.end());
  if (max_eig >= 0.5) {
    report.lower_corner = 1.0 / (eps * eps);
    report.regime_flags.push_back("corner-applicable");
  }

  const double min_eig = *std::min_element(spectrum.values.begin(), spectrum.values.end());
  if (min_eig >= 2.0 * eps / d) {
    double inv2 = 0.0;
    for (double v : spectrum.values) inv2 += 1.0 / (v * v);
    report.lower_nearly_mixed =
        std::pow(static_cast<double>(d), 2.5) / (std::sqrt(inv2) * eps * eps);
    report.regime_flags.push_back("nearly-mixed-applicable");
  }

  if (report.sigma_prime_half >= 0.5 * report.sigma_star_half) {
    report.regime_flags.push_back("sigma-prime-branch");
    if (report.singleton_sum > 0.5 * std::sqrt(report.sigma_prime_half)) {
      report.regime_flags.push_back("singleton-dominant");
    } else {
      report.regime_flags.push_back("tuned-branch");
    }
  } else {
    report.regime_flags.push_back("corner-branch");
  }

  double best = 0.0;
  for (const auto& v :
       {report.lower_tuned, report.lower_classical, report.lower_corner,
        report.lower_nearly_mixed}) {
    if (v) best = std::max(best, *v);
  }
  report.lower_best = best;
  return report;
}

ComplexityReport lower_report(const DensityMatrix& sigma, double eps) {
  return lower_report(sigma.spectrum_descending(), eps);
}

UpperReport upper_report(const Spectrum& spectrum, double eps) {
  const UpperBucketing bucketing = upper_bucketing(spectrum, eps);
  UpperReport out;
  out.m = bucketing.m;
  out.quasinorm_half = quasinorm_half(bucketing.sigma_star);
  for (const auto& [j, members] : bucketing.buckets) {
    const double dj = static_cast<double>(members.size());
    out.bucket_diag_sum += dj * dj * std::ldexp(1.0, -j);
  }
  out.upper = out.quasinorm_half / (eps * eps);
  return out;
}

UpperReport upper_report(const DensityMatrix& sigma, double eps) {
  return upper_report(sigma.spectrum_descending(), eps);
}

ComplexityReport analyze(const Spectrum& spectrum, double eps) {
  ComplexityReport report = lower_report(spectrum, eps);
  report.upper = upper_report(spectrum, eps).upper;
  return report;
}

ComplexityReport analyze(const DensityMatrix& sigma, double eps) {
  return analyze(sigma.spectrum_descending(), eps);
}

}  // namespace certlab
