// SPDX-License-Identifier: Apache-2.0
#include "certlab/bucketing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace certlab {

int dyadic_bucket(double lambda) {
  if (lambda <= 0.0) fail(ErrorKind::ZeroEigenvalue, "bucket of nonpositive value");
  lambda = std::min(lambda, 1.0);
  int j = static_cast<int>(std::floor(-std::log2(lambda)));
  while (lambda > std::ldexp(1.0, -j)) --j;
  while (lambda <= std::ldexp(1.0, -j - 1)) ++j;
  return j;
}

int LowerBucketing::bucket_size(int j) const {
  auto it = buckets.find(j);
  return it == buckets.end() ? 0 : static_cast<int>(it->second.size());
}

LowerBucketing lower_bucketing(const Spectrum& spectrum, double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 12.0)) {
    fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps) + ", need (0, 1/12)");
  }
  const int d = spectrum.dim();
  if (d == 0) fail(ErrorKind::ZeroEigenvalue, "empty spectrum");
  for (int i = 0; i < d; ++i) {
    if (spectrum.values[i] <= 0.0) {
      fail(ErrorKind::ZeroEigenvalue,
           "entry " + std::to_string(i) + " = " + std::to_string(spectrum.values[i]));
    }
  }

  LowerBucketing out;
  out.eps = eps;
  out.input = spectrum;
  out.bucket_of.resize(d);
  for (int i = 0; i < d; ++i) {
    const int j = dyadic_bucket(spectrum.values[i]);
    out.bucket_of[i] = j;
    out.buckets[j].push_back(i);
  }
  for (const auto& [j, members] : out.buckets) {
    out.nonempty.push_back(j);
    for (int i : members) {
      (members.size() == 1 ? out.singletons : out.many).push_back(i);
    }
  }
  std::sort(out.singletons.begin(), out.singletons.end());
  std::sort(out.many.begin(), out.many.end());

  out.sort_permutation.resize(d);
  std::iota(out.sort_permutation.begin(), out.sort_permutation.end(), 0);
  auto sort_key = [&](int i) {
    return spectrum.values[i] / out.buckets.at(out.bucket_of[i]).size();
  };
  std::sort(out.sort_permutation.begin(), out.sort_permutation.end(), [&](int a, int b) {
    const double ka = sort_key(a), kb = sort_key(b);
    return ka < kb || (ka == kb && a < b);
  });

  const double budget = 12.0 * eps;
  double prefix = 0.0;
  out.d_prime = 0;
  for (int k = 0; k < d - 1; ++k) {
    prefix += spectrum.values[out.sort_permutation[k]];
    if (prefix > budget) break;
    out.d_prime = k + 1;
  }
  out.tail.assign(out.sort_permutation.begin(), out.sort_permutation.begin() + out.d_prime);

  std::vector<bool> in_tail(d, false);
  for (int i : out.tail) in_tail[i] = true;
  // Largest surviving eigenvalue: the entry that sigma-prime additionally
  // zeroes relative to sigma-star. Ties break to the lowest index.
  out.i_max = -1;
  for (int i = 0; i < d; ++i) {
    if (in_tail[i]) continue;
    if (out.i_max < 0 || spectrum.values[i] > spectrum.values[out.i_max]) out.i_max = i;
  }
  out.peripheral = out.tail;
  out.peripheral.push_back(out.i_max);
  std::sort(out.peripheral.begin(), out.peripheral.end());

  out.sigma_star = spectrum;
  out.sigma_star.order = SpectrumOrder::unspecified;
  for (int i : out.tail) out.sigma_star.values[i] = 0.0;
  out.sigma_prime = out.sigma_star;
  out.sigma_prime.values[out.i_max] = 0.0;

  for (const auto& [j, members] : out.buckets) {
    bool star = false, prime = false;
    for (int i : members) {
      if (!in_tail[i]) {
        star = true;
        if (i != out.i_max) prime = true;
      }
    }
    if (star) out.J_star.push_back(j);
    if (prime) out.J_prime.push_back(j);
  }
  return out;
}

const std::vector<int>& UpperBucketing::bucket(int j) const {
  auto it = buckets.find(j);
  if (it == buckets.end()) fail(ErrorKind::UnknownBucket, "bucket " + std::to_string(j));
  return it->second;
}

UpperBucketing upper_bucketing(const Spectrum& spectrum, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    fail(ErrorKind::EpsOutOfRange, "eps = " + std::to_string(eps) + ", need (0, 1)");
  }
  const int d = spectrum.dim();
  if (d == 0) fail(ErrorKind::ZeroEigenvalue, "empty spectrum");

  UpperBucketing out;
  out.eps = eps;
  out.input = spectrum;

  std::vector<int> ascending(d);
  std::iota(ascending.begin(), ascending.end(), 0);
  std::sort(ascending.begin(), ascending.end(), [&](int a, int b) {
    return spectrum.values[a] < spectrum.values[b] ||
           (spectrum.values[a] == spectrum.values[b] && a < b);
  });

  const double budget = eps * eps / 20.0;
  double prefix = 0.0;
  out.d_star = 0;
  for (int k = 0; k < d; ++k) {
    prefix += spectrum.values[ascending[k]];
    if (prefix > budget) break;
    out.d_star = k + 1;
  }
  out.tail.assign(ascending.begin(), ascending.begin() + out.d_star);

  std::vector<bool> in_tail(d, false);
  for (int i : out.tail) in_tail[i] = true;
  out.bucket_of.assign(d, -1);
  for (int i = 0; i < d; ++i) {
    if (in_tail[i]) continue;
    const int j = dyadic_bucket(spectrum.values[i]);
    out.bucket_of[i] = j;
    out.buckets[j].push_back(i);
  }
  for (const auto& [j, members] : out.buckets) out.nonempty.push_back(j);
  out.m = static_cast<int>(out.nonempty.size());

  out.sigma_star = spectrum;
  out.sigma_star.order = SpectrumOrder::unspecified;
  for (int i : out.tail) out.sigma_star.values[i] = 0.0;
  return out;
}

BucketCountBound bucket_count_bound(const LowerBucketing& bucketing, double eps) {
  const int d = bucketing.input.dim();
  std::vector<bool> in_tail(d, false);
  for (int i : bucketing.tail) in_tail[i] = true;

  BucketCountBound out;
  for (const auto& [j, members] : bucketing.buckets) {
    bool disjoint = true;
    for (int i : members) {
      if (in_tail[i]) {
        disjoint = false;
        break;
      }
    }
    if (disjoint) ++out.count_disjoint_from_tail;
  }
  out.bound =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(d) * d / eps))) + 2;
  return out;
}

SortedSequencesResult sorted_sequences_property(const std::vector<double>& u,
                                                const std::vector<double>& v,
                                                const std::vector<long long>& dvals,
                                                double eps_prime) {
  const int m = static_cast<int>(u.size());
  const int n = static_cast<int>(v.size());
  if (dvals.size() != v.size()) {
    fail(ErrorKind::PreconditionViolated, "dvals length must match v");
  }
  for (int i = 0; i + 1 < m; ++i) {
    if (!(u[i + 1] >= 2.0 * u[i]) || !(u[i + 1] > u[i])) {
      fail(ErrorKind::PreconditionViolated,
           "u must be strictly increasing with u[i+1] >= 2 u[i]");
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (v[i + 1] < v[i]) fail(ErrorKind::PreconditionViolated, "v must be nondecreasing");
  }

  struct Entry {
    double w;
    long long weight;
    bool from_v;
    int src_index;  // 1-based within its sequence
  };
  std::vector<Entry> merged;
  merged.reserve(m + n);
  for (int i = 0; i < m; ++i) merged.push_back({u[i], 1, false, i + 1});
  for (int i = 0; i < n; ++i) merged.push_back({v[i], dvals[i], true, i + 1});
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Entry& a, const Entry& b) { return a.w < b.w; });

  SortedSequencesResult out;
  double acc = 0.0;
  for (int k = 0; k < m + n; ++k) {
    acc += merged[k].w * static_cast<double>(merged[k].weight);
    if (acc > 3.0 * eps_prime) break;
    out.s = k + 1;
    if (merged[k].from_v) {
      out.b = std::max(out.b, merged[k].src_index);
    } else {
      out.a = std::max(out.a, merged[k].src_index);
    }
  }
  if (out.b == n) {
    out.holds = true;
  } else {
    double vsum = 0.0;
    for (int i = 0; i < out.b + 1; ++i) vsum += v[i] * static_cast<double>(dvals[i]);
    out.holds = vsum > eps_prime;
  }
  return out;
}

ThresholdTable ThresholdTable::make(double eps, int m) {
  if (!(eps > 0.0) || m < 1) {
    fail(ErrorKind::ConfigInvalid,
         "eps = " + std::to_string(eps) + ", m = " + std::to_string(m));
  }
  ThresholdTable t;
  t.eps = eps;
  t.m = m;
  const double mm = static_cast<double>(m) * m;
  t.tail_reject = 0.125 * eps * eps;
  t.case2_far = 0.05 * eps / mm;
  t.case3_far = 0.2 * eps / mm;
  t.trace_est_err_case2 = 0.005 * eps / mm;
  t.trace_close_case2 = 0.01 * eps / mm;
  t.small_block_case2 = 0.02 * eps / mm;
  t.trace_est_err_case3 = 0.025 * eps / mm;
  t.trace_close_case3 = 0.05 * eps / mm;
  t.small_block_case3 = 0.1 * eps / mm;
  return t;
}

HermitianBlockView extract_block(const DensityMatrix& rho, const UpperBucketing& bucketing,
                                 const BlockSelector& selector) {
  if (rho.dim() != bucketing.input.dim()) {
    fail(ErrorKind::DimMismatch, "state and bucketing dimensions differ");
  }
  using Kind = BlockSelector::Kind;
  switch (selector.kind) {
    case Kind::diag:
      return HermitianBlockView::principal(rho, bucketing.bucket(selector.j));
    case Kind::offdiag: {
      if (selector.j == selector.j2) {
        fail(ErrorKind::UnknownBucket, "offdiag needs distinct buckets");
      }
      return HermitianBlockView::cross(rho, bucketing.bucket(selector.j),
                                       bucketing.bucket(selector.j2));
    }
    case Kind::junk_diag:
      return HermitianBlockView::principal(rho, bucketing.tail);
    case Kind::junk_off: {
      std::vector<int> rest;
      for (int i = 0; i < rho.dim(); ++i) {
        if (bucketing.bucket_of[i] >= 0) rest.push_back(i);
      }
      return HermitianBlockView::cross(rho, bucketing.tail, rest);
    }
    case Kind::principal_pair: {
      if (selector.j == selector.j2) {
        fail(ErrorKind::UnknownBucket, "principal_pair needs distinct buckets");
      }
      std::vector<int> idx = bucketing.bucket(selector.j);
      const auto& other = bucketing.bucket(selector.j2);
      idx.insert(idx.end(), other.begin(), other.end());
      std::sort(idx.begin(), idx.end());
      return HermitianBlockView::principal(rho, idx);
    }
  }
  fail(ErrorKind::UnknownBucket, "unhandled selector");
}

}  // namespace certlab
