// SPDX-License-Identifier: Apache-2.0
#include "certlab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace certlab {

namespace {

std::vector<double> flat_spectrum(int d, int rank) {
  std::vector<double> v(d, 0.0);
  for (int i = 0; i < rank; ++i) v[i] = 1.0 / rank;
  return v;
}

std::vector<double> geometric_spectrum(int d) {
  // 1/2, 1/4, ..., with the last value doubled up so the mass is exactly 1.
  std::vector<double> v(d);
  for (int i = 0; i < d - 1; ++i) v[i] = std::ldexp(1.0, -(i + 1));
  v[d - 1] = v[d - 2];
  return v;
}

std::vector<double> two_scale_spectrum(int d) {
  std::vector<double> v(d, (1.0 - 1.0 / (d * d)) / (d - 1));
  v[d - 1] = 1.0 / (d * d);
  return v;
}

std::vector<double> dominant_spectrum(int d) {
  std::vector<double> v(d, 0.4 / (d - 1));
  v[0] = 0.6;
  return v;
}

std::vector<double> wobble_spectrum(int d) {
  // Eigenvalues alternating between 0.6/d and 1.4/d.
  std::vector<double> v(d);
  for (int i = 0; i < d; ++i) v[i] = (i % 2 == 0 ? 0.6 : 1.4) / d;
  if (d % 2 == 1) v[d - 1] = 1.0 / d;
  return v;
}

DensityMatrix state_density(const CorpusState& s) { return diagonal_density(s.spectrum); }

/// Moves eps mass off the top `heavy` support entries, depositing it on the
/// complement (proportionally to mass there, uniformly if it is empty).
/// The result is diagonal with |rho - sigma|_1 = 2 eps exactly.
DensityMatrix shift_instance(const CorpusState& state, double eps, int heavy_count) {
  const int d = state.dim;
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return state.spectrum[a] > state.spectrum[b] ||
           (state.spectrum[a] == state.spectrum[b] && a < b);
  });
  int support = 0;
  for (double v : state.spectrum) {
    if (v > 0.0) ++support;
  }
  heavy_count = std::min(heavy_count, support);
  if (heavy_count == support && support == d) --heavy_count;
  if (heavy_count < 1) fail(ErrorKind::PreconditionViolated, "no heavy entries");

  double heavy_mass = 0.0;
  for (int k = 0; k < heavy_count; ++k) heavy_mass += state.spectrum[order[k]];
  if (heavy_mass <= eps) fail(ErrorKind::PreconditionViolated, "heavy mass too small");

  std::vector<double> rho = state.spectrum;
  const double x = eps / heavy_mass;
  for (int k = 0; k < heavy_count; ++k) rho[order[k]] *= 1.0 - x;
  double rest_mass = 0.0;
  for (int k = heavy_count; k < d; ++k) rest_mass += state.spectrum[order[k]];
  if (rest_mass > 0.0) {
    const double y = eps / rest_mass;
    for (int k = heavy_count; k < d; ++k) rho[order[k]] *= 1.0 + y;
  } else {
    const double share = eps / (d - heavy_count);
    for (int k = heavy_count; k < d; ++k) rho[order[k]] += share;
  }
  return diagonal_density(rho);
}

struct HaarBlockPlan {
  bool feasible = false;
  LowerBucketing bucketing;
  std::map<int, double> eps_j;
  std::vector<int> support;  // positions of positive entries
};

HaarBlockPlan plan_haar_block(const CorpusState& state, double eps) {
  HaarBlockPlan plan;
  std::vector<double> positive;
  for (int i = 0; i < state.dim; ++i) {
    if (state.spectrum[i] > 0.0) {
      positive.push_back(state.spectrum[i]);
      plan.support.push_back(i);
    }
  }
  const double eps_bucketing = std::min(eps, 0.08);
  if (positive.size() < 2) return plan;
  LowerBucketing bucketing =
      lower_bucketing(Spectrum{positive, SpectrumOrder::unspecified}, eps_bucketing);
  double max_far = 0.0;
  for (const auto& [j, members] : bucketing.buckets) {
    if (members.size() > 1) {
      max_far += 2.0 * (members.size() / 2) * std::ldexp(1.0, -j - 1);
    }
  }
  const double target = std::min(2.0 * eps, 0.95 * max_far);
  if (target < 1.2 * eps) return plan;
  const double ratio = target / max_far;
  for (const auto& [j, members] : bucketing.buckets) {
    if (members.size() > 1) plan.eps_j[j] = ratio * std::ldexp(1.0, -j - 1);
  }
  plan.feasible = true;
  plan.bucketing = std::move(bucketing);
  return plan;
}

DensityMatrix haar_block_instance(const CorpusState& state, const HaarBlockPlan& plan,
                                  RngStream& rng) {
  std::map<int, HaarSample> unitaries;
  for (const auto& [j, mag] : plan.eps_j) {
    unitaries.emplace(j, sample_haar(plan.bucketing.bucket_size(j), rng));
  }
  const DensityMatrix small = bucketed_block(plan.bucketing, plan.eps_j, unitaries);
  const int d = state.dim;
  Mat rho = Mat::Zero(d, d);
  const int r = static_cast<int>(plan.support.size());
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      rho(plan.support[a], plan.support[b]) = small.matrix()(a, b);
    }
  }
  return validate_density(rho, 1e-7);
}

struct CrossRotPlan {
  bool feasible = false;
  int a = -1, b = -1;
  double sine = 0.0;
};

CrossRotPlan plan_cross_rotation(const CorpusState& state, double eps) {
  CrossRotPlan plan;
  const UpperBucketing bucketing =
      upper_bucketing(Spectrum{state.spectrum, SpectrumOrder::unspecified}, eps);
  if (bucketing.m < 2) return plan;
  // Rotate between the largest eigenvalue and the farthest eigenvalue in a
  // different bucket.
  int a = -1;
  for (int i = 0; i < state.dim; ++i) {
    if (bucketing.bucket_of[i] < 0) continue;
    if (a < 0 || state.spectrum[i] > state.spectrum[a]) a = i;
  }
  int b = -1;
  double best_gap = 0.0;
  for (int i = 0; i < state.dim; ++i) {
    if (bucketing.bucket_of[i] < 0 || bucketing.bucket_of[i] == bucketing.bucket_of[a]) continue;
    const double gap = std::abs(state.spectrum[a] - state.spectrum[i]);
    if (gap > best_gap) {
      best_gap = gap;
      b = i;
    }
  }
  if (b < 0) return plan;
  const double sine = 1.3 * eps / (2.0 * best_gap);
  if (sine > 0.95) return plan;
  plan.feasible = true;
  plan.a = a;
  plan.b = b;
  plan.sine = sine;
  return plan;
}

DensityMatrix cross_rotation_instance(const CorpusState& state, const CrossRotPlan& plan) {
  const int d = state.dim;
  Mat rho = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) rho(i, i) = state.spectrum[i];
  const double la = state.spectrum[plan.a], lb = state.spectrum[plan.b];
  const double s = plan.sine, c = std::sqrt(1.0 - s * s);
  rho(plan.a, plan.a) = la * c * c + lb * s * s;
  rho(plan.b, plan.b) = la * s * s + lb * c * c;
  rho(plan.a, plan.b) = (la - lb) * s * c;
  rho(plan.b, plan.a) = (la - lb) * s * c;
  return validate_density(rho, 1e-7);
}

bool rotation_applicable(const CorpusState& state) {
  std::vector<double> desc = state.spectrum;
  std::sort(desc.begin(), desc.end(), std::greater<double>());
  return desc.size() >= 2 && desc[0] >= 0.5 && desc[1] <= 0.25;
}

bool two_by_two_applicable(const CorpusState& state) {
  std::vector<double> desc = state.spectrum;
  std::sort(desc.begin(), desc.end(), std::greater<double>());
  return desc.size() >= 2 && desc[1] > 0.25;
}

}  // namespace

const std::vector<CorpusState>& corpus_states() {
  static const std::vector<CorpusState> states = [] {
    std::vector<CorpusState> v;
    for (int d : {4, 8, 16}) {
      const std::string suffix = std::to_string(d);
      v.push_back({"pure" + suffix, d, flat_spectrum(d, 1)});
      v.push_back({"flat" + suffix, d, flat_spectrum(d, d)});
      v.push_back({"rank" + std::to_string(d / 2) + "flat" + suffix, d, flat_spectrum(d, d / 2)});
      v.push_back({"geom" + suffix, d, geometric_spectrum(d)});
      if (d > 4) v.push_back({"twoscale" + suffix, d, two_scale_spectrum(d)});
      v.push_back({"dom" + suffix, d, dominant_spectrum(d)});
      if (d > 4) v.push_back({"wobble" + suffix, d, wobble_spectrum(d)});
    }
    v.push_back({"rank3flat16", 16, flat_spectrum(16, 3)});
    return v;
  }();
  return states;
}

FarInstance corpus_far_instance(const CorpusState& state, int slot, double eps, RngSeed seed) {
  if (slot < 0 || slot >= kCorpusFarSlots) {
    fail(ErrorKind::PreconditionViolated, "slot out of range");
  }
  const DensityMatrix sigma = state_density(state);
  RngStream rng(seed);

  FarInstance out;
  auto finish = [&](std::string family, DensityMatrix rho) {
    out.family = std::move(family);
    out.farness = 2.0 * trace_distance(rho, sigma);
    if (out.farness + 1e-9 < eps) {
      fail(ErrorKind::InvariantViolation,
           "corpus instance " + out.family + " on " + state.name + " has farness " +
               std::to_string(out.farness));
    }
    out.rho = std::move(rho);
    return out;
  };

  const HaarBlockPlan haar_plan = plan_haar_block(state, eps);
  const CrossRotPlan cross_plan = plan_cross_rotation(state, eps);

  switch (slot) {
    case 0: {
      int support = 0;
      for (double v : state.spectrum) {
        if (v > 0.0) ++support;
      }
      return finish("mass_shift", shift_instance(state, eps, std::max(1, (support + 1) / 2)));
    }
    case 1: {
      if (haar_plan.feasible) {
        return finish("haar_block", haar_block_instance(state, haar_plan, rng));
      }
      if (rotation_applicable(state)) {
        return finish("rotation", rotation_instance(sigma, std::min(eps, 0.34)));
      }
      if (two_by_two_applicable(state)) {
        const int u = rng.bernoulli(0.5) ? 1 : -1;
        return finish("two_by_two", two_by_two_sign(sigma, std::min(eps, 0.34), u));
      }
      return finish("mass_shift_top", shift_instance(state, eps, 1));
    }
    default: {
      if (cross_plan.feasible) {
        return finish("cross_rotation", cross_rotation_instance(state, cross_plan));
      }
      if (two_by_two_applicable(state)) {
        const int u = rng.bernoulli(0.5) ? 1 : -1;
        return finish("two_by_two", two_by_two_sign(sigma, std::min(eps, 0.34), u));
      }
      if (haar_plan.feasible) {
        return finish("haar_block2", haar_block_instance(state, haar_plan, rng));
      }
      if (rotation_applicable(state)) {
        return finish("rotation", rotation_instance(sigma, std::min(eps, 0.34)));
      }
      return finish("mass_shift_top", shift_instance(state, eps, 1));
    }
  }
}

double CorpusRun::min_cell_accuracy() const {
  double worst = 1.0;
  for (const auto& cell : cells) worst = std::min(worst, cell.accuracy());
  return worst;
}

double CorpusRun::ledger_slope() const {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(ledger_points.size());
  for (const auto& p : ledger_points) {
    const double x = std::log(p.sigma_star_half);
    const double y = std::log(p.normalized);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CorpusRun corpus_run(double eps, double delta, int n_seeds, RngSeed seed,
                     const UnitConstants& units, const HSOracleSpec& oracle) {
  CorpusRun run;
  run.eps = eps;
  run.delta = delta;
  run.seeds = n_seeds;

  const auto& states = corpus_states();
  for (std::size_t si = 0; si < states.size(); ++si) {
    const CorpusState& state = states[si];
    const DensityMatrix sigma = state_density(state);

    CorpusCell equal_cell{state.name, "equal", 0, 0};
    LedgerPoint point{state.name, 0.0, 0, 0.0, 0.0};
    double total_sum = 0.0;
    for (int k = 0; k < n_seeds; ++k) {
      CertifierConfig config;
      config.eps = eps;
      config.delta = delta;
      config.units = units;
      config.oracle = oracle;
      config.seed =
          RngSeed{seed.seed + 1000003ULL * si, static_cast<std::uint32_t>(k) * 200000u};
      const CertifyResult res = certify(sigma, sigma, config);
      equal_cell.runs++;
      if (res.verdict == Verdict::equal) equal_cell.correct++;
      total_sum += res.ledger.total;
      point.sigma_star_half = res.sigma_star_half;
      point.m = res.m;
    }
    point.mean_total = total_sum / n_seeds;
    // Divide out the polylog profile: the m-power from the per-block
    // accuracy, the majority repetitions and the per-call log.
    const double mm = static_cast<double>(point.m);
    const double log_profile = std::pow(mm, 4.0) *
                               std::ceil(18.0 * std::log(3.0 * mm * mm / delta)) *
                               std::log(10.0);
    point.normalized = point.mean_total / log_profile;
    run.cells.push_back(equal_cell);
    run.ledger_points.push_back(point);

    for (int slot = 0; slot < kCorpusFarSlots; ++slot) {
      CorpusCell cell{state.name, "", 0, 0};
      for (int k = 0; k < n_seeds; ++k) {
        const FarInstance inst = corpus_far_instance(
            state, slot, eps, RngSeed{seed.seed + 777ULL + si, static_cast<std::uint32_t>(k)});
        cell.family = inst.family;
        const TrichotomyWitness w = trichotomy_witness(inst.rho, sigma, eps);
        run.trichotomy_checked++;
        if (!w.any()) run.trichotomy_ok = false;

        CertifierConfig config;
        config.eps = eps;
        config.delta = delta;
        config.units = units;
        config.oracle = oracle;
        config.seed = RngSeed{seed.seed + 500009ULL * si + 31ULL * slot,
                              static_cast<std::uint32_t>(k) * 200000u};
        const CertifyResult res = certify(inst.rho, sigma, config);
        cell.runs++;
        if (res.verdict == Verdict::far) cell.correct++;
      }
      run.cells.push_back(cell);
    }
  }
  return run;
}

}  // namespace certlab
