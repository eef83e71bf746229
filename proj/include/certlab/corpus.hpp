// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "certlab/certifier.hpp"
#include "certlab/instances.hpp"

namespace certlab {

struct CorpusState {
  std::string name;
  int dim = 0;
  std::vector<double> spectrum;
};

/// The frozen 20-state corpus: pure, flat, rank-limited flat, geometric,
/// two-scale, dominant-eigenvalue and near-mixed-wobble spectra over
/// d in {4, 8, 16}.
const std::vector<CorpusState>& corpus_states();

struct FarInstance {
  std::string family;
  DensityMatrix rho;
  double farness = 0.0;  // exact |rho - sigma|_1
};

inline constexpr int kCorpusFarSlots = 3;

/// Deterministic far instance for one of the three per-state family slots.
/// Every instance satisfies |rho - sigma|_1 >= eps; the slot chooses the
/// first constructible family in its priority chain for this spectrum.
FarInstance corpus_far_instance(const CorpusState& state, int slot, double eps, RngSeed seed);

struct CorpusCell {
  std::string state;
  std::string family;  // "equal" or the far family name
  int correct = 0;
  int runs = 0;
  double accuracy() const { return runs == 0 ? 0.0 : static_cast<double>(correct) / runs; }
};

struct LedgerPoint {
  std::string state;
  double sigma_star_half = 0.0;
  int m = 0;
  double mean_total = 0.0;       // over equal runs
  double normalized = 0.0;       // mean_total with the log-factor profile divided out
};

struct CorpusRun {
  double eps = 0.0;
  double delta = 0.0;
  int seeds = 0;
  std::vector<CorpusCell> cells;
  std::vector<LedgerPoint> ledger_points;
  bool trichotomy_ok = true;
  int trichotomy_checked = 0;
  double min_cell_accuracy() const;
  /// OLS slope of log(normalized ledger) against log |sigma*|_{1/2}.
  double ledger_slope() const;
};

CorpusRun corpus_run(double eps, double delta, int n_seeds, RngSeed seed,
                     const UnitConstants& units, const HSOracleSpec& oracle = {});

}  // namespace certlab
