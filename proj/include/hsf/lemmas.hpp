#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hsf/weights.hpp"

namespace hsf {

// Sampling ranges are in units of the sampled infrared scale lambda:
// tau * lambda^2 in [tau_min, tau_max], y * lambda in [0, y_max].
struct SweepConfig {
  std::size_t samples = 1000;
  std::uint64_t seed = 7;
  int s = 1;                      // reduction: number of remaining externals
  int l = 1;                      // loop order where the lemma leaves it free
  double lambda_min = 1.0;        // lambda is log-uniform in [lambda_min, lambda_max]
  double lambda_max = 10.0;
  double cutoff_ratio_max = 4.0;  // lambda0 / lambda uniform in [1, cutoff_ratio_max]
  double tau_min = 0.1;
  double tau_max = 10.0;
  double y_max = 4.0;
  std::size_t batches = 10;       // constant stability is measured across batches
  SupOptions sup{8, false, 2.0, 6.0, 4, 8, true};
};

struct SweepRow {
  std::string check;            // sub-check name
  std::vector<double> params;   // in the order of SweepReport::columns
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double limit = 0.0;           // asserted upper bound on ratio; 0 when only finiteness is asserted
  bool ok = true;
};

struct CheckSummary {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double ratio_min = 0.0;       // over samples with lhs > 0
  double ratio_max = 0.0;
  double constant = 0.0;        // empirical constant: max ratio
  double batch_spread = 0.0;    // max / min of per-batch constants
};

struct SweepReport {
  std::string lemma;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
  std::map<std::string, CheckSummary> checks;
  std::map<std::string, double> constants;  // extra named constants
  std::vector<std::string> notes;
  WeightDiagnostics diagnostics;
  double seconds = 0.0;

  std::size_t violations() const;
  double worst_spread() const;
  bool passed() const;  // no violations, every ratio finite, batch spread < 1e3
};

// Per-sample generator: the stream depends only on (seed, index).
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

SweepReport check_reduction_lemma(const SweepConfig& cfg);

enum class FusionKind { ForestForest, TreeForest };
SweepReport check_fusion_lemmas(FusionKind kind, const SweepConfig& cfg);

// chain_collapse sandwich on three-arm trees and the two-chain forest variant.
SweepReport check_chain_sandwich(const SweepConfig& cfg);

// Boundary values of heat-kernel test functions, the t-scaling bound and the
// two-variable scaling bound.
SweepReport check_testfunction_lemmas(const SweepConfig& cfg);

// Throws PreconditionError unless lambda >= 3 sqrt(l) / sqrt(tau).
void check_two_variable_precondition(double lambda, double tau, int l);

// Dispatch by CLI name: reduction, ff-fusion, tf-fusion, chain, testfn.
SweepReport run_lemma(const std::string& name, const SweepConfig& cfg);

}  // namespace hsf
