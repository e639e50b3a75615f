#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dte/dataset.hpp"
#include "dte/dtetests.hpp"
#include "dte/scenarios.hpp"

namespace dte::harness {

// Monte Carlo experiment description. In generate mode each replicate draws
// a fresh synthetic dataset; in bootstrap mode each replicate resamples
// `n` rows from `source`. Per-replicate seeds derive from
// (master_seed, n, replicate), never from execution order.
struct ExperimentPlan {
  scenarios::ScenarioConfig scenario;
  std::vector<tests::Method> methods;
  std::vector<int> n_grid;
  int reps = 500;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;
  int permutations = 100;  // B for the permutation methods
  int threads = 0;         // 0: hardware concurrency
  std::optional<Dataset> source;  // set: bootstrap-from-file mode
  tests::TestConfig test_config;

  void validate() const;
};

struct RateRow {
  std::string method;
  std::string scenario;
  int n = 0;
  double rate = 0.0;
  double std_error = 0.0;
  int reps = 0;      // completed replicates (failures excluded)
  int failures = 0;
};

struct RateTable {
  std::vector<RateRow> rows;
};

// Rejection rates at plan.alpha per (method, n). Replicate errors are
// tallied as failures and excluded from the rate denominator.
RateTable run_plan(const ExperimentPlan& plan);

// The studentized statistics of the first method (must be a cross test) on
// plan.n_grid.front(), for null-diagnostic export. Failed replicates are
// skipped.
std::vector<double> null_statistic_sample(const ExperimentPlan& plan);

struct TimingRow {
  std::string method;
  int n = 0;
  double mean_ms = 0.0;
};

// Mean wall-clock per test invocation, single-threaded, one warm-up run
// excluded. Data generation is outside the timer; nuisance fitting is
// inside.
std::vector<TimingRow> bench_timing(const ExperimentPlan& plan);

// One-sample Kolmogorov-Smirnov distance against N(0, 1).
double ks_statistic_normal(std::vector<double> sample);

// Asymptotic critical value sqrt(-ln(alpha/2) / 2) / sqrt(n).
double ks_critical_value(int n, double alpha);

}  // namespace dte::harness
