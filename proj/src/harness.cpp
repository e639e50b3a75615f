#include "dte/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "dte/numerics.hpp"
#include "dte/rng.hpp"

namespace dte::harness {

namespace {

constexpr std::uint64_t kDataTag = 0xda7aULL;
constexpr std::uint64_t kSplitTag = 0x5914ULL;
constexpr std::uint64_t kPermTag = 0x9e24ULL;

// Dataset for replicate `rep` at sample size n. Shared across methods so
// power comparisons are paired.
Dataset replicate_dataset(const ExperimentPlan& plan, int n, int rep) {
  const std::uint64_t dseed =
      derive_seed(plan.master_seed, kDataTag ^ static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(rep));
  if (plan.source) return scenarios::bootstrap_subset(*plan.source, n, dseed);
  scenarios::ScenarioConfig cfg = plan.scenario;
  cfg.n = n;
  cfg.seed = dseed;
  return scenarios::generate(cfg);
}

tests::TestConfig replicate_config(const ExperimentPlan& plan, int n, int rep) {
  const std::uint64_t dseed =
      derive_seed(plan.master_seed, kDataTag ^ static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(rep));
  tests::TestConfig cfg = plan.test_config;
  cfg.alpha = plan.alpha;
  cfg.split_seed = mix64(dseed ^ kSplitTag);
  cfg.permutation_seed = mix64(dseed ^ kPermTag);
  return cfg;
}

tests::TestResult run_method(tests::Method method, const Dataset& data,
                             const tests::TestConfig& cfg, int permutations) {
  switch (method) {
    case tests::Method::AipwXkte: return tests::aipw_xkte(data, cfg);
    case tests::Method::IpwXkte: return tests::ipw_xkte(data, cfg);
    case tests::Method::Kte: return tests::kte_permutation(data, cfg, permutations);
    case tests::Method::BaselineAipw:
      return tests::baseline_aipw_test(data, cfg, permutations);
  }
  throw InputError("unknown method");
}

enum class Outcome : std::uint8_t { Accept = 0, Reject = 1, Fail = 2 };

// Runs `body(rep)` for rep in [0, reps) across the requested threads.
// Results are written into per-replicate slots, so aggregation is
// execution-order independent.
template <typename Body>
void parallel_reps(int reps, int threads, const Body& body) {
  int t = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  t = std::min(t, reps);
  if (t <= 1) {
    for (int rep = 0; rep < reps; ++rep) body(rep);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      for (int rep = w; rep < reps; rep += t) body(rep);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

void ExperimentPlan::validate() const {
  if (reps < 1) throw InputError("plan: reps must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InputError("plan: alpha must lie in (0, 1)");
  if (n_grid.empty()) throw InputError("plan: n grid is empty");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw InputError("plan: n grid must be ascending");
  if (methods.empty()) throw InputError("plan: no methods given");
  if (permutations < 1) throw InputError("plan: permutations must be >= 1");
  if (source) {
    for (int n : n_grid)
      if (n > source->n())
        throw InputError("plan: bootstrap size exceeds the source dataset");
  }
}

RateTable run_plan(const ExperimentPlan& plan) {
  plan.validate();
  RateTable table;
  const std::string scen_name =
      plan.source ? std::string("bootstrap") : plan.scenario.name();
  for (const auto method : plan.methods) {
    for (const int n : plan.n_grid) {
      std::vector<Outcome> outcomes(static_cast<std::size_t>(plan.reps));
      parallel_reps(plan.reps, plan.threads, [&](int rep) {
        try {
          const Dataset data = replicate_dataset(plan, n, rep);
          const auto cfg = replicate_config(plan, n, rep);
          const auto res = run_method(method, data, cfg, plan.permutations);
          outcomes[static_cast<std::size_t>(rep)] =
              res.reject ? Outcome::Reject : Outcome::Accept;
        } catch (const Error&) {
          outcomes[static_cast<std::size_t>(rep)] = Outcome::Fail;
        }
      });
      int rejects = 0, fails = 0;
      for (const auto o : outcomes) {
        if (o == Outcome::Reject) ++rejects;
        if (o == Outcome::Fail) ++fails;
      }
      RateRow row;
      row.method = tests::to_string(method);
      row.scenario = scen_name;
      row.n = n;
      row.failures = fails;
      row.reps = plan.reps - fails;
      row.rate = row.reps > 0 ? static_cast<double>(rejects) / row.reps : 0.0;
      row.std_error =
          row.reps > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / row.reps)
                       : 0.0;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::vector<double> null_statistic_sample(const ExperimentPlan& plan) {
  plan.validate();
  const auto method = plan.methods.front();
  if (method != tests::Method::AipwXkte && method != tests::Method::IpwXkte)
    throw InputError("null_statistic_sample: first method must be a cross test");
  const int n = plan.n_grid.front();

  std::vector<double> stats(static_cast<std::size_t>(plan.reps),
                            std::numeric_limits<double>::quiet_NaN());
  parallel_reps(plan.reps, plan.threads, [&](int rep) {
    try {
      const Dataset data = replicate_dataset(plan, n, rep);
      const auto cfg = replicate_config(plan, n, rep);
      const auto res = run_method(method, data, cfg, plan.permutations);
      stats[static_cast<std::size_t>(rep)] = res.statistic;
    } catch (const Error&) {
      // skipped; NaN markers are removed below
    }
  });
  std::vector<double> out;
  out.reserve(stats.size());
  for (const double s : stats)
    if (!std::isnan(s)) out.push_back(s);
  return out;
}

std::vector<TimingRow> bench_timing(const ExperimentPlan& plan) {
  plan.validate();
  if (plan.reps < 3)
    throw InputError("bench: need at least 3 timed repetitions");
  std::vector<TimingRow> rows;
  for (const auto method : plan.methods) {
    for (const int n : plan.n_grid) {
      double total_ms = 0.0;
      // Warm-up replicate 0 is run but not timed.
      for (int rep = 0; rep <= plan.reps; ++rep) {
        const Dataset data = replicate_dataset(plan, n, rep);
        const auto cfg = replicate_config(plan, n, rep);
        const auto start = std::chrono::steady_clock::now();
        (void)run_method(method, data, cfg, plan.permutations);
        const auto stop = std::chrono::steady_clock::now();
        if (rep > 0)
          total_ms +=
              std::chrono::duration<double, std::milli>(stop - start).count();
      }
      rows.push_back({tests::to_string(method), n, total_ms / plan.reps});
    }
  }
  return rows;
}

double ks_statistic_normal(std::vector<double> sample) {
  if (sample.empty()) throw InputError("ks: empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = numerics::std_normal_cdf(sample[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - cdf;
    const double lo = cdf - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double ks_critical_value(int n, double alpha) {
  if (n < 1 || !(alpha > 0.0 && alpha < 1.0))
    throw InputError("ks: invalid critical value request");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n);
}

}  // namespace dte::harness
