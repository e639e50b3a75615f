// Command-line front-end: generate | test | simulate | bench.
// Exit codes: 0 success, 1 I/O or internal failure, 2 invalid usage or
// malformed input, 3 degenerate statistic.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dte/dtetests.hpp"
#include "dte/harness.hpp"
#include "dte/io.hpp"
#include "dte/scenarios.hpp"

namespace {

using dte::scenarios::Design;
using dte::scenarios::Link;
using dte::scenarios::ParamSet;
using dte::scenarios::Scenario;

struct ScenarioFlags {
  std::string scenario = "I";
  std::string link = "linear";
  std::string design = "observational";
  std::string params = "synthetic";
  int d = 5;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario: I, II, III or IV")
      ->check(CLI::IsMember({"I", "II", "III", "IV"}));
  cmd->add_option("--link", f.link, "Outcome link: linear or cosine")
      ->check(CLI::IsMember({"linear", "cosine"}));
  cmd->add_option("--design", f.design,
                  "Treatment design: experimental or observational")
      ->check(CLI::IsMember({"experimental", "observational"}));
  cmd->add_option("--params", f.params,
                  "Parameter preset: synthetic or ihdp")
      ->check(CLI::IsMember({"synthetic", "ihdp"}));
  cmd->add_option("--d", f.d, "Covariate dimension")->check(CLI::PositiveNumber);
}

dte::scenarios::ScenarioConfig to_config(const ScenarioFlags& f) {
  dte::scenarios::ScenarioConfig cfg;
  cfg.scenario = f.scenario == "I"     ? Scenario::I
                 : f.scenario == "II"  ? Scenario::II
                 : f.scenario == "III" ? Scenario::III
                                       : Scenario::IV;
  cfg.link = f.link == "linear" ? Link::Linear : Link::Cosine;
  cfg.design =
      f.design == "experimental" ? Design::Experimental : Design::Observational;
  cfg.params = f.params == "ihdp" ? ParamSet::Ihdp : ParamSet::Synthetic;
  cfg.d_x = f.d;
  return cfg;
}

struct TestFlags {
  std::string kernel = "rbf";
  std::optional<double> bandwidth_y;
  std::optional<double> bandwidth_x;
  std::optional<double> lambda;
  double clip_eps = 0.01;
  double l2 = 1e-6;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::uint64_t perm_seed = 0;
  std::string propensity = "logistic";
  double pi = 0.5;
  bool kte_unbiased = false;
};

void add_test_flags(CLI::App* cmd, TestFlags& f) {
  cmd->add_option("--kernel", f.kernel, "Outcome kernel: rbf or linear")
      ->check(CLI::IsMember({"rbf", "linear"}));
  cmd->add_option("--bandwidth-y", f.bandwidth_y,
                  "Outcome kernel bandwidth sigma^2 (default: median heuristic)");
  cmd->add_option("--bandwidth-x", f.bandwidth_x,
                  "Covariate kernel bandwidth sigma^2 (default: median heuristic)");
  cmd->add_option("--lambda", f.lambda,
                  "Embedding ridge parameter (default: nu_x)");
  cmd->add_option("--clip-eps", f.clip_eps, "Propensity clipping epsilon");
  cmd->add_option("--l2", f.l2, "Propensity L2 regularization");
  cmd->add_option("--alpha", f.alpha, "Test level");
  cmd->add_option("--seed", f.seed, "Fold-split seed (default: index split)");
  cmd->add_option("--perm-seed", f.perm_seed, "Permutation RNG seed");
  cmd->add_option("--propensity", f.propensity,
                  "Propensity mode: logistic or known")
      ->check(CLI::IsMember({"logistic", "known"}));
  cmd->add_option("--pi", f.pi, "Known propensity constant");
  cmd->add_flag("--kte-unbiased", f.kte_unbiased,
                "Use the unbiased KTE statistic form");
}

dte::tests::TestConfig to_test_config(const TestFlags& f) {
  dte::tests::TestConfig cfg;
  cfg.kernel_family = f.kernel == "linear"
                          ? dte::numerics::KernelFamily::Linear
                          : dte::numerics::KernelFamily::Rbf;
  cfg.bandwidth_y_sq = f.bandwidth_y;
  cfg.bandwidth_x_sq = f.bandwidth_x;
  cfg.lambda = f.lambda;
  cfg.clip_eps = f.clip_eps;
  cfg.propensity_l2 = f.l2;
  cfg.alpha = f.alpha;
  cfg.split_seed = f.seed;
  cfg.permutation_seed = f.perm_seed;
  cfg.propensity_mode = f.propensity == "known"
                            ? dte::tests::PropensityMode::KnownConstant
                            : dte::tests::PropensityMode::Logistic;
  cfg.known_propensity = f.pi;
  cfg.kte_unbiased = f.kte_unbiased;
  return cfg;
}

std::vector<dte::tests::Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<dte::tests::Method> out;
  for (const auto& name : names) {
    const auto m = dte::tests::method_from_string(name);
    if (!m) throw dte::InputError("unknown method: " + name);
    out.push_back(*m);
  }
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  dte::io::write_text_file(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional treatment effect tests"};
  app.set_config("--config");
  app.require_subcommand(1);
  bool deterministic = false;
  app.add_flag("--deterministic", deterministic,
               "Suppress timestamps so outputs are byte-reproducible");

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset CSV");
  ScenarioFlags gen_scen;
  add_scenario_flags(gen, gen_scen);
  int gen_n = 100;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Sample size")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output CSV path (default: stdout)");

  // ---- test ----
  auto* tst = app.add_subcommand("test", "Run one test on a dataset CSV");
  std::string tst_input, tst_method = "aipw-xkte", tst_out;
  int tst_perms = 100;
  TestFlags tst_flags;
  tst->add_option("--input", tst_input, "Dataset CSV path")->required();
  tst->add_option("--method", tst_method, "Test method")
      ->check(CLI::IsMember({"aipw-xkte", "ipw-xkte", "kte", "baseline-aipw"}));
  tst->add_option("--permutations", tst_perms, "Permutation count")
      ->check(CLI::PositiveNumber);
  add_test_flags(tst, tst_flags);
  tst->add_option("--out", tst_out, "Output JSON path (default: stdout)");

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection rates");
  ScenarioFlags sim_scen;
  add_scenario_flags(sim, sim_scen);
  std::vector<int> sim_n, sim_bootstrap;
  std::vector<std::string> sim_methods{"aipw-xkte"};
  int sim_reps = 500, sim_perms = 100, sim_threads = 0;
  double sim_alpha = 0.05;
  std::uint64_t sim_master = 0;
  std::string sim_out, sim_input, sim_null_out;
  TestFlags sim_flags;
  sim->add_option("--n", sim_n, "Sample sizes (comma separated)")
      ->delimiter(',');
  sim->add_option("--methods", sim_methods, "Methods (comma separated)")
      ->delimiter(',');
  sim->add_option("--reps", sim_reps, "Replicates per cell");
  sim->add_option("--permutations", sim_perms, "Permutations for kte/baseline");
  sim->add_option("--threads", sim_threads, "Worker threads (0: hardware)");
  sim->add_option("--alpha", sim_alpha, "Test level");
  sim->add_option("--master-seed", sim_master, "Master seed");
  sim->add_option("--input", sim_input, "Bootstrap source CSV");
  sim->add_option("--bootstrap", sim_bootstrap,
                  "Bootstrap subset sizes (file mode)")
      ->delimiter(',');
  sim->add_option("--null-stats", sim_null_out,
                  "Also write the per-replicate statistics CSV here");
  add_test_flags(sim, sim_flags);
  sim->add_option("--out", sim_out, "Output CSV path (default: stdout)");

  // ---- bench ----
  auto* ben = app.add_subcommand("bench", "Per-test wall-clock timing");
  ScenarioFlags ben_scen;
  ben_scen.design = "experimental";
  ben_scen.scenario = "II";
  add_scenario_flags(ben, ben_scen);
  std::vector<int> ben_n;
  std::vector<std::string> ben_methods{"aipw-xkte", "ipw-xkte", "kte"};
  int ben_reps = 5, ben_perms = 100;
  std::uint64_t ben_master = 0;
  std::string ben_out;
  TestFlags ben_flags;
  ben_flags.propensity = "known";
  ben->add_option("--n", ben_n, "Sample sizes (comma separated)")
      ->required()->delimiter(',');
  ben->add_option("--methods", ben_methods, "Methods (comma separated)")
      ->delimiter(',');
  ben->add_option("--reps", ben_reps, "Timed repetitions (>= 3)");
  ben->add_option("--permutations", ben_perms, "Permutations for kte/baseline");
  ben->add_option("--master-seed", ben_master, "Master seed");
  add_test_flags(ben, ben_flags);
  ben->add_option("--out", ben_out, "Output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      auto cfg = to_config(gen_scen);
      cfg.n = gen_n;
      cfg.seed = gen_seed;
      const auto data = dte::scenarios::generate(cfg);
      emit(dte::io::dataset_to_csv(data), gen_out);
      return 0;
    }

    if (tst->parsed()) {
      const auto data = dte::io::read_dataset_csv(tst_input);
      const auto cfg = to_test_config(tst_flags);
      const auto method = *dte::tests::method_from_string(tst_method);
      dte::tests::TestResult res;
      std::optional<int> perms;
      switch (method) {
        case dte::tests::Method::AipwXkte:
          res = dte::tests::aipw_xkte(data, cfg);
          break;
        case dte::tests::Method::IpwXkte:
          res = dte::tests::ipw_xkte(data, cfg);
          break;
        case dte::tests::Method::Kte:
          res = dte::tests::kte_permutation(data, cfg, tst_perms);
          perms = tst_perms;
          break;
        case dte::tests::Method::BaselineAipw:
          res = dte::tests::baseline_aipw_test(data, cfg, tst_perms);
          perms = tst_perms;
          break;
      }
      const auto j = dte::io::result_to_json(res, cfg, data.n(), data.d(),
                                             perms, !deterministic);
      emit(j.dump(2) + "\n", tst_out);
      return 0;
    }

    if (sim->parsed()) {
      dte::harness::ExperimentPlan plan;
      plan.scenario = to_config(sim_scen);
      plan.methods = parse_methods(sim_methods);
      if (!sim_input.empty() && !sim_bootstrap.empty())
        plan.n_grid = sim_bootstrap;
      else if (!sim_n.empty())
        plan.n_grid = sim_n;
      else
        throw dte::InputError(
            "simulate: provide --n, or --input with --bootstrap");
      plan.reps = sim_reps;
      plan.alpha = sim_alpha;
      plan.master_seed = sim_master;
      plan.permutations = sim_perms;
      plan.threads = sim_threads;
      plan.test_config = to_test_config(sim_flags);
      if (!sim_input.empty())
        plan.source = dte::io::read_dataset_csv(sim_input);
      const auto table = dte::harness::run_plan(plan);
      emit(dte::io::rate_table_to_csv(table), sim_out);
      if (!sim_null_out.empty()) {
        const auto stats = dte::harness::null_statistic_sample(plan);
        dte::io::write_text_file(sim_null_out,
                                 dte::io::statistics_to_csv(stats));
      }
      return 0;
    }

    if (ben->parsed()) {
      dte::harness::ExperimentPlan plan;
      plan.scenario = to_config(ben_scen);
      plan.scenario.design = Design::Experimental;
      plan.methods = parse_methods(ben_methods);
      plan.n_grid = ben_n;
      plan.reps = ben_reps;
      plan.master_seed = ben_master;
      plan.permutations = ben_perms;
      plan.threads = 1;  // clean measurements
      plan.test_config = to_test_config(ben_flags);
      const auto rows = dte::harness::bench_timing(plan);
      emit(dte::io::timing_table_to_csv(rows), ben_out);
      return 0;
    }
  } catch (const dte::DegenerateStatisticError& e) {
    std::cout << dte::io::error_to_json("degenerate_statistic", e.what()).dump(2)
              << "\n";
    return 3;
  } catch (const dte::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dte::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dte::FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const dte::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
