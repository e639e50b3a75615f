#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dte/dataset.hpp"
#include "dte/embedding.hpp"
#include "dte/nuisance.hpp"
#include "dte/numerics.hpp"

namespace dte::tests {

enum class Method { AipwXkte, IpwXkte, Kte, BaselineAipw };

std::string to_string(Method m);
std::optional<Method> method_from_string(const std::string& name);

enum class PropensityMode { Logistic, KnownConstant };

struct TestConfig {
  numerics::KernelFamily kernel_family = numerics::KernelFamily::Rbf;
  std::optional<double> bandwidth_y_sq;  // default: median heuristic on Y
  std::optional<double> bandwidth_x_sq;  // default: median heuristic on X
  std::optional<double> lambda;          // default: nu_x = 1/(2 sigma_x^2)
  double clip_eps = 0.01;
  double propensity_l2 = 1e-6;
  double alpha = 0.05;
  std::optional<std::uint64_t> split_seed;  // none: first-half/second-half
  PropensityMode propensity_mode = PropensityMode::Logistic;
  double known_propensity = 0.5;
  std::uint64_t permutation_seed = 0;
  bool kte_unbiased = false;
};

struct TestResult {
  Method method = Method::AipwXkte;
  double statistic = 0.0;
  double p_value = 0.0;
  double alpha = 0.05;
  bool reject = false;
  int n_effective = 0;  // fold size for the cross tests, n otherwise
  std::map<std::string, double> diagnostics;
};

// Row means of the fold-1 x fold-2 inner-product matrix plus their
// studentization. std is the population (divide-by-n) form.
struct CrossStat {
  Eigen::VectorXd f_values;
  double mean = 0.0;
  double std = 0.0;
  double t = 0.0;
};

// Throws DegenerateStatisticError when the row means have zero spread.
CrossStat cross_u_statistic(const Eigen::MatrixXd& inner_matrix);

// Algorithm: split, fit nuisances (propensity on all data, CMEs
// cross-fitted per fold), build the influence embeddings, cross
// inner-product matrix, studentized statistic, one-sided p = 1 - Phi(t).
TestResult aipw_xkte(const Dataset& data, const TestConfig& config);

// Same pipeline with both conditional mean embeddings identically zero.
TestResult ipw_xkte(const Dataset& data, const TestConfig& config);

// Weighted squared-MMD statistic between the counterfactual embeddings with
// permutation thresholding: B uniform re-assignments of the treatment
// labels, propensity values held fixed, statistic recomputed from scratch
// for each permutation. p = (1 + #{stat_b >= stat_obs}) / (B + 1).
TestResult kte_permutation(const Dataset& data, const TestConfig& config,
                           int permutations);

// The weighted squared-MMD for given labels and propensity values.
// Recomputes all kernel evaluations on every call.
double kte_statistic(const Eigen::VectorXd& y, const Eigen::VectorXi& labels,
                     const Eigen::VectorXd& propensities,
                     const numerics::KernelSpec& kernel_y, bool unbiased);

// Per-arm least squares outcome model for the baseline ATE test.
struct OlsModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  bool rank_deficient = false;

  double predict(const Eigen::VectorXd& x) const {
    return weights.dot(x) + intercept;
  }
};

OlsModel fit_arm_ols(const Dataset& data, int arm);

// The AIPW point estimate given per-unit nuisance predictions. Exposed so
// nuisances can be forced in tests.
double aipw_point_estimate(const Dataset& data,
                           const Eigen::VectorXd& theta0_pred,
                           const Eigen::VectorXd& theta1_pred,
                           const Eigen::VectorXd& propensities);

// Linear-regression AIPW ATE estimate with a permutation p-value on |psi|:
// labels re-assigned uniformly, outcome models and propensity refit for
// every permutation.
TestResult baseline_aipw_test(const Dataset& data, const TestConfig& config,
                              int permutations);
TestResult baseline_aipw_test(const Dataset& data, int permutations);

}  // namespace dte::tests
