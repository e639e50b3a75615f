#include "dte/dtetests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dte/rng.hpp"

namespace dte::tests {

std::string to_string(Method m) {
  switch (m) {
    case Method::AipwXkte: return "aipw-xkte";
    case Method::IpwXkte: return "ipw-xkte";
    case Method::Kte: return "kte";
    case Method::BaselineAipw: return "baseline-aipw";
  }
  return "unknown";
}

std::optional<Method> method_from_string(const std::string& name) {
  if (name == "aipw-xkte") return Method::AipwXkte;
  if (name == "ipw-xkte") return Method::IpwXkte;
  if (name == "kte") return Method::Kte;
  if (name == "baseline-aipw") return Method::BaselineAipw;
  return std::nullopt;
}

CrossStat cross_u_statistic(const Eigen::MatrixXd& inner_matrix) {
  const Eigen::Index n = inner_matrix.rows();
  if (n < 2 || inner_matrix.cols() < 1)
    throw InputError("cross_u_statistic: need at least a 2-row matrix");
  CrossStat cs;
  cs.f_values = inner_matrix.rowwise().mean();
  cs.mean = cs.f_values.mean();
  cs.std = std::sqrt((cs.f_values.array() - cs.mean).square().mean());
  // Exact zero spread plus floating dust from identical rows both count as
  // degenerate.
  if (cs.std == 0.0 || cs.std <= 1e-12 * std::abs(cs.mean))
    throw DegenerateStatisticError(
        "cross statistic: row means have zero spread, studentized statistic "
        "undefined");
  cs.t = std::sqrt(static_cast<double>(n)) * cs.mean / cs.std;
  return cs;
}

namespace {

struct PreparedKernels {
  numerics::KernelSpec kernel_y;
  std::optional<double> bandwidth_y_sq;  // set when RBF
};

PreparedKernels outcome_kernel(const Dataset& data, const TestConfig& config) {
  PreparedKernels out;
  if (config.kernel_family == numerics::KernelFamily::Linear) {
    out.kernel_y = numerics::KernelSpec::linear();
    return out;
  }
  const double bw = config.bandwidth_y_sq
                        ? *config.bandwidth_y_sq
                        : numerics::median_heuristic(data.y);
  out.kernel_y = numerics::KernelSpec::rbf(bw);
  out.bandwidth_y_sq = bw;
  return out;
}

nuisance::PropensityModel fit_or_known_propensity(const Dataset& data,
                                                  const TestConfig& config) {
  if (config.propensity_mode == PropensityMode::KnownConstant)
    return nuisance::PropensityModel::known(config.known_propensity,
                                            config.clip_eps);
  return nuisance::fit_propensity(data, config.propensity_l2, config.clip_eps);
}

void require_both_arms(const Dataset& fold, const char* which) {
  const int treated = fold.count_arm(1);
  if (treated == 0 || treated == fold.n())
    throw ConfigError(std::string("xkte: ") + which +
                      " contains a single treatment arm; re-seed the split "
                      "or use a larger sample");
}

TestResult run_xkte(const Dataset& data, const TestConfig& config,
                    bool with_cme) {
  data.validate();
  const auto folds = embedding::split_folds(data.n(), config.split_seed);
  const int n_fold = static_cast<int>(folds.fold1.size());
  if (n_fold < 4)
    throw ConfigError("xkte: need at least 4 units per fold");

  const Dataset d1 = data.select(folds.fold1);
  const Dataset d2 = data.select(folds.fold2);
  require_both_arms(d1, "fold 1");
  require_both_arms(d2, "fold 2");

  const auto pk = outcome_kernel(data, config);
  const auto prop = fit_or_known_propensity(data, config);

  TestResult res;
  res.method = with_cme ? Method::AipwXkte : Method::IpwXkte;
  res.alpha = config.alpha;
  res.n_effective = n_fold;
  res.diagnostics["clip_eps"] = config.clip_eps;
  res.diagnostics["n_fold"] = n_fold;
  if (pk.bandwidth_y_sq) {
    res.diagnostics["bandwidth_y_sq"] = *pk.bandwidth_y_sq;
    res.diagnostics["nu_y"] = pk.kernel_y.nu();
  }
  if (config.split_seed)
    res.diagnostics["fold_seed"] = static_cast<double>(*config.split_seed);

  nuisance::CmeModel cme0_f1, cme1_f1, cme0_f2, cme1_f2;
  if (with_cme) {
    const double bw_x = config.bandwidth_x_sq
                            ? *config.bandwidth_x_sq
                            : numerics::median_heuristic(data.x);
    const auto kernel_x = numerics::KernelSpec::rbf(bw_x);
    const double lambda = config.lambda ? *config.lambda : kernel_x.nu();
    res.diagnostics["bandwidth_x_sq"] = bw_x;
    res.diagnostics["nu_x"] = kernel_x.nu();
    res.diagnostics["lambda"] = lambda;
    // Cross-fitting: fold-r embeddings are evaluated with models trained on
    // the opposite fold. The propensity uses the whole sample.
    cme0_f1 = nuisance::fit_cme(d2, 0, kernel_x, pk.kernel_y, lambda);
    cme1_f1 = nuisance::fit_cme(d2, 1, kernel_x, pk.kernel_y, lambda);
    cme0_f2 = nuisance::fit_cme(d1, 0, kernel_x, pk.kernel_y, lambda);
    cme1_f2 = nuisance::fit_cme(d1, 1, kernel_x, pk.kernel_y, lambda);
  } else {
    const auto kx = numerics::KernelSpec::rbf(1.0);
    cme0_f1 = cme0_f2 = nuisance::CmeModel::zero(0, kx, pk.kernel_y);
    cme1_f1 = cme1_f2 = nuisance::CmeModel::zero(1, kx, pk.kernel_y);
  }

  const auto phis1 = embedding::build_phi_fold(data, folds.fold1, prop,
                                               cme0_f1, cme1_f1, pk.kernel_y, 1);
  const auto phis2 = embedding::build_phi_fold(data, folds.fold2, prop,
                                               cme0_f2, cme1_f2, pk.kernel_y, 2);
  const auto inner = embedding::phi_inner_matrix(phis1, phis2);
  const auto cs = cross_u_statistic(inner);

  res.statistic = cs.t;
  res.p_value = 1.0 - numerics::std_normal_cdf(cs.t);
  res.reject = res.p_value <= res.alpha;
  return res;
}

}  // namespace

TestResult aipw_xkte(const Dataset& data, const TestConfig& config) {
  return run_xkte(data, config, true);
}

TestResult ipw_xkte(const Dataset& data, const TestConfig& config) {
  return run_xkte(data, config, false);
}

double kte_statistic(const Eigen::VectorXd& y, const Eigen::VectorXi& labels,
                     const Eigen::VectorXd& propensities,
                     const numerics::KernelSpec& kernel_y, bool unbiased) {
  const Eigen::Index n = y.size();
  if (labels.size() != n || propensities.size() != n)
    throw InputError("kte_statistic: length mismatch");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = labels[i] == 1 ? 1.0 / propensities[i]
                          : -1.0 / (1.0 - propensities[i]);
  // The kernel matrix is recomputed on every call: the permutation loop
  // deliberately pays the O(n^2) kernel cost per statistic.
  const auto K = numerics::gram(kernel_y, y).values;
  const double quad = v.dot(K * v);
  if (!unbiased) return quad / static_cast<double>(n * n);
  double diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) diag += v[i] * v[i] * K(i, i);
  return (quad - diag) / static_cast<double>(n * (n - 1));
}

TestResult kte_permutation(const Dataset& data, const TestConfig& config,
                           int permutations) {
  data.validate();
  if (permutations < 1)
    throw InputError("kte: need at least one permutation");
  if (data.n() < 4) throw InputError("kte: n too small, need at least 4 units");

  const auto pk = outcome_kernel(data, config);
  const auto prop = fit_or_known_propensity(data, config);
  const Eigen::VectorXd pis = nuisance::predict_propensity_batch(prop, data.x);

  const double observed =
      kte_statistic(data.y, data.a, pis, pk.kernel_y, config.kte_unbiased);

  std::vector<int> labels(static_cast<std::size_t>(data.n()));
  for (int i = 0; i < data.n(); ++i) labels[static_cast<std::size_t>(i)] = data.a[i];
  Rng rng(config.permutation_seed);
  int at_least = 0;
  Eigen::VectorXi perm(data.n());
  for (int b = 0; b < permutations; ++b) {
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < data.n(); ++i) perm[i] = labels[static_cast<std::size_t>(i)];
    const double stat =
        kte_statistic(data.y, perm, pis, pk.kernel_y, config.kte_unbiased);
    if (stat >= observed) ++at_least;
  }

  TestResult res;
  res.method = Method::Kte;
  res.statistic = observed;
  res.p_value = (1.0 + at_least) / (permutations + 1.0);
  res.alpha = config.alpha;
  res.reject = res.p_value <= res.alpha;
  res.n_effective = data.n();
  res.diagnostics["permutations"] = permutations;
  res.diagnostics["clip_eps"] = config.clip_eps;
  if (pk.bandwidth_y_sq) {
    res.diagnostics["bandwidth_y_sq"] = *pk.bandwidth_y_sq;
    res.diagnostics["nu_y"] = pk.kernel_y.nu();
  }
  return res;
}

OlsModel fit_arm_ols(const Dataset& data, int arm) {
  std::vector<int> idx;
  for (int i = 0; i < data.n(); ++i)
    if (data.a[i] == arm) idx.push_back(i);
  if (idx.empty())
    throw FitError("fit_arm_ols: no units with A = " + std::to_string(arm));

  const int d = data.d();
  Eigen::MatrixXd design(static_cast<Eigen::Index>(idx.size()), d + 1);
  Eigen::VectorXd target(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    design.row(static_cast<Eigen::Index>(k)).head(d) = data.x.row(idx[k]);
    design(static_cast<Eigen::Index>(k), d) = 1.0;
    target[static_cast<Eigen::Index>(k)] = data.y[idx[k]];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  OlsModel m;
  m.rank_deficient = qr.rank() < d + 1;
  const Eigen::VectorXd theta = qr.solve(target);
  m.weights = theta.head(d);
  m.intercept = theta[d];
  return m;
}

double aipw_point_estimate(const Dataset& data,
                           const Eigen::VectorXd& theta0_pred,
                           const Eigen::VectorXd& theta1_pred,
                           const Eigen::VectorXd& propensities) {
  const int n = data.n();
  if (theta0_pred.size() != n || theta1_pred.size() != n ||
      propensities.size() != n)
    throw InputError("aipw_point_estimate: length mismatch");
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = data.a[i] == 1 ? 1.0 / propensities[i]
                                    : -1.0 / (1.0 - propensities[i]);
    const double theta_own = data.a[i] == 1 ? theta1_pred[i] : theta0_pred[i];
    acc += theta1_pred[i] - theta0_pred[i] + w * (data.y[i] - theta_own);
  }
  return acc / n;
}

namespace {

struct BaselineFit {
  double psi = 0.0;
  bool rank_deficient = false;
};

BaselineFit baseline_psi(const Dataset& data, const TestConfig& config) {
  const auto ols0 = fit_arm_ols(data, 0);
  const auto ols1 = fit_arm_ols(data, 1);
  const auto prop = fit_or_known_propensity(data, config);
  Eigen::VectorXd t0(data.n()), t1(data.n());
  for (int i = 0; i < data.n(); ++i) {
    t0[i] = ols0.predict(data.x.row(i));
    t1[i] = ols1.predict(data.x.row(i));
  }
  const Eigen::VectorXd pis = nuisance::predict_propensity_batch(prop, data.x);
  return {aipw_point_estimate(data, t0, t1, pis),
          ols0.rank_deficient || ols1.rank_deficient};
}

}  // namespace

TestResult baseline_aipw_test(const Dataset& data, const TestConfig& config,
                              int permutations) {
  data.validate();
  if (permutations < 1)
    throw InputError("baseline-aipw: need at least one permutation");
  const int treated = data.count_arm(1);
  if (treated == 0 || treated == data.n())
    throw FitError("baseline-aipw: both treatment arms must be present");

  const auto observed = baseline_psi(data, config);

  // Labels are re-assigned uniformly and every nuisance is refit per
  // permutation.
  std::vector<int> labels(static_cast<std::size_t>(data.n()));
  for (int i = 0; i < data.n(); ++i) labels[static_cast<std::size_t>(i)] = data.a[i];
  Rng rng(config.permutation_seed);
  Dataset permuted = data;
  int at_least = 0;
  bool any_rank_deficient = observed.rank_deficient;
  for (int b = 0; b < permutations; ++b) {
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < data.n(); ++i)
      permuted.a[i] = labels[static_cast<std::size_t>(i)];
    const auto fit = baseline_psi(permuted, config);
    any_rank_deficient = any_rank_deficient || fit.rank_deficient;
    if (std::abs(fit.psi) >= std::abs(observed.psi)) ++at_least;
  }

  TestResult res;
  res.method = Method::BaselineAipw;
  res.statistic = observed.psi;
  res.p_value = (1.0 + at_least) / (permutations + 1.0);
  res.alpha = config.alpha;
  res.reject = res.p_value <= res.alpha;
  res.n_effective = data.n();
  res.diagnostics["permutations"] = permutations;
  res.diagnostics["clip_eps"] = config.clip_eps;
  if (any_rank_deficient) res.diagnostics["rank_deficient"] = 1.0;
  return res;
}

TestResult baseline_aipw_test(const Dataset& data, int permutations) {
  return baseline_aipw_test(data, TestConfig{}, permutations);
}

}  // namespace dte::tests
