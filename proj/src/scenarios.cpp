#include "dte/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dte/rng.hpp"

namespace dte::scenarios {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::I: return "I";
    case Scenario::II: return "II";
    case Scenario::III: return "III";
    case Scenario::IV: return "IV";
  }
  return "?";
}

std::string to_string(Link l) {
  return l == Link::Linear ? "linear" : "cosine";
}

std::string to_string(Design d) {
  return d == Design::Experimental ? "experimental" : "observational";
}

void ScenarioConfig::validate() const {
  if (n < 2) throw InputError("scenario: n must be at least 2");
  if (design == Design::Experimental && n % 2 != 0)
    throw InputError("scenario: experimental design requires even n");
  if (d_x < 1) throw InputError("scenario: d_x must be positive");
}

std::string ScenarioConfig::name() const {
  return to_string(scenario) + "-" + to_string(link) + "-" +
         to_string(design);
}

Eigen::VectorXd beta_coefficients(int d, ParamSet params) {
  Eigen::VectorXd beta(d);
  if (params == ParamSet::Ihdp) {
    beta.setOnes();
    return beta;
  }
  for (int j = 0; j < d; ++j) beta[j] = 0.1 * (j % 5 + 1);
  return beta;
}

Eigen::VectorXd alpha_coefficients(int d) {
  Eigen::VectorXd alpha(d);
  for (int j = 0; j < d; ++j) alpha[j] = 0.05 - 0.01 * (j % 5);
  return alpha;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Per-unit counterfactual shift b.
double draw_shift(Scenario s, ParamSet params, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  switch (s) {
    case Scenario::I:
      return 0.0;
    case Scenario::II:
      return params == ParamSet::Ihdp ? 1.0 : 2.0;
    case Scenario::III: {
      const double z = coin(rng) ? 1.0 : 0.0;
      const double base = 2.0 * z - 1.0;
      return params == ParamSet::Ihdp ? 2.0 * base : base;
    }
    case Scenario::IV: {
      const double half = params == ParamSet::Ihdp ? 4.0 : 2.0;
      std::uniform_real_distribution<double> unif(-half, half);
      return unif(rng);
    }
  }
  return 0.0;
}

}  // namespace

CounterfactualSample attach_outcomes(const Eigen::MatrixXd& x,
                                     const ScenarioConfig& config) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  if (n < 2) throw InputError("scenario: n must be at least 2");
  if (config.design == Design::Experimental && n % 2 != 0)
    throw InputError("scenario: experimental design requires even n");

  Rng rng(mix64(config.seed ^ 0xa77ac4ed0u));
  const Eigen::VectorXd beta = beta_coefficients(d, config.params);

  CounterfactualSample out;
  out.observed.x = x;
  out.observed.a.resize(n);
  out.observed.y.resize(n);
  out.y0.resize(n);
  out.y1.resize(n);

  if (config.design == Design::Experimental) {
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::fill(labels.begin(), labels.begin() + n / 2, 1);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (int i = 0; i < n; ++i) out.observed.a[i] = labels[static_cast<std::size_t>(i)];
  } else {
    const Eigen::VectorXd alpha = alpha_coefficients(d);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const double pi = sigmoid(alpha.dot(x.row(i)) + alpha_intercept());
      out.observed.a[i] = unif(rng) < pi ? 1 : 0;
    }
  }

  const double noise_sd = std::sqrt(0.5);  // N(0, 0.5) read as variance
  std::normal_distribution<double> noise(0.0, noise_sd);
  for (int i = 0; i < n; ++i) {
    const double lin = beta.dot(x.row(i));
    const double m = config.link == Link::Linear ? lin : std::cos(lin);
    const double b = draw_shift(config.scenario, config.params, rng);
    const double e0 = noise(rng);
    const double e1 = noise(rng);
    out.y0[i] = m + e0;
    out.y1[i] = m + b + e1;
    out.observed.y[i] = out.observed.a[i] == 1 ? out.y1[i] : out.y0[i];
  }
  return out;
}

CounterfactualSample generate_full(const ScenarioConfig& config) {
  config.validate();
  Rng rng(mix64(config.seed));
  std::normal_distribution<double> std_normal(0.0, 1.0);
  Eigen::MatrixXd x(config.n, config.d_x);
  for (int i = 0; i < config.n; ++i)
    for (int j = 0; j < config.d_x; ++j) x(i, j) = std_normal(rng);
  return attach_outcomes(x, config);
}

Dataset generate(const ScenarioConfig& config) {
  return generate_full(config).observed;
}

Dataset bootstrap_subset(const Dataset& data, int m, std::uint64_t seed) {
  data.validate();
  if (m < 2) throw InputError("bootstrap_subset: m must be at least 2");
  if (m > data.n())
    throw InputError("bootstrap_subset: m exceeds the source size");
  Rng rng(mix64(seed ^ 0xb0075u));
  std::uniform_int_distribution<int> pick(0, data.n() - 1);
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) idx[static_cast<std::size_t>(k)] = pick(rng);
  return data.select(idx);
}

Dataset subtract_ate(const Dataset& data, double ate) {
  Dataset out = data;
  for (int i = 0; i < out.n(); ++i)
    if (out.a[i] == 1) out.y[i] -= ate;
  return out;
}

}  // namespace dte::scenarios
