#pragma once

#include <cstdint>
#include <string>

#include "dte/dataset.hpp"

namespace dte::scenarios {

enum class Scenario { I, II, III, IV };
enum class Link { Linear, Cosine };
enum class Design { Experimental, Observational };

// Parameter presets. Synthetic: beta = (0.1..0.5), shifts b in {0, 2,
// 2Z-1, U(-2,2)}. Ihdp: beta all ones, shifts {0, 1, 2(2Z-1), U(-4,4)} for
// externally supplied covariate files.
enum class ParamSet { Synthetic, Ihdp };

std::string to_string(Scenario s);
std::string to_string(Link l);
std::string to_string(Design d);

struct ScenarioConfig {
  Scenario scenario = Scenario::I;
  Link link = Link::Linear;
  Design design = Design::Observational;
  int n = 100;
  std::uint64_t seed = 0;
  int d_x = 5;
  ParamSet params = ParamSet::Synthetic;

  void validate() const;
  std::string name() const;  // e.g. "II-linear-observational"
};

// Generator output including both potential outcomes (for oracle checks).
struct CounterfactualSample {
  Dataset observed;
  Eigen::VectorXd y0;
  Eigen::VectorXd y1;
};

// Outcome-model coefficients: the 5-entry pattern (0.1, ..., 0.5) cycled to
// d entries, or all ones for the Ihdp preset.
Eigen::VectorXd beta_coefficients(int d, ParamSet params);
// Treatment-model coefficients (0.05, 0.04, 0.03, 0.02, 0.01) cycled to d.
Eigen::VectorXd alpha_coefficients(int d);
inline double alpha_intercept() { return 0.05; }

// Draws treatments and outcomes for supplied covariates:
// Y0 = m(X) + e0, Y1 = m(X) + b + e1 with m per the link, noise
// N(0, var 0.5); experimental designs treat exactly n/2 units, observational
// draws A | X ~ Bernoulli(sigmoid(alpha.x + alpha0)).
CounterfactualSample attach_outcomes(const Eigen::MatrixXd& x,
                                     const ScenarioConfig& config);

CounterfactualSample generate_full(const ScenarioConfig& config);
Dataset generate(const ScenarioConfig& config);

// m rows sampled with replacement; deterministic under the seed.
Dataset bootstrap_subset(const Dataset& data, int m, std::uint64_t seed);

// Subtracts `ate` from treated outcomes, leaving X and A untouched.
Dataset subtract_ate(const Dataset& data, double ate);

}  // namespace dte::scenarios
