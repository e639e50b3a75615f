#pragma once

#include <memory>
#include <optional>

#include "dte/dataset.hpp"
#include "dte/numerics.hpp"

namespace dte::nuisance {

// Conditional mean embedding for one treatment arm, fitted by kernel ridge
// on that arm's subsample. Evaluation weights at a query x solve
//   (K_xx + lambda I) w = k_x(anchors, x),
// so the embedding is beta_a(x) = sum_t w_t(x) k(., y_t) over the arm's
// training outcomes.
struct CmeModel {
  int arm = 0;
  Eigen::MatrixXd anchor_outcomes;    // [n_a x d_y]
  Eigen::MatrixXd anchor_covariates;  // [n_a x d_x]
  numerics::KernelSpec kernel_x;
  numerics::KernelSpec kernel_y;
  double lambda = 1.0;
  std::shared_ptr<const numerics::RegularizedSolver> solve_cache;

  int anchor_count() const { return static_cast<int>(anchor_outcomes.rows()); }
  bool is_zero() const { return anchor_count() == 0; }

  // The identically-zero embedding (no anchors). Used by the IPW ablation.
  static CmeModel zero(int arm, numerics::KernelSpec kernel_x,
                       numerics::KernelSpec kernel_y);
};

CmeModel fit_cme(const Dataset& data, int arm, numerics::KernelSpec kernel_x,
                 numerics::KernelSpec kernel_y, double lambda);

Eigen::VectorXd cme_weights(const CmeModel& model, const Eigen::VectorXd& x);

// Column j holds the weights for query point xs.row(j is over rows of xs).
// Shape [n_a x m]. Equals m single-query calls.
Eigen::MatrixXd cme_weights_batch(const CmeModel& model,
                                  const Eigen::MatrixXd& xs);

// Clipped logistic propensity model. In known-constant mode prediction
// returns that constant for every x (experimental designs).
struct PropensityModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double l2 = 1e-6;
  double clip_eps = 0.01;
  std::optional<double> known_constant;
  int iterations = 0;
  double final_grad_norm = 0.0;

  static PropensityModel known(double p, double clip_eps = 0.01);
};

// IRLS (Newton with step-halving) on the L2-penalized log likelihood; the
// intercept is not penalized. Converged when the gradient infinity norm is
// <= 1e-8, at most 100 iterations.
PropensityModel fit_propensity(const Dataset& data, double l2,
                               double clip_eps);

double predict_propensity(const PropensityModel& model,
                          const Eigen::VectorXd& x);

// All predictions at once, clipped.
Eigen::VectorXd predict_propensity_batch(const PropensityModel& model,
                                         const Eigen::MatrixXd& xs);

}  // namespace dte::nuisance
