#include "dte/nuisance.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dte::nuisance {

CmeModel CmeModel::zero(int arm, numerics::KernelSpec kernel_x,
                        numerics::KernelSpec kernel_y) {
  CmeModel m;
  m.arm = arm;
  m.kernel_x = kernel_x;
  m.kernel_y = kernel_y;
  return m;
}

CmeModel fit_cme(const Dataset& data, int arm, numerics::KernelSpec kernel_x,
                 numerics::KernelSpec kernel_y, double lambda) {
  data.validate();
  if (arm != 0 && arm != 1) throw InputError("fit_cme: arm must be 0 or 1");
  if (!(lambda > 0.0)) throw InputError("fit_cme: lambda must be positive");

  std::vector<int> idx;
  for (int i = 0; i < data.n(); ++i)
    if (data.a[i] == arm) idx.push_back(i);
  if (idx.empty())
    throw FitError("fit_cme: no units with A = " + std::to_string(arm));

  CmeModel m;
  m.arm = arm;
  m.kernel_x = kernel_x;
  m.kernel_y = kernel_y;
  m.lambda = lambda;
  const auto n_a = static_cast<Eigen::Index>(idx.size());
  m.anchor_covariates.resize(n_a, data.d());
  m.anchor_outcomes.resize(n_a, 1);
  for (Eigen::Index k = 0; k < n_a; ++k) {
    m.anchor_covariates.row(k) = data.x.row(idx[static_cast<std::size_t>(k)]);
    m.anchor_outcomes(k, 0) = data.y[idx[static_cast<std::size_t>(k)]];
  }
  const auto K = numerics::gram(kernel_x, m.anchor_covariates);
  m.solve_cache =
      std::make_shared<numerics::RegularizedSolver>(K.values, lambda);
  return m;
}

Eigen::MatrixXd cme_weights_batch(const CmeModel& model,
                                  const Eigen::MatrixXd& xs) {
  if (model.is_zero()) return Eigen::MatrixXd::Zero(0, xs.rows());
  if (xs.cols() != model.anchor_covariates.cols())
    throw InputError("cme_weights: query dimension mismatch");
  const auto Kq =
      numerics::gram(model.kernel_x, model.anchor_covariates, xs);
  return model.solve_cache->solve(Kq.values);
}

Eigen::VectorXd cme_weights(const CmeModel& model, const Eigen::VectorXd& x) {
  if (model.is_zero()) return Eigen::VectorXd(0);
  return cme_weights_batch(model, x.transpose()).col(0);
}

PropensityModel PropensityModel::known(double p, double clip_eps) {
  if (!(p > 0.0 && p < 1.0))
    throw InputError("propensity: known constant must lie in (0, 1)");
  PropensityModel m;
  m.known_constant = p;
  m.clip_eps = clip_eps;
  return m;
}

namespace {

double clip_prob(double p, double eps) {
  return std::min(std::max(p, eps), 1.0 - eps);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow
double log1pexp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double penalized_loglik(const Dataset& data, const Eigen::VectorXd& w,
                        double b, double l2) {
  double ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double eta = data.x.row(i).dot(w) + b;
    ll += data.a[i] * eta - log1pexp(eta);
  }
  return ll - 0.5 * l2 * w.squaredNorm();
}

}  // namespace

PropensityModel fit_propensity(const Dataset& data, double l2,
                               double clip_eps) {
  data.validate();
  if (l2 < 0.0) throw InputError("fit_propensity: l2 must be nonnegative");
  if (!(clip_eps > 0.0 && clip_eps < 0.5))
    throw InputError("fit_propensity: clip_eps must lie in (0, 0.5)");
  const int n1 = data.count_arm(1);
  if (n1 == 0 || n1 == data.n())
    throw FitError("fit_propensity: both treatment arms must be present");

  const int d = data.d();
  const int n = data.n();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);  // [weights; intercept]

  const int max_iter = 100;
  const double tol = 1e-8;
  double grad_norm = 0.0;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Eigen::VectorXd eta = data.x * theta.head(d);
    eta.array() += theta[d];
    Eigen::VectorXd p(n), wts(n);
    for (int i = 0; i < n; ++i) {
      p[i] = sigmoid(eta[i]);
      wts[i] = p[i] * (1.0 - p[i]);
    }
    Eigen::VectorXd resid(n);
    for (int i = 0; i < n; ++i) resid[i] = data.a[i] - p[i];

    Eigen::VectorXd grad(d + 1);
    grad.head(d) = data.x.transpose() * resid - l2 * theta.head(d);
    grad[d] = resid.sum();
    grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm <= tol) break;

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d + 1, d + 1);
    H.topLeftCorner(d, d) =
        data.x.transpose() * wts.asDiagonal() * data.x;
    H.topLeftCorner(d, d).diagonal().array() += l2;
    H.block(0, d, d, 1) = data.x.transpose() * wts;
    H.block(d, 0, 1, d) = H.block(0, d, d, 1).transpose();
    H(d, d) = wts.sum();

    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success) {
      step = ldlt.solve(grad);
    } else {
      Eigen::MatrixXd Hj = H;
      Hj.diagonal().array() += 1e-10 * (H.trace() / (d + 1) + 1.0);
      step = Hj.ldlt().solve(grad);
    }

    // Step-halving keeps the objective nondecreasing.
    const double obj = penalized_loglik(data, theta.head(d), theta[d], l2);
    double scale = 1.0;
    Eigen::VectorXd cand = theta + step;
    for (int h = 0; h < 30; ++h) {
      if (penalized_loglik(data, cand.head(d), cand[d], l2) >= obj) break;
      scale *= 0.5;
      cand = theta + scale * step;
    }
    theta = cand;
  }
  if (grad_norm > tol)
    throw FitError("fit_propensity: IRLS did not converge, gradient norm " +
                   std::to_string(grad_norm));

  PropensityModel m;
  m.weights = theta.head(d);
  m.intercept = theta[d];
  m.l2 = l2;
  m.clip_eps = clip_eps;
  m.iterations = iter;
  m.final_grad_norm = grad_norm;
  return m;
}

double predict_propensity(const PropensityModel& model,
                          const Eigen::VectorXd& x) {
  if (model.known_constant) return *model.known_constant;
  if (x.size() != model.weights.size())
    throw InputError("predict_propensity: dimension mismatch");
  return clip_prob(sigmoid(model.weights.dot(x) + model.intercept),
                   model.clip_eps);
}

Eigen::VectorXd predict_propensity_batch(const PropensityModel& model,
                                         const Eigen::MatrixXd& xs) {
  Eigen::VectorXd out(xs.rows());
  if (model.known_constant) {
    out.setConstant(*model.known_constant);
    return out;
  }
  if (xs.cols() != model.weights.size())
    throw InputError("predict_propensity: dimension mismatch");
  for (Eigen::Index i = 0; i < xs.rows(); ++i)
    out[i] = clip_prob(sigmoid(model.weights.dot(xs.row(i)) + model.intercept),
                       model.clip_eps);
  return out;
}

}  // namespace dte::nuisance
