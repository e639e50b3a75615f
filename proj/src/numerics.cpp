#include "dte/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dte::numerics {

std::string to_string(KernelFamily family) {
  return family == KernelFamily::Rbf ? "rbf" : "linear";
}

namespace {

double rbf_from_sqdist(double sqdist, double bandwidth_sq) {
  return std::exp(-sqdist / (2.0 * bandwidth_sq));
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& v) {
  spec.validate();
  if (u.size() != v.size())
    throw InputError("kernel_eval: point dimensions differ");
  if (spec.family == KernelFamily::Linear) return u.dot(v);
  return rbf_from_sqdist((u - v).squaredNorm(), spec.bandwidth_sq);
}

GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& rows,
                const Eigen::MatrixXd& cols) {
  spec.validate();
  if (rows.cols() != cols.cols())
    throw InputError("gram: row and column point dimensions differ");
  const Eigen::Index m = rows.rows();
  const Eigen::Index n = cols.rows();
  GramMatrix out{Eigen::MatrixXd(m, n), spec, spec};
  if (spec.family == KernelFamily::Linear) {
    out.values.noalias() = rows * cols.transpose();
    return out;
  }
  // ||r - c||^2 = ||r||^2 + ||c||^2 - 2 r.c, computed blockwise.
  const Eigen::VectorXd rn = rows.rowwise().squaredNorm();
  const Eigen::VectorXd cn = cols.rowwise().squaredNorm();
  out.values.noalias() = rows * cols.transpose();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const double sq = std::max(0.0, rn[i] + cn[j] - 2.0 * out.values(i, j));
      out.values(i, j) = rbf_from_sqdist(sq, spec.bandwidth_sq);
    }
  return out;
}

GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  spec.validate();
  const Eigen::Index n = points.rows();
  GramMatrix out{Eigen::MatrixXd(n, n), spec, spec};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i, i) = spec.family == KernelFamily::Rbf
                           ? 1.0
                           : points.row(i).squaredNorm();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = kernel_eval(spec, points.row(i), points.row(j));
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

double median_heuristic(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw InputError("median_heuristic: need at least two points");
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      sq.push_back((points.row(i) - points.row(j)).squaredNorm());
  std::sort(sq.begin(), sq.end());
  const std::size_t m = sq.size();
  const double med = (m % 2 == 1) ? sq[m / 2]
                                  : 0.5 * (sq[m / 2 - 1] + sq[m / 2]);
  if (!(med > 0.0))
    throw DegenerateBandwidthError(
        "median_heuristic: median pairwise distance is zero (sigma^2 = 0)");
  return med;
}

RegularizedSolver::RegularizedSolver(const Eigen::MatrixXd& K, double lambda) {
  if (K.rows() != K.cols()) throw InputError("reg_solve: K must be square");
  if (!(lambda > 0.0)) throw InputError("reg_solve: lambda must be positive");
  const Eigen::Index n = K.rows();
  system_ = K;
  system_.diagonal().array() += lambda;

  double jitter = 0.0;
  const double base = 1e-10 * K.trace() / static_cast<double>(n);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    Eigen::MatrixXd trial = system_;
    if (jitter > 0.0) trial.diagonal().array() += jitter;
    llt_.compute(trial);
    if (llt_.info() == Eigen::Success) {
      jitter_ = jitter;
      return;
    }
    jitter = (jitter == 0.0) ? base : jitter * 10.0;
    if (jitter <= 0.0) jitter = 1e-12;  // trace-zero fallback
  }
  throw NumericalError("reg_solve: factorization failed after jitter escalation");
}

Eigen::MatrixXd RegularizedSolver::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != system_.rows())
    throw InputError("reg_solve: rhs row count does not match system");
  Eigen::MatrixXd out = llt_.solve(rhs);
  // One refinement pass against K + lambda I keeps the residual at ~1e-14
  // even when jitter was applied.
  Eigen::MatrixXd resid = rhs - system_ * out;
  out += llt_.solve(resid);
  return out;
}

Eigen::MatrixXd reg_solve(const Eigen::MatrixXd& K, double lambda,
                          const Eigen::MatrixXd& rhs) {
  return RegularizedSolver(K, lambda).solve(rhs);
}

double std_normal_cdf(double t) {
  return 0.5 * std::erfc(-t / std::sqrt(2.0));
}

}  // namespace dte::numerics
