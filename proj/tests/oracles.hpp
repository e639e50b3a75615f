// Independent reference computations used by the unit and acceptance
// suites. These deliberately avoid the library's implementation paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

inline long double normal_pdf_ld(long double t) {
  const long double inv_sqrt_2pi = 0.39894228040143267794L;
  return inv_sqrt_2pi * std::exp(-0.5L * t * t);
}

// Composite-Simpson integral of the standard normal density over [0, |t|],
// signed back onto 0.5. Panel width |t|/intervals.
inline long double std_normal_cdf_oracle(double t, int intervals = 4096) {
  const long double a = 0.0L;
  const long double b = std::fabs(static_cast<long double>(t));
  if (b == 0.0L) return 0.5L;
  const long double h = (b - a) / intervals;
  long double acc = normal_pdf_ld(a) + normal_pdf_ld(b);
  for (int k = 1; k < intervals; ++k)
    acc += normal_pdf_ld(a + k * h) * (k % 2 == 1 ? 4.0L : 2.0L);
  const long double integral = acc * h / 3.0L;
  return t >= 0 ? 0.5L + integral : 0.5L - integral;
}

// Median of pairwise squared distances by full enumeration + sort.
inline double median_heuristic_oracle(const Eigen::MatrixXd& pts) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j)
      d.push_back((pts.row(i) - pts.row(j)).squaredNorm());
  std::sort(d.begin(), d.end());
  const std::size_t m = d.size();
  return m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
}

inline double rbf_oracle(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                         double sigma_sq) {
  return std::exp(-(u - v).squaredNorm() / (2.0 * sigma_sq));
}

}  // namespace oracles
