#pragma once

#include <Eigen/Dense>

#include "dte/errors.hpp"

namespace dte {

// One observational sample: covariates X [n x d], binary treatment A [n],
// scalar outcome Y [n].
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXi a;
  Eigen::VectorXd y;

  int n() const { return static_cast<int>(x.rows()); }
  int d() const { return static_cast<int>(x.cols()); }

  void validate() const {
    if (a.size() != x.rows() || y.size() != x.rows())
      throw InputError("dataset: X, A, Y row counts differ");
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a[i] != 0 && a[i] != 1) throw InputError("dataset: A must be 0/1");
  }

  int count_arm(int arm) const {
    int c = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) c += (a[i] == arm) ? 1 : 0;
    return c;
  }

  Dataset select(const std::vector<int>& idx) const {
    Dataset out;
    out.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
    out.a.resize(static_cast<Eigen::Index>(idx.size()));
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out.x.row(static_cast<Eigen::Index>(k)) = x.row(idx[k]);
      out.a[static_cast<Eigen::Index>(k)] = a[idx[k]];
      out.y[static_cast<Eigen::Index>(k)] = y[idx[k]];
    }
    return out;
  }
};

}  // namespace dte
