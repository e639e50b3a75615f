#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dte/dataset.hpp"
#include "dte/nuisance.hpp"
#include "dte/numerics.hpp"

namespace dte::embedding {

// Anchor outcomes shared by every PhiRepr of one fold: the opposite fold's
// treated outcomes followed by its control outcomes. Stored once.
struct SharedAnchors {
  Eigen::MatrixXd outcomes;  // [(n_treated + n_control) x d_y]
  int n_treated = 0;
  int n_control = 0;

  int count() const { return n_treated + n_control; }
};

// Finite-anchor representation of the estimated influence embedding
//   phi(z) = w(z) {k(., y) - beta_a(x)} + beta_1(x) - beta_0(x),
//   w(z) = a/pi(x) - (1-a)/(1-pi(x)),
// expanded over the observation's own outcome plus the shared anchor block.
struct PhiRepr {
  Eigen::RowVectorXd own_anchor;  // the observation's own y
  double own_coeff = 0.0;
  std::shared_ptr<const SharedAnchors> shared;
  Eigen::VectorXd shared_coeffs;  // [shared->count()]
  numerics::KernelSpec kernel_y;
  int fold_tag = 1;

  int anchor_count() const {
    return 1 + (shared ? shared->count() : 0);
  }
  // Materialized [m x d_y] anchor matrix and [m] coefficient vector,
  // own anchor first. For oracle checks; the inner products use the
  // decomposed form.
  Eigen::MatrixXd full_anchors() const;
  Eigen::VectorXd full_coeffs() const;
};

// Disjoint, exhaustive index split. Without a seed the split is the plain
// first-half / second-half index split; with a seed the indices are
// shuffled first. Odd totals drop the last (shuffled) unit so folds are
// equal.
struct FoldAssignment {
  std::vector<int> fold1;
  std::vector<int> fold2;
  std::optional<std::uint64_t> seed;
};

FoldAssignment split_folds(int total, std::optional<std::uint64_t> seed);

PhiRepr build_phi(const Eigen::VectorXd& x, int a, double y,
                  const nuisance::PropensityModel& prop,
                  const nuisance::CmeModel& cme0,
                  const nuisance::CmeModel& cme1,
                  const numerics::KernelSpec& kernel_y, int fold_tag = 1);

// All representations for the observations at `indices`, sharing one anchor
// block. The models must be the pair fitted on the opposite fold.
std::vector<PhiRepr> build_phi_fold(const Dataset& data,
                                    const std::vector<int>& indices,
                                    const nuisance::PropensityModel& prop,
                                    const nuisance::CmeModel& cme0,
                                    const nuisance::CmeModel& cme1,
                                    const numerics::KernelSpec& kernel_y,
                                    int fold_tag);

// <p, q> = coeffs_p^T Gram(anchors_p, anchors_q) coeffs_q.
double phi_inner(const PhiRepr& p, const PhiRepr& q);

// Entry (i, j) = phi_inner(fold1_reprs[i], fold2_reprs[j]), batched with one
// Gram evaluation per anchor-block pair. Requires each fold's reprs to share
// a single anchor block.
Eigen::MatrixXd phi_inner_matrix(const std::vector<PhiRepr>& fold1_reprs,
                                 const std::vector<PhiRepr>& fold2_reprs);

}  // namespace dte::embedding
