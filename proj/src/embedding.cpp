#include "dte/embedding.hpp"

#include <algorithm>
#include <numeric>

#include "dte/rng.hpp"

namespace dte::embedding {

Eigen::MatrixXd PhiRepr::full_anchors() const {
  const int m_s = shared ? shared->count() : 0;
  Eigen::MatrixXd out(1 + m_s, own_anchor.size());
  out.row(0) = own_anchor;
  if (m_s > 0) out.bottomRows(m_s) = shared->outcomes;
  return out;
}

Eigen::VectorXd PhiRepr::full_coeffs() const {
  const int m_s = shared ? shared->count() : 0;
  Eigen::VectorXd out(1 + m_s);
  out[0] = own_coeff;
  if (m_s > 0) out.tail(m_s) = shared_coeffs;
  return out;
}

FoldAssignment split_folds(int total, std::optional<std::uint64_t> seed) {
  if (total < 2) throw InputError("split_folds: need at least two units");
  std::vector<int> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  if (seed) {
    Rng rng(*seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const int half = total / 2;  // odd totals drop the last unit
  FoldAssignment f;
  f.seed = seed;
  f.fold1.assign(order.begin(), order.begin() + half);
  f.fold2.assign(order.begin() + half, order.begin() + 2 * half);
  return f;
}

namespace {

double ipw_weight(int a, double pi) {
  return a == 1 ? 1.0 / pi : -1.0 / (1.0 - pi);
}

std::shared_ptr<const SharedAnchors> make_shared_anchors(
    const nuisance::CmeModel& cme0, const nuisance::CmeModel& cme1) {
  auto s = std::make_shared<SharedAnchors>();
  s->n_treated = cme1.anchor_count();
  s->n_control = cme0.anchor_count();
  const Eigen::Index d_y =
      s->n_treated > 0 ? cme1.anchor_outcomes.cols()
                       : (s->n_control > 0 ? cme0.anchor_outcomes.cols() : 1);
  s->outcomes.resize(s->count(), d_y);
  if (s->n_treated > 0) s->outcomes.topRows(s->n_treated) = cme1.anchor_outcomes;
  if (s->n_control > 0) s->outcomes.bottomRows(s->n_control) = cme0.anchor_outcomes;
  return s;
}

// Shared-anchor coefficients given the observation's arm, IPW weight and the
// two CME weight vectors: treated block scaled by (1 - a w), control block
// by (-1 - (1-a) w).
Eigen::VectorXd shared_coeffs_for(const SharedAnchors& s, int a, double w,
                                  const Eigen::VectorXd& w1,
                                  const Eigen::VectorXd& w0) {
  Eigen::VectorXd c(s.count());
  if (s.n_treated > 0) c.head(s.n_treated) = (1.0 - a * w) * w1;
  if (s.n_control > 0) c.tail(s.n_control) = (-1.0 - (1 - a) * w) * w0;
  return c;
}

}  // namespace

PhiRepr build_phi(const Eigen::VectorXd& x, int a, double y,
                  const nuisance::PropensityModel& prop,
                  const nuisance::CmeModel& cme0,
                  const nuisance::CmeModel& cme1,
                  const numerics::KernelSpec& kernel_y, int fold_tag) {
  if (a != 0 && a != 1) throw InputError("build_phi: treatment must be 0/1");
  if (cme0.arm != 0 || cme1.arm != 1)
    throw InputError("build_phi: cme0/cme1 arm mismatch");
  const double pi = nuisance::predict_propensity(prop, x);
  const double w = ipw_weight(a, pi);

  PhiRepr r;
  r.kernel_y = kernel_y;
  r.fold_tag = fold_tag;
  r.own_anchor.resize(1);
  r.own_anchor[0] = y;
  r.own_coeff = w;
  r.shared = make_shared_anchors(cme0, cme1);
  r.shared_coeffs = shared_coeffs_for(*r.shared, a, w, cme_weights(cme1, x),
                                      cme_weights(cme0, x));
  return r;
}

std::vector<PhiRepr> build_phi_fold(const Dataset& data,
                                    const std::vector<int>& indices,
                                    const nuisance::PropensityModel& prop,
                                    const nuisance::CmeModel& cme0,
                                    const nuisance::CmeModel& cme1,
                                    const numerics::KernelSpec& kernel_y,
                                    int fold_tag) {
  const auto shared = make_shared_anchors(cme0, cme1);
  Eigen::MatrixXd xs(static_cast<Eigen::Index>(indices.size()), data.d());
  for (std::size_t k = 0; k < indices.size(); ++k)
    xs.row(static_cast<Eigen::Index>(k)) = data.x.row(indices[k]);

  const Eigen::MatrixXd w1 = cme_weights_batch(cme1, xs);  // [n1_a x m]
  const Eigen::MatrixXd w0 = cme_weights_batch(cme0, xs);
  const Eigen::VectorXd pis = nuisance::predict_propensity_batch(prop, xs);

  std::vector<PhiRepr> out;
  out.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    const int i = indices[k];
    const int a = data.a[i];
    const double w = ipw_weight(a, pis[ki]);
    PhiRepr r;
    r.kernel_y = kernel_y;
    r.fold_tag = fold_tag;
    r.own_anchor.resize(1);
    r.own_anchor[0] = data.y[i];
    r.own_coeff = w;
    r.shared = shared;
    r.shared_coeffs = shared_coeffs_for(
        *shared, a, w,
        w1.rows() > 0 ? Eigen::VectorXd(w1.col(ki)) : Eigen::VectorXd(0),
        w0.rows() > 0 ? Eigen::VectorXd(w0.col(ki)) : Eigen::VectorXd(0));
    out.push_back(std::move(r));
  }
  return out;
}

double phi_inner(const PhiRepr& p, const PhiRepr& q) {
  if (!(p.kernel_y == q.kernel_y))
    throw InputError("phi_inner: outcome kernels differ");
  const auto& k = p.kernel_y;
  const Eigen::VectorXd yp = p.own_anchor.transpose();
  const Eigen::VectorXd yq = q.own_anchor.transpose();
  double acc = p.own_coeff * q.own_coeff * numerics::kernel_eval(k, yp, yq);
  if (q.shared && q.shared->count() > 0) {
    const auto kyq =
        numerics::gram(k, p.own_anchor, q.shared->outcomes).values;
    acc += p.own_coeff * (kyq * q.shared_coeffs)(0, 0);
  }
  if (p.shared && p.shared->count() > 0) {
    const auto kpy =
        numerics::gram(k, p.shared->outcomes, q.own_anchor).values;
    acc += q.own_coeff * p.shared_coeffs.dot(kpy.col(0));
  }
  if (p.shared && q.shared && p.shared->count() > 0 && q.shared->count() > 0) {
    const auto kss =
        numerics::gram(k, p.shared->outcomes, q.shared->outcomes).values;
    acc += p.shared_coeffs.dot(kss * q.shared_coeffs);
  }
  return acc;
}

Eigen::MatrixXd phi_inner_matrix(const std::vector<PhiRepr>& fold1_reprs,
                                 const std::vector<PhiRepr>& fold2_reprs) {
  if (fold1_reprs.empty() || fold2_reprs.empty())
    throw InputError("phi_inner_matrix: empty fold");
  const auto& k = fold1_reprs.front().kernel_y;
  if (!(k == fold2_reprs.front().kernel_y))
    throw InputError("phi_inner_matrix: outcome kernels differ");
  const auto s1 = fold1_reprs.front().shared;
  const auto s2 = fold2_reprs.front().shared;
  for (const auto& r : fold1_reprs)
    if (r.shared != s1)
      throw InputError("phi_inner_matrix: fold-1 anchor layouts differ");
  for (const auto& r : fold2_reprs)
    if (r.shared != s2)
      throw InputError("phi_inner_matrix: fold-2 anchor layouts differ");

  const auto n1 = static_cast<Eigen::Index>(fold1_reprs.size());
  const auto n2 = static_cast<Eigen::Index>(fold2_reprs.size());
  const Eigen::Index d_y = fold1_reprs.front().own_anchor.size();

  Eigen::MatrixXd y1(n1, d_y), y2(n2, d_y);
  Eigen::VectorXd u1(n1), u2(n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    y1.row(i) = fold1_reprs[static_cast<std::size_t>(i)].own_anchor;
    u1[i] = fold1_reprs[static_cast<std::size_t>(i)].own_coeff;
  }
  for (Eigen::Index j = 0; j < n2; ++j) {
    y2.row(j) = fold2_reprs[static_cast<std::size_t>(j)].own_anchor;
    u2[j] = fold2_reprs[static_cast<std::size_t>(j)].own_coeff;
  }

  const int m1 = s1 ? s1->count() : 0;
  const int m2 = s2 ? s2->count() : 0;
  Eigen::MatrixXd c1(n1, m1), c2(n2, m2);
  for (Eigen::Index i = 0; i < n1; ++i)
    if (m1 > 0)
      c1.row(i) = fold1_reprs[static_cast<std::size_t>(i)].shared_coeffs;
  for (Eigen::Index j = 0; j < n2; ++j)
    if (m2 > 0)
      c2.row(j) = fold2_reprs[static_cast<std::size_t>(j)].shared_coeffs;

  // <phi_i, phi_j> decomposes over (own, shared) anchor pairs.
  Eigen::MatrixXd out =
      (u1 * u2.transpose()).cwiseProduct(numerics::gram(k, y1, y2).values);
  if (m2 > 0) {
    const auto k_y_s2 = numerics::gram(k, y1, s2->outcomes).values;
    out.noalias() += u1.asDiagonal() * (k_y_s2 * c2.transpose());
  }
  if (m1 > 0) {
    const auto k_s1_y = numerics::gram(k, s1->outcomes, y2).values;
    out.noalias() += (c1 * k_s1_y) * u2.asDiagonal();
  }
  if (m1 > 0 && m2 > 0) {
    const auto k_s1_s2 = numerics::gram(k, s1->outcomes, s2->outcomes).values;
    out.noalias() += c1 * k_s1_s2 * c2.transpose();
  }
  return out;
}

}  // namespace dte::embedding
