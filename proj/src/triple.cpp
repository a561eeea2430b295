#include "qbt/triple.hpp"

#include <cmath>

namespace qbt {

namespace {

// Stacked LU with rho-membership check. Throws ResolventPointError when the
// stacked matrix is numerically singular at the requested point.
Eigen::PartialPivLU<ComplexMatrix> stacked_lu(const ComplexMatrix& stack, Complex point,
                                              const char* which, double* rcond_out) {
  Eigen::PartialPivLU<ComplexMatrix> lu(stack);
  const double rc = safe_rcond(lu);
  if (rcond_out) *rcond_out = rc;
  if (!(rc > tol::kResolventRcond)) {
    throw ResolventPointError(std::string(which) + ": spectral parameter outside the resolvent set",
                              point, rc);
  }
  return lu;
}

ComplexMatrix restriction_matrix(const ComplexMatrix& op, const ComplexMatrix& embed,
                                 const ComplexMatrix& kernel_basis, const char* name) {
  // Operator on H induced by op restricted to a carrier subspace: the image
  // basis is embed*K, which must span H.
  const ComplexMatrix x = embed * kernel_basis;
  if (x.rows() != x.cols()) {
    throw ConstructionError(std::string(name) + ": restricted domain does not match dim H",
                            static_cast<double>(x.cols() - x.rows()));
  }
  const auto sr = solve_with_rcond(x.transpose(), (op * kernel_basis).transpose(),
                                   tol::kResolventRcond);
  return sr.x.transpose();
}

double rel(double defect, double scale) { return scale > 0 ? defect / scale : defect; }

}  // namespace

// ---------------------------------------------------------------------------

double green_defect_raw(const WeightedSpace& wh, const WeightedSpace& wg,
                        const ComplexMatrix& embed, const ComplexMatrix& embed_t,
                        const ComplexMatrix& op_t, const ComplexMatrix& op_tt,
                        const ComplexMatrix& g0, const ComplexMatrix& g1,
                        const ComplexMatrix& g0t, const ComplexMatrix& g1t) {
  const ComplexMatrix p1 = embed_t.adjoint() * wh.gram() * op_t;
  const ComplexMatrix p2 = op_tt.adjoint() * wh.gram() * embed;
  const ComplexMatrix p3 = g0t.adjoint() * wg.gram() * g1;
  const ComplexMatrix p4 = g1t.adjoint() * wg.gram() * g0;
  const double scale = operand_scale({p1.norm(), p2.norm(), p3.norm(), p4.norm()});
  const double defect = (p1 - p2 - p3 + p4).norm();
  return rel(defect, scale);
}

double green_defect(const TripleModel& model) {
  return green_defect_raw(model.space_h(), model.space_g(), model.embed(), model.embed_t(),
                          model.op_t(), model.op_tt(), model.g0(), model.g1(), model.g0t(),
                          model.g1t());
}

TripleModel TripleModel::build(WeightedSpace space_h, WeightedSpace space_g,
                               ComplexMatrix embed, ComplexMatrix embed_t,
                               ComplexMatrix op_t, ComplexMatrix op_tt,
                               ComplexMatrix g0, ComplexMatrix g1,
                               ComplexMatrix g0t, ComplexMatrix g1t, ModelInfo info) {
  const Index n = space_h.dim();
  const Index m = space_g.dim();
  const Index dd = embed.cols();
  const Index ddt = embed_t.cols();

  auto expect_shape = [](const ComplexMatrix& a, Index r, Index c, const char* name) {
    if (a.rows() != r || a.cols() != c) {
      throw ShapeError(std::string("TripleModel: ") + name + " has wrong shape");
    }
    if (!all_finite(a)) {
      throw ConstructionError(std::string(name) + " finite",
                              std::numeric_limits<double>::infinity());
    }
  };
  expect_shape(embed, n, dd, "embed");
  expect_shape(op_t, n, dd, "op_t");
  expect_shape(g0, m, dd, "g0");
  expect_shape(g1, m, dd, "g1");
  expect_shape(embed_t, n, ddt, "embed_t");
  expect_shape(op_tt, n, ddt, "op_tt");
  expect_shape(g0t, m, ddt, "g0t");
  expect_shape(g1t, m, ddt, "g1t");
  // Square stacked maps turn every resolvent into one LU solve.
  if (dd != n + m || ddt != n + m) {
    throw ShapeError("TripleModel: domain carriers must have dimension n + m");
  }

  const double gd = green_defect_raw(space_h, space_g, embed, embed_t, op_t, op_tt, g0,
                                     g1, g0t, g1t);
  if (!(gd <= tol::kGreen)) {
    throw ConstructionError("Green identity", gd);
  }

  ComplexMatrix stack(n + m, dd);
  stack << embed, g0;
  if (rank(stack, tol::kRank) != dd) {
    throw ConstructionError("[embed; g0] full column rank",
                            static_cast<double>(dd - rank(stack, tol::kRank)));
  }
  ComplexMatrix stack_t(n + m, ddt);
  stack_t << embed_t, g0t;
  if (rank(stack_t, tol::kRank) != ddt) {
    throw ConstructionError("[embed_t; g0t] full column rank",
                            static_cast<double>(ddt - rank(stack_t, tol::kRank)));
  }
  if (rank(g0, tol::kRank) != m) {
    throw ConstructionError("rank g0 = m", static_cast<double>(m - rank(g0, tol::kRank)));
  }
  if (rank(g0t, tol::kRank) != m) {
    throw ConstructionError("rank g0t = m", static_cast<double>(m - rank(g0t, tol::kRank)));
  }

  TripleModel model;
  model.space_h_ = std::move(space_h);
  model.space_g_ = std::move(space_g);
  model.embed_ = std::move(embed);
  model.embed_t_ = std::move(embed_t);
  model.op_t_ = std::move(op_t);
  model.op_tt_ = std::move(op_tt);
  model.g0_ = std::move(g0);
  model.g1_ = std::move(g1);
  model.g0t_ = std::move(g0t);
  model.g1t_ = std::move(g1t);
  info.green_defect = gd;
  // The symmetric flag means exact entrywise equality of the two sides; it is
  // always computed, never trusted from caller metadata.
  info.symmetric = (model.embed_ == model.embed_t_) && (model.op_t_ == model.op_tt_) &&
                   (model.g0_ == model.g0t_) && (model.g1_ == model.g1t_);
  model.info_ = std::move(info);
  return model;
}

ComplexMatrix TripleModel::plain_stack(Complex lambda) const {
  ComplexMatrix s(n() + m(), dim_d());
  s << op_t_ - lambda * embed_, g0_;
  return s;
}

ComplexMatrix TripleModel::tilde_stack(Complex mu) const {
  ComplexMatrix s(n() + m(), dim_dt());
  s << op_tt_ - mu * embed_t_, g0t_;
  return s;
}

ComplexMatrix TripleModel::a0_matrix() const {
  return restriction_matrix(op_t_, embed_, null_basis(g0_, tol::kRank), "a0_matrix");
}

ComplexMatrix TripleModel::a0t_matrix() const {
  return restriction_matrix(op_tt_, embed_t_, null_basis(g0t_, tol::kRank), "a0t_matrix");
}

// ---------------------------------------------------------------------------

DensityReport check_density(const TripleModel& model, double tol_) {
  DensityReport rep;
  rep.rank_g0 = rank(model.g0(), tol_);
  rep.rank_g0t = rank(model.g0t(), tol_);
  ComplexMatrix stack(2 * model.m(), model.dim_d());
  stack << model.g0(), model.g1();
  ComplexMatrix stack_t(2 * model.m(), model.dim_dt());
  stack_t << model.g0t(), model.g1t();
  rep.rank_stack = rank(stack, tol_);
  rep.rank_stack_t = rank(stack_t, tol_);
  rep.condition_d = rep.rank_g0 == model.m() && rep.rank_g0t == model.m();
  rep.condition_dd =
      rep.rank_stack == 2 * model.m() && rep.rank_stack_t == 2 * model.m();
  // Surjectivity of the stacked boundary maps; in finite dimensions this
  // coincides with (DD), so the flag is informational.
  rep.ordinary = rep.condition_dd;
  return rep;
}

ResolventAction a0_resolvent(const TripleModel& model, Complex lambda,
                             const ComplexVector& h) {
  if (h.size() != model.n()) throw ShapeError("a0_resolvent: rhs dimension mismatch");
  ResolventAction out;
  auto lu = stacked_lu(model.plain_stack(lambda), lambda, "a0_resolvent", &out.rcond);
  ComplexVector rhs = ComplexVector::Zero(model.n() + model.m());
  rhs.head(model.n()) = h;
  out.f_dom = lu.solve(rhs);
  out.u = model.embed() * out.f_dom;
  return out;
}

ResolventAction a0t_resolvent(const TripleModel& model, Complex mu,
                              const ComplexVector& h) {
  if (h.size() != model.n()) throw ShapeError("a0t_resolvent: rhs dimension mismatch");
  ResolventAction out;
  auto lu = stacked_lu(model.tilde_stack(mu), mu, "a0t_resolvent", &out.rcond);
  ComplexVector rhs = ComplexVector::Zero(model.n() + model.m());
  rhs.head(model.n()) = h;
  out.f_dom = lu.solve(rhs);
  out.u = model.embed_t() * out.f_dom;
  return out;
}

MaximalityCertificate check_maximality_raw(const WeightedSpace& wh,
                                           const ComplexMatrix& embed,
                                           const ComplexMatrix& embed_t,
                                           const ComplexMatrix& op_t,
                                           const ComplexMatrix& op_tt,
                                           const ComplexMatrix& g0,
                                           const ComplexMatrix& g0t, Complex lambda0) {
  const Index n = wh.dim();
  const Index m = g0.rows();
  MaximalityCertificate cert;
  cert.lambda0 = lambda0;
  {
    ComplexMatrix stack(n + m, embed.cols());
    stack << op_t - lambda0 * embed, g0;
    Eigen::PartialPivLU<ComplexMatrix> lu(stack);
    cert.rcond_plain = safe_rcond(lu);
    cert.invertible_plain = cert.rcond_plain > tol::kResolventRcond;
  }
  {
    ComplexMatrix stack(n + m, embed_t.cols());
    stack << op_tt - std::conj(lambda0) * embed_t, g0t;
    Eigen::PartialPivLU<ComplexMatrix> lu(stack);
    cert.rcond_tilde = safe_rcond(lu);
    cert.invertible_tilde = cert.rcond_tilde > tol::kResolventRcond;
  }
  if (!cert.invertible_plain || !cert.invertible_tilde) return cert;

  const ComplexMatrix a0 =
      restriction_matrix(op_t, embed, null_basis(g0, tol::kRank), "a0_matrix");
  const ComplexMatrix a0t =
      restriction_matrix(op_tt, embed_t, null_basis(g0t, tol::kRank), "a0t_matrix");
  const ComplexMatrix adj = weighted_adjoint(a0, wh, wh);
  const double scale = operand_scale({a0.norm(), a0t.norm()});
  cert.defect_adjoint = rel((a0t - adj).norm(), scale);
  cert.ok = cert.defect_adjoint <= tol::kAdjoint;
  return cert;
}

MaximalityCertificate check_maximality(const TripleModel& model, Complex lambda0) {
  return check_maximality_raw(model.space_h(), model.embed(), model.embed_t(),
                              model.op_t(), model.op_tt(), model.g0(), model.g0t(),
                              lambda0);
}

MinimalOperators minimal_operators(const TripleModel& model, double tol_) {
  MinimalOperators out;
  ComplexMatrix stk_t(2 * model.m(), model.dim_dt());
  stk_t << model.g0t(), model.g1t();
  out.s_basis = null_basis(stk_t, tol_);
  out.s_action = model.op_tt() * out.s_basis;

  ComplexMatrix stk(2 * model.m(), model.dim_d());
  stk << model.g0(), model.g1();
  out.st_basis = null_basis(stk, tol_);
  out.st_action = model.op_t() * out.st_basis;

  // (S f, g)_H - (f, S~ g)_H over the basis vectors; f lives in the tilde
  // carrier (S acts by T~), g in the plain carrier (S~ acts by T).
  const ComplexMatrix g_in_h = model.embed() * out.st_basis;
  const ComplexMatrix f_in_h = model.embed_t() * out.s_basis;
  const ComplexMatrix lhs = g_in_h.adjoint() * model.space_h().gram() * out.s_action;
  const ComplexMatrix rhs = out.st_action.adjoint() * model.space_h().gram() * f_in_h;
  out.adjoint_pair_defect = rel((lhs - rhs).norm(), operand_scale({lhs.norm(), rhs.norm()}));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

SpectralSample make_sample(const TripleModel& model, Complex point, bool tilde) {
  const Index n = model.n();
  const Index m = model.m();
  const ComplexMatrix& emb = tilde ? model.embed_t() : model.embed();
  const ComplexMatrix& g1 = tilde ? model.g1t() : model.g1();
  SpectralSample s;
  s.point = point;
  s.side = tilde ? SpectralSample::Side::tilde : SpectralSample::Side::plain;
  double rc = 1.0;
  auto lu = stacked_lu(tilde ? model.tilde_stack(point) : model.plain_stack(point), point,
                       tilde ? "gamma_tilde" : "gamma", &rc);
  s.cond_stack = 1.0 / rc;
  ComplexMatrix rhs = ComplexMatrix::Zero(n + m, m);
  rhs.bottomRows(m) = model.space_g().frame_basis();
  const ComplexMatrix f = lu.solve(rhs);
  s.gamma = emb * f;
  s.weyl = model.space_g().frame() * (g1 * f);
  return s;
}

RawSample make_raw(const TripleModel& model, Complex point, bool tilde) {
  const Index n = model.n();
  const Index m = model.m();
  RawSample s;
  s.point = point;
  double rc = 1.0;
  auto lu = stacked_lu(tilde ? model.tilde_stack(point) : model.plain_stack(point), point,
                       tilde ? "spectral_raw_tilde" : "spectral_raw", &rc);
  s.cond_stack = 1.0 / rc;
  ComplexMatrix rhs = ComplexMatrix::Zero(n + m, m);
  rhs.bottomRows(m).setIdentity();
  s.preimage = lu.solve(rhs);
  s.gamma = (tilde ? model.embed_t() : model.embed()) * s.preimage;
  s.weyl = (tilde ? model.g1t() : model.g1()) * s.preimage;
  return s;
}

// (A0 - lambda)^{-1} applied to the columns of a matrix of H-vectors.
ComplexMatrix apply_a0_resolvent(const TripleModel& model, Complex lambda,
                                 const ComplexMatrix& cols, bool tilde) {
  const Index n = model.n();
  const Index m = model.m();
  double rc = 1.0;
  auto lu = stacked_lu(tilde ? model.tilde_stack(lambda) : model.plain_stack(lambda),
                       lambda, "a0 resolvent", &rc);
  ComplexMatrix rhs = ComplexMatrix::Zero(n + m, cols.cols());
  rhs.topRows(n) = cols;
  const ComplexMatrix f = lu.solve(rhs);
  return (tilde ? model.embed_t() : model.embed()) * f;
}

}  // namespace

SpectralSample gamma(const TripleModel& model, Complex lambda) {
  return make_sample(model, lambda, false);
}

SpectralSample gamma_tilde(const TripleModel& model, Complex mu) {
  return make_sample(model, mu, true);
}

RawSample spectral_raw(const TripleModel& model, Complex lambda) {
  return make_raw(model, lambda, false);
}

RawSample spectral_raw_tilde(const TripleModel& model, Complex mu) {
  return make_raw(model, mu, true);
}

double gamma_star_check(const TripleModel& model, Complex lambda) {
  const Index n = model.n();
  const Index m = model.m();
  const ComplexMatrix& wh = model.space_h().gram();
  const ComplexMatrix& frame = model.space_g().frame();

  // gamma(lambda)^* versus G1t (A0~ - conj lambda)^{-1}, assembled columnwise.
  const SpectralSample gs = gamma(model, lambda);
  const ComplexMatrix lhs = gs.gamma.adjoint() * wh;
  double rc = 1.0;
  auto lu_t = stacked_lu(model.tilde_stack(std::conj(lambda)), std::conj(lambda),
                         "gamma_star_check (tilde resolvent)", &rc);
  ComplexMatrix rhs_stack = ComplexMatrix::Zero(n + m, n);
  rhs_stack.topRows(n).setIdentity();
  const ComplexMatrix rhs = frame * (model.g1t() * lu_t.solve(rhs_stack));
  const double d1 = rel((lhs - rhs).norm(), operand_scale({lhs.norm(), rhs.norm()}));

  // Mirror: gamma~(mu)^* = G1 (A0 - conj mu)^{-1} at mu = conj(lambda).
  const SpectralSample gst = gamma_tilde(model, std::conj(lambda));
  const ComplexMatrix lhs2 = gst.gamma.adjoint() * wh;
  auto lu_p = stacked_lu(model.plain_stack(lambda), lambda,
                         "gamma_star_check (plain resolvent)", &rc);
  const ComplexMatrix rhs2 = frame * (model.g1() * lu_p.solve(rhs_stack));
  const double d2 = rel((lhs2 - rhs2).norm(), operand_scale({lhs2.norm(), rhs2.norm()}));
  return std::max(d1, d2);
}

double gamma_shift_check(const TripleModel& model, Complex lambda, Complex nu) {
  const SpectralSample gl = gamma(model, lambda);
  const SpectralSample gn = gamma(model, nu);
  const ComplexMatrix shifted =
      gn.gamma + (lambda - nu) * apply_a0_resolvent(model, lambda, gn.gamma, false);
  const double d1 =
      rel((gl.gamma - shifted).norm(), operand_scale({gl.gamma.norm(), shifted.norm()}));

  const SpectralSample glt = gamma_tilde(model, std::conj(lambda));
  const SpectralSample gnt = gamma_tilde(model, std::conj(nu));
  const ComplexMatrix shifted_t =
      gnt.gamma + (std::conj(lambda) - std::conj(nu)) *
                      apply_a0_resolvent(model, std::conj(lambda), gnt.gamma, true);
  const double d2 = rel((glt.gamma - shifted_t).norm(),
                        operand_scale({glt.gamma.norm(), shifted_t.norm()}));
  return std::max(d1, d2);
}

WeylDefects weyl_identity_check(const TripleModel& model, Complex lambda, Complex mu) {
  const ComplexMatrix& wh = model.space_h().gram();
  const SpectralSample gl = gamma(model, lambda);
  const SpectralSample gtm = gamma_tilde(model, mu);

  WeylDefects d;
  {
    const ComplexMatrix lhs = gl.weyl - gtm.weyl.adjoint();
    const ComplexMatrix rhs =
        (lambda - std::conj(mu)) * (gtm.gamma.adjoint() * wh * gl.gamma);
    d.d1 = rel((lhs - rhs).norm(),
               operand_scale({gl.weyl.norm(), gtm.weyl.norm(), rhs.norm()}));
  }
  {
    const ComplexMatrix lhs = gl.weyl.adjoint() - gtm.weyl;
    const ComplexMatrix rhs =
        (std::conj(lambda) - mu) * (gl.gamma.adjoint() * wh * gtm.gamma);
    d.d2 = rel((lhs - rhs).norm(),
               operand_scale({gl.weyl.norm(), gtm.weyl.norm(), rhs.norm()}));
  }
  return d;
}

double weyl_representation_check(const TripleModel& model, Complex lambda,
                                 Complex lambda0) {
  const ComplexMatrix& wh = model.space_h().gram();

  // Plain side: M(lambda) from data at lambda0.
  const SpectralSample ml = gamma(model, lambda);
  const SpectralSample g0s = gamma(model, lambda0);
  const SpectralSample g0t = gamma_tilde(model, lambda0);  // requires l0 in rho(A0~)
  const ComplexMatrix inner =
      g0s.gamma + (lambda - lambda0) * apply_a0_resolvent(model, lambda, g0s.gamma, false);
  const ComplexMatrix pred =
      g0t.weyl.adjoint() +
      (lambda - std::conj(lambda0)) * (g0t.gamma.adjoint() * wh * inner);
  const double d1 =
      rel((ml.weyl - pred).norm(), operand_scale({ml.weyl.norm(), pred.norm()}));

  // Tilde mirror at mu = conj(lambda), mu0 = conj(lambda0).
  const Complex mu = std::conj(lambda);
  const Complex mu0 = std::conj(lambda0);
  const SpectralSample mt = gamma_tilde(model, mu);
  const SpectralSample gt0 = gamma_tilde(model, mu0);
  const SpectralSample gp0 = gamma(model, mu0);
  const ComplexMatrix inner_t =
      gt0.gamma + (mu - mu0) * apply_a0_resolvent(model, mu, gt0.gamma, true);
  const ComplexMatrix pred_t =
      gp0.weyl.adjoint() + (mu - std::conj(mu0)) * (gp0.gamma.adjoint() * wh * inner_t);
  const double d2 =
      rel((mt.weyl - pred_t).norm(), operand_scale({mt.weyl.norm(), pred_t.norm()}));
  return std::max(d1, d2);
}

}  // namespace qbt
