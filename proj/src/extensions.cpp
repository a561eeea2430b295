#include "qbt/extensions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qbt {

namespace {

double rel(double defect, double scale) { return scale > 0 ? defect / scale : defect; }

bool lex_less(Complex x, Complex y) {
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

Eigen::PartialPivLU<ComplexMatrix> lu_or_throw(const ComplexMatrix& a, Complex point,
                                               const char* what, double min_rcond,
                                               double* rcond_out = nullptr) {
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rc = safe_rcond(lu);
  if (rcond_out) *rcond_out = rc;
  if (!(rc > min_rcond)) throw ResolventPointError(what, point, rc);
  return lu;
}

}  // namespace

// ---------------------------------------------------------------------------

BoundaryParameter BoundaryParameter::robin(Complex theta, Index m, std::string label) {
  BoundaryParameter p;
  p.b1 = ComplexMatrix::Identity(m, m);
  p.b2 = theta * ComplexMatrix::Identity(m, m);
  p.label = label.empty() ? "theta*I" : std::move(label);
  return p;
}

BoundaryParameter BoundaryParameter::dirichlet(Index m) {
  BoundaryParameter p;
  p.b1 = ComplexMatrix::Identity(m, m);
  p.b2 = ComplexMatrix::Zero(m, m);
  p.label = "dirichlet";
  return p;
}

BoundaryParameter BoundaryParameter::single(ComplexMatrix b, std::string label) {
  BoundaryParameter p;
  p.b1 = ComplexMatrix::Identity(b.rows(), b.rows());
  p.b2 = std::move(b);
  p.label = label.empty() ? "B" : std::move(label);
  return p;
}

BoundaryParameter BoundaryParameter::factored(ComplexMatrix b1, ComplexMatrix b2,
                                              std::string label) {
  BoundaryParameter p;
  p.b1 = std::move(b1);
  p.b2 = std::move(b2);
  p.label = label.empty() ? "B1*B2" : std::move(label);
  return p;
}

void BoundaryParameter::validate(Index m) const {
  if (b1.rows() != m || b1.cols() != m || b2.rows() != m || b2.cols() != m) {
    throw ShapeError("BoundaryParameter: shapes must match the boundary space");
  }
  if (!all_finite(b1) || !all_finite(b2)) {
    throw ShapeError("BoundaryParameter: entries must be finite");
  }
}

// ---------------------------------------------------------------------------

ComplexMatrix ab_stack(const TripleModel& model, const BoundaryParameter& param,
                       Complex lambda) {
  param.validate(model.m());
  ComplexMatrix s(model.n() + model.m(), model.dim_d());
  s << model.op_t() - lambda * model.embed(), model.g0() - param.product() * model.g1();
  return s;
}

ComplexMatrix abt_stack(const TripleModel& model, const BoundaryParameter& param,
                        Complex mu) {
  param.validate(model.m());
  ComplexMatrix s(model.n() + model.m(), model.dim_dt());
  s << model.op_tt() - mu * model.embed_t(), model.g0t() - param.product() * model.g1t();
  return s;
}

RestrictedSolve ab_resolvent_solve(const TripleModel& model, const BoundaryParameter& param,
                                   Complex lambda, const ComplexVector& h) {
  if (h.size() != model.n()) throw ShapeError("ab_resolvent_solve: rhs dimension mismatch");
  RestrictedSolve out;
  auto lu = lu_or_throw(ab_stack(model, param, lambda), lambda,
                        "ab_resolvent_direct: lambda in sigma(A_B) or boundary condition degenerate",
                        tol::kResolventRcond, &out.rcond);
  ComplexVector rhs = ComplexVector::Zero(model.n() + model.m());
  rhs.head(model.n()) = h;
  out.f_dom = lu.solve(rhs);
  out.u = model.embed() * out.f_dom;
  return out;
}

ComplexVector ab_resolvent_direct(const TripleModel& model, const BoundaryParameter& param,
                                  Complex lambda, const ComplexVector& h) {
  return ab_resolvent_solve(model, param, lambda, h).u;
}

namespace {

ComplexMatrix resolvent_matrix_impl(const ComplexMatrix& stack, const ComplexMatrix& emb,
                                    Index n, Index m, Complex point, const char* what) {
  auto lu = lu_or_throw(stack, point, what, tol::kResolventRcond);
  ComplexMatrix rhs = ComplexMatrix::Zero(n + m, n);
  rhs.topRows(n).setIdentity();
  return emb * lu.solve(rhs);
}

}  // namespace

ComplexMatrix ab_resolvent_matrix(const TripleModel& model, const BoundaryParameter& param,
                                  Complex lambda) {
  return resolvent_matrix_impl(ab_stack(model, param, lambda), model.embed(), model.n(),
                               model.m(), lambda,
                               "ab_resolvent_matrix: lambda in sigma(A_B) or boundary condition degenerate");
}

ComplexMatrix abt_resolvent_matrix(const TripleModel& model, const BoundaryParameter& param,
                                   Complex mu) {
  return resolvent_matrix_impl(abt_stack(model, param, mu), model.embed_t(), model.n(),
                               model.m(), mu,
                               "abt_resolvent_matrix: mu in sigma(A~_B) or boundary condition degenerate");
}

// ---------------------------------------------------------------------------

BirmanSchwinger bs_test(const TripleModel& model, const BoundaryParameter& param,
                        Complex lambda, double tol_) {
  param.validate(model.m());
  const Index n = model.n();
  const Index m = model.m();
  const RawSample raw = spectral_raw(model, lambda);  // throws outside rho(A0)

  BirmanSchwinger out;
  const ComplexMatrix bs_op =
      ComplexMatrix::Identity(m, m) - param.b2 * raw.weyl * param.b1;
  out.kernel = null_basis(bs_op, tol_);
  out.kernel_dim = out.kernel.cols();
  out.is_eigenvalue = out.kernel_dim > 0;
  if (!out.is_eigenvalue) return out;

  // Eigenvector reconstruction: f = gamma(lambda) B1 phi, i.e. the stacked
  // solve with boundary data B1 phi.
  auto lu = lu_or_throw(model.plain_stack(lambda), lambda, "bs_test", tol::kResolventRcond);
  ComplexMatrix rhs = ComplexMatrix::Zero(n + m, out.kernel_dim);
  rhs.bottomRows(m) = param.b1 * out.kernel;
  const ComplexMatrix f = lu.solve(rhs);
  out.eigenvectors = model.embed() * f;

  const double op_scale =
      operand_scale({model.op_t().norm(), std::abs(lambda) * model.embed().norm()});
  const ComplexMatrix b = param.product();
  for (Index k = 0; k < out.kernel_dim; ++k) {
    const ComplexVector fk = f.col(k);
    const double opres = ((model.op_t() - lambda * model.embed()) * fk).norm();
    const ComplexVector bc = b * (model.g1() * fk) - model.g0() * fk;
    const double bcres = bc.norm() / std::max((model.g0() * fk).norm(), 1e-300);
    out.max_operator_residual = std::max(out.max_operator_residual, rel(opres, op_scale));
    out.max_boundary_residual = std::max(out.max_boundary_residual, bcres);
    const double nrm = model.space_h().norm(out.eigenvectors.col(k));
    if (nrm > 0) out.eigenvectors.col(k) /= nrm;
  }
  return out;
}

// ---------------------------------------------------------------------------

ComplexVector krein_resolvent(const TripleModel& model, const BoundaryParameter& param,
                              Complex lambda, const ComplexVector& h) {
  param.validate(model.m());
  if (h.size() != model.n()) throw ShapeError("krein_resolvent: rhs dimension mismatch");
  const Index n = model.n();
  const Index m = model.m();

  auto lu = lu_or_throw(model.plain_stack(lambda), lambda,
                        "krein_resolvent: lambda outside rho(A0)", tol::kResolventRcond);

  // (A0 - lambda)^{-1} h and gamma~(conj lambda)^* h = G1 (A0 - lambda)^{-1} h.
  ComplexVector rhs = ComplexVector::Zero(n + m);
  rhs.head(n) = h;
  const ComplexVector f0 = lu.solve(rhs);
  const ComplexVector u0 = model.embed() * f0;
  const ComplexVector w = model.g1() * f0;

  // Birman-Schwinger inverse in the boundary space.
  ComplexMatrix weyl_rhs = ComplexMatrix::Zero(n + m, m);
  weyl_rhs.bottomRows(m).setIdentity();
  const ComplexMatrix weyl_raw = model.g1() * lu.solve(weyl_rhs);
  const ComplexMatrix bs_op =
      ComplexMatrix::Identity(m, m) - param.b2 * weyl_raw * param.b1;
  Eigen::PartialPivLU<ComplexMatrix> bs_lu(bs_op);
  if (m > 0 && !(safe_rcond(bs_lu) > tol::kResolventRcond)) {
    throw SingularMatrixError("krein_resolvent: lambda in sigma_p(A_{B1B2})",
                              safe_rcond(bs_lu));
  }
  const ComplexVector phi = param.b1 * bs_lu.solve(param.b2 * w);

  ComplexVector rhs2 = ComplexVector::Zero(n + m);
  rhs2.tail(m) = phi;
  return u0 + model.embed() * lu.solve(rhs2);
}

// ---------------------------------------------------------------------------

KreinHypotheses krein_hypotheses(const TripleModel& model, const BoundaryParameter& param,
                                 Complex lambda) {
  param.validate(model.m());
  KreinHypotheses rep;
  const RawSample raw = spectral_raw(model, lambda);
  const ComplexMatrix op = param.b2 * raw.weyl * param.b1;

  rep.distance_to_one = std::numeric_limits<double>::infinity();
  for (Complex ev : eigenvalues(op)) {
    rep.distance_to_one = std::min(rep.distance_to_one, std::abs(1.0 - ev));
  }
  if (model.m() == 0) rep.distance_to_one = 1.0;
  Eigen::PartialPivLU<ComplexMatrix> lu(
      (ComplexMatrix::Identity(model.m(), model.m()) - op).eval());
  rep.bs_invertible = model.m() == 0 || safe_rcond(lu) > tol::kResolventRcond;

  rep.rank_g0 = rank(model.g0(), tol::kRank);
  rep.rank_g1 = rank(model.g1(), tol::kRank);
  const bool g0_full = rep.rank_g0 == model.m();

  rep.conditions.push_back({"one_in_resolvent",
                            "1 notin spec(B2 M(lambda) B1); distance " +
                                std::to_string(rep.distance_to_one),
                            rep.bs_invertible});
  rep.conditions.push_back({"range_b2mb1",
                            "ran(B2 M B1) in ran(G0) ∩ dom(B1): automatic, matrices are "
                            "everywhere defined and rank G0 = m is " +
                                std::string(g0_full ? "true" : "false"),
                            g0_full});
  rep.conditions.push_back({"range_b1",
                            "ran(B1 | ran G0) in ran(G0): automatic for full-rank G0",
                            g0_full});
  rep.conditions.push_back({"range_b2",
                            "ran(B2 | ran G1) in ran(G0): automatic for full-rank G0",
                            g0_full});
  rep.conditions.push_back({"domain_b1b2",
                            "ran(G1 | ker G0) in dom(B1 B2): automatic, B1 B2 is a matrix",
                            true});
  rep.all_hold = rep.bs_invertible && g0_full;
  return rep;
}

// ---------------------------------------------------------------------------

double adjoint_duality_check(const TripleModel& model, const BoundaryParameter& param,
                             const BoundaryParameter& param_t, Complex lambda) {
  param.validate(model.m());
  param_t.validate(model.m());
  const ComplexMatrix b = param.product();
  const ComplexMatrix bt = param_t.product();
  const ComplexMatrix b_adj = weighted_adjoint(b, model.space_g(), model.space_g());
  const double pair_defect = rel((bt - b_adj).norm(), operand_scale({b.norm(), bt.norm()}));
  if (model.m() > 0 && !(pair_defect <= tol::kDualityPairing)) {
    throw ContractError("adjoint_duality_check: parameters are not weighted adjoints "
                        "of each other (defect " +
                        std::to_string(pair_defect) + ")");
  }

  const ComplexMatrix r = ab_resolvent_matrix(model, param, lambda);
  const ComplexMatrix rt = abt_resolvent_matrix(model, param_t, std::conj(lambda));
  const ComplexMatrix rt_adj = weighted_adjoint(rt, model.space_h(), model.space_h());
  return rel((r - rt_adj).norm(), operand_scale({r.norm(), rt_adj.norm()}));
}

// ---------------------------------------------------------------------------

namespace {

// log det(I - B2 M(lambda) B1) up to branch; ratios of determinants are
// recovered via exp of differences, which is overflow-safe and kills the
// 2 pi k ambiguity.
class DetEvaluator {
 public:
  DetEvaluator(const TripleModel& model, const BoundaryParameter& param)
      : model_(model), param_(param) {}

  // Returns false when lambda leaves rho(A0) (stacked matrix singular).
  bool logdet(Complex lambda, Complex* out) const {
    Eigen::PartialPivLU<ComplexMatrix> lu(model_.plain_stack(lambda));
    if (!(safe_rcond(lu) > tol::kResolventRcond)) return false;
    const Index n = model_.n();
    const Index m = model_.m();
    ComplexMatrix rhs = ComplexMatrix::Zero(n + m, m);
    rhs.bottomRows(m).setIdentity();
    const ComplexMatrix weyl = model_.g1() * lu.solve(rhs);
    const ComplexMatrix bs =
        ComplexMatrix::Identity(m, m) - param_.b2 * weyl * param_.b1;
    Eigen::PartialPivLU<ComplexMatrix> bs_lu(bs);
    Complex acc = 0.0;
    const auto& u = bs_lu.matrixLU();
    for (Index i = 0; i < m; ++i) {
      const Complex d = u(i, i);
      if (d == Complex(0.0)) {
        *out = Complex(-std::numeric_limits<double>::infinity(), 0.0);
        return true;
      }
      acc += std::log(d);
    }
    // Permutation signs only flip the determinant's sign; fold into Im(log).
    if (Complex(bs_lu.permutationP().determinant()) == Complex(-1.0)) {
      acc += Complex(0.0, std::numbers::pi);
    }
    *out = acc;
    return true;
  }

  double bs_sigma_min(Complex lambda) const {
    const RawSample raw = spectral_raw(model_, lambda);
    const ComplexMatrix bs = ComplexMatrix::Identity(model_.m(), model_.m()) -
                             param_.b2 * raw.weyl * param_.b1;
    Eigen::JacobiSVD<ComplexMatrix> svd(bs);
    return svd.singularValues().size() > 0 ? svd.singularValues().minCoeff() : 1.0;
  }

 private:
  const TripleModel& model_;
  const BoundaryParameter& param_;
};

}  // namespace

EigenvalueSearchResult eigenvalue_search(const TripleModel& model,
                                         const BoundaryParameter& param,
                                         const SearchRegion& region, int grid,
                                         double newton_tol) {
  param.validate(model.m());
  if (grid < 2) throw ContractError("eigenvalue_search: grid must be at least 2");
  if (!(newton_tol > 0)) throw ContractError("eigenvalue_search: newton_tol must be positive");

  EigenvalueSearchResult result;
  const std::vector<Complex> sigma_a0 = a0_spectrum(model);
  for (Complex z : sigma_a0) {
    if (region.contains(z, tol::kSpectralMargin)) result.a0_points.push_back(z);
  }
  if (!result.a0_points.empty()) {
    result.warnings.push_back("region touches sigma(A0) at " +
                              std::to_string(result.a0_points.size()) +
                              " pencil points; seeds within margin " +
                              std::to_string(tol::kSpectralMargin) + " are skipped");
  }
  auto near_a0 = [&](Complex z) {
    for (Complex s : result.a0_points) {
      if (std::abs(z - s) < tol::kSpectralMargin) return true;
    }
    return false;
  };

  // d(lambda) has poles at sigma(A0) interlaced with its roots, which traps
  // Newton between a pole and the root behind it. Work with the cleared
  // function e(z) = d(z) * prod (z - a0_j) over the A0 points near the
  // region; its log-derivative is pole-free.
  const double pad =
      0.1 * std::hypot(region.re_max - region.re_min, region.im_max - region.im_min) + 1.0;
  std::vector<Complex> clear_points;
  for (Complex z : sigma_a0) {
    if (region.contains(z, pad)) clear_points.push_back(z);
  }

  const DetEvaluator det(model, param);
  std::vector<Complex> roots;

  auto cleared_logdet = [&](Complex z, Complex* out) {
    Complex ld;
    if (!det.logdet(z, &ld)) return false;
    for (Complex s : clear_points) {
      const Complex dz = z - s;
      if (std::abs(dz) < 1e-13) return false;
      ld += std::log(dz);
    }
    *out = ld;
    return true;
  };

  const double dre = (region.re_max - region.re_min) / (grid - 1);
  const double dim_ = (region.im_max - region.im_min) / (grid - 1);
  const double slack = 1e-6 * (1.0 + std::max(std::abs(region.re_max), std::abs(region.im_max)));

  // Scan-and-polish rounds: each round deflates the roots found so far, so
  // minima hidden behind earlier basins surface in the rescan.
  for (int round = 0; round < 3; ++round) {
    Eigen::MatrixXd mag(grid, grid);
    mag.setConstant(std::numeric_limits<double>::infinity());
    for (int a = 0; a < grid; ++a) {
      for (int b = 0; b < grid; ++b) {
        const Complex z(region.re_min + a * dre, region.im_min + b * dim_);
        if (near_a0(z)) continue;
        Complex ld;
        if (!cleared_logdet(z, &ld)) continue;
        double v = ld.real();
        for (Complex r : roots) v -= std::log(std::max(std::abs(z - r), 1e-300));
        mag(a, b) = v;
      }
    }
    std::vector<std::pair<double, Complex>> seeds;
    for (int a = 0; a < grid; ++a) {
      for (int b = 0; b < grid; ++b) {
        if (std::isinf(mag(a, b)) && mag(a, b) > 0) continue;
        bool is_min = true;
        for (int da = -1; da <= 1 && is_min; ++da) {
          for (int db = -1; db <= 1 && is_min; ++db) {
            if (da == 0 && db == 0) continue;
            const int na = a + da, nb = b + db;
            if (na < 0 || nb < 0 || na >= grid || nb >= grid) continue;
            if (mag(na, nb) < mag(a, b)) is_min = false;
          }
        }
        if (is_min) {
          seeds.emplace_back(mag(a, b),
                             Complex(region.re_min + a * dre, region.im_min + b * dim_));
        }
      }
    }
    std::sort(seeds.begin(), seeds.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    bool found_new = false;
    for (const auto& [val, seed] : seeds) {
      (void)val;
      Complex z = seed;
      bool converged = false;
      for (int it = 0; it < 100; ++it) {
        const double step = 1e-6 * (1.0 + std::abs(z));
        Complex ld0, ldp, ldm;
        if (!cleared_logdet(z, &ld0) || !cleared_logdet(z + step, &ldp) ||
            !cleared_logdet(z - step, &ldm)) {
          break;
        }
        // e'/e from determinant ratios (branch-safe under exp).
        const Complex dlog = (std::exp(ldp - ld0) - std::exp(ldm - ld0)) / (2.0 * step);
        // Deflation: Newton on e(z) / prod (z - r_j).
        Complex defl = 0.0;
        bool at_root = false;
        for (Complex r : roots) {
          const Complex dz = z - r;
          if (std::abs(dz) < 1e-14) {
            at_root = true;
            break;
          }
          defl += 1.0 / dz;
        }
        if (at_root) break;
        const Complex denom = dlog - defl;
        if (!(std::abs(denom) > 0) || !std::isfinite(std::abs(denom))) break;
        const Complex dz = -1.0 / denom;
        z += dz;
        if (!region.contains(z, 0.5 * std::max(region.re_max - region.re_min, 1.0))) break;
        if (std::abs(dz) <= newton_tol * (1.0 + std::abs(z))) {
          converged = true;
          break;
        }
      }
      if (!converged) continue;
      if (!region.contains(z, slack) || near_a0(z)) continue;
      bool duplicate = false;
      for (Complex r : roots) {
        if (std::abs(z - r) <= 100 * newton_tol * (1.0 + std::abs(z))) duplicate = true;
      }
      if (duplicate) continue;
      roots.push_back(z);
      found_new = true;
    }
    if (!found_new) break;
  }

  if (roots.empty()) {
    result.warnings.push_back("no Newton seed converged inside the region");
  }

  // Robin pencil for cross-validation.
  const std::vector<Complex> pencil = ab_spectrum(model, param);

  std::sort(roots.begin(), roots.end(), lex_less);
  for (Complex r : roots) {
    EigenvalueHit hit;
    hit.lambda = r;
    hit.bs_residual = det.bs_sigma_min(r);
    hit.pencil_distance = std::numeric_limits<double>::infinity();
    int mult = 0;
    for (Complex p : pencil) {
      const double d = std::abs(p - r);
      hit.pencil_distance = std::min(hit.pencil_distance, d);
      if (d <= tol::kBsMatch) ++mult;
    }
    hit.multiplicity = std::max(1, mult);
    if (hit.pencil_distance <= tol::kBsMatch) {
      result.roots.push_back(hit);
    } else {
      result.warnings.push_back("discarded det root without pencil counterpart at (" +
                                std::to_string(r.real()) + ", " + std::to_string(r.imag()) +
                                "), distance " + std::to_string(hit.pencil_distance));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

void VerificationReport::add(std::string name, std::string detail, double defect,
                             double tolerance) {
  entries.push_back({std::move(name), std::move(detail), defect, tolerance,
                     defect <= tolerance});
}

bool VerificationReport::pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const VerificationEntry& e) { return e.pass; });
}

VerificationReport symmetric_suite(const TripleModel& model,
                                   const std::vector<Complex>& probes) {
  if (!model.symmetric()) {
    throw ContractError("symmetric_suite: model is not flagged symmetric");
  }
  VerificationReport rep;
  rep.model_descriptor = model.info().descriptor;
  rep.probes = probes;
  if (model.info().lambda0) rep.lambda0 = *model.info().lambda0;

  const ComplexMatrix& wh = model.space_h().gram();
  for (Complex l : probes) {
    const std::string at = " at lambda=(" + std::to_string(l.real()) + "," +
                           std::to_string(l.imag()) + ")";
    const SpectralSample gl = gamma(model, l);
    rep.max_cond_stack = std::max(rep.max_cond_stack, gl.cond_stack);

    if (l.imag() != 0.0) {
      const SpectralSample glc = gamma(model, std::conj(l));
      const double msym = rel((glc.weyl - gl.weyl.adjoint()).norm(),
                              operand_scale({gl.weyl.norm()}));
      rep.add("msym" + at, "M(conj lambda) = M(lambda)^*", msym, tol::kMSym);

      // Im M(lambda)/Im lambda = gamma(lambda)^* gamma(lambda), PSD.
      const ComplexMatrix imm = (gl.weyl - gl.weyl.adjoint()) / Complex(0.0, 2.0);
      const ComplexMatrix target = gl.gamma.adjoint() * wh * gl.gamma;
      const double dimm = rel((imm / l.imag() - target).norm(),
                              operand_scale({target.norm()}));
      rep.add("imweyl" + at, "Im M(lambda)/Im lambda = gamma^* gamma", dimm,
              tol::kGammaWeyl);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
          ((imm / l.imag() + (imm / l.imag()).adjoint()) / 2.0).eval());
      const double mineig = es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 0.0;
      const double scale = std::max(target.norm(), 1.0);
      rep.add("imweyl_psd" + at, "Im M(lambda)/Im lambda is PSD",
              std::max(0.0, -mineig / scale), tol::kPsd);
    } else {
      // Real spectral points of a symmetric model: M(lambda) Hermitian.
      const double dherm = rel((gl.weyl - gl.weyl.adjoint()).norm() / 2.0,
                               operand_scale({gl.weyl.norm(), 1.0}));
      rep.add("imweyl_real" + at, "Im M(lambda) = 0 at real lambda", dherm, tol::kPsd);
    }

    rep.add("gamma_star" + at, "gamma(lambda)^* = G1 (A0 - conj lambda)^{-1}",
            gamma_star_check(model, l), tol::kGammaWeyl);
  }

  // Self-adjointness of A_B for a Hermitian Robin parameter.
  const BoundaryParameter robin = BoundaryParameter::robin(1.0, model.m());
  for (Complex l : probes) {
    if (l.imag() == 0.0) continue;
    const std::string at = " at lambda=(" + std::to_string(l.real()) + "," +
                           std::to_string(l.imag()) + ")";
    rep.add("ab_selfadjoint" + at,
            "(A_B - lambda)^{-1} = [(A_B - conj lambda)^{-1}]^* for Hermitian B",
            adjoint_duality_check(model, robin, robin, l), tol::kDuality);
    break;  // one probe suffices; the duality suite covers the rest
  }
  return rep;
}

TripleModel swap_boundary_maps(const TripleModel& model, Complex lambda0) {
  ModelInfo info = model.info();
  info.descriptor += " (swapped)";
  info.lambda0 = lambda0;
  TripleModel swapped = TripleModel::build(
      model.space_h(), model.space_g(), model.embed(), model.embed_t(), model.op_t(),
      model.op_tt(), model.g1(), -model.g0(), model.g1t(), -model.g0t(), info);
  const MaximalityCertificate cert = check_maximality(swapped, lambda0);
  if (!cert.ok) {
    throw ConstructionError("swap_boundary_maps: condition (M) for the swapped triple",
                            cert.defect_adjoint);
  }
  return swapped;
}

// ---------------------------------------------------------------------------

std::vector<Complex> a0_spectrum(const TripleModel& model) {
  ComplexMatrix e = ComplexMatrix::Zero(model.n() + model.m(), model.dim_d());
  e.topRows(model.n()) = model.embed();
  ComplexMatrix a(model.n() + model.m(), model.dim_d());
  a << model.op_t(), model.g0();
  return pencil_eigenvalues(a, e).finite;
}

std::vector<Complex> a0t_spectrum(const TripleModel& model) {
  ComplexMatrix e = ComplexMatrix::Zero(model.n() + model.m(), model.dim_dt());
  e.topRows(model.n()) = model.embed_t();
  ComplexMatrix a(model.n() + model.m(), model.dim_dt());
  a << model.op_tt(), model.g0t();
  return pencil_eigenvalues(a, e).finite;
}

std::vector<Complex> ab_spectrum(const TripleModel& model, const BoundaryParameter& param) {
  ComplexMatrix e = ComplexMatrix::Zero(model.n() + model.m(), model.dim_d());
  e.topRows(model.n()) = model.embed();
  return pencil_eigenvalues(ab_stack(model, param, 0.0), e).finite;
}

std::vector<Complex> standard_probes(const TripleModel& model, double margin) {
  const std::vector<Complex> base = {{-1.0, 0.0}, {0.0, 2.0}, {1.0, 1.0},
                                     {-3.0, -1.0}, {0.0, 0.5}};
  const std::vector<Complex> sp = a0_spectrum(model);
  const std::vector<Complex> spt = a0t_spectrum(model);
  std::vector<Complex> out;
  for (Complex p : base) {
    bool ok = true;
    for (Complex s : sp) {
      if (std::abs(p - s) < margin) ok = false;
    }
    for (Complex s : spt) {
      if (std::abs(std::conj(p) - s) < margin) ok = false;
    }
    if (ok) out.push_back(p);
  }
  return out;
}

}  // namespace qbt
