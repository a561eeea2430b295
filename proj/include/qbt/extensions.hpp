#pragma once

#include "qbt/triple.hpp"

#include <string>
#include <vector>

namespace qbt {

// ---------------------------------------------------------------------------
// Boundary parameter acting on G in raw coordinates. The boundary condition
// reads B1 B2 G1 f = G0 f; the single-parameter condition B G1 f = G0 f is
// b1 = I. The factored form is first-class because the Krein formula places
// B1 and B2 on different sides of the inverse.
struct BoundaryParameter {
  ComplexMatrix b1;
  ComplexMatrix b2;
  std::string label;

  static BoundaryParameter robin(Complex theta, Index m, std::string label = {});
  static BoundaryParameter dirichlet(Index m);  // (I, 0): reproduces A0
  static BoundaryParameter single(ComplexMatrix b, std::string label = {});
  static BoundaryParameter factored(ComplexMatrix b1, ComplexMatrix b2,
                                    std::string label = {});

  ComplexMatrix product() const { return b1 * b2; }
  void validate(Index m) const;
};

// ---------------------------------------------------------------------------
// Restricted operators A_{B1B2}: stacked system [T - lambda embed; G0 - B1B2 G1].

ComplexMatrix ab_stack(const TripleModel& model, const BoundaryParameter& param,
                       Complex lambda);
ComplexMatrix abt_stack(const TripleModel& model, const BoundaryParameter& param,
                        Complex mu);

// (A_{B1B2} - lambda)^{-1} h by the direct stacked solve.
ComplexVector ab_resolvent_direct(const TripleModel& model, const BoundaryParameter& param,
                                  Complex lambda, const ComplexVector& h);

// Same solve, keeping the carrier solution (for boundary-residual checks).
struct RestrictedSolve {
  ComplexVector f_dom;
  ComplexVector u;
  double rcond = 0.0;
};
RestrictedSolve ab_resolvent_solve(const TripleModel& model, const BoundaryParameter& param,
                                   Complex lambda, const ComplexVector& h);

// Full resolvent matrices on H, assembled columnwise from one factorization.
ComplexMatrix ab_resolvent_matrix(const TripleModel& model, const BoundaryParameter& param,
                                  Complex lambda);
ComplexMatrix abt_resolvent_matrix(const TripleModel& model,
                                   const BoundaryParameter& param, Complex mu);

// ---------------------------------------------------------------------------
// Birman-Schwinger test at lambda in rho(A0): lambda is an eigenvalue of
// A_{B1B2} iff ker(I - B2 M(lambda) B1) != {0}; eigenvectors are recovered
// through the gamma-field from kernel vectors phi via G0 f = B1 phi.
struct BirmanSchwinger {
  bool is_eigenvalue = false;
  Index kernel_dim = 0;
  ComplexMatrix kernel;        // m x k kernel vectors phi
  ComplexMatrix eigenvectors;  // n x k reconstructed eigenvectors (W_H-normalized)
  double max_operator_residual = 0.0;  // ||(T - lambda iota) f|| / scale
  double max_boundary_residual = 0.0;  // ||B1 B2 G1 f - G0 f|| / ||G0 f||
};

BirmanSchwinger bs_test(const TripleModel& model, const BoundaryParameter& param,
                        Complex lambda, double tol = tol::kRank);

// ---------------------------------------------------------------------------
// Krein-type resolvent formula
//   (A_{B1B2}-l)^{-1} h = (A0-l)^{-1} h
//       + gamma(l) B1 (I - B2 M(l) B1)^{-1} B2 gamma~(conj l)^* h,
// with gamma~(conj l)^* h = G1 (A0 - l)^{-1} h. Agrees with the direct solve
// whenever both are defined.
ComplexVector krein_resolvent(const TripleModel& model, const BoundaryParameter& param,
                              Complex lambda, const ComplexVector& h);

// ---------------------------------------------------------------------------
// Hypothesis report for the closedness/Krein theorem: in the finite model the
// range and domain conditions hold automatically for everywhere-defined
// matrices; the only quantitative condition is 1 notin spec(B2 M(lambda) B1).
struct HypothesisEntry {
  std::string name;
  std::string detail;
  bool holds = false;
};

struct KreinHypotheses {
  bool bs_invertible = false;   // condition (i)
  double distance_to_one = 0.0; // min |1 - eig(B2 M B1)|
  Index rank_g0 = 0;            // discharges the range conditions
  Index rank_g1 = 0;
  std::vector<HypothesisEntry> conditions;
  bool all_hold = false;
};

KreinHypotheses krein_hypotheses(const TripleModel& model, const BoundaryParameter& param,
                                 Complex lambda);

// ---------------------------------------------------------------------------
// Adjoint duality: with (B1 B2 phi, psi)_G = (phi, B1' B2' psi)_G the
// restricted operators satisfy A_{B1B2} = (A~_{B1'B2'})^*; the defect compares
// (A_{B1B2}-l)^{-1} with the weighted adjoint of (A~_{B1'B2'}-conj l)^{-1}.
// Throws ContractError when the parameter pairing precondition fails.
double adjoint_duality_check(const TripleModel& model, const BoundaryParameter& param,
                             const BoundaryParameter& param_t, Complex lambda);

// ---------------------------------------------------------------------------
// Eigenvalue search: Newton on d(lambda) = det(I - B2 M(lambda) B1) seeded
// from a grid scan of the region, with deflation of located roots, and
// cross-validation of every root against the direct pencil
// ([T; G0 - B1B2 G1], [embed; 0]).

struct SearchRegion {
  double re_min = 0, re_max = 0, im_min = 0, im_max = 0;
  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack &&
           z.imag() >= im_min - slack && z.imag() <= im_max + slack;
  }
};

struct EigenvalueHit {
  Complex lambda;
  int multiplicity = 1;       // kernel dimension of the BS operator at the root
  double bs_residual = 0.0;   // sigma_min(I - B2 M B1)
  double pencil_distance = 0.0;
};

struct EigenvalueSearchResult {
  std::vector<EigenvalueHit> roots;  // sorted lexicographically by (re, im)
  std::vector<Complex> a0_points;    // sigma(A0) points inside the region (excluded)
  std::vector<std::string> warnings;
};

EigenvalueSearchResult eigenvalue_search(const TripleModel& model,
                                         const BoundaryParameter& param,
                                         const SearchRegion& region, int grid,
                                         double newton_tol = 1e-11);

// ---------------------------------------------------------------------------
// Verification report: one entry per identity, with defect and tolerance.

struct VerificationEntry {
  std::string name;
  std::string detail;  // the identity being checked, in formula form
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string model_descriptor;
  std::vector<VerificationEntry> entries;
  Complex lambda0;
  std::vector<Complex> probes;
  double max_cond_stack = 1.0;

  void add(std::string name, std::string detail, double defect, double tolerance);
  bool pass() const;
};

// Symmetric specialization checks (requires model.symmetric()):
//   M(conj l) = M(l)^*, Im M(l) = Im l * gamma(l)^* gamma(l) with PSD check,
//   gamma^* identity with tilde = plain, and A_B self-adjointness for
//   Hermitian B. Throws ContractError on non-symmetric models.
VerificationReport symmetric_suite(const TripleModel& model,
                                   const std::vector<Complex>& probes);

// The triple {G, (G1, -G0), (G1t, -G0t)}; valid whenever rank G1 = m, with
// condition (M) for the swapped Dirichlet operator re-certified at lambda0.
TripleModel swap_boundary_maps(const TripleModel& model, Complex lambda0);

// Standard probe set {-1, 2i, 1+i, -3-i, 0.5i}, filtered so that every probe
// keeps the stated margin from both pencil spectra.
std::vector<Complex> standard_probes(const TripleModel& model,
                                     double margin = tol::kSpectralMargin);

// sigma(A0) as a pencil spectrum (finite part).
std::vector<Complex> a0_spectrum(const TripleModel& model);
std::vector<Complex> a0t_spectrum(const TripleModel& model);
std::vector<Complex> ab_spectrum(const TripleModel& model, const BoundaryParameter& param);

}  // namespace qbt
