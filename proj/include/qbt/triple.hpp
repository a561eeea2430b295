#pragma once

#include "qbt/numcore.hpp"

#include <optional>
#include <string>

namespace qbt {

// Metadata attached to a model by its builder.
struct ModelInfo {
  std::string kind = "custom";        // sl1d | cd1d | elliptic2d | synthetic | custom
  std::string descriptor = "custom";  // human-readable, e.g. "sl1d N=16"
  bool symmetric = false;             // tilde side equals plain side entrywise
  std::optional<Complex> lambda0;     // certified condition-(M) witness
  double green_defect = 0.0;          // set by build()
};

// ---------------------------------------------------------------------------
// TripleModel: finite realization of a boundary triple for an adjoint pair.
//
// State space H (dim n, Gram W_H), boundary space G (dim m, Gram W_G). Two
// domain carriers of dimension n + m are mapped into H by the embeddings
// `embed` / `embed_t`; T, T~ act from the carriers into H; the boundary maps
// G0, G1 (and G0t, G1t) act from the carriers into G.
//
// Structural invariants enforced by build():
//   * Green matrix identity, exactly (defect <= 1e-12 * scale):
//       embed_t^H W_H T - Tt^H W_H embed = G0t^H W_G G1 - G1t^H W_G G0
//   * [embed; G0] and [embed_t; G0t] are square and invertible, so every
//     resolvent and gamma-field below is a single LU solve;
//   * rank G0 = rank G0t = m.
class TripleModel {
 public:
  static TripleModel build(WeightedSpace space_h, WeightedSpace space_g,
                           ComplexMatrix embed, ComplexMatrix embed_t,
                           ComplexMatrix op_t, ComplexMatrix op_tt,
                           ComplexMatrix g0, ComplexMatrix g1,
                           ComplexMatrix g0t, ComplexMatrix g1t,
                           ModelInfo info = {});

  const WeightedSpace& space_h() const { return space_h_; }
  const WeightedSpace& space_g() const { return space_g_; }
  Index n() const { return space_h_.dim(); }
  Index m() const { return space_g_.dim(); }
  Index dim_d() const { return embed_.cols(); }
  Index dim_dt() const { return embed_t_.cols(); }

  const ComplexMatrix& embed() const { return embed_; }
  const ComplexMatrix& embed_t() const { return embed_t_; }
  const ComplexMatrix& op_t() const { return op_t_; }
  const ComplexMatrix& op_tt() const { return op_tt_; }
  const ComplexMatrix& g0() const { return g0_; }
  const ComplexMatrix& g1() const { return g1_; }
  const ComplexMatrix& g0t() const { return g0t_; }
  const ComplexMatrix& g1t() const { return g1t_; }

  const ModelInfo& info() const { return info_; }
  bool symmetric() const { return info_.symmetric; }

  // [T - lambda*embed; G0] and the tilde counterpart.
  ComplexMatrix plain_stack(Complex lambda) const;
  ComplexMatrix tilde_stack(Complex mu) const;

  // Matrix of A0 = T restricted to ker G0 (an operator on H), and of A0~.
  ComplexMatrix a0_matrix() const;
  ComplexMatrix a0t_matrix() const;

 private:
  TripleModel() = default;

  WeightedSpace space_h_ = WeightedSpace::euclidean(0);
  WeightedSpace space_g_ = WeightedSpace::euclidean(0);
  ComplexMatrix embed_, embed_t_, op_t_, op_tt_, g0_, g1_, g0t_, g1t_;
  ModelInfo info_;
};

// Relative defect of the Green matrix identity (residual norm over the max
// operand norm; 0 for the zero model).
double green_defect(const TripleModel& model);

// Same, for raw fields (used by build and by generators before a model exists).
double green_defect_raw(const WeightedSpace& wh, const WeightedSpace& wg,
                        const ComplexMatrix& embed, const ComplexMatrix& embed_t,
                        const ComplexMatrix& op_t, const ComplexMatrix& op_tt,
                        const ComplexMatrix& g0, const ComplexMatrix& g1,
                        const ComplexMatrix& g0t, const ComplexMatrix& g1t);

// ---------------------------------------------------------------------------
// Density / surjectivity report. In the finite model the density conditions
// degenerate to rank conditions: (D) <=> rank G0 = rank G0t = m, (DD) <=>
// the stacked maps [G0; G1], [G0t; G1t] have rank 2m. `ordinary` records
// surjectivity of the stacked maps (informational; equal to condition_dd).
struct DensityReport {
  Index rank_g0 = 0;
  Index rank_g0t = 0;
  Index rank_stack = 0;
  Index rank_stack_t = 0;
  bool condition_d = false;
  bool condition_dd = false;
  bool ordinary = false;
};

DensityReport check_density(const TripleModel& model, double tol = tol::kRank);

// ---------------------------------------------------------------------------
// Resolvents of A0 and A0~ via the square stacked solve.

struct ResolventAction {
  ComplexVector f_dom;  // carrier solution of the stacked system
  ComplexVector u;      // embed * f_dom, the element of H
  double rcond = 0.0;
};

ResolventAction a0_resolvent(const TripleModel& model, Complex lambda,
                             const ComplexVector& h);
ResolventAction a0t_resolvent(const TripleModel& model, Complex mu,
                              const ComplexVector& h);

// ---------------------------------------------------------------------------
// Condition (M) certificate: both stacked matrices invertible at lambda0 /
// conj(lambda0), and the matrix of A0~ equals the weighted adjoint of the
// matrix of A0.
struct MaximalityCertificate {
  bool ok = false;
  Complex lambda0;
  double defect_adjoint = 0.0;
  bool invertible_plain = false;
  bool invertible_tilde = false;
  double rcond_plain = 0.0;
  double rcond_tilde = 0.0;
};

MaximalityCertificate check_maximality(const TripleModel& model, Complex lambda0);

// Raw-field variant for data that may not satisfy the build invariants (the
// certificate needs no conormal maps). For any model passing build() with
// spanning Dirichlet kernels the adjoint defect is Green-implied and tiny;
// this overload is how genuinely broken boundary data can be diagnosed.
MaximalityCertificate check_maximality_raw(const WeightedSpace& wh,
                                           const ComplexMatrix& embed,
                                           const ComplexMatrix& embed_t,
                                           const ComplexMatrix& op_t,
                                           const ComplexMatrix& op_tt,
                                           const ComplexMatrix& g0,
                                           const ComplexMatrix& g0t, Complex lambda0);

// ---------------------------------------------------------------------------
// Minimal operators: S acts by T~ on ker G0t ∩ ker G1t, S~ acts by T on
// ker G0 ∩ ker G1. The pairing defect measures (S f, g)_H - (f, S~ g)_H over
// the basis vectors.
struct MinimalOperators {
  ComplexMatrix s_basis;    // dim_dt x k, orthonormal basis of ker G0t ∩ ker G1t
  ComplexMatrix s_action;   // n x k, T~ applied to the basis
  ComplexMatrix st_basis;   // dim_d x k2
  ComplexMatrix st_action;  // n x k2, T applied to the basis
  double adjoint_pair_defect = 0.0;
};

MinimalOperators minimal_operators(const TripleModel& model, double tol = tol::kRank);

// ---------------------------------------------------------------------------
// gamma-fields and Weyl functions.
//
// Boundary data run over the W_G-orthonormal basis Q = space_g.frame_basis():
// column j of `gamma` is the element of ker(T - lambda) whose G0-trace is the
// j-th basis vector, and `weyl` is the matrix of M(lambda) = G1 o gamma in
// that orthonormal frame. Hermitian-symmetry statements about `weyl` are
// therefore frame-independent.
struct SpectralSample {
  enum class Side { plain, tilde };
  Complex point;
  ComplexMatrix gamma;  // n x m
  ComplexMatrix weyl;   // m x m, orthonormal frame
  double cond_stack = 1.0;
  Side side = Side::plain;
};

SpectralSample gamma(const TripleModel& model, Complex lambda);
SpectralSample gamma_tilde(const TripleModel& model, Complex mu);

// Raw-coordinate spectral data: preimage F solves the stacked system with
// G0 * F = I (identity boundary data), gamma = embed * F, weyl = G1 * F.
// This is the representation boundary parameters B act on.
struct RawSample {
  Complex point;
  ComplexMatrix preimage;  // dim x m
  ComplexMatrix gamma;     // n x m
  ComplexMatrix weyl;      // m x m, raw boundary coordinates
  double cond_stack = 1.0;
};

RawSample spectral_raw(const TripleModel& model, Complex lambda);
RawSample spectral_raw_tilde(const TripleModel& model, Complex mu);

// ---------------------------------------------------------------------------
// Identity checks (all return relative defects).

// gamma(lambda)^* = G1t (A0~ - conj lambda)^{-1} and the tilde mirror.
double gamma_star_check(const TripleModel& model, Complex lambda);

// gamma(lambda) = (I + (lambda - nu)(A0 - lambda)^{-1}) gamma(nu), + mirror.
double gamma_shift_check(const TripleModel& model, Complex lambda, Complex nu);

// M(lambda) - M~(mu)^* = (lambda - conj mu) gamma~(mu)^* gamma(lambda)  (d1)
// M(lambda)^* - M~(mu) = (conj lambda - mu) gamma(lambda)^* gamma~(mu)  (d2)
struct WeylDefects {
  double d1 = 0.0;
  double d2 = 0.0;
};

WeylDefects weyl_identity_check(const TripleModel& model, Complex lambda, Complex mu);

// M(lambda) = M~(l0)^* + gamma~(l0)^* (lambda - conj l0)
//             (I + (lambda - l0)(A0 - lambda)^{-1}) gamma(l0), + mirror.
double weyl_representation_check(const TripleModel& model, Complex lambda,
                                 Complex lambda0);

}  // namespace qbt
