#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

namespace tol {
// Shape checks are exact; these are the numerical thresholds used
// throughout the library. Identities in this artifact hold exactly in
// exact arithmetic, so the tolerances sit near machine epsilon on purpose.
inline constexpr double kSolveRcond = 1e-14;      // solve() refusal threshold
inline constexpr double kResolventRcond = 1e-12;  // rho(A0) membership via stacked rcond
inline constexpr double kRank = 1e-10;            // default relative rank/null tolerance
inline constexpr double kGreen = 1e-12;           // Green identity defect (relative)
inline constexpr double kAdjoint = 1e-10;         // condition (M) adjoint defect
inline constexpr double kGammaWeyl = 1e-10;       // gamma-field / Weyl identity defects
inline constexpr double kMSym = 1e-11;            // M(conj l) = M(l)^* in the symmetric case
inline constexpr double kPsd = 1e-12;             // PSD slack for Im M / Im lambda
inline constexpr double kPairing = 1e-11;         // minimal-operator pairing defect
inline constexpr double kKrein = 1e-9;            // Krein formula vs direct solve
inline constexpr double kDuality = 1e-9;          // adjoint duality defect
inline constexpr double kDualityPairing = 1e-12;  // (B1B2)' = (B1B2)^* precondition
inline constexpr double kBsMatch = 1e-7;          // det roots vs pencil eigenvalues
inline constexpr double kOverlap = 1e-8;          // eigenvector overlap slack
inline constexpr double kSpectralMargin = 1e-3;   // probe distance to pencil spectra
}  // namespace tol

// ---------------------------------------------------------------------------
// Errors

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular or numerically singular linear system; carries the reciprocal
// condition estimate of the factorization.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double rcond)
      : std::runtime_error(what + " (rcond " + std::to_string(rcond) + ")"), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

// A spectral parameter fell outside the resolvent set of the operator the
// caller asked about (stacked matrix numerically singular).
class ResolventPointError : public std::runtime_error {
 public:
  ResolventPointError(const std::string& what, Complex point, double rcond)
      : std::runtime_error(what), point_(point), rcond_(rcond) {}
  Complex point() const { return point_; }
  double rcond() const { return rcond_; }

 private:
  Complex point_;
  double rcond_;
};

// A structural invariant failed while building a model; names the invariant
// and its defect value.
class ConstructionError : public std::runtime_error {
 public:
  ConstructionError(const std::string& invariant, double defect)
      : std::runtime_error("construction invariant violated: " + invariant +
                           " (defect " + std::to_string(defect) + ")"),
        invariant_(invariant),
        defect_(defect) {}
  const std::string& invariant() const { return invariant_; }
  double defect() const { return defect_; }

 private:
  std::string invariant_;
  double defect_;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation precondition (contract), e.g. passing a
// non-symmetric model to the symmetric suite.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// WeightedSpace: finite-dimensional complex inner-product space. The inner
// product is (x, y) = y^H * gram * x with gram Hermitian positive definite.

class WeightedSpace {
 public:
  explicit WeightedSpace(ComplexMatrix gram);

  static WeightedSpace euclidean(Index dim);
  static WeightedSpace diagonal(const Eigen::VectorXd& weights);

  Index dim() const { return gram_.rows(); }
  const ComplexMatrix& gram() const { return gram_; }

  Complex inner(const ComplexVector& x, const ComplexVector& y) const;
  double norm(const ComplexVector& x) const;

  // gram^{-1} * rhs via the cached Cholesky factorization.
  ComplexMatrix apply_inverse_gram(const ComplexMatrix& rhs) const;

  // gram = L L^H. frame() = L^H maps raw coordinates to coordinates in the
  // orthonormal basis whose columns are frame_basis() = L^{-H}.
  const ComplexMatrix& frame() const { return frame_; }
  const ComplexMatrix& frame_basis() const { return frame_basis_; }

 private:
  ComplexMatrix gram_;
  Eigen::LLT<ComplexMatrix> llt_;
  ComplexMatrix frame_;
  ComplexMatrix frame_basis_;
};

// ---------------------------------------------------------------------------
// Dense operations

// True if every entry is finite (no NaN/Inf).
bool all_finite(const ComplexMatrix& a);

// Adjoint of A : (in, W_in) -> (out, W_out) with respect to the weighted
// inner products: A* = W_in^{-1} A^H W_out, so (A x, y)_out = (x, A* y)_in.
ComplexMatrix weighted_adjoint(const ComplexMatrix& a, const WeightedSpace& w_out,
                               const WeightedSpace& w_in);

struct SolveResult {
  ComplexMatrix x;
  double rcond = 0.0;
};

// LU solve with partial pivoting; refuses numerically singular systems
// (reciprocal condition below min_rcond).
SolveResult solve_with_rcond(const ComplexMatrix& a, const ComplexMatrix& b,
                             double min_rcond = tol::kSolveRcond);
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);

// Orthonormal basis (columns) of the numerical null space: right singular
// vectors with sigma <= tol * sigma_max. Zero columns for full column rank.
ComplexMatrix null_basis(const ComplexMatrix& a, double tol = tol::kRank);

// Numerical rank: singular values above tol * sigma_max.
Index rank(const ComplexMatrix& a, double tol = tol::kRank);

struct PencilSpectrum {
  std::vector<Complex> finite;  // sorted lexicographically by (re, im)
  int infinite_count = 0;
};

// Generalized eigenvalues of (A, E): lambda with det(A - lambda E) = 0,
// finite eigenvalues only; infinite ones are reported by count. QZ via LAPACK.
PencilSpectrum pencil_eigenvalues(const ComplexMatrix& a, const ComplexMatrix& e);

// Eigenvalues of a square matrix, sorted lexicographically by (re, im).
std::vector<Complex> eigenvalues(const ComplexMatrix& a);

// Frobenius-norm scale helper: max of the operand norms, at least floor.
double operand_scale(std::initializer_list<double> norms, double floor = 0.0);

// Eigen's rcond() yields NaN on exactly singular factors; clamp to 0.
inline double safe_rcond(const Eigen::PartialPivLU<ComplexMatrix>& lu) {
  const double rc = lu.rcond();
  return std::isfinite(rc) ? rc : 0.0;
}

}  // namespace qbt
