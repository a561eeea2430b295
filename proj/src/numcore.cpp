#include "qbt/numcore.hpp"

#include <algorithm>
#include <cmath>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

namespace qbt {

// ---------------------------------------------------------------------------
// WeightedSpace

WeightedSpace::WeightedSpace(ComplexMatrix gram) : gram_(std::move(gram)) {
  if (gram_.rows() != gram_.cols()) {
    throw ShapeError("WeightedSpace: gram matrix must be square");
  }
  if (!all_finite(gram_)) {
    throw ConstructionError("gram finite", std::numeric_limits<double>::infinity());
  }
  const double scale = gram_.norm();
  const double herm_defect = (gram_ - gram_.adjoint()).norm();
  if (herm_defect > 1e-14 * std::max(scale, 1e-300)) {
    throw ConstructionError("gram Hermitian", herm_defect / std::max(scale, 1e-300));
  }
  if (dim() > 0) {
    llt_.compute(gram_);
    if (llt_.info() != Eigen::Success) {
      throw ConstructionError("gram positive definite", 0.0);
    }
    ComplexMatrix l = llt_.matrixL();
    frame_ = l.adjoint();
    // frame_basis = L^{-H}: columns are a W-orthonormal basis.
    frame_basis_ = frame_.template triangularView<Eigen::Upper>().solve(
        ComplexMatrix::Identity(dim(), dim()));
  } else {
    frame_.resize(0, 0);
    frame_basis_.resize(0, 0);
  }
}

WeightedSpace WeightedSpace::euclidean(Index dim) {
  return WeightedSpace(ComplexMatrix::Identity(dim, dim));
}

WeightedSpace WeightedSpace::diagonal(const Eigen::VectorXd& weights) {
  return WeightedSpace(weights.cast<Complex>().asDiagonal().toDenseMatrix());
}

Complex WeightedSpace::inner(const ComplexVector& x, const ComplexVector& y) const {
  if (x.size() != dim() || y.size() != dim()) {
    throw ShapeError("WeightedSpace::inner: dimension mismatch");
  }
  return (y.adjoint() * gram_ * x).value();
}

double WeightedSpace::norm(const ComplexVector& x) const {
  return std::sqrt(std::max(0.0, inner(x, x).real()));
}

ComplexMatrix WeightedSpace::apply_inverse_gram(const ComplexMatrix& rhs) const {
  if (rhs.rows() != dim()) {
    throw ShapeError("WeightedSpace::apply_inverse_gram: dimension mismatch");
  }
  if (dim() == 0) return rhs;
  return llt_.solve(rhs);
}

// ---------------------------------------------------------------------------

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

ComplexMatrix weighted_adjoint(const ComplexMatrix& a, const WeightedSpace& w_out,
                               const WeightedSpace& w_in) {
  if (a.rows() != w_out.dim() || a.cols() != w_in.dim()) {
    throw ShapeError("weighted_adjoint: operator shape does not match the spaces");
  }
  return w_in.apply_inverse_gram(a.adjoint() * w_out.gram());
}

SolveResult solve_with_rcond(const ComplexMatrix& a, const ComplexMatrix& b,
                             double min_rcond) {
  if (a.rows() != a.cols()) throw ShapeError("solve: matrix must be square");
  if (b.rows() != a.rows()) throw ShapeError("solve: right-hand side rows mismatch");
  if (a.rows() == 0) return {ComplexMatrix(0, b.cols()), 1.0};
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rc = safe_rcond(lu);
  if (!(rc > min_rcond)) {
    throw SingularMatrixError("solve: numerically singular matrix", rc);
  }
  return {lu.solve(b), rc};
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  return solve_with_rcond(a, b, tol::kSolveRcond).x;
}

ComplexMatrix null_basis(const ComplexMatrix& a, double tol) {
  if (!(tol > 0)) throw ShapeError("null_basis: tolerance must be positive");
  if (a.cols() == 0) return ComplexMatrix(0, 0);
  if (a.rows() == 0) return ComplexMatrix::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Index r = 0;
  if (smax > 0) {
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol * smax) ++r;
    }
  }
  return svd.matrixV().rightCols(a.cols() - r);
}

Index rank(const ComplexMatrix& a, double tol) {
  if (!(tol > 0)) throw ShapeError("rank: tolerance must be positive");
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (!(smax > 0)) return 0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * smax) ++r;
  }
  return r;
}

PencilSpectrum pencil_eigenvalues(const ComplexMatrix& a, const ComplexMatrix& e) {
  if (a.rows() != a.cols() || e.rows() != e.cols()) {
    throw ShapeError("pencil_eigenvalues: matrices must be square");
  }
  if (a.rows() != e.rows()) {
    throw ShapeError("pencil_eigenvalues: matrices must have the same shape");
  }
  const Index n = a.rows();
  PencilSpectrum out;
  if (n == 0) return out;

  // LAPACK zggev overwrites its inputs; column-major copies.
  ComplexMatrix af = a, ef = e;
  std::vector<Complex> alpha(static_cast<size_t>(n)), beta(static_cast<size_t>(n));
  const int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'N', static_cast<int>(n),
                                 af.data(), static_cast<int>(n), ef.data(),
                                 static_cast<int>(n), alpha.data(), beta.data(),
                                 nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw EigenSolverError("pencil_eigenvalues: QZ iteration failed to converge (info " +
                           std::to_string(info) + ")");
  }
  const double scale = std::max(a.norm(), e.norm());
  for (Index i = 0; i < n; ++i) {
    const Complex al = alpha[static_cast<size_t>(i)];
    const Complex be = beta[static_cast<size_t>(i)];
    // beta ~ 0 relative to the pencil scale marks an infinite eigenvalue.
    if (std::abs(be) <= 1e-14 * std::max(scale, std::abs(al))) {
      ++out.infinite_count;
    } else {
      out.finite.push_back(al / be);
    }
  }
  std::sort(out.finite.begin(), out.finite.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

std::vector<Complex> eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("eigenvalues: matrix must be square");
  if (a.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw EigenSolverError("eigenvalues: Schur iteration failed to converge");
  }
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return ev;
}

double operand_scale(std::initializer_list<double> norms, double floor) {
  double s = floor;
  for (double v : norms) s = std::max(s, v);
  return s;
}

}  // namespace qbt
