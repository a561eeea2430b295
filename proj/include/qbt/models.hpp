#pragma once

#include "qbt/triple.hpp"

#include <cstdint>
#include <functional>

namespace qbt::models {

// ---------------------------------------------------------------------------
// 1D coefficients on [0, 1], sampled on the uniform grid with N interior
// points, h = 1/(N+1). Diffusion p is sampled at the N+1 cell midpoints,
// the zero-order and convection coefficients at the N+2 nodes.
struct Coefficients1D {
  int n_interior = 0;
  Eigen::VectorXd p_half;   // N+1 midpoint samples, strictly positive
  Eigen::VectorXd q_node;   // N+2 node samples (real)
  Eigen::VectorXd b_node;   // N+2 node samples (real convection; zero if absent)
  ComplexVector c_node;     // N+2 node samples (complex zero-order term)
  bool has_convection = false;

  double h() const { return 1.0 / (n_interior + 1); }

  // -(p f')' + q f
  static Coefficients1D sample(int n_interior, const std::function<double(double)>& p,
                               const std::function<double(double)>& q);
  // -(a f')' + b f' + c f and its formal adjoint
  static Coefficients1D sample_cd(int n_interior, const std::function<double(double)>& a,
                                  const std::function<double(double)>& b,
                                  const std::function<Complex(double)>& c);
  void validate() const;
};

// Structured rectangular grid for the 2D convection-diffusion model:
// -d_x(a1 f_x) - d_y(a2 f_y) + b1 f_x + b2 f_y + q f on (0,lx) x (0,ly).
// Diffusion entries are sampled at face midpoints; Nx*Ny interior unknowns,
// boundary space = the 2Nx + 2Ny boundary nodes the 5-point stencil touches.
struct Grid2D {
  int nx = 0, ny = 0;  // interior counts, >= 3
  double lx = 1.0, ly = 1.0;
  std::function<double(double, double)> a1 = [](double, double) { return 1.0; };
  std::function<double(double, double)> a2 = [](double, double) { return 1.0; };
  double b1 = 0.0, b2 = 0.0;  // constant convection
  Complex q = 0.0;            // constant potential

  double hx() const { return lx / (nx + 1); }
  double hy() const { return ly / (ny + 1); }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Constructors. Every builder produces a model whose Green identity holds
// exactly (defect is floating-point noise) and whose condition (M) has been
// certified at the lambda0 recorded in the model metadata.

// Random adjoint pair: the tilde operator and boundary map are solved exactly
// from the Green identity. Deterministic per seed (mt19937_64 + Box-Muller;
// seeds map to identical models in any implementation of this scheme).
TripleModel synthetic_pair(std::uint64_t seed, int n, int m);

// Symmetric second-order problem -(p f')' + q f with Dirichlet trace G0 and
// a summation-by-parts conormal G1; tilde side equals the plain side.
TripleModel sturm_liouville_1d(const Coefficients1D& coeffs);

// Non-symmetric pair: -(a f')' + b f' + c f against its formal adjoint
// -(a g')' - (b g)' + conj(c) g. With b = 0 and c real this coincides with
// sturm_liouville_1d entrywise.
TripleModel convection_diffusion_1d(const Coefficients1D& coeffs);

// 2D five-point model; the Weyl function is the discrete Dirichlet-to-Neumann
// map on the boundary nodes (inward conormal sign convention).
TripleModel elliptic_2d(const Grid2D& grid);

// Exact Dirichlet-to-Neumann matrix of -f'' = lambda f on (0,1) with inward
// conormal derivatives:
//   [ -s cot s    s / sin s ]
//   [ s / sin s   -s cot s  ],   s = sqrt(lambda).
// Throws ResolventPointError at the Dirichlet eigenvalues (k pi)^2.
ComplexMatrix analytic_dtn_1d(Complex lambda);

// Completes a partially designed pair to an exact-Green triple: given all
// maps except the tilde conormal, solves G1t from the Green matrix identity
// (uniquely solvable since [embed; g0] is invertible). The consistency block
// must vanish, otherwise the data admit no exact completion.
ComplexMatrix solve_green_for_g1t(const WeightedSpace& wh, const WeightedSpace& wg,
                                  const ComplexMatrix& embed, const ComplexMatrix& embed_t,
                                  const ComplexMatrix& op_t, const ComplexMatrix& op_tt,
                                  const ComplexMatrix& g0, const ComplexMatrix& g1,
                                  const ComplexMatrix& g0t);

}  // namespace qbt::models
