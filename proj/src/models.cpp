#include "qbt/models.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qbt::models {

namespace {

// Boundary correction weight for the 1D embeddings. With the first/last
// interior embedding rows mixed as (iota f)_1 = f_1 + kAlpha * f_left, the
// exact summation-by-parts conormal becomes a second-order approximation of
// the continuum conormal on discrete solutions; kAlpha solves
// alpha^2 + 2 alpha - 1/2 = 0.
const double kAlpha = std::sqrt(1.5) - 1.0;

// Condition-(M) certification at build time. Tries lambda0 = -1 first (valid
// for every grid model with q >= 0), then a deterministic fallback list.
Complex certify_lambda0(const TripleModel& model) {
  const Complex candidates[] = {{-1.0, 0.0}, {-2.0, 0.0}, {0.0, 2.0},  {1.0, 2.0},
                                {-3.0, 1.0}, {0.5, -2.0}, {-5.0, 0.0}, {2.5, 1.5}};
  for (Complex cand : candidates) {
    if (check_maximality(model, cand).ok) return cand;
  }
  throw GenerationError("no condition-(M) witness found among the candidate points");
}

TripleModel finish(const WeightedSpace& wh, const WeightedSpace& wg,
                   const ComplexMatrix& embed, const ComplexMatrix& embed_t,
                   const ComplexMatrix& op_t, const ComplexMatrix& op_tt,
                   const ComplexMatrix& g0, const ComplexMatrix& g1,
                   const ComplexMatrix& g0t, const ComplexMatrix& g1t, ModelInfo info) {
  TripleModel model = TripleModel::build(wh, wg, embed, embed_t, op_t, op_tt, g0, g1, g0t,
                                         g1t, info);
  ModelInfo patched = model.info();
  patched.lambda0 = certify_lambda0(model);
  return TripleModel::build(wh, wg, embed, embed_t, op_t, op_tt, g0, g1, g0t, g1t,
                            patched);
}

// A solved tilde conormal that matches the designed plain one to rounding is
// snapped onto it, so structurally symmetric models are symmetric entrywise.
ComplexMatrix snap_symmetric(const ComplexMatrix& embed, const ComplexMatrix& embed_t,
                             const ComplexMatrix& op_t, const ComplexMatrix& op_tt,
                             const ComplexMatrix& g0, const ComplexMatrix& g0t,
                             const ComplexMatrix& g1, ComplexMatrix g1t) {
  if (embed == embed_t && op_t == op_tt && g0 == g0t &&
      (g1t - g1).norm() <= 1e-12 * std::max(1.0, g1.norm())) {
    return g1;
  }
  return g1t;
}

// Deterministic complex Gaussians: mt19937_64 raw 64-bit output mapped to
// (0,1) doubles, then Box-Muller. No library distributions, so the stream is
// reproducible bit-for-bit everywhere.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Complex cgauss() {
    const double re = gauss();
    const double im = gauss();
    return {re, im};
  }

  ComplexMatrix matrix(Index rows, Index cols) {
    ComplexMatrix a(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) a(i, j) = cgauss();
    }
    return a;
  }

  // HPD Gram: A^H A + I.
  ComplexMatrix gram(Index dim) {
    const ComplexMatrix a = matrix(dim, dim);
    return a.adjoint() * a + ComplexMatrix::Identity(dim, dim);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

// ---------------------------------------------------------------------------

void Coefficients1D::validate() const {
  if (n_interior < 3) throw ContractError("Coefficients1D: need at least 3 interior points");
  const int n = n_interior;
  if (p_half.size() != n + 1 || q_node.size() != n + 2 || b_node.size() != n + 2 ||
      c_node.size() != n + 2) {
    throw ShapeError("Coefficients1D: sample arrays do not match the grid");
  }
  if (!(p_half.minCoeff() > 0.0)) {
    throw ContractError("Coefficients1D: diffusion coefficient must be strictly positive");
  }
}

Coefficients1D Coefficients1D::sample(int n_interior,
                                      const std::function<double(double)>& p,
                                      const std::function<double(double)>& q) {
  Coefficients1D c;
  c.n_interior = n_interior;
  const double h = 1.0 / (n_interior + 1);
  c.p_half.resize(n_interior + 1);
  for (int i = 0; i <= n_interior; ++i) c.p_half(i) = p((i + 0.5) * h);
  c.q_node.resize(n_interior + 2);
  for (int i = 0; i <= n_interior + 1; ++i) c.q_node(i) = q(i * h);
  c.b_node = Eigen::VectorXd::Zero(n_interior + 2);
  c.c_node = c.q_node.cast<Complex>();
  c.has_convection = false;
  c.validate();
  return c;
}

Coefficients1D Coefficients1D::sample_cd(int n_interior,
                                         const std::function<double(double)>& a,
                                         const std::function<double(double)>& b,
                                         const std::function<Complex(double)>& c) {
  Coefficients1D out;
  out.n_interior = n_interior;
  const double h = 1.0 / (n_interior + 1);
  out.p_half.resize(n_interior + 1);
  for (int i = 0; i <= n_interior; ++i) out.p_half(i) = a((i + 0.5) * h);
  out.q_node = Eigen::VectorXd::Zero(n_interior + 2);
  out.b_node.resize(n_interior + 2);
  out.c_node.resize(n_interior + 2);
  for (int i = 0; i <= n_interior + 1; ++i) {
    out.b_node(i) = b(i * h);
    out.c_node(i) = c(i * h);
  }
  out.has_convection = true;
  out.validate();
  return out;
}

void Grid2D::validate() const {
  if (nx < 3 || ny < 3) throw ContractError("Grid2D: need at least 3 interior points per axis");
  if (!(lx > 0) || !(ly > 0)) throw ContractError("Grid2D: rectangle dimensions must be positive");
  if (static_cast<long>(nx) * ny > 20000) {
    throw ContractError("Grid2D: refusing more than 20000 interior unknowns");
  }
}

// ---------------------------------------------------------------------------

ComplexMatrix solve_green_for_g1t(const WeightedSpace& wh, const WeightedSpace& wg,
                                  const ComplexMatrix& embed, const ComplexMatrix& embed_t,
                                  const ComplexMatrix& op_t, const ComplexMatrix& op_tt,
                                  const ComplexMatrix& g0, const ComplexMatrix& g1,
                                  const ComplexMatrix& g0t) {
  const Index n = wh.dim();
  const Index m = wg.dim();
  const Index dd = embed.cols();
  if (dd != n + m) throw ShapeError("solve_green_for_g1t: carrier must have dimension n+m");

  // Green <=> G1t^H W_G G0 = Z with Z below; in the [embed; g0]-adapted
  // coordinates the first n columns of Z must vanish (consistency) and the
  // last m columns determine G1t uniquely.
  const ComplexMatrix z = g0t.adjoint() * wg.gram() * g1 -
                          embed_t.adjoint() * wh.gram() * op_t +
                          op_tt.adjoint() * wh.gram() * embed;
  ComplexMatrix phi(n + m, dd);
  phi << embed, g0;
  // Z Phi^{-1} computed as a transposed solve.
  const ComplexMatrix z_adapted =
      solve_with_rcond(phi.transpose(), z.transpose(), tol::kResolventRcond).x.transpose();
  const ComplexMatrix zp = z_adapted.leftCols(n);
  const ComplexMatrix zq = z_adapted.rightCols(m);
  const double scale = operand_scale({z.norm(), 1.0});
  const double consistency = zp.norm() / scale;
  if (!(consistency <= tol::kGreen)) {
    throw ConstructionError("exact-Green completion consistency", consistency);
  }
  return wg.apply_inverse_gram(zq.adjoint());
}

// ---------------------------------------------------------------------------

TripleModel synthetic_pair(std::uint64_t seed, int n, int m) {
  if (n < 1 || m < 0) throw ContractError("synthetic_pair: need n >= 1, m >= 0");
  GaussianStream rng(seed);
  const Index dd = n + m;

  WeightedSpace wh{rng.gram(n)};
  WeightedSpace wg{rng.gram(m)};

  // Random invertible stacked maps; regenerate in the (measure-zero) event of
  // a bad draw.
  auto draw_stack = [&](ComplexMatrix& top, ComplexMatrix& bottom) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      ComplexMatrix phi = rng.matrix(dd, dd);
      Eigen::PartialPivLU<ComplexMatrix> lu(phi);
      if (safe_rcond(lu) > 1e-8) {
        top = phi.topRows(n);
        bottom = phi.bottomRows(m);
        return;
      }
    }
    throw GenerationError("synthetic_pair: failed to draw an invertible stacked map");
  };
  ComplexMatrix embed, g0, embed_t, g0t;
  draw_stack(embed, g0);
  draw_stack(embed_t, g0t);

  const ComplexMatrix op_t = rng.matrix(n, dd);
  const ComplexMatrix g1 = rng.matrix(m, dd);

  // Solve the Green identity exactly for (T~, G1t):
  //   Y = embed_t^H W_H T - g0t^H W_G g1,  [P Q] = Y Phi^{-1},
  //   T~ = W_H^{-1} P^H,  G1t = -W_G^{-1} Q^H.
  ComplexMatrix phi(dd, dd);
  phi << embed, g0;
  const ComplexMatrix y = embed_t.adjoint() * wh.gram() * op_t -
                          g0t.adjoint() * wg.gram() * g1;
  const ComplexMatrix y_adapted =
      solve_with_rcond(phi.transpose(), y.transpose(), 1e-10).x.transpose();
  const ComplexMatrix op_tt = wh.apply_inverse_gram(y_adapted.leftCols(n).adjoint());
  const ComplexMatrix g1t = -wg.apply_inverse_gram(y_adapted.rightCols(m).adjoint());

  ModelInfo info;
  info.kind = "synthetic";
  info.descriptor = "synthetic seed=" + std::to_string(seed) + " n=" + std::to_string(n) +
                    " m=" + std::to_string(m);

  TripleModel model = TripleModel::build(wh, wg, embed, embed_t, op_t, op_tt, g0, g1, g0t,
                                         g1t, info);

  // lambda0 witness from the same deterministic stream; generic points work.
  ModelInfo patched = model.info();
  bool found = false;
  for (int attempt = 0; attempt < 32 && !found; ++attempt) {
    const Complex cand = 3.0 * rng.cgauss();
    const MaximalityCertificate cert = check_maximality(model, cand);
    if (cert.ok) {
      patched.lambda0 = cand;
      found = true;
    }
  }
  if (!found) throw GenerationError("synthetic_pair: no lambda0 certificate; re-seed");
  return TripleModel::build(model.space_h(), model.space_g(), model.embed(),
                            model.embed_t(), model.op_t(), model.op_tt(), model.g0(),
                            model.g1(), model.g0t(), model.g1t(), patched);
}

// ---------------------------------------------------------------------------
// 1D grid models. Carrier layout: (f_1 .. f_N, f_left, f_right), so the
// boundary values are the two trailing carrier coordinates.

namespace {

struct Grid1DParts {
  WeightedSpace wh;
  WeightedSpace wg;
  ComplexMatrix embed, op, g0, g1;
};

// Assembles one side of a 1D model:
//   (T f)_i = -[p_{i+1/2}(f_{i+1}-f_i) - p_{i-1/2}(f_i-f_{i-1})]/h^2
//             + b_i (f_{i+1}-f_{i-1})/(2h) + c_i (iota f)_i
// with the alpha-corrected embedding, Dirichlet trace G0, and the exact
// summation-by-parts conormal
//   G1_left(f) = p_{1/2}(f_1-f_0)/h - (b_0/2) f_1
//                + alpha h [(Tf)_1 - c_1 f_1] + kappa f_0,
//   kappa = (2 alpha - 1/2) h c(0),
// mirrored on the right. The Green identity holds exactly for any real p, b
// and complex c.
Grid1DParts assemble_1d(const Coefficients1D& cf, bool adjoint_side) {
  const int n = cf.n_interior;
  const double h = cf.h();
  const Index dd = n + 2;
  const Index il = n;      // carrier index of f(0)
  const Index ir = n + 1;  // carrier index of f(1)
  const double alpha = kAlpha;

  Grid1DParts parts{WeightedSpace::diagonal(Eigen::VectorXd::Constant(n, h)),
                    WeightedSpace::euclidean(2),
                    ComplexMatrix::Zero(n, dd),
                    ComplexMatrix::Zero(n, dd),
                    ComplexMatrix::Zero(2, dd),
                    ComplexMatrix::Zero(2, dd)};

  auto carr = [&](int node) -> Index {  // grid node 0..N+1 -> carrier column
    if (node == 0) return il;
    if (node == n + 1) return ir;
    return node - 1;
  };

  parts.embed.leftCols(n).setIdentity();
  parts.embed(0, il) = alpha;
  parts.embed(n - 1, ir) = alpha;

  for (int i = 1; i <= n; ++i) {
    const Index r = i - 1;
    const double am = cf.p_half(i - 1) / (h * h);
    const double ap = cf.p_half(i) / (h * h);
    parts.op(r, carr(i - 1)) += -am;
    parts.op(r, carr(i)) += am + ap;
    parts.op(r, carr(i + 1)) += -ap;
    if (cf.has_convection) {
      if (adjoint_side) {
        // -(b g)' centered: -[b_{i+1} g_{i+1} - b_{i-1} g_{i-1}]/(2h)
        parts.op(r, carr(i + 1)) += -cf.b_node(i + 1) / (2 * h);
        parts.op(r, carr(i - 1)) += cf.b_node(i - 1) / (2 * h);
      } else {
        // b f' centered
        parts.op(r, carr(i + 1)) += cf.b_node(i) / (2 * h);
        parts.op(r, carr(i - 1)) += -cf.b_node(i) / (2 * h);
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    const Complex ci = adjoint_side ? std::conj(cf.c_node(i)) : cf.c_node(i);
    parts.op.row(i - 1) += ci * parts.embed.row(i - 1);
  }

  parts.g0(0, il) = 1.0;
  parts.g0(1, ir) = 1.0;

  if (adjoint_side) {
    // The adjoint-side conormal is produced by the exact Green solve; only
    // the operator, embedding and Dirichlet trace are designed here.
    return parts;
  }

  const double kappa_scale = (2 * alpha - 0.5) * h;
  // Left conormal row.
  parts.g1(0, carr(1)) += cf.p_half(0) / h;
  parts.g1(0, il) += -cf.p_half(0) / h;
  if (cf.has_convection) parts.g1(0, carr(1)) += -cf.b_node(0) / 2.0;
  parts.g1.row(0) += alpha * h * parts.op.row(0);
  parts.g1(0, carr(1)) += -alpha * h * cf.c_node(1);
  parts.g1(0, il) += kappa_scale * cf.c_node(0);
  // Right conormal row.
  parts.g1(1, carr(n)) += cf.p_half(n) / h;
  parts.g1(1, ir) += -cf.p_half(n) / h;
  if (cf.has_convection) parts.g1(1, carr(n)) += cf.b_node(n + 1) / 2.0;
  parts.g1.row(1) += alpha * h * parts.op.row(n - 1);
  parts.g1(1, carr(n)) += -alpha * h * cf.c_node(n);
  parts.g1(1, ir) += kappa_scale * cf.c_node(n + 1);

  return parts;
}

}  // namespace

TripleModel sturm_liouville_1d(const Coefficients1D& coeffs) {
  coeffs.validate();
  Coefficients1D cf = coeffs;
  cf.has_convection = false;
  cf.c_node = cf.q_node.cast<Complex>();
  Grid1DParts p = assemble_1d(cf, false);

  ModelInfo info;
  info.kind = "sl1d";
  info.descriptor = "sl1d N=" + std::to_string(cf.n_interior);
  return finish(p.wh, p.wg, p.embed, p.embed, p.op, p.op, p.g0, p.g1, p.g0, p.g1, info);
}

TripleModel convection_diffusion_1d(const Coefficients1D& coeffs) {
  coeffs.validate();
  Coefficients1D cf = coeffs;
  cf.has_convection = true;
  Grid1DParts plain = assemble_1d(cf, false);
  Grid1DParts adj = assemble_1d(cf, true);

  // The adjoint-side conormal is recovered from the exact Green solve; using
  // the solve keeps the pair exact for any sampled coefficients.
  const ComplexMatrix g1t = snap_symmetric(
      plain.embed, adj.embed, plain.op, adj.op, plain.g0, adj.g0, plain.g1,
      solve_green_for_g1t(plain.wh, plain.wg, plain.embed, adj.embed, plain.op, adj.op,
                          plain.g0, plain.g1, adj.g0));

  ModelInfo info;
  info.kind = "cd1d";
  info.descriptor = "cd1d N=" + std::to_string(cf.n_interior);
  return finish(plain.wh, plain.wg, plain.embed, adj.embed, plain.op, adj.op, plain.g0,
                plain.g1, adj.g0, g1t, info);
}

// ---------------------------------------------------------------------------

TripleModel elliptic_2d(const Grid2D& grid) {
  grid.validate();
  const int nx = grid.nx, ny = grid.ny;
  const double hx = grid.hx(), hy = grid.hy();
  const Index n = static_cast<Index>(nx) * ny;

  // Boundary dofs: bottom, top (nx each, no corners), then left, right.
  const Index m = 2 * nx + 2 * ny;
  const Index dd = n + m;
  auto interior = [&](int i, int j) -> Index {  // i in 1..nx, j in 1..ny
    return static_cast<Index>(j - 1) * nx + (i - 1);
  };
  auto boundary = [&](int i, int j) -> Index {  // index into the boundary block
    if (j == 0) return i - 1;
    if (j == ny + 1) return nx + (i - 1);
    if (i == 0) return 2 * nx + (j - 1);
    return 2 * nx + ny + (j - 1);
  };
  auto carr = [&](int i, int j) -> Index {
    if (i >= 1 && i <= nx && j >= 1 && j <= ny) return interior(i, j);
    return n + boundary(i, j);
  };

  WeightedSpace wh = WeightedSpace::diagonal(Eigen::VectorXd::Constant(n, hx * hy));
  Eigen::VectorXd warc(m);
  for (int i = 1; i <= nx; ++i) {
    warc(boundary(i, 0)) = hx;
    warc(boundary(i, ny + 1)) = hx;
  }
  for (int j = 1; j <= ny; ++j) {
    warc(boundary(0, j)) = hy;
    warc(boundary(nx + 1, j)) = hy;
  }
  WeightedSpace wg = WeightedSpace::diagonal(warc);

  ComplexMatrix embed = ComplexMatrix::Zero(n, dd);
  embed.leftCols(n).setIdentity();
  ComplexMatrix g0 = ComplexMatrix::Zero(m, dd);
  g0.rightCols(m).setIdentity();

  ComplexMatrix op_t = ComplexMatrix::Zero(n, dd);
  ComplexMatrix op_tt = ComplexMatrix::Zero(n, dd);
  for (int j = 1; j <= ny; ++j) {
    for (int i = 1; i <= nx; ++i) {
      const Index r = interior(i, j);
      const double x = i * hx, y = j * hy;
      const double a1w = grid.a1(x - 0.5 * hx, y), a1e = grid.a1(x + 0.5 * hx, y);
      const double a2s = grid.a2(x, y - 0.5 * hy), a2n = grid.a2(x, y + 0.5 * hy);
      if (!(a1w > 0 && a1e > 0 && a2s > 0 && a2n > 0)) {
        throw ContractError("elliptic_2d: diffusion must be positive definite per cell");
      }
      op_t(r, carr(i, j)) += (a1w + a1e) / (hx * hx) + (a2s + a2n) / (hy * hy) + grid.q;
      op_t(r, carr(i - 1, j)) += -a1w / (hx * hx) - grid.b1 / (2 * hx);
      op_t(r, carr(i + 1, j)) += -a1e / (hx * hx) + grid.b1 / (2 * hx);
      op_t(r, carr(i, j - 1)) += -a2s / (hy * hy) - grid.b2 / (2 * hy);
      op_t(r, carr(i, j + 1)) += -a2n / (hy * hy) + grid.b2 / (2 * hy);

      op_tt(r, carr(i, j)) +=
          (a1w + a1e) / (hx * hx) + (a2s + a2n) / (hy * hy) + std::conj(grid.q);
      op_tt(r, carr(i - 1, j)) += -a1w / (hx * hx) + grid.b1 / (2 * hx);
      op_tt(r, carr(i + 1, j)) += -a1e / (hx * hx) - grid.b1 / (2 * hx);
      op_tt(r, carr(i, j - 1)) += -a2s / (hy * hy) + grid.b2 / (2 * hy);
      op_tt(r, carr(i, j + 1)) += -a2n / (hy * hy) - grid.b2 / (2 * hy);
    }
  }

  // Inward discrete conormal: a (f_nb - f_b)/h_perp plus the centered
  // convection half-share (sign flips with the inward normal direction).
  ComplexMatrix g1 = ComplexMatrix::Zero(m, dd);
  auto conormal = [&](int bi, int bj, int ni, int nj, double a_perp, double h_perp,
                      double b_perp, double sgn) {
    const Index k = boundary(bi, bj);
    g1(k, carr(ni, nj)) += a_perp / h_perp + sgn * b_perp / 2.0;
    g1(k, n + k) += -a_perp / h_perp;
  };
  for (int i = 1; i <= nx; ++i) {
    const double x = i * hx;
    conormal(i, 0, i, 1, grid.a2(x, 0.5 * hy), hy, grid.b2, -1.0);
    conormal(i, ny + 1, i, ny, grid.a2(x, grid.ly - 0.5 * hy), hy, grid.b2, +1.0);
  }
  for (int j = 1; j <= ny; ++j) {
    const double y = j * hy;
    conormal(0, j, 1, j, grid.a1(0.5 * hx, y), hx, grid.b1, -1.0);
    conormal(nx + 1, j, nx, j, grid.a1(grid.lx - 0.5 * hx, y), hx, grid.b1, +1.0);
  }

  const ComplexMatrix g1t = snap_symmetric(
      embed, embed, op_t, op_tt, g0, g0, g1,
      solve_green_for_g1t(wh, wg, embed, embed, op_t, op_tt, g0, g1, g0));

  ModelInfo info;
  info.kind = "elliptic2d";
  info.descriptor = "elliptic2d Nx=" + std::to_string(nx) + " Ny=" + std::to_string(ny);
  return finish(wh, wg, embed, embed, op_t, op_tt, g0, g1, g0, g1t, info);
}

// ---------------------------------------------------------------------------

ComplexMatrix analytic_dtn_1d(Complex lambda) {
  const Complex s = std::sqrt(lambda);
  Complex diag, off;
  if (std::abs(s) < 1e-4) {
    // Series around lambda = 0: s cot s = 1 - s^2/3 - s^4/45, s/sin s = 1 + s^2/6 + 7 s^4/360.
    const Complex s2 = s * s;
    diag = -(1.0 - s2 / 3.0 - s2 * s2 / 45.0);
    off = 1.0 + s2 / 6.0 + 7.0 * s2 * s2 / 360.0;
  } else {
    const Complex sins = std::sin(s);
    if (std::abs(sins) < 1e-12 * std::max(1.0, std::abs(s))) {
      throw ResolventPointError("analytic_dtn_1d: lambda at a Dirichlet eigenvalue", lambda,
                                std::abs(sins));
    }
    diag = -s * std::cos(s) / sins;
    off = s / sins;
  }
  ComplexMatrix dtn(2, 2);
  dtn << diag, off, off, diag;
  return dtn;
}

}  // namespace qbt::models
