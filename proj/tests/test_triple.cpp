#include "qbt/triple.hpp"

#include "qbt/extensions.hpp"
#include "qbt/models.hpp"

#include <doctest.h>

#include <random>

using namespace qbt;

namespace {

TripleModel sl1d(int n, double q = 0.0) {
  return models::sturm_liouville_1d(models::Coefficients1D::sample(
      n, [](double) { return 1.0; }, [q](double) { return q; }));
}

TripleModel cd1d(int n) {
  return models::convection_diffusion_1d(models::Coefficients1D::sample_cd(
      n, [](double) { return 1.0; }, [](double) { return 1.0; },
      [](double) { return Complex(0.0, 0.0); }));
}

}  // namespace

TEST_CASE("build validates the Green identity") {
  const TripleModel m = sl1d(16);
  CHECK(green_defect(m) < 1e-13);

  // Doubling G1 breaks the identity by O(1).
  try {
    TripleModel::build(m.space_h(), m.space_g(), m.embed(), m.embed_t(), m.op_t(),
                       m.op_tt(), m.g0(), 2.0 * m.g1(), m.g0t(), m.g1t());
    FAIL("expected ConstructionError");
  } catch (const ConstructionError& e) {
    CHECK(e.invariant() == "Green identity");
    CHECK(e.defect() > 0.1);
  }

  CHECK_NOTHROW(models::synthetic_pair(1, 8, 3));
}

TEST_CASE("green_defect scales linearly in a perturbation of T") {
  const TripleModel m = sl1d(12);
  ComplexMatrix noise = ComplexMatrix::Random(m.n(), m.dim_d());
  noise /= noise.norm();
  const double base = m.op_t().norm();
  const ComplexMatrix t1 = m.op_t() + 1e-3 * base * noise;
  const double d1 =
      green_defect_raw(m.space_h(), m.space_g(), m.embed(), m.embed_t(), t1, m.op_tt(),
                       m.g0(), m.g1(), m.g0t(), m.g1t());
  const ComplexMatrix t2 = m.op_t() + 2e-3 * base * noise;
  const double d2 =
      green_defect_raw(m.space_h(), m.space_g(), m.embed(), m.embed_t(), t2, m.op_tt(),
                       m.g0(), m.g1(), m.g0t(), m.g1t());
  CHECK(d1 > 0);
  CHECK(d2 == doctest::Approx(2 * d1).epsilon(0.05));
}

TEST_CASE("green_defect of the zero model is zero") {
  const WeightedSpace h = WeightedSpace::euclidean(3);
  const WeightedSpace g = WeightedSpace::euclidean(1);
  const ComplexMatrix z = ComplexMatrix::Zero(3, 4);
  const ComplexMatrix zb = ComplexMatrix::Zero(1, 4);
  CHECK(green_defect_raw(h, g, z, z, z, z, zb, zb, zb, zb) == 0.0);
}

TEST_CASE("check_density on the 1D model and a degenerate G1") {
  const TripleModel m = sl1d(16);
  const DensityReport rep = check_density(m);
  CHECK(rep.condition_d);
  CHECK(rep.condition_dd);
  CHECK(rep.ordinary);
  CHECK(rep.rank_g0 == 2);
  CHECK(rep.rank_stack == 4);

  // A model with G1 = G0: the Green identity forces a W_H-self-adjoint
  // interior operator with no boundary coupling; the stacked rank is m.
  const Index n = 5, mm = 2;
  ComplexMatrix embed = ComplexMatrix::Zero(n, n + mm);
  embed.leftCols(n).setIdentity();
  ComplexMatrix g0 = ComplexMatrix::Zero(mm, n + mm);
  g0.rightCols(mm).setIdentity();
  ComplexMatrix op = ComplexMatrix::Zero(n, n + mm);
  op.leftCols(n) = Eigen::VectorXd::LinSpaced(n, 1.0, 5.0).cast<Complex>().asDiagonal();
  const TripleModel flat =
      TripleModel::build(WeightedSpace::euclidean(n), WeightedSpace::euclidean(mm), embed,
                         embed, op, op, g0, g0, g0, g0);
  const DensityReport rep2 = check_density(flat);
  CHECK(rep2.condition_d);
  CHECK_FALSE(rep2.condition_dd);
  CHECK(rep2.rank_stack == mm);
}

TEST_CASE("ddlem rank implication holds on the 1D and synthetic models") {
  for (const TripleModel& m : {sl1d(10), cd1d(10), models::synthetic_pair(3, 6, 2),
                               models::synthetic_pair(9, 5, 1)}) {
    const DensityReport rep = check_density(m);
    REQUIRE(rep.condition_d);
    CHECK(rep.condition_dd);
  }
}

TEST_CASE("a0_resolvent solves (A0 - lambda) u = h") {
  const TripleModel m = sl1d(16);
  const ComplexVector h = ComplexVector::Unit(m.n(), 0);
  const ResolventAction act = a0_resolvent(m, Complex(-1.0, 0.0), h);
  // Residual oracle via the A0 matrix: (A0 + 1) u = h.
  const ComplexMatrix a0 = m.a0_matrix();
  CHECK((a0 * act.u + act.u - h).norm() < 1e-11);
  CHECK((m.g0() * act.f_dom).norm() < 1e-12);

  SUBCASE("zero rhs gives zero") {
    const ResolventAction z =
        a0_resolvent(m, Complex(-1.0, 0.0), ComplexVector::Zero(m.n()));
    CHECK(z.u.norm() == 0.0);
  }

  SUBCASE("a Dirichlet pencil eigenvalue is rejected") {
    const std::vector<Complex> sp = a0_spectrum(m);
    REQUIRE(!sp.empty());
    CHECK_THROWS_AS(a0_resolvent(m, sp.front(), h), ResolventPointError);
  }
}

TEST_CASE("check_maximality certifies the adjoint pair") {
  SUBCASE("symmetric model") {
    const MaximalityCertificate cert = check_maximality(sl1d(16), Complex(-1.0, 0.0));
    CHECK(cert.ok);
    CHECK(cert.defect_adjoint < 1e-11);
  }

  SUBCASE("convection-diffusion: A0 differs from A0~ but equals its adjoint") {
    const TripleModel m = cd1d(16);
    const MaximalityCertificate cert = check_maximality(m, Complex(-1.0, 0.0));
    CHECK(cert.ok);
    CHECK(cert.defect_adjoint < 1e-11);
    CHECK((m.a0_matrix() - m.a0t_matrix()).norm() > 1e-3 * m.a0_matrix().norm());
  }

  SUBCASE("scrambling G0t breaks the certificate") {
    // Mixing G1t into G0t alone violates the Green identity (build would
    // refuse it); the raw certificate diagnoses the broken adjointness.
    const TripleModel m = models::synthetic_pair(5, 6, 2);
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ComplexMatrix c(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) c(i, j) = 0.7 * Complex(dist(gen), dist(gen));
    const ComplexMatrix g0t = m.g0t() + c * m.g1t();
    bool checked = false;
    for (Complex cand : {Complex(-1, 0), Complex(0, 2), Complex(1.5, -0.5)}) {
      const MaximalityCertificate cert = check_maximality_raw(
          m.space_h(), m.embed(), m.embed_t(), m.op_t(), m.op_tt(), m.g0(), g0t, cand);
      if (cert.invertible_plain && cert.invertible_tilde) {
        CHECK(cert.defect_adjoint > 1e-3);
        CHECK_FALSE(cert.ok);
        checked = true;
      }
    }
    CHECK(checked);
  }

  SUBCASE("the Green-preserving boundary transform keeps maximality") {
    // G0t += C G1t with the compensating G0 += W_G^{-1} C^H W_G G1 realizes a
    // mutually adjoint pair of Robin-type restrictions, so the certificate
    // stays valid: the duality theorem in action.
    const TripleModel m = models::synthetic_pair(5, 6, 2);
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ComplexMatrix c(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) c(i, j) = 0.7 * Complex(dist(gen), dist(gen));
    const ComplexMatrix g0t = m.g0t() + c * m.g1t();
    const ComplexMatrix cadj = weighted_adjoint(c, m.space_g(), m.space_g());
    const ComplexMatrix g0 = m.g0() + cadj * m.g1();
    const TripleModel transformed =
        TripleModel::build(m.space_h(), m.space_g(), m.embed(), m.embed_t(), m.op_t(),
                           m.op_tt(), g0, m.g1(), g0t, m.g1t());
    const MaximalityCertificate cert = check_maximality(transformed, Complex(0, 2));
    CHECK(cert.ok);
  }
}

TEST_CASE("minimal_operators recovers the minimal pair") {
  SUBCASE("1D model dimensions and pairing") {
    const int n = 16;
    const MinimalOperators mo = minimal_operators(sl1d(n));
    CHECK(mo.s_basis.cols() == n - 2);
    CHECK(mo.st_basis.cols() == n - 2);
    CHECK(mo.adjoint_pair_defect < 1e-12);
  }

  SUBCASE("synthetic pair") {
    const MinimalOperators mo = minimal_operators(models::synthetic_pair(2, 6, 2));
    CHECK(mo.adjoint_pair_defect < 1e-12);
  }
}

TEST_CASE("gamma columns are lambda-harmonic with reproduced boundary data") {
  const TripleModel m = sl1d(16);
  const Complex lambda(-1.0, 0.0);
  const RawSample raw = spectral_raw(m, lambda);
  const double scale = m.op_t().norm();
  CHECK(((m.op_t() - lambda * m.embed()) * raw.preimage).norm() < 1e-11 * scale);
  CHECK((m.g0() * raw.preimage - ComplexMatrix::Identity(m.m(), m.m())).norm() < 1e-11);

  const SpectralSample s = gamma(m, lambda);
  CHECK(s.cond_stack >= 1.0);
  CHECK(s.side == SpectralSample::Side::plain);
  // Frame and raw weyl matrices are similar via the frame map.
  const ComplexMatrix frame = m.space_g().frame();
  CHECK((frame * raw.weyl * frame.inverse() - s.weyl).norm() <
        1e-11 * (1 + s.weyl.norm()));
}

TEST_CASE("gamma with an empty boundary space") {
  const TripleModel m = models::synthetic_pair(4, 5, 0);
  const SpectralSample s = gamma(m, Complex(0.0, 1.0));
  CHECK(s.gamma.cols() == 0);
  CHECK(s.weyl.rows() == 0);
}

TEST_CASE("gamma_star identity") {
  SUBCASE("1D Laplacian at -1") {
    CHECK(gamma_star_check(sl1d(16), Complex(-1, 0)) < 1e-11);
  }
  SUBCASE("synthetic pair at 2i") {
    CHECK(gamma_star_check(models::synthetic_pair(1, 8, 3), Complex(0, 2)) < 1e-10);
  }
  SUBCASE("symmetric model at a real point: tilde side equals plain side") {
    const TripleModel m = sl1d(12);
    const Complex lambda(-2.5, 0.0);
    const SpectralSample gs = gamma(m, lambda);
    const ComplexMatrix lhs = gs.gamma.adjoint() * m.space_h().gram();
    ComplexMatrix rhs(m.m(), m.n());
    for (Index k = 0; k < m.n(); ++k) {
      const ResolventAction act = a0_resolvent(m, lambda, ComplexVector::Unit(m.n(), k));
      rhs.col(k) = m.space_g().frame() * (m.g1() * act.f_dom);
    }
    CHECK((lhs - rhs).norm() < 1e-11 * (1 + lhs.norm()));
  }
}

TEST_CASE("gamma_shift identity") {
  const TripleModel m = sl1d(16);
  SUBCASE("lambda = nu is exact") {
    CHECK(gamma_shift_check(m, Complex(-1, 0), Complex(-1, 0)) < 1e-13);
  }
  SUBCASE("distinct points") {
    CHECK(gamma_shift_check(m, Complex(-1, 0), Complex(0, 2)) < 1e-10);
  }
  SUBCASE("synthetic pair over the probe set") {
    const TripleModel s = models::synthetic_pair(7, 7, 2);
    const std::vector<Complex> pts = standard_probes(s);
    REQUIRE(pts.size() >= 2);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      CHECK(gamma_shift_check(s, pts[i], pts[i + 1]) < 1e-10);
    }
  }
}

TEST_CASE("weyl difference identity") {
  const TripleModel m = cd1d(20);
  SUBCASE("mu = conj(lambda) reduces to M(l) = M~(conj l)^*") {
    const Complex l(1.0, 1.5);
    const WeylDefects d = weyl_identity_check(m, l, std::conj(l));
    CHECK(d.d1 < 1e-11);
    CHECK(d.d2 < 1e-11);
  }
  SUBCASE("generic points") {
    const WeylDefects d = weyl_identity_check(m, Complex(-1, 0.5), Complex(0, 2));
    CHECK(d.d1 < 1e-10);
    CHECK(d.d2 < 1e-10);
  }
  SUBCASE("symmetric model, upper half plane: Im M / Im lambda is PSD") {
    const TripleModel s = sl1d(16);
    const Complex l(0.5, 1.0);
    const SpectralSample gs = gamma(s, l);
    const ComplexMatrix imm = (gs.weyl - gs.weyl.adjoint()) / Complex(0, 2) / l.imag();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(((imm + imm.adjoint()) / 2).eval());
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
  SUBCASE("symmetric model at a real point: M Hermitian") {
    const TripleModel s = sl1d(16);
    const SpectralSample gs = gamma(s, Complex(-2.0, 0.0));
    CHECK((gs.weyl - gs.weyl.adjoint()).norm() < 1e-11 * gs.weyl.norm());
  }
}

TEST_CASE("weyl representation identity") {
  SUBCASE("1D model") {
    CHECK(weyl_representation_check(sl1d(16), Complex(1, 1), Complex(-1, 0)) < 1e-10);
  }
  SUBCASE("synthetic pair from its certified lambda0") {
    const TripleModel s = models::synthetic_pair(11, 6, 2);
    const Complex l0 = s.info().lambda0.value();
    for (Complex l : standard_probes(s)) {
      CHECK(weyl_representation_check(s, l, l0) < 1e-10);
    }
  }
}

TEST_CASE("tilde pencil spectrum is the conjugate of the plain one") {
  const TripleModel m = cd1d(16);
  std::vector<Complex> sp = a0_spectrum(m);
  std::vector<Complex> spt = a0t_spectrum(m);
  REQUIRE(sp.size() == spt.size());
  double scale = 1.0;
  for (Complex z : sp) scale = std::max(scale, std::abs(z));
  for (Complex z : sp) {
    double best = 1e300;
    for (Complex w : spt) best = std::min(best, std::abs(std::conj(z) - w));
    CHECK(best < 1e-8 * scale);
  }
}

TEST_CASE("builder invariants across all model kinds") {
  models::Grid2D grid;
  grid.nx = 6;
  grid.ny = 5;
  const std::vector<TripleModel> zoo = {sl1d(12), cd1d(12), models::elliptic_2d(grid),
                                        models::synthetic_pair(1, 8, 3)};
  for (const TripleModel& m : zoo) {
    CAPTURE(m.info().descriptor);
    CHECK(green_defect(m) < 1e-12);
    REQUIRE(m.info().lambda0.has_value());
    CHECK(check_maximality(m, *m.info().lambda0).ok);
    for (Complex l : standard_probes(m)) {
      const RawSample raw = spectral_raw(m, l);
      const double scale = m.op_t().norm() + std::abs(l) * m.embed().norm();
      CHECK(((m.op_t() - l * m.embed()) * raw.preimage).norm() < 1e-11 * scale);
      CHECK((m.g0() * raw.preimage - ComplexMatrix::Identity(m.m(), m.m())).norm() <
            1e-11);
    }
  }
}
