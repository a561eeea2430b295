#pragma once

#include "qbt/extensions.hpp"

namespace qbt {

struct VerifyOptions {
  // Probe points; when empty the standard filtered set is used.
  std::vector<Complex> probes;
  // Robin parameters theta for the Krein-vs-direct sweep.
  std::vector<Complex> thetas = {Complex(0.3, 0.0), Complex(1.0, 0.0), Complex(1.0, 1.0)};
  // Birman-Schwinger completeness (det roots vs pencil) on small instances.
  bool bs_completeness = true;
  Index bs_size_limit = 40;  // run only when n + m <= limit
  int search_grid = 24;
  double newton_tol = 1e-11;
};

// Krein resolvent assembled as a matrix on H from one stacked factorization;
// used for whole-operator comparisons against the direct solve.
ComplexMatrix krein_resolvent_matrix(const TripleModel& model,
                                     const BoundaryParameter& param, Complex lambda);

// Runs every identity of the suite on one model: Green, density ranks,
// condition (M), minimal-operator pairing, gamma and Weyl identities,
// Krein vs direct, adjoint duality, spectra conjugate symmetry,
// Birman-Schwinger completeness on small instances, and the symmetric
// specialization when the model is flagged symmetric.
VerificationReport run_verification_suite(const TripleModel& model,
                                          const VerifyOptions& options = {});

}  // namespace qbt
