#pragma once

// Seeded random generators for the property suites: matrices, row
// contractions, coisometric tuples and liftings with prescribed structure.

#include "fockdil/liftings.hpp"

#include <random>

namespace fockdil {

using Rng = std::mt19937_64;

// Entries i.i.d. standard complex Gaussian.
CMat random_gaussian(Index rows, Index cols, Rng& rng);
// Haar-like unitary from the QR factor of a Gaussian matrix.
CMat random_unitary(Index n, Rng& rng);
// rows x cols with orthonormal columns (rows >= cols).
CMat random_isometry(Index rows, Index cols, Rng& rng);
// Contraction with operator norm exactly `norm`.
CMat random_contraction(Index rows, Index cols, Rng& rng, double norm = 0.9);

// Row contraction with |[T_1 ... T_d]| = norm.  norm < 1 gives a *-stable tuple.
OperatorTuple random_row_contraction(int d, Index m, Rng& rng, double norm = 0.9);
// sum T_i T_i^* = 1.
OperatorTuple random_coisometric(int d, Index m, Rng& rng);
// Direct sum of two coisometric tuples, so the CP map has a two-dimensional
// fixed-point space.
OperatorTuple random_nonergodic_coisometric(int d, Index m1, Index m2, Rng& rng);
// Coisometric tuple with A_i^* Omega = conj(omega_i) Omega, resampled until
// ergodic.  Omega and omega are returned through the frame hint.
struct CoisometricWithEigenvector {
    OperatorTuple A;
    CVec Omega;
    CVec omega;
};
CoisometricWithEigenvector random_ergodic_coisometric(int d, Index m, Rng& rng);
// Commuting coisometric tuple: A_i = U diag(z_i) U^* with each point
// (z_1(k), ..., z_d(k)) on the unit sphere.
OperatorTuple random_commuting_coisometric(int d, Index m, Rng& rng);

// Lifting of a random row contraction C by a random *-stable A with a random
// injective contraction gamma, resampled until classify() reports reduced.
Lifting random_reduced_lifting(int d, Index mC, Index mA, Rng& rng);
// Same with C given.
Lifting random_reduced_lifting_of(const OperatorTuple& C, Index mA, Rng& rng, double gamma_norm = 0.7);
// Lifting of C by a random *-stable A with an isometric gamma.  Needs
// dim D_C >= dim D_{*,A}; throws DimensionMismatch otherwise.
Lifting random_subisometric_lifting(const OperatorTuple& C, Index mA, Rng& rng);
// Lifting of C by A with an isometric gamma on the given A.
Lifting isometric_gamma_lifting(const OperatorTuple& C, const OperatorTuple& A, Rng& rng);

// U (1 (+) W) E (1 (+) W)^* restricted back to a lifting: A -> W A W^*, B -> W B.
Lifting rotate_lifting(const Lifting& L, const CMat& W);

}  // namespace fockdil
