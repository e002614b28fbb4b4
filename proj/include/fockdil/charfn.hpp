#pragma once

// Characteristic functions: Popescu's theta_T, the characteristic function
// of a lifting, the extended characteristic function of an ergodic
// coisometric tuple, its constrained compression, the functional model and
// the cocycle product for the Poisson kernel.
//
// Every characteristic function is first computed as a "raw" family G on the
// ambient space (+)H of the domain tuple, with G(x) = Theta(D x).  The symbol
// in defect coordinates is then Theta = G pinv(D) Q_D.

#include "fockdil/dilation.hpp"
#include "fockdil/liftings.hpp"
#include "fockdil/symbols.hpp"

namespace fockdil {

// Raw Popescu family, domain (+)H (d * dim columns), codomain D_* coordinates.
MultiAnalyticSymbol popescu_raw(const OperatorTuple& T, int N, const DefectData& dd);
// theta_T : D -> Gamma_{<=N} (x) D_*.
MultiAnalyticSymbol popescu_char(const OperatorTuple& T, int N);

struct LiftingChar {
    MultiAnalyticSymbol theta;  // D_E -> Gamma_{<=N} (x) D_C, in the two bases below
    MultiAnalyticSymbol raw;    // (+)H_E -> Gamma_{<=N} (x) D_C
    MultiAnalyticSymbol m0;     // H_A -> Gamma_{<=N} (x) D_C, h -> sum e_alpha (x) gamma D_{*,A} A_alpha^* h
    CMat dom_basis;             // orthonormal basis of D_E inside (+)H_E
    CMat cod_basis;             // orthonormal basis of D_C inside (+)H_C
    double kernel_leak;         // |G (1 - pinv(D_E) D_E)|, zero when G factors through D_E
};

// Raw family and M_0 with codomain written in the columns of Qout (an
// orthonormal basis of D_C).
LiftingChar lifting_char_full(const Lifting& L, int N, bool allow_nonreduced = false,
                              const CMat* Qout = nullptr);
MultiAnalyticSymbol lifting_char(const Lifting& L, int N, bool allow_nonreduced = false);

// Rows of M_0 M_0^dagger + M M^dagger - 1 restricted to levels <= levels.
double unitarity_residual(const LiftingChar& lc, int N, int levels);

struct ExtendedChar {
    MultiAnalyticSymbol theta;  // D_A -> Gamma_{<=N} (x) D_omega
    MultiAnalyticSymbol raw;    // (+)H -> Gamma_{<=N} (x) D_omega, original coordinates
    CMat eps;                   // d x (d-1) basis of the orthogonal complement of conj(omega)
    CMat frame;                 // [Omega, basis of Omega^perp]
    Lifting lifting;            // omega on C Omega lifted by the restricted tuple
    CMat gamma_eps;             // gamma with codomain in the eps basis
    EigenFrame ef;
    RestrictedTuple restricted;
};

// Orthonormal basis of the complement of conj(omega) in C^d, by Gram-Schmidt
// on e_i - <conj(omega), e_i> conj(omega) in index order.
CMat omega_complement_basis(const CVec& omega);

ExtendedChar extended_char(const OperatorTuple& A, const EigenFrame& frame, int N);
ExtendedChar extended_char(const OperatorTuple& A, int N);

struct ConstrainedChar {
    LiftingChar base;
    SubspaceBasis gamma_J;      // constrained subspace of Gamma_{<=N}
    MultiAnalyticSymbol theta;  // (P_J (x) 1) theta, per word in Gamma coordinates
    CMat M_J;                   // compression of M to (Gamma_J (x) D_C) x (Gamma_J (x) D_E)
    CMat M0_J;                  // (P_J (x) 1) M_0 in Gamma_J coordinates
    double leak;                // |(1 - P_J (x) 1) theta|
};

// Largest |p(E)| over the constraint polynomials.
double constraint_residual(const OperatorTuple& E, const ConstraintSet& J);

ConstrainedChar constrained_char(const Lifting& L, const ConstraintSet& J, int N,
                                 bool allow_nonreduced = false, double tol = 1e-8);

// Rows of M0_J M0_J^dagger + M_J M_J^dagger - 1 restricted to levels <= levels.
double constrained_unitarity_residual(const ConstrainedChar& cc, int N, int levels);

// Lifting of C built from a contractive symbol theta into Gamma (x) D_C.
Lifting functional_model(const OperatorTuple& C, const MultiAnalyticSymbol& theta, int N);

// One factor of the cocycle product as a dense matrix.  Its domain is the
// residual block (+)_{|beta| = j} H followed by Gamma_{<j} (x) D_*; the
// residual at beta is sent to e_beta (x) D_* x_beta and to T_i^* x_beta at
// beta i.  Each factor is an isometry.
CMat cocycle_step(const OperatorTuple& T, int j, const DefectData& dd);

// Fock part of the k-fold product restricted to H, embedded in
// Gamma_{<=N} (x) D_*.  Throws BufferTooSmall if k > N.
CMat cocycle_product(const OperatorTuple& T, int k, int N);

}  // namespace fockdil
