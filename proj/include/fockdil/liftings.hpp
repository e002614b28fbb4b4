#pragma once

// Liftings E_i = [[C_i, 0], [B_i, A_i]] of a row contraction C, the
// contraction gamma with B^* = D_C gamma D_{*,A}, classification predicates
// and two-step stacking.

#include "fockdil/tuples.hpp"

namespace fockdil {

struct Lifting {
    OperatorTuple C;       // on H_C, dim m_C
    OperatorTuple A;       // on H_A, dim m_A
    std::vector<CMat> B;   // m_A x m_C each
    CMat gamma;            // dim D_C x dim D_{*,A}, in the range bases below
    double residual = 0.0; // |B^* - D_C gamma D_{*,A}|_F
    DefectData defC;       // defects of C; gamma's codomain basis is defC.defect
    DefectData defA;       // defects of A; gamma's domain basis is defA.defect_star

    int d() const { return C.d(); }
    Index mC() const { return C.dim(); }
    Index mA() const { return A.dim(); }
    // The assembled tuple on H_C (+) H_A.
    OperatorTuple E() const;
    // [B_1^*; ...; B_d^*] : H_A -> (+)H_C.
    CMat Bstar_stacked() const;
    // gamma D_{*,A} written as a map H_A -> (+)H_C.
    CMat gamma_ambient() const;
};

// Lifting with B_i^* the i-th block of D_C gamma D_{*,A}.
Lifting lift_from_gamma(const OperatorTuple& C, const OperatorTuple& A, const CMat& gamma);

// Least-squares gamma from given blocks; throws InconsistentLifting when the
// residual exceeds tol_fit * |B|.
Lifting recover_gamma(const OperatorTuple& C, const OperatorTuple& A, const std::vector<CMat>& B,
                      double tol_fit = config().tol_fit);

// Split an assembled tuple on C^{mC} (+) C^{mA} into a lifting.  Throws
// DimensionMismatch if the upper-right blocks are not zero.
Lifting lifting_from_blocks(const OperatorTuple& E, Index mC, double tol = 1e-10);

struct Classification {
    bool is_coisometric_lifting;
    bool is_subisometric;
    bool is_resolving;
    bool is_reduced;
    bool gamma_isometric;
    bool star_stable_A;
    bool cnc_A;
    Index unresolved_dim;  // dim of the largest A^*-invariant subspace in ker(gamma D_{*,A})
};

Classification classify(const Lifting& L, double tol = 1e-8);

// L2 lifts the assembled tuple of L1 by A~; the result lifts C by the lower
// right block [[A, 0], [*, A~]].
Lifting stack(const Lifting& L1, const Lifting& L2, double tol = 1e-9);

}  // namespace fockdil
