#pragma once

// Minimal isometric dilation on truncated Fock space, Poisson kernel,
// wandering subspaces and Beurling symbols of invariant subspaces.

#include "fockdil/symbols.hpp"

namespace fockdil {

// V_i acts from H (+) Gamma_{<=N} (x) D into H (+) Gamma_{<=N+1} (x) D, in
// defect-space coordinates.  The target carries one extra level so that V is
// an exact row isometry on its domain.
struct MidRealization {
    OperatorTuple base;
    DefectData defect;
    int N = 0;
    std::vector<CMat> V;

    Index domain_dim() const;
    Index target_dim() const;
    // V_i followed by the projection back onto the domain; a square tuple.
    OperatorTuple compressed() const;
};

MidRealization mid(const OperatorTuple& T, int N);

// Rows (alpha, k) with block alpha equal to Q_*^dagger D_* T_alpha^*, for |alpha| <= N.
CMat poisson_kernel(const OperatorTuple& T, int N, const DefectData& dd);
CMat poisson_kernel(const OperatorTuple& T, int N);

// The blocks D_* T_alpha^* (ambient rows, not projected), indexed by Fock index.
std::vector<CMat> poisson_blocks(const OperatorTuple& T, int N, const CMat& Dstar);

// L_i (x) 1 on Gamma_{<=N} (x) C^u.
OperatorTuple shifted_creation(int d, int N, Index u);

// M minus the span of (L_i (x) 1) M.  Throws NotInvariant if M is not
// invariant within tol.
SubspaceBasis wandering_subspace(const SubspaceBasis& M, int d, Index U_dim, int N,
                                 double tol = 1e-8);

struct BeurlingResult {
    MultiAnalyticSymbol theta;  // N_wandering -> Gamma_{<=N} (x) U
    SubspaceBasis wandering;
    double roundtrip;  // |P_range(extend theta) - P_M|
};

BeurlingResult beurling_symbol(const SubspaceBasis& M, int d, Index U_dim, int N,
                               double tol = 1e-8);

// Operators on H (+) Gamma_J,<=N (x) D given by
// S_i(h, x) = (T_i h, e_0 (x) D_i h + (L^J_i (x) 1) x), with L^J the
// compression of the creation operators to the constrained subspace.  The
// top level is mapped to zero as for the creation operators.
struct PseudoConstrainedMid {
    OperatorTuple S;
    SubspaceBasis gamma_J;  // constrained subspace of Gamma_{<=N}
    Index defect_dim = 0;
};

PseudoConstrainedMid pseudo_constrained_mid(const OperatorTuple& T, const ConstraintSet& J, int N);

}  // namespace fockdil
