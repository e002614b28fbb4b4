#pragma once

// Completely positive maps X -> sum T_i X T_i^*, their fixed points, and the
// compression map between fixed-point spaces of a lifting.

#include "fockdil/tuples.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace fockdil {

struct Lifting;

class CPMap {
public:
    explicit CPMap(OperatorTuple T);

    const OperatorTuple& tuple() const { return T_; }
    Index dim() const { return T_.dim(); }

    // S with S vec(X) = vec(sum T_i X T_i^*), column-stacking vec.
    CMat superoperator() const;
    // One application of the map.
    CMat apply(const CMat& X) const;
    // n-fold application.  Small spaces with large n go through binary
    // powering of the superoperator.
    CMat apply(const CMat& X, long n) const;

private:
    OperatorTuple T_;
    // Sparse copies of the operators, kept only for large low-density tuples.
    std::vector<Eigen::SparseMatrix<cplx>> sparse_;
};

// Frobenius-orthonormal basis of ker(S - 1), singular-value cutoff tol_fix.
std::vector<CMat> fixed_points(const CPMap& phi, double tol_fix = config().tol_fix);

// Top-left m_C block of X.
CMat kappa(const CMat& X, Index mC);

struct KappaInverse {
    CMat limit;
    int iterations;
    double residual;
};

// Limit of Phi_E^n(x (+) 0) for a fixed point x of Phi_C.
KappaInverse kappa_inverse(const Lifting& L, const CMat& x, double tol = 1e-10,
                           int max_iter = 200000);

struct ErgodicLiftingCheck {
    bool erg_E;
    bool erg_C;
    bool star_stable_A;
    bool biconditional_holds;
};

ErgodicLiftingCheck ergodic_lifting_check(const Lifting& L);

}  // namespace fockdil
