#pragma once

// Dense complex linear-algebra kernels shared by every other module.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fockdil {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

// Global numerical knobs.  Every operation that needs one of these takes it
// as a defaulted argument that reads from here at call time.
struct Config {
    double rank_tol = 1e-9;   // relative singular-value cutoff for ranks
    double tol_orth = 1e-10;  // orthonormality of subspace bases
    double tol_conv = 1e-12;  // convergence of monotone iterations
    double tol_fix = 1e-8;    // singular-value cutoff for fixed points
    double tol_fit = 1e-7;    // relative least-squares residual for gamma
    double tol_inner = 1e-8;  // innerness of symbols
    double tol = 1e-9;        // generic predicate tolerance
};

Config& config();

class FockdilError : public std::runtime_error {
public:
    explicit FockdilError(const std::string& what) : std::runtime_error(what) {}
};

#define FOCKDIL_ERROR(Name)                                                   \
    class Name : public FockdilError {                                        \
    public:                                                                   \
        explicit Name(const std::string& what) : FockdilError(#Name ": " + what) {} \
    }

FOCKDIL_ERROR(NotPSD);
FOCKDIL_ERROR(NotContraction);
FOCKDIL_ERROR(ConvergenceFailure);
FOCKDIL_ERROR(NoInvariantVectorState);
FOCKDIL_ERROR(NotErgodic);
FOCKDIL_ERROR(BufferTooSmall);
FOCKDIL_ERROR(NotInvariant);
FOCKDIL_ERROR(NotReduced);
FOCKDIL_ERROR(NotConstrained);
FOCKDIL_ERROR(NotCommuting);
FOCKDIL_ERROR(InconsistentLifting);
FOCKDIL_ERROR(DimensionMismatch);
FOCKDIL_ERROR(SvdFailure);

#undef FOCKDIL_ERROR

// Orthonormal basis (as matrix columns) of a subspace of C^ambient.
struct SubspaceBasis {
    CMat basis;

    SubspaceBasis() = default;
    explicit SubspaceBasis(CMat b) : basis(std::move(b)) {}

    Index ambient() const { return basis.rows(); }
    Index dim() const { return basis.cols(); }
    CMat projector() const { return basis * basis.adjoint(); }

    static SubspaceBasis whole(Index n) { return SubspaceBasis(CMat::Identity(n, n)); }
    static SubspaceBasis zero(Index n) { return SubspaceBasis(CMat::Zero(n, 0)); }
};

struct SvdResult {
    CMat U;
    RVec s;
    CMat V;
};

// Thin SVD, M = U diag(s) V^dagger with s descending.
SvdResult svd(const CMat& M);

// Positive square root of a Hermitian PSD matrix.  Eigenvalues in
// [-tol * max(1, |M|), 0) are clamped to zero; anything more negative throws.
CMat psqrt(const CMat& M, double tol = 1e-9);

// Moore-Penrose pseudo-inverse with relative singular-value cutoff.
CMat pinv(const CMat& M, double rank_tol = config().rank_tol);

// Orthonormal basis of the numerical range of M.
SubspaceBasis range_basis(const CMat& M, double rank_tol = config().rank_tol);

// Orthonormal basis of the numerical kernel of M.  Singular values at or
// below max(rank_tol * s_max, abs_tol) count as zero.
SubspaceBasis kernel_basis(const CMat& M, double rank_tol = config().rank_tol,
                           double abs_tol = 0.0);

// Orthogonal complement inside the ambient space.
SubspaceBasis complement(const SubspaceBasis& S, double rank_tol = config().rank_tol);

// Intersection of two subspaces of the same ambient space, computed as the
// kernel of the stacked complement projectors.
SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b,
                        double rank_tol = config().rank_tol);

// Largest S inside K with op * S contained in S for every op.
SubspaceBasis largest_coinvariant_in(const SubspaceBasis& K, const std::vector<CMat>& ops,
                                     double rank_tol = config().rank_tol);

// Residual of "range of X lies in S": |(1 - P_S) X|.
double containment_residual(const SubspaceBasis& S, const CMat& X);

double op_norm(const CMat& M);
bool is_hermitian(const CMat& M, double tol);
CMat kron(const CMat& A, const CMat& B);

// Column-stacking vectorisation and its inverse.
CVec vec(const CMat& X);
CMat unvec(const CVec& v, Index rows, Index cols);

// Unitary polar factor U of M = U |M| (square M).
CMat polar_unitary(const CMat& M);

// Rotate each column so that its first entry of significant modulus is real
// and positive.  Used to make reported bases reproducible.
void canonicalize_phases(CMat& Q);

}  // namespace fockdil
