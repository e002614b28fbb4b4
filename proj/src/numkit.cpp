#include "fockdil/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fockdil {

Config& config() {
    static Config c;
    return c;
}

namespace {

// Divide-and-conquer SVD, falling back to one-sided Jacobi when it reports no
// convergence or when `accept` rejects the factors.  Eigen 3.4's
// divide-and-conquer path can return inaccurate singular vectors on
// structured rank-deficient input, so callers verify what they use.
template <int Options, class Accept>
void decompose(const CMat& M, CMat* U, RVec& s, CMat* V, const char* where, Accept accept) {
    {
        Eigen::BDCSVD<CMat> dec(M, Options);
        if (dec.info() == Eigen::Success && dec.singularValues().allFinite()) {
            s = dec.singularValues();
            if (U) *U = dec.matrixU();
            if (V) *V = dec.matrixV();
            if (accept()) return;
        }
    }
    Eigen::JacobiSVD<CMat> jac(M, Options);
    if (jac.info() != Eigen::Success) {
        std::ostringstream os;
        os << where << ": no convergence for " << M.rows() << "x" << M.cols() << " matrix";
        throw SvdFailure(os.str());
    }
    s = jac.singularValues();
    if (U) *U = jac.matrixU();
    if (V) *V = jac.matrixV();
}

}  // namespace

SvdResult svd(const CMat& M) {
    SvdResult r;
    if (M.rows() == 0 || M.cols() == 0) {
        r.U = CMat::Zero(M.rows(), 0);
        r.s = RVec::Zero(0);
        r.V = CMat::Zero(M.cols(), 0);
        return r;
    }
    if (!M.allFinite()) {
        std::ostringstream os;
        os << "non-finite entries in " << M.rows() << "x" << M.cols() << " matrix";
        throw SvdFailure(os.str());
    }
    const double scale = M.norm();
    decompose<Eigen::ComputeThinU | Eigen::ComputeThinV>(M, &r.U, r.s, &r.V, "svd", [&] {
        return (r.U * r.s.asDiagonal() * r.V.adjoint() - M).norm() <= 1e-12 * std::max(1.0, scale) * std::sqrt(static_cast<double>(M.cols()));
    });
    return r;
}

double op_norm(const CMat& M) {
    if (M.size() == 0) return 0.0;
    // Largest eigenvalue of the smaller Gram matrix.
    const CMat G = M.rows() <= M.cols() ? CMat(M * M.adjoint()) : CMat(M.adjoint() * M);
    Eigen::SelfAdjointEigenSolver<CMat> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

bool is_hermitian(const CMat& M, double tol) {
    if (M.rows() != M.cols()) return false;
    return (M - M.adjoint()).norm() <= tol * std::max(1.0, M.norm());
}

CMat psqrt(const CMat& M, double tol) {
    if (M.rows() != M.cols())
        throw DimensionMismatch("psqrt needs a square matrix");
    const Index n = M.rows();
    if (n == 0) return CMat(0, 0);
    const CMat H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    const RVec& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.minCoeff() < -tol * scale) {
        std::ostringstream os;
        os << "minimum eigenvalue " << ev.minCoeff() << " below -" << tol * scale;
        throw NotPSD(os.str());
    }
    // Rounding noise of order eps above zero would turn into sqrt(eps) after
    // the root and pollute rank decisions on the result.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    RVec root(n);
    for (Index i = 0; i < n; ++i) root(i) = ev(i) > floor ? std::sqrt(ev(i)) : 0.0;
    const CMat& U = es.eigenvectors();
    return U * root.asDiagonal() * U.adjoint();
}

CMat pinv(const CMat& M, double rank_tol) {
    if (M.size() == 0) return CMat::Zero(M.cols(), M.rows());
    const SvdResult d = svd(M);
    const double cut = rank_tol * (d.s.size() ? d.s(0) : 0.0);
    CMat out = CMat::Zero(M.cols(), M.rows());
    for (Index i = 0; i < d.s.size(); ++i) {
        if (d.s(i) > cut && d.s(i) > 0.0)
            out.noalias() += d.V.col(i) * (1.0 / d.s(i)) * d.U.col(i).adjoint();
    }
    return out;
}

void canonicalize_phases(CMat& Q) {
    for (Index j = 0; j < Q.cols(); ++j) {
        const double mx = Q.col(j).cwiseAbs().maxCoeff();
        for (Index i = 0; i < Q.rows(); ++i) {
            if (std::abs(Q(i, j)) > 1e-6 * mx) {
                const cplx ph = std::conj(Q(i, j)) / std::abs(Q(i, j));
                Q.col(j) *= ph;
                break;
            }
        }
    }
}

SubspaceBasis range_basis(const CMat& M, double rank_tol) {
    const Index n = M.rows();
    if (M.size() == 0) return SubspaceBasis::zero(n);
    CMat Q;
    if (is_hermitian(M, 1e-12)) {
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (M + M.adjoint()));
        const RVec& ev = es.eigenvalues();
        const double mx = ev.cwiseAbs().maxCoeff();
        std::vector<Index> keep;
        for (Index i = n - 1; i >= 0; --i)
            if (std::abs(ev(i)) > rank_tol * mx && mx > 0.0) keep.push_back(i);
        Q.resize(n, static_cast<Index>(keep.size()));
        for (size_t k = 0; k < keep.size(); ++k) Q.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]);
    } else {
        const SvdResult d = svd(M);
        const double cut = rank_tol * d.s(0);
        Index r = 0;
        while (r < d.s.size() && d.s(r) > cut && d.s(r) > 0.0) ++r;
        Q = d.U.leftCols(r);
    }
    canonicalize_phases(Q);
    return SubspaceBasis(Q);
}

SubspaceBasis kernel_basis(const CMat& M, double rank_tol, double abs_tol) {
    const Index n = M.cols();
    if (M.rows() == 0 || n == 0 || M.norm() <= abs_tol || M.norm() == 0.0)
        return SubspaceBasis::whole(n);
    // Full V is needed, so go through the Gram-free SVD of M.
    RVec s;
    CMat V;
    Index r = 0;
    double cut = 0.0;
    const double scale = M.norm();
    decompose<Eigen::ComputeFullV>(M, nullptr, s, &V, "kernel_basis", [&] {
        cut = std::max(rank_tol * s(0), abs_tol);
        r = 0;
        while (r < s.size() && s(r) > cut) ++r;
        const double leak = (M * V.rightCols(n - r)).norm();
        return leak <= std::max(cut, 1e-12 * scale) * std::sqrt(static_cast<double>(n - r + 1)) &&
               (V.adjoint() * V - CMat::Identity(n, n)).norm() <= 1e-10;
    });
    cut = std::max(rank_tol * s(0), abs_tol);
    r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    CMat K = V.rightCols(n - r);
    canonicalize_phases(K);
    return SubspaceBasis(K);
}

SubspaceBasis complement(const SubspaceBasis& S, double rank_tol) {
    if (S.dim() == 0) return SubspaceBasis::whole(S.ambient());
    return kernel_basis(S.basis.adjoint(), rank_tol);
}

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b, double rank_tol) {
    if (a.ambient() != b.ambient()) throw DimensionMismatch("intersect: ambient dimensions differ");
    const Index n = a.ambient();
    if (a.dim() == 0 || b.dim() == 0) return SubspaceBasis::zero(n);
    if (a.dim() == n) return b;
    if (b.dim() == n) return a;
    CMat stacked(2 * n, n);
    stacked.topRows(n) = CMat::Identity(n, n) - a.projector();
    stacked.bottomRows(n) = CMat::Identity(n, n) - b.projector();
    return kernel_basis(stacked, rank_tol, 1e-10);
}

double containment_residual(const SubspaceBasis& S, const CMat& X) {
    if (X.size() == 0) return 0.0;
    const CMat R = X - S.basis * (S.basis.adjoint() * X);
    return R.size() ? op_norm(R) : 0.0;
}

SubspaceBasis largest_coinvariant_in(const SubspaceBasis& K, const std::vector<CMat>& ops,
                                     double rank_tol) {
    const Index n = K.ambient();
    double scale = 1.0;
    for (const CMat& op : ops) {
        if (op.rows() != n || op.cols() != n)
            throw DimensionMismatch("largest_coinvariant_in: operator does not act on the ambient space");
        scale = std::max(scale, op.norm());
    }
    const double abs_tol = 1e-10 * scale;
    CMat S = K.basis;
    for (Index step = 0; step <= n + 1 && S.cols() > 0; ++step) {
        CMat stacked(static_cast<Index>(ops.size()) * n, S.cols());
        for (size_t i = 0; i < ops.size(); ++i) {
            const CMat img = ops[i] * S;
            stacked.middleRows(static_cast<Index>(i) * n, n) = img - S * (S.adjoint() * img);
        }
        if (stacked.size() == 0 || stacked.norm() <= abs_tol) break;
        const SubspaceBasis Y = kernel_basis(stacked, rank_tol, abs_tol);
        if (Y.dim() == S.cols()) break;
        S = S * Y.basis;
    }
    return SubspaceBasis(S);
}

CMat kron(const CMat& A, const CMat& B) {
    CMat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

CVec vec(const CMat& X) {
    return Eigen::Map<const CVec>(X.data(), X.size());
}

CMat unvec(const CVec& v, Index rows, Index cols) {
    return Eigen::Map<const CMat>(v.data(), rows, cols);
}

CMat polar_unitary(const CMat& M) {
    if (M.size() == 0) return CMat(M.rows(), M.cols());
    Eigen::JacobiSVD<CMat> dec(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return dec.matrixU() * dec.matrixV().adjoint();
}

}  // namespace fockdil
