#include "fockdil/tuples.hpp"

#include "fockdil/cpmaps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fockdil {

OperatorTuple::OperatorTuple(std::vector<CMat> mats) : mats_(std::move(mats)) {
    if (mats_.empty()) throw DimensionMismatch("operator tuple needs at least one letter");
    const Index n = mats_.front().rows();
    for (const CMat& m : mats_) {
        if (m.rows() != n || m.cols() != n)
            throw DimensionMismatch("operator tuple entries must be square of equal size");
        if (!m.allFinite()) throw DimensionMismatch("operator tuple has non-finite entries");
    }
}

OperatorTuple OperatorTuple::empty(int d) {
    return OperatorTuple(std::vector<CMat>(static_cast<size_t>(d), CMat(0, 0)));
}

CMat OperatorTuple::row() const {
    const Index n = dim();
    CMat R(n, n * d());
    for (int i = 0; i < d(); ++i) R.middleCols(i * n, n) = mats_[static_cast<size_t>(i)];
    return R;
}

CMat OperatorTuple::row_gram() const {
    const Index n = dim();
    CMat G = CMat::Zero(n, n);
    for (const CMat& m : mats_) G.noalias() += m * m.adjoint();
    return G;
}

CMat OperatorTuple::word(const std::vector<int>& letters) const {
    CMat W = CMat::Identity(dim(), dim());
    for (int a : letters) {
        if (a < 1 || a > d()) throw DimensionMismatch("word letter out of range");
        W = W * mats_[static_cast<size_t>(a - 1)];
    }
    return W;
}

std::vector<CMat> OperatorTuple::adjoints() const {
    std::vector<CMat> out;
    out.reserve(mats_.size());
    for (const CMat& m : mats_) out.push_back(m.adjoint());
    return out;
}

OperatorTuple OperatorTuple::compress(const CMat& U) const {
    std::vector<CMat> out;
    out.reserve(mats_.size());
    for (const CMat& m : mats_) out.push_back(U.adjoint() * m * U);
    if (U.cols() == 0) return empty(d());
    return OperatorTuple(std::move(out));
}

bool is_row_contraction(const OperatorTuple& T, double tol) {
    if (T.dim() == 0) return true;
    return op_norm(T.row_gram()) <= 1.0 + tol;
}

bool is_coisometric(const OperatorTuple& T, double tol) {
    if (T.dim() == 0) return true;
    const CMat G = T.row_gram() - CMat::Identity(T.dim(), T.dim());
    return op_norm(G) < tol;
}

bool is_commuting(const OperatorTuple& T, double tol) {
    for (int i = 0; i < T.d(); ++i)
        for (int j = i + 1; j < T.d(); ++j)
            if (op_norm(T[i] * T[j] - T[j] * T[i]) >= tol) return false;
    return true;
}

DefectData defects(const OperatorTuple& T, double rank_tol) {
    const Index n = T.dim();
    const int d = T.d();
    const double nrm = n ? op_norm(T.row_gram()) : 0.0;
    if (nrm > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "|sum T_i T_i^*| = " << nrm;
        throw NotContraction(os.str());
    }
    DefectData out;
    out.Dstar = fockdil::psqrt(CMat::Identity(n, n) - T.row_gram());
    const CMat R = T.row();
    out.Dfull = fockdil::psqrt(CMat::Identity(n * d, n * d) - R.adjoint() * R);
    out.defect_star = range_basis(out.Dstar, rank_tol);
    out.defect = range_basis(out.Dfull, rank_tol);
    return out;
}

StabilityReport stability_report(const OperatorTuple& T, double tol) {
    const Index n = T.dim();
    StabilityReport rep;
    rep.iterations = 0;
    rep.residual = 0.0;
    if (n == 0) {
        rep.Q = CMat(0, 0);
        rep.star_stable = true;
        rep.H1 = SubspaceBasis::zero(0);
        rep.cnc = true;
        return rep;
    }
    const double tol_conv = config().tol_conv;
    const int max_iter = static_cast<int>(10 * n * n) + 10;
    CMat X = CMat::Identity(n, n);
    bool converged = false;
    if (n <= 20) {
        // Iterate Phi^{2^k - 1}(1) by squaring the superoperator.
        CMat P = CPMap(T).superoperator();
        CVec x = vec(X);
        for (int k = 0; k < max_iter; ++k) {
            const CVec y = P * x;
            rep.residual = op_norm(unvec(y - x, n, n));
            x = y;
            rep.iterations = k + 1;
            if (rep.residual < tol_conv) {
                converged = true;
                break;
            }
            P = P * P;
        }
        X = unvec(x, n, n);
    } else {
        const CPMap phi(T);
        for (int k = 0; k < max_iter; ++k) {
            const CMat Y = phi.apply(X);
            rep.residual = op_norm(Y - X);
            X = Y;
            rep.iterations = k + 1;
            if (rep.residual < tol_conv) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "Phi^n(1) did not settle after " << rep.iterations << " steps, last change "
           << rep.residual;
        throw ConvergenceFailure(os.str());
    }
    rep.Q = 0.5 * (X + X.adjoint());
    rep.star_stable = op_norm(rep.Q) < tol;
    Eigen::SelfAdjointEigenSolver<CMat> es(rep.Q);
    std::vector<Index> ones;
    for (Index i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 1.0 - 1e-7) ones.push_back(i);
    CMat H(n, static_cast<Index>(ones.size()));
    for (size_t k = 0; k < ones.size(); ++k) H.col(static_cast<Index>(k)) = es.eigenvectors().col(ones[k]);
    canonicalize_phases(H);
    rep.H1 = SubspaceBasis(H);
    rep.cnc = rep.H1.dim() == 0;
    return rep;
}

namespace {

// Residual of v being a joint eigenvector of all adjoints.
double joint_residual(const OperatorTuple& A, const CVec& v) {
    double worst = 0.0;
    for (int i = 0; i < A.d(); ++i) {
        const CVec w = A[i].adjoint() * v;
        const cplx lam = v.dot(w);
        worst = std::max(worst, (w - lam * v).norm());
    }
    return worst;
}

void canonical_phase(CVec& v) {
    const double mx = v.cwiseAbs().maxCoeff();
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-6 * mx) {
            v *= std::conj(v(i)) / std::abs(v(i));
            return;
        }
    }
}

// Eigenvectors of M sorted by descending modulus, ties by real then imaginary part.
std::vector<CVec> sorted_eigenvectors(const CMat& M) {
    Eigen::ComplexEigenSolver<CMat> es(M);
    const Index n = M.rows();
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const CVec& ev = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ma = std::abs(ev(a)), mb = std::abs(ev(b));
        if (std::abs(ma - mb) > 1e-12) return ma > mb;
        if (std::abs(ev(a).real() - ev(b).real()) > 1e-12) return ev(a).real() < ev(b).real();
        return ev(a).imag() < ev(b).imag();
    });
    std::vector<CVec> out;
    for (Index i : order) out.push_back(es.eigenvectors().col(i).normalized());
    return out;
}

}  // namespace

EigenFrame eigen_frame(const OperatorTuple& A, const std::optional<CVec>& Omega_hint, double tol) {
    const Index n = A.dim();
    if (n == 0) throw NoInvariantVectorState("zero-dimensional space");
    std::optional<CVec> found;
    if (Omega_hint) {
        CVec v = Omega_hint->normalized();
        if (joint_residual(A, v) < tol) found = v;
    } else {
        for (const CVec& v : sorted_eigenvectors(A[0].adjoint())) {
            if (joint_residual(A, v) < tol) {
                found = v;
                break;
            }
        }
        if (!found && A.d() > 1) {
            // A repeated eigenvalue of A_1^* can hide joint eigenvectors; a
            // generic combination separates them.
            CMat G = CMat::Zero(n, n);
            for (int i = 0; i < A.d(); ++i)
                G += cplx(1.0 / (i + 1.7), 0.31 * (i + 1)) * A[i].adjoint();
            for (const CVec& v : sorted_eigenvectors(G)) {
                if (joint_residual(A, v) < tol) {
                    found = v;
                    break;
                }
            }
        }
    }
    if (!found) throw NoInvariantVectorState("no common unit eigenvector of the adjoints");
    EigenFrame f;
    f.Omega = *found;
    canonical_phase(f.Omega);
    f.omega.resize(A.d());
    for (int i = 0; i < A.d(); ++i) {
        const cplx conj_omega = f.Omega.dot(A[i].adjoint() * f.Omega);
        f.omega(i) = std::conj(conj_omega);
        f.ells.push_back(A[i] * f.Omega - f.omega(i) * f.Omega);
    }
    return f;
}

RestrictedTuple restrict_off_omega(const OperatorTuple& A, const EigenFrame& f, double tol) {
    const Index n = A.dim();
    if (f.Omega.size() != n || f.omega.size() != A.d())
        throw DimensionMismatch("frame does not match the tuple");
    if (joint_residual(A, f.Omega) >= tol)
        throw NoInvariantVectorState("frame vector is not a joint eigenvector");
    RestrictedTuple out;
    Eigen::HouseholderQR<CMat> qr(CMat(f.Omega));
    const CMat Qfull = qr.householderQ() * CMat::Identity(n, n);
    out.basis = Qfull.rightCols(n - 1);
    canonicalize_phases(out.basis);
    out.tuple = A.compress(out.basis);
    return out;
}

bool is_ergodic(const OperatorTuple& T) {
    const Index n = T.dim();
    const std::vector<CMat> fp = fixed_points(CPMap(T));
    if (fp.size() != 1) return false;
    const CMat& X = fp.front();
    const cplx tr = X.trace() / static_cast<double>(n);
    return (X - tr * CMat::Identity(n, n)).norm() < 1e-8;
}

}  // namespace fockdil
