#include "fockdil/cpmaps.hpp"

#include "fockdil/liftings.hpp"

#include <sstream>

namespace fockdil {

CPMap::CPMap(OperatorTuple T) : T_(std::move(T)) {
    const Index n = T_.dim();
    if (n < 64) return;
    Index nnz = 0;
    for (const CMat& t : T_.mats()) nnz += (t.array() != cplx(0.0, 0.0)).count();
    if (static_cast<double>(nnz) > 0.05 * static_cast<double>(n * n) * T_.d()) return;
    for (const CMat& t : T_.mats()) sparse_.push_back(t.sparseView());
}

CMat CPMap::superoperator() const {
    const Index n = dim();
    CMat S = CMat::Zero(n * n, n * n);
    // vec(T X T^*) = (conj(T) kron T) vec(X)
    for (const CMat& t : T_.mats()) S += kron(t.conjugate(), t);
    return S;
}

CMat CPMap::apply(const CMat& X) const {
    const Index n = dim();
    if (X.rows() != n || X.cols() != n) throw DimensionMismatch("CP map argument has the wrong size");
    CMat Y = CMat::Zero(n, n);
    if (!sparse_.empty()) {
        for (const auto& t : sparse_) {
            const CMat TX = t * X;
            Y.noalias() += (t * TX.adjoint()).adjoint();
        }
        return Y;
    }
    for (const CMat& t : T_.mats()) Y.noalias() += t * X * t.adjoint();
    return Y;
}

CMat CPMap::apply(const CMat& X, long n) const {
    if (n <= 32 || dim() > 16) {
        CMat Y = X;
        for (long k = 0; k < n; ++k) Y = apply(Y);
        return Y;
    }
    CMat P = superoperator();
    CVec x = vec(X);
    long e = n;
    while (e > 0) {
        if (e & 1) x = P * x;
        e >>= 1;
        if (e) P = P * P;
    }
    return unvec(x, dim(), dim());
}

std::vector<CMat> fixed_points(const CPMap& phi, double tol_fix) {
    const Index n = phi.dim();
    const CMat M = phi.superoperator() - CMat::Identity(n * n, n * n);
    const SubspaceBasis K = kernel_basis(M, 0.0, tol_fix);
    std::vector<CMat> out;
    for (Index i = 0; i < K.dim(); ++i) out.push_back(unvec(K.basis.col(i), n, n));
    return out;
}

CMat kappa(const CMat& X, Index mC) { return X.topLeftCorner(mC, mC); }

KappaInverse kappa_inverse(const Lifting& L, const CMat& x, double tol, int max_iter) {
    const Index mC = L.mC(), mE = L.mC() + L.mA();
    const CPMap phiE(L.E());
    CMat Y = CMat::Zero(mE, mE);
    Y.topLeftCorner(mC, mC) = x;
    KappaInverse out{Y, 0, 0.0};
    for (int k = 0; k < max_iter; ++k) {
        const CMat Z = phiE.apply(out.limit);
        out.residual = op_norm(Z - out.limit);
        out.limit = Z;
        out.iterations = k + 1;
        if (out.residual < tol) return out;
    }
    std::ostringstream os;
    os << "Phi_E^n(x (+) 0) did not settle, last change " << out.residual;
    throw ConvergenceFailure(os.str());
}

ErgodicLiftingCheck ergodic_lifting_check(const Lifting& L) {
    ErgodicLiftingCheck out;
    out.erg_E = is_ergodic(L.E());
    out.erg_C = L.mC() == 1 ? true : is_ergodic(L.C);
    out.star_stable_A = stability_report(L.A).star_stable;
    out.biconditional_holds = out.erg_E == (out.erg_C && out.star_stable_A);
    return out;
}

}  // namespace fockdil
