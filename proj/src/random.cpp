#include "fockdil/random.hpp"

#include <cmath>
#include <sstream>

namespace fockdil {

CMat random_gaussian(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMat M(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) M(r, c) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
    return M;
}

CMat random_unitary(Index n, Rng& rng) { return random_isometry(n, n, rng); }

CMat random_isometry(Index rows, Index cols, Rng& rng) {
    if (cols > rows) throw DimensionMismatch("isometry needs rows >= cols");
    if (cols == 0) return CMat::Zero(rows, 0);
    const CMat G = random_gaussian(rows, cols, rng);
    Eigen::HouseholderQR<CMat> qr(G);
    CMat Q = qr.householderQ() * CMat::Identity(rows, cols);
    const CMat R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Index k = 0; k < cols; ++k) {
        const cplx rk = R(k, k);
        if (std::abs(rk) > 0) Q.col(k) *= rk / std::abs(rk);
    }
    return Q;
}

CMat random_contraction(Index rows, Index cols, Rng& rng, double norm) {
    if (rows == 0 || cols == 0) return CMat::Zero(rows, cols);
    const CMat G = random_gaussian(rows, cols, rng);
    return G * (norm / op_norm(G));
}

OperatorTuple random_row_contraction(int d, Index m, Rng& rng, double norm) {
    const CMat R = random_contraction(m, d * m, rng, norm);
    std::vector<CMat> mats;
    for (int i = 0; i < d; ++i) mats.push_back(R.middleCols(i * m, m));
    return OperatorTuple(std::move(mats));
}

OperatorTuple random_coisometric(int d, Index m, Rng& rng) {
    const CMat W = random_isometry(d * m, m, rng);
    std::vector<CMat> mats;
    for (int i = 0; i < d; ++i) mats.push_back(W.middleRows(i * m, m).adjoint());
    return OperatorTuple(std::move(mats));
}

OperatorTuple random_nonergodic_coisometric(int d, Index m1, Index m2, Rng& rng) {
    const OperatorTuple a = random_coisometric(d, m1, rng), b = random_coisometric(d, m2, rng);
    std::vector<CMat> mats;
    for (int i = 0; i < d; ++i) {
        CMat M = CMat::Zero(m1 + m2, m1 + m2);
        M.topLeftCorner(m1, m1) = a[i];
        M.bottomRightCorner(m2, m2) = b[i];
        mats.push_back(std::move(M));
    }
    return OperatorTuple(std::move(mats));
}

CoisometricWithEigenvector random_ergodic_coisometric(int d, Index m, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        // Column stack W = [A_1^*; ...; A_d^*] is an isometry whose first
        // column is conj(omega) (x) e_0.
        CVec omega = random_gaussian(d, 1, rng).col(0);
        omega /= omega.norm();
        CMat W = CMat::Zero(d * m, m);
        for (int i = 0; i < d; ++i) W(i * m, 0) = std::conj(omega(i));
        if (m > 1) {
            const CMat first = W.col(0);
            const CMat rest = complement(SubspaceBasis(first)).basis;
            W.rightCols(m - 1) = rest * random_isometry(rest.cols(), m - 1, rng);
        }
        std::vector<CMat> mats;
        for (int i = 0; i < d; ++i) mats.push_back(W.middleRows(i * m, m).adjoint());
        const CMat U = random_unitary(m, rng);
        CoisometricWithEigenvector out;
        out.A = OperatorTuple(std::move(mats)).compress(U.adjoint());
        out.Omega = U.col(0);
        out.omega = omega;
        if (is_ergodic(out.A)) return out;
    }
    throw ConvergenceFailure("no ergodic sample in 100 draws");
}

OperatorTuple random_commuting_coisometric(int d, Index m, Rng& rng) {
    const CMat Z = random_gaussian(d, m, rng);
    const CMat U = random_unitary(m, rng);
    std::vector<CMat> mats;
    for (int i = 0; i < d; ++i) {
        CVec diag(m);
        for (Index k = 0; k < m; ++k) diag(k) = Z(i, k) / Z.col(k).norm();
        mats.push_back(U * diag.asDiagonal() * U.adjoint());
    }
    return OperatorTuple(std::move(mats));
}

Lifting random_reduced_lifting_of(const OperatorTuple& C, Index mA, Rng& rng, double gamma_norm) {
    const DefectData dC = defects(C);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const OperatorTuple A = random_row_contraction(C.d(), mA, rng, 0.8);
        const DefectData dA = defects(A);
        const CMat gamma = random_contraction(dC.defect.dim(), dA.defect_star.dim(), rng, gamma_norm);
        Lifting L = lift_from_gamma(C, A, gamma);
        if (classify(L).is_reduced) return L;
    }
    throw ConvergenceFailure("no reduced lifting in 100 draws");
}

Lifting random_reduced_lifting(int d, Index mC, Index mA, Rng& rng) {
    return random_reduced_lifting_of(random_row_contraction(d, mC, rng, 0.9), mA, rng);
}

Lifting isometric_gamma_lifting(const OperatorTuple& C, const OperatorTuple& A, Rng& rng) {
    const DefectData dC = defects(C), dA = defects(A);
    const Index rC = dC.defect.dim(), rA = dA.defect_star.dim();
    if (rA > rC) {
        std::ostringstream os;
        os << "isometric gamma needs dim D_C = " << rC << " >= dim D_*A = " << rA;
        throw DimensionMismatch(os.str());
    }
    return lift_from_gamma(C, A, random_isometry(rC, rA, rng));
}

Lifting random_subisometric_lifting(const OperatorTuple& C, Index mA, Rng& rng) {
    return isometric_gamma_lifting(C, random_row_contraction(C.d(), mA, rng, 0.8), rng);
}

Lifting rotate_lifting(const Lifting& L, const CMat& W) {
    std::vector<CMat> B;
    for (const CMat& b : L.B) B.push_back(W * b);
    return recover_gamma(L.C, L.A.compress(W.adjoint()), B);
}

}  // namespace fockdil
