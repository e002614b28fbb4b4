#include "fockdil/liftings.hpp"

#include <algorithm>
#include <sstream>

namespace fockdil {

OperatorTuple Lifting::E() const {
    const Index m = mC(), a = mA();
    std::vector<CMat> out;
    for (int i = 0; i < d(); ++i) {
        CMat Ei = CMat::Zero(m + a, m + a);
        Ei.topLeftCorner(m, m) = C[i];
        Ei.bottomLeftCorner(a, m) = B[static_cast<size_t>(i)];
        Ei.bottomRightCorner(a, a) = A[i];
        out.push_back(std::move(Ei));
    }
    return OperatorTuple(std::move(out));
}

CMat Lifting::Bstar_stacked() const {
    const Index m = mC();
    CMat S(d() * m, mA());
    for (int i = 0; i < d(); ++i) S.middleRows(i * m, m) = B[static_cast<size_t>(i)].adjoint();
    return S;
}

CMat Lifting::gamma_ambient() const {
    return defC.defect.basis * gamma * defA.defect_star.basis.adjoint() * defA.Dstar;
}

namespace {

void check_shapes(const OperatorTuple& C, const OperatorTuple& A, const std::vector<CMat>& B) {
    if (C.d() != A.d() || static_cast<int>(B.size()) != C.d())
        throw DimensionMismatch("lifting parts disagree on d");
    for (const CMat& b : B)
        if (b.rows() != A.dim() || b.cols() != C.dim())
            throw DimensionMismatch("B blocks must be m_A x m_C");
}

void check_row_contraction(const Lifting& L) {
    const OperatorTuple E = L.E();
    if (E.dim() == 0) return;
    const double nrm = op_norm(E.row_gram());
    if (nrm > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "assembled lifting has |sum E_i E_i^*| = " << nrm;
        throw NotContraction(os.str());
    }
}

}  // namespace

Lifting lift_from_gamma(const OperatorTuple& C, const OperatorTuple& A, const CMat& gamma) {
    Lifting L;
    L.C = C;
    L.A = A.dim() == 0 && A.d() != C.d() ? OperatorTuple::empty(C.d()) : A;
    L.defC = defects(C);
    L.defA = defects(L.A);
    if (gamma.rows() != L.defC.defect.dim() || gamma.cols() != L.defA.defect_star.dim()) {
        std::ostringstream os;
        os << "gamma must be " << L.defC.defect.dim() << "x" << L.defA.defect_star.dim() << ", got "
           << gamma.rows() << "x" << gamma.cols();
        throw DimensionMismatch(os.str());
    }
    const double g = op_norm(gamma);
    if (g > 1.0 + 1e-8) {
        std::ostringstream os;
        os << "|gamma| = " << g;
        throw NotContraction(os.str());
    }
    L.gamma = gamma;
    const CMat Bs = L.defC.Dfull * L.gamma_ambient();
    const Index m = C.dim();
    for (int i = 0; i < C.d(); ++i) L.B.push_back(Bs.middleRows(i * m, m).adjoint());
    L.residual = 0.0;
    check_row_contraction(L);
    return L;
}

Lifting recover_gamma(const OperatorTuple& C, const OperatorTuple& A, const std::vector<CMat>& B,
                      double tol_fit) {
    check_shapes(C, A, B);
    Lifting L;
    L.C = C;
    L.A = A;
    L.B = B;
    L.defC = defects(C);
    L.defA = defects(A);
    const CMat Bs = L.Bstar_stacked();
    const CMat& QC = L.defC.defect.basis;
    const CMat& QA = L.defA.defect_star.basis;
    L.gamma = QC.adjoint() * pinv(L.defC.Dfull) * Bs * pinv(L.defA.Dstar) * QA;
    L.residual = (Bs - L.defC.Dfull * L.gamma_ambient()).norm();
    // The absolute term accepts blocks at roundoff level for operators of norm <= 1.
    const double allowed = tol_fit * Bs.norm() + 1e-12;
    if (L.residual > allowed) {
        std::ostringstream os;
        os << "least-squares residual " << L.residual << " exceeds " << tol_fit << " * |B| + 1e-12 = "
           << allowed;
        throw InconsistentLifting(os.str());
    }
    const double g = op_norm(L.gamma);
    if (g > 1.0 + 1e-8) {
        std::ostringstream os;
        os << "recovered |gamma| = " << g;
        throw InconsistentLifting(os.str());
    }
    check_row_contraction(L);
    return L;
}

Lifting lifting_from_blocks(const OperatorTuple& E, Index mC, double tol) {
    const Index n = E.dim();
    if (mC < 0 || mC > n) throw DimensionMismatch("split point outside the space");
    const Index a = n - mC;
    std::vector<CMat> C, A, B;
    for (int i = 0; i < E.d(); ++i) {
        if (E[i].topRightCorner(mC, a).norm() > tol)
            throw DimensionMismatch("upper-right block of the lifting is not zero");
        C.push_back(E[i].topLeftCorner(mC, mC));
        A.push_back(E[i].bottomRightCorner(a, a));
        B.push_back(E[i].bottomLeftCorner(a, mC));
    }
    const OperatorTuple At = a == 0 ? OperatorTuple::empty(E.d()) : OperatorTuple(std::move(A));
    return recover_gamma(OperatorTuple(std::move(C)), At, B);
}

Classification classify(const Lifting& L, double tol) {
    Classification c;
    const Index rA = L.gamma.cols();
    c.gamma_isometric = rA == 0 || op_norm(L.gamma.adjoint() * L.gamma - CMat::Identity(rA, rA)) < tol;
    c.is_coisometric_lifting = is_coisometric(L.E(), tol);
    const StabilityReport rep = stability_report(L.A);
    c.star_stable_A = rep.star_stable;
    c.cnc_A = rep.cnc;
    c.is_subisometric = c.star_stable_A && c.gamma_isometric;
    const Index mA = L.mA();
    if (mA == 0) {
        c.unresolved_dim = 0;
        c.is_resolving = true;
    } else {
        const CMat G = L.gamma * L.defA.defect_star.basis.adjoint() * L.defA.Dstar;
        const SubspaceBasis K = kernel_basis(G, config().rank_tol, 1e-10);
        const SubspaceBasis S = largest_coinvariant_in(K, L.A.adjoints());
        c.unresolved_dim = S.dim();
        c.is_resolving = S.dim() == 0 || (rep.H1.dim() > 0 && containment_residual(rep.H1, S.basis) < tol);
    }
    c.is_reduced = c.cnc_A && c.unresolved_dim == 0;
    return c;
}

Lifting stack(const Lifting& L1, const Lifting& L2, double tol) {
    const OperatorTuple E = L1.E();
    if (L2.C.dim() != E.dim() || L2.d() != L1.d())
        throw DimensionMismatch("second lifting does not lift the assembled first lifting");
    for (int i = 0; i < E.d(); ++i)
        if ((L2.C[i] - E[i]).norm() > tol)
            throw DimensionMismatch("second lifting does not lift the assembled first lifting");
    const Index mC = L1.mC(), mA = L1.mA(), mT = L2.mA();
    if (mT == 0) return L1;
    std::vector<CMat> A, B;
    for (int i = 0; i < E.d(); ++i) {
        const CMat& B2 = L2.B[static_cast<size_t>(i)];
        CMat Ai = CMat::Zero(mA + mT, mA + mT);
        Ai.topLeftCorner(mA, mA) = L1.A[i];
        Ai.bottomLeftCorner(mT, mA) = B2.rightCols(mA);
        Ai.bottomRightCorner(mT, mT) = L2.A[i];
        A.push_back(std::move(Ai));
        CMat Bi(mA + mT, mC);
        Bi.topRows(mA) = L1.B[static_cast<size_t>(i)];
        Bi.bottomRows(mT) = B2.leftCols(mC);
        B.push_back(std::move(Bi));
    }
    return recover_gamma(L1.C, OperatorTuple(std::move(A)), B);
}

}  // namespace fockdil
