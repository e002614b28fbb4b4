#include "fockdil/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fockdil {

MultiAnalyticSymbol popescu_raw(const OperatorTuple& T, int N, const DefectData& dd) {
    const int d = T.d();
    const Index n = T.dim();
    const CMat& Qs = dd.defect_star.basis;
    MultiAnalyticSymbol G(d, N, d * n, Qs.cols());
    const TruncatedFock& F = G.fock();
    const std::vector<CMat> X = poisson_blocks(T, N, Qs.adjoint() * dd.Dstar);
    const CMat R = T.row();
    const CMat Dsq = CMat::Identity(d * n, d * n) - R.adjoint() * R;
    // -R D x = -D_* R x at the empty word.
    G.coeff(0) = -X[0] * R;
    for (Index a = 0; a < F.total_dim(); ++a) {
        if (F.length(a) == N) break;
        for (int j = 1; j <= d; ++j)
            G.coeff(F.prepend(j, a)) = X[static_cast<size_t>(a)] * Dsq.middleRows((j - 1) * n, n);
    }
    return G;
}

MultiAnalyticSymbol popescu_char(const OperatorTuple& T, int N) {
    const DefectData dd = defects(T);
    return popescu_raw(T, N, dd).times(pinv(dd.Dfull) * dd.defect.basis);
}

namespace {

double kernel_leak(const MultiAnalyticSymbol& raw, const CMat& D) {
    const Index m = D.rows();
    if (m == 0) return 0.0;
    const CMat K = CMat::Identity(m, m) - pinv(D) * D;
    double worst = 0.0;
    for (Index a = 0; a < raw.fock().total_dim(); ++a) worst = std::max(worst, (raw.coeff(a) * K).norm());
    return worst;
}

}  // namespace

LiftingChar lifting_char_full(const Lifting& L, int N, bool allow_nonreduced, const CMat* Qout) {
    if (!allow_nonreduced) {
        const Classification c = classify(L);
        if (!c.is_reduced) {
            std::ostringstream os;
            os << "lifting is not reduced (A c.n.c. = " << (c.cnc_A ? "yes" : "no")
               << ", unresolved dimension " << c.unresolved_dim << ")";
            throw NotReduced(os.str());
        }
    }
    const int d = L.d();
    const Index mC = L.mC(), mA = L.mA(), mE = mC + mA;
    LiftingChar out;
    out.cod_basis = Qout ? *Qout : L.defC.defect.basis;
    const CMat& Q = out.cod_basis;
    if (Q.rows() != d * mC) throw DimensionMismatch("output basis does not live in (+)H_C");
    const Index r = Q.cols();

    // Y[alpha] = Q^dagger gamma D_{*,A} A_alpha^*.
    const CMat Gamma = L.gamma_ambient();
    const std::vector<CMat> Y =
        mA ? poisson_blocks(L.A, N, Q.adjoint() * Gamma)
           : std::vector<CMat>(static_cast<size_t>(fock_dim(d, N)), CMat::Zero(r, 0));

    out.raw = MultiAnalyticSymbol(d, N, d * mE, r);
    out.m0 = MultiAnalyticSymbol(d, N, mA, r);
    const TruncatedFock& F = out.raw.fock();
    const CMat QD = Q.adjoint() * L.defC.Dfull;  // r x d mC
    std::vector<CMat> AjAi;                      // delta_ji - A_j^* A_i, indexed (j, i)
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            AjAi.push_back(CMat((j == i ? 1.0 : 0.0) * CMat::Identity(mA, mA)) - L.A[j].adjoint() * L.A[i]);

    for (Index a = 0; a < F.total_dim(); ++a) {
        const CMat& Ya = Y[static_cast<size_t>(a)];
        out.m0.coeff(a) = Ya;
        CMat& G = out.raw.coeff(a);
        for (int i = 0; i < d; ++i) {
            const Index col = i * mE;
            // Vectors e_i (x) h with h in H_C.
            G.middleCols(col, mC) = -Ya * L.B[static_cast<size_t>(i)];
            if (a == 0) {
                G.middleCols(col, mC) += QD.middleCols(i * mC, mC);
                // Vectors e_i (x) h with h in H_A.
                G.middleCols(col + mC, mA) = -Ya * L.A[i];
            }
        }
        if (F.length(a) == N) continue;
        for (int j = 1; j <= d; ++j) {
            CMat& Gj = out.raw.coeff(F.prepend(j, a));
            for (int i = 0; i < d; ++i)
                Gj.middleCols(i * mE + mC, mA) = Ya * AjAi[static_cast<size_t>((j - 1) * d + i)];
        }
    }

    const DefectData dE = defects(L.E());
    out.dom_basis = dE.defect.basis;
    out.theta = out.raw.times(pinv(dE.Dfull) * out.dom_basis);
    out.kernel_leak = kernel_leak(out.raw, dE.Dfull);
    return out;
}

MultiAnalyticSymbol lifting_char(const Lifting& L, int N, bool allow_nonreduced) {
    return lifting_char_full(L, N, allow_nonreduced).theta;
}

double unitarity_residual(const LiftingChar& lc, int N, int levels) {
    const int d = lc.theta.d();
    const Index r = lc.theta.cod_dim();
    const Index rows = fock_dim(d, std::min(levels, N)) * r;
    const CMat M = extend(lc.theta, N).topRows(rows);
    const CMat M0 = lc.m0.resized(N).stacked().topRows(rows);
    const CMat R = M * M.adjoint() + M0 * M0.adjoint() - CMat::Identity(rows, rows);
    return op_norm(R);
}

CMat omega_complement_basis(const CVec& omega) {
    const Index d = omega.size();
    const CVec w = omega.conjugate().normalized();
    CMat eps(d, 0);
    for (Index i = 0; i < d; ++i) {
        CVec v = CVec::Unit(d, i) - w * w.dot(CVec::Unit(d, i));
        for (Index k = 0; k < eps.cols(); ++k) v -= eps.col(k) * eps.col(k).dot(v);
        const double nv = v.norm();
        if (nv < 1e-10) continue;
        eps.conservativeResize(d, eps.cols() + 1);
        eps.col(eps.cols() - 1) = v / nv;
    }
    return eps;
}

ExtendedChar extended_char(const OperatorTuple& A, const EigenFrame& frame, int N) {
    const int d = A.d();
    const Index n = A.dim();
    if (!is_coisometric(A)) throw NotErgodic("tuple is not coisometric");
    if (!is_ergodic(A)) throw NotErgodic("fixed points of the CP map are not scalar");
    ExtendedChar out;
    out.ef = frame;
    out.restricted = restrict_off_omega(A, frame);
    out.frame = CMat(n, n);
    out.frame.col(0) = frame.Omega;
    out.frame.rightCols(n - 1) = out.restricted.basis;

    std::vector<CMat> C, B;
    for (int i = 0; i < d; ++i) {
        C.push_back(CMat::Constant(1, 1, frame.omega(i)));
        B.push_back(out.restricted.basis.adjoint() * frame.ells[static_cast<size_t>(i)]);
    }
    out.lifting = recover_gamma(OperatorTuple(std::move(C)), out.restricted.tuple, B);
    out.eps = omega_complement_basis(frame.omega);
    out.gamma_eps = out.eps.adjoint() * out.lifting.defC.defect.basis * out.lifting.gamma;

    const LiftingChar lc = lifting_char_full(out.lifting, N, true, &out.eps);
    // Frame coordinates are (1 (x) U^dagger) applied to original ones.
    const CMat back = kron(CMat::Identity(d, d), out.frame.adjoint());
    out.raw = lc.raw.times(back);
    const DefectData dA = defects(A);
    out.theta = out.raw.times(pinv(dA.Dfull) * dA.defect.basis);
    return out;
}

ExtendedChar extended_char(const OperatorTuple& A, int N) { return extended_char(A, eigen_frame(A), N); }

double constraint_residual(const OperatorTuple& E, const ConstraintSet& J) {
    double worst = 0.0;
    for (const Polynomial& p : J.polynomials) worst = std::max(worst, op_norm(eval_poly(p, E)));
    return worst;
}

ConstrainedChar constrained_char(const Lifting& L, const ConstraintSet& J, int N,
                                 bool allow_nonreduced, double tol) {
    const double viol = constraint_residual(L.E(), J);
    if (viol > tol) {
        std::ostringstream os;
        os << "lifting violates the constraints, worst |p(E)| = " << viol;
        throw NotConstrained(os.str());
    }
    ConstrainedChar out;
    out.base = lifting_char_full(L, N, allow_nonreduced);
    const auto F = TruncatedFock::shared(L.d(), N);
    out.gamma_J = constrained_fock(*F, J);
    const CMat& G = out.gamma_J.basis;
    const Index rC = out.base.theta.cod_dim(), rE = out.base.theta.dom_dim();
    const CMat GC = kron(G, CMat::Identity(rC, rC));
    const CMat GE = kron(G, CMat::Identity(rE, rE));
    const CMat PC = GC * GC.adjoint();
    const CMat S = out.base.theta.stacked();
    const CMat SJ = PC * S;
    out.theta = MultiAnalyticSymbol::from_stacked(L.d(), N, SJ, rC);
    out.leak = (S - SJ).norm();
    out.M_J = GC.adjoint() * extend(out.base.theta, N) * GE;
    out.M0_J = GC.adjoint() * out.base.m0.stacked();
    return out;
}

double constrained_unitarity_residual(const ConstrainedChar& cc, int N, int levels) {
    const int d = cc.base.theta.d();
    const auto F = TruncatedFock::shared(d, N);
    const Index keep = fock_dim(d, std::min(levels, N));
    CMat P = CMat::Zero(F->total_dim(), F->total_dim());
    P.topLeftCorner(keep, keep).setIdentity();
    const CMat& G = cc.gamma_J.basis;
    // Constrained vectors living on levels <= levels, in Gamma_J coordinates.
    const SubspaceBasis low = range_basis(G.adjoint() * P * G);
    const Index rC = cc.base.theta.cod_dim();
    const CMat Qc = kron(low.basis, CMat::Identity(rC, rC));
    const CMat X = cc.M_J * cc.M_J.adjoint() + cc.M0_J * cc.M0_J.adjoint();
    return op_norm(Qc.adjoint() * X * Qc - CMat::Identity(Qc.cols(), Qc.cols()));
}

Lifting functional_model(const OperatorTuple& C, const MultiAnalyticSymbol& theta, int N) {
    if (N < 2 * theta.N()) {
        std::ostringstream os;
        os << "truncation " << N << " is below twice the symbol length " << theta.N();
        throw BufferTooSmall(os.str());
    }
    const int d = C.d();
    const Index mC = C.dim();
    const MidRealization mC_mid = mid(C, N);
    const Index rC = mC_mid.defect.defect.dim();
    if (theta.cod_dim() != rC) throw DimensionMismatch("symbol codomain is not D_C");
    const Index p = theta.dom_dim();
    const CMat M = extend(theta, N);
    const double mn = op_norm(M);
    if (mn > 1.0 + 1e-8) {
        std::ostringstream os;
        os << "|M_theta| = " << mn;
        throw NotContraction(os.str());
    }
    const Index tot = fock_dim(d, N);
    const CMat Delta = fockdil::psqrt(CMat::Identity(tot * p, tot * p) - M.adjoint() * M);
    const SubspaceBasis R = range_basis(Delta);
    const Index rD = R.dim();
    const CMat Dpinv = pinv(Delta);
    const OperatorTuple Lp = shifted_creation(d, N, p);
    const OperatorTuple Vc = mC_mid.compressed();
    const Index fockC = tot * rC;
    const Index K = mC + fockC + rD;

    // Graph of x -> (M x, Delta x) inside (Gamma (x) D_C) (+) range(Delta).
    CMat W(fockC + rD, tot * p);
    W.topRows(fockC) = M;
    W.bottomRows(rD) = R.basis.adjoint() * Delta;
    const SubspaceBasis HA = complement(range_basis(W));
    const Index mA = HA.dim();
    CMat U = CMat::Zero(K, mC + mA);
    U.topLeftCorner(mC, mC).setIdentity();
    U.bottomRightCorner(fockC + rD, mA) = HA.basis;

    std::vector<CMat> E;
    for (int i = 0; i < d; ++i) {
        CMat Vt = CMat::Zero(K, K);
        Vt.topLeftCorner(mC + fockC, mC + fockC) = Vc[i];
        Vt.bottomRightCorner(rD, rD) = R.basis.adjoint() * Delta * Lp[i] * Dpinv * R.basis;
        E.push_back(U.adjoint() * Vt * U);
    }
    return lifting_from_blocks(OperatorTuple(std::move(E)), mC);
}

CMat cocycle_step(const OperatorTuple& T, int j, const DefectData& dd) {
    const int d = T.d();
    const Index n = T.dim();
    const CMat& Qs = dd.defect_star.basis;
    const Index r = Qs.cols();
    const auto F = TruncatedFock::shared(d, j);
    Index lvl = 1;
    for (int k = 0; k < j; ++k) lvl *= d;
    const Index emitted_in = j == 0 ? 0 : fock_dim(d, j - 1) * r;
    const Index emitted_out = fock_dim(d, j) * r;
    const Index dom = lvl * n + emitted_in;
    const Index cod = lvl * d * n + emitted_out;
    CMat S = CMat::Zero(cod, dom);
    const CMat QD = Qs.adjoint() * dd.Dstar;
    for (Index w = 0; w < lvl; ++w) {
        for (int i = 0; i < d; ++i) S.block((w * d + i) * n, w * n, n, n) = T[i].adjoint();
        S.block(lvl * d * n + (F->level_offset(j) + w) * r, w * n, r, n) = QD;
    }
    if (emitted_in) S.block(lvl * d * n, lvl * n, emitted_in, emitted_in).setIdentity();
    return S;
}

CMat cocycle_product(const OperatorTuple& T, int k, int N) {
    if (k > N) {
        std::ostringstream os;
        os << k << " steps need truncation at least " << k << ", got " << N;
        throw BufferTooSmall(os.str());
    }
    const int d = T.d();
    const Index n = T.dim();
    const DefectData dd = defects(T);
    const CMat QD = dd.defect_star.basis.adjoint() * dd.Dstar;
    const Index r = QD.rows();
    const auto F = TruncatedFock::shared(d, N);
    CMat out = CMat::Zero(F->total_dim() * r, n);
    std::vector<CMat> residual{CMat::Identity(n, n)};
    for (int j = 0; j < k; ++j) {
        std::vector<CMat> next;
        next.reserve(residual.size() * static_cast<size_t>(d));
        for (size_t w = 0; w < residual.size(); ++w) {
            out.middleRows((F->level_offset(j) + static_cast<Index>(w)) * r, r) = QD * residual[w];
            for (int i = 0; i < d; ++i) next.push_back(T[i].adjoint() * residual[w]);
        }
        residual.swap(next);
    }
    return out;
}

}  // namespace fockdil
