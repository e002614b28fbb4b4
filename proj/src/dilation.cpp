#include "fockdil/dilation.hpp"

#include <algorithm>
#include <sstream>

namespace fockdil {

Index MidRealization::domain_dim() const {
    return base.dim() + fock_dim(base.d(), N) * defect.defect.dim();
}

Index MidRealization::target_dim() const {
    return base.dim() + fock_dim(base.d(), N + 1) * defect.defect.dim();
}

OperatorTuple MidRealization::compressed() const {
    const Index n = domain_dim();
    std::vector<CMat> out;
    for (const CMat& v : V) out.push_back(v.topRows(n));
    return OperatorTuple(std::move(out));
}

MidRealization mid(const OperatorTuple& T, int N) {
    MidRealization m;
    m.base = T;
    m.defect = defects(T);
    m.N = N;
    const int d = T.d();
    const Index n = T.dim();
    const Index r = m.defect.defect.dim();
    const auto Fd = TruncatedFock::shared(d, N);
    const auto Ft = TruncatedFock::shared(d, N + 1);
    const Index dom = m.domain_dim(), tgt = m.target_dim();
    const CMat& Q = m.defect.defect.basis;
    for (int i = 1; i <= d; ++i) {
        CMat Vi = CMat::Zero(tgt, dom);
        Vi.topLeftCorner(n, n) = T[i - 1];
        // e_0 (x) D_i h in defect coordinates.
        Vi.block(n, 0, r, n) = Q.adjoint() * m.defect.Dfull.middleCols((i - 1) * n, n);
        // e_alpha (x) x -> e_{i alpha} (x) x.
        for (Index a = 0; a < Fd->total_dim(); ++a) {
            const Index b = concat_across(*Ft, *Ft, Ft->letter_index(i), *Fd, a);
            Vi.block(n + b * r, n + a * r, r, r).setIdentity();
        }
        m.V.push_back(std::move(Vi));
    }
    return m;
}

std::vector<CMat> poisson_blocks(const OperatorTuple& T, int N, const CMat& Dstar) {
    const auto F = TruncatedFock::shared(T.d(), N);
    std::vector<CMat> X(static_cast<size_t>(F->total_dim()));
    X[0] = Dstar;
    const std::vector<CMat> adj = T.adjoints();
    // D_* T_{i alpha}^* = (D_* T_alpha^*) T_i^*.
    for (Index a = 0; a < F->total_dim(); ++a) {
        if (F->length(a) == N) break;
        for (int i = 1; i <= T.d(); ++i)
            X[static_cast<size_t>(F->prepend(i, a))] = X[static_cast<size_t>(a)] * adj[static_cast<size_t>(i - 1)];
    }
    return X;
}

CMat poisson_kernel(const OperatorTuple& T, int N, const DefectData& dd) {
    const CMat& Q = dd.defect_star.basis;
    const Index r = Q.cols();
    const std::vector<CMat> X = poisson_blocks(T, N, dd.Dstar);
    CMat K(static_cast<Index>(X.size()) * r, T.dim());
    for (size_t a = 0; a < X.size(); ++a) K.middleRows(static_cast<Index>(a) * r, r) = Q.adjoint() * X[a];
    return K;
}

CMat poisson_kernel(const OperatorTuple& T, int N) { return poisson_kernel(T, N, defects(T)); }

OperatorTuple shifted_creation(int d, int N, Index u) {
    const OperatorTuple L = creation_ops(*TruncatedFock::shared(d, N));
    std::vector<CMat> out;
    for (int i = 0; i < d; ++i) out.push_back(kron(L[i], CMat::Identity(u, u)));
    return OperatorTuple(std::move(out));
}

SubspaceBasis wandering_subspace(const SubspaceBasis& M, int d, Index U_dim, int N, double tol) {
    const OperatorTuple L = shifted_creation(d, N, U_dim);
    if (M.ambient() != L.dim()) throw DimensionMismatch("subspace does not live in Gamma_{<=N} (x) U");
    if (M.dim() == 0) return M;
    CMat images(M.ambient(), M.dim() * d);
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        const CMat img = L[i] * M.basis;
        worst = std::max(worst, containment_residual(M, img));
        images.middleCols(i * M.dim(), M.dim()) = img;
    }
    if (worst > tol) {
        std::ostringstream os;
        os << "subspace is not invariant under the shifted creation operators, residual " << worst;
        throw NotInvariant(os.str());
    }
    // Coordinates inside M of the vectors orthogonal to every image.
    const SubspaceBasis K = kernel_basis(images.adjoint() * M.basis, config().rank_tol, 1e-10);
    CMat W = M.basis * K.basis;
    canonicalize_phases(W);
    return SubspaceBasis(W);
}

BeurlingResult beurling_symbol(const SubspaceBasis& M, int d, Index U_dim, int N, double tol) {
    BeurlingResult out;
    out.wandering = wandering_subspace(M, d, U_dim, N, tol);
    out.theta = MultiAnalyticSymbol::from_stacked(d, N, out.wandering.basis, U_dim);
    const CMat ext = extend(out.theta, N);
    const SubspaceBasis R = range_basis(ext);
    out.roundtrip = R.dim() == M.dim() || M.dim() == 0 ? op_norm(R.projector() - M.projector())
                                                        : 1.0;
    return out;
}

PseudoConstrainedMid pseudo_constrained_mid(const OperatorTuple& T, const ConstraintSet& J, int N) {
    PseudoConstrainedMid out;
    const int d = T.d();
    const Index n = T.dim();
    const DefectData dd = defects(T);
    const Index r = dd.defect.dim();
    out.defect_dim = r;
    const auto F = TruncatedFock::shared(d, N);
    out.gamma_J = constrained_fock(*F, J);
    const CMat& G = out.gamma_J.basis;
    const Index g = G.cols();
    const OperatorTuple L = creation_ops(*F);
    CVec e0 = CVec::Zero(F->total_dim());
    e0(0) = 1.0;
    const CVec e0J = G.adjoint() * e0;
    const Index dim = n + g * r;
    std::vector<CMat> S;
    for (int i = 0; i < d; ++i) {
        CMat Si = CMat::Zero(dim, dim);
        Si.topLeftCorner(n, n) = T[i];
        const CMat Di = dd.defect.basis.adjoint() * dd.Dfull.middleCols(i * n, n);
        Si.block(n, 0, g * r, n) = kron(CMat(e0J), Di);
        Si.block(n, n, g * r, g * r) = kron(G.adjoint() * L[i] * G, CMat::Identity(r, r));
        S.push_back(std::move(Si));
    }
    out.S = OperatorTuple(std::move(S));
    return out;
}

}  // namespace fockdil
