#include "fockdil/invariants.hpp"

#include "fockdil/cpmaps.hpp"

#include <cmath>
#include <sstream>

namespace fockdil {

namespace {

double factorial(int d) {
    double f = 1.0;
    for (int k = 2; k <= d; ++k) f *= k;
    return f;
}

Index psd_rank(const CMat& X, double rank_tol) {
    if (X.size() == 0) return 0;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (X + X.adjoint()), Eigen::EigenvaluesOnly);
    const RVec& ev = es.eigenvalues();
    const double mx = ev.cwiseAbs().maxCoeff();
    if (mx <= 1e-12) return 0;
    Index r = 0;
    for (Index i = 0; i < ev.size(); ++i)
        if (ev(i) > rank_tol * mx) ++r;
    return r;
}

void finish(InvariantTrace& t, bool use_richardson) {
    if (t.sequence.empty()) return;
    if (use_richardson && t.sequence.size() >= 2) {
        t.method = "richardson";
        t.estimate = richardson(t.n, t.sequence).back();
    } else {
        t.method = "last";
        t.estimate = t.sequence.back();
    }
}

}  // namespace

std::vector<double> richardson(const std::vector<int>& n, const std::vector<double>& s) {
    std::vector<double> out;
    for (size_t k = 1; k < s.size(); ++k)
        out.push_back(n[k] * s[k] - n[k - 1] * s[k - 1]);
    return out;
}

FreeInvariants curvature_free(const OperatorTuple& T, int n_max, double rank_tol) {
    const int d = T.d();
    const Index m = T.dim();
    const CPMap phi(T);
    const DefectData dd = defects(T);
    const CMat K = poisson_kernel(T, std::max(0, n_max - 1), dd);
    const Index r = dd.defect_star.dim();
    FreeInvariants out;
    out.curvature.statistic = "trace(1 - Phi^n(1))";
    out.curvature_kernel.statistic = "trace[K^dagger (P_{<n} (x) 1) K]";
    out.euler.statistic = "rank(1 - Phi^n(1))";
    out.curvature.normalization = out.curvature_kernel.normalization = d == 1 ? "n" : "d^n";
    out.euler.normalization = "1 + d + ... + d^{n-1}";
    out.worst_gap = 0.0;
    CMat X = CMat::Identity(m, m);
    for (int n = 1; n <= n_max; ++n) {
        X = phi.apply(X);
        const CMat D = CMat::Identity(m, m) - X;
        const double tr = D.trace().real();
        const Index rows = fock_dim(d, n - 1) * r;
        const double trK = K.topRows(rows).squaredNorm();
        out.worst_gap = std::max(out.worst_gap, std::abs(tr - trK));
        const double denom = d == 1 ? static_cast<double>(n) : std::pow(static_cast<double>(d), n);
        for (InvariantTrace* t : {&out.curvature, &out.curvature_kernel, &out.euler}) t->n.push_back(n);
        out.curvature.sequence.push_back(tr / denom);
        out.curvature_kernel.sequence.push_back(trK / denom);
        out.euler.sequence.push_back(static_cast<double>(psd_rank(D, rank_tol)) /
                                     static_cast<double>(fock_dim(d, n - 1)));
    }
    finish(out.curvature, false);
    finish(out.curvature_kernel, false);
    finish(out.euler, false);
    return out;
}

SymInvariants curvature_sym(const OperatorTuple& T, int n_max, bool use_richardson,
                            const TraceWindow& window, bool with_compressed, double rank_tol) {
    if (!is_commuting(T)) throw NotCommuting("symmetric invariants need a commuting tuple");
    const int d = T.d();
    const Index m = T.dim();
    const double fd = factorial(d);
    const CPMap phi(T);
    SymInvariants out;
    out.curvature.statistic = "d! trace(1 - Phi^{n+1}(1))";
    out.curvature.normalization = "n^d";
    out.euler.statistic = "d! rank(1 - Phi^{n+1}(1))";
    out.euler.normalization = "n^d";
    CMat X = phi.apply(CMat::Identity(m, m));
    for (int n = 1; n <= n_max; ++n) {
        X = phi.apply(X);
        const CMat D = CMat::Identity(m, m) - X;
        double tr = 0.0;
        Index rk = 0;
        if (window) {
            const std::vector<Index> idx = window(n);
            CMat sub(static_cast<Index>(idx.size()), static_cast<Index>(idx.size()));
            for (size_t a = 0; a < idx.size(); ++a)
                for (size_t b = 0; b < idx.size(); ++b)
                    sub(static_cast<Index>(a), static_cast<Index>(b)) = D(idx[a], idx[b]);
            tr = sub.trace().real();
            rk = psd_rank(sub, rank_tol);
        } else {
            tr = D.trace().real();
            rk = psd_rank(D, rank_tol);
        }
        const double nd = std::pow(static_cast<double>(n), d);
        out.raw_trace.push_back(tr);
        out.raw_rank.push_back(static_cast<double>(rk));
        out.curvature.n.push_back(n);
        out.euler.n.push_back(n);
        out.curvature.sequence.push_back(fd * tr / nd);
        out.euler.sequence.push_back(fd * static_cast<double>(rk) / nd);
    }
    finish(out.curvature, use_richardson);
    finish(out.euler, use_richardson);

    out.compressed.statistic = "(d-1)! trace[K^dagger (Q_{<=n} (x) 1) K]";
    out.compressed.normalization = "d^n";
    if (with_compressed) {
        // The dense constrained subspace is only affordable on small Fock spaces.
        int n_c = 0;
        while (n_c < n_max && fock_dim(d, n_c + 1) <= 600) ++n_c;
        if (n_c >= 1) {
            const DefectData dd = defects(T);
            const CMat K = poisson_kernel(T, n_c, dd);
            const Index r = dd.defect_star.dim();
            const auto F = TruncatedFock::shared(d, n_c);
            const SubspaceBasis G = constrained_fock(*F, ConstraintSet::commutators(d));
            for (int n = 1; n <= n_c; ++n) {
                CMat P = CMat::Zero(F->total_dim(), F->total_dim());
                const Index keep = fock_dim(d, n);
                P.topLeftCorner(keep, keep).setIdentity();
                const SubspaceBasis low = range_basis(G.basis.adjoint() * P * G.basis);
                const CMat Q = kron(G.basis * low.basis, CMat::Identity(r, r));
                const double tr = (Q.adjoint() * K).squaredNorm();
                out.compressed.n.push_back(n);
                out.compressed.sequence.push_back(factorial(d - 1) * tr / std::pow(static_cast<double>(d), n));
            }
            finish(out.compressed, false);
        }
    }
    return out;
}

std::vector<SpMat> sparse_creation_ops(int d, int M) {
    const auto F = TruncatedFock::shared(d, M);
    const Index n = F->total_dim();
    std::vector<SpMat> out;
    for (int i = 1; i <= d; ++i) {
        std::vector<Eigen::Triplet<double>> trip;
        for (Index a = 0; a < n; ++a) {
            const Index b = F->prepend(i, a);
            if (b >= 0) trip.emplace_back(b, a, 1.0);
        }
        SpMat L(n, n);
        L.setFromTriplets(trip.begin(), trip.end());
        out.push_back(std::move(L));
    }
    return out;
}

SparseTraces sparse_defect_traces(const std::vector<SpMat>& T, int m_max) {
    const Index n = T.front().rows();
    SpMat X(n, n);
    X.setIdentity();
    SparseTraces out;
    for (int m = 1; m <= m_max; ++m) {
        SpMat Y(n, n);
        for (const SpMat& t : T) Y += SpMat(t * X * SpMat(t.transpose()));
        Y.prune(0.0);
        X = Y;
        double tr = 0.0;
        bool diagonal = true;
        Index rank = 0;
        std::vector<double> diag(static_cast<size_t>(n), 0.0);
        for (Index k = 0; k < X.outerSize(); ++k)
            for (SpMat::InnerIterator it(X, k); it; ++it) {
                if (it.row() != it.col()) diagonal = false;
                else diag[static_cast<size_t>(it.row())] = it.value();
            }
        for (double v : diag) {
            tr += 1.0 - v;
            if (std::abs(1.0 - v) > 1e-12) ++rank;
        }
        if (!diagonal) throw DimensionMismatch("sparse iterate is not diagonal; rank unavailable");
        out.trace.push_back(tr);
        out.rank.push_back(rank);
    }
    return out;
}

double split_count_trace(const MultiAnalyticSymbol& theta, int n) {
    const int d = theta.d();
    const TruncatedFock& F = theta.fock();
    std::vector<double> level(static_cast<size_t>(std::max(n, 1)), 0.0);
    for (Index a = 0; a < F.total_dim(); ++a) {
        const int j = F.length(a);
        if (j >= n) break;
        level[static_cast<size_t>(j)] += theta.coeff(a).squaredNorm();
    }
    double total = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j <= k; ++j) total += std::pow(static_cast<double>(d), k - j) * level[static_cast<size_t>(j)];
    return total;
}

TraceIdentityReport trace_identity_check(const Lifting& L, const MultiAnalyticSymbol& theta, int n_max) {
    TraceIdentityReport rep;
    const int d = L.d();
    rep.rank_DC = L.defC.defect.dim();
    const CPMap phi(L.A);
    const Index m = L.mA();
    CMat X = CMat::Identity(m, m);
    for (int n = 1; n <= n_max; ++n) {
        X = phi.apply(X);
        const double dn = std::pow(static_cast<double>(d), n);
        const double S = split_count_trace(theta, n);
        rep.n.push_back(n);
        rep.lhs.push_back((static_cast<double>(m) - X.trace().real()) / (d == 1 ? n : dn));
        rep.rhs_rank.push_back(static_cast<double>(rep.rank_DC) - S / dn);
        const double geo = d == 1 ? static_cast<double>(n) : (dn - 1.0) / (d - 1.0);
        rep.rhs_exact.push_back((static_cast<double>(rep.rank_DC) * geo - S) / (d == 1 ? n : dn));
    }
    rep.difference = n_max >= 1 ? std::abs(rep.lhs.back() - rep.rhs_rank.back()) : 0.0;
    return rep;
}

}  // namespace fockdil
