#include "fockdil/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fockdil {

MultiAnalyticSymbol::MultiAnalyticSymbol(int d, int N, Index dom_dim, Index cod_dim)
    : d_(d), N_(N), dom_(dom_dim), cod_(cod_dim), fock_(TruncatedFock::shared(d, N)) {
    coeffs_.assign(static_cast<size_t>(fock_->total_dim()), CMat::Zero(cod_dim, dom_dim));
}

MultiAnalyticSymbol MultiAnalyticSymbol::from_stacked(int d, int N, const CMat& stacked,
                                                      Index cod_dim) {
    MultiAnalyticSymbol s(d, N, stacked.cols(), cod_dim);
    const Index total = s.fock().total_dim();
    if (stacked.rows() != total * cod_dim)
        throw DimensionMismatch("stacked symbol has the wrong number of rows");
    for (Index i = 0; i < total; ++i) s.coeff(i) = stacked.middleRows(i * cod_dim, cod_dim);
    return s;
}

CMat MultiAnalyticSymbol::coeff(const Word& w) const {
    if (static_cast<int>(w.size()) > N_) return CMat::Zero(cod_, dom_);
    return coeffs_.at(static_cast<size_t>(fock_->index(w)));
}

void MultiAnalyticSymbol::set(const Word& w, const CMat& m) {
    if (m.rows() != cod_ || m.cols() != dom_) throw DimensionMismatch("coefficient has the wrong shape");
    const Index i = fock_->index(w);
    if (i < 0) throw DimensionMismatch("word longer than the symbol's truncation level");
    coeffs_[static_cast<size_t>(i)] = m;
}

CMat MultiAnalyticSymbol::stacked() const {
    const Index total = fock_->total_dim();
    CMat S(total * cod_, dom_);
    for (Index i = 0; i < total; ++i) S.middleRows(i * cod_, cod_) = coeffs_[static_cast<size_t>(i)];
    return S;
}

MultiAnalyticSymbol MultiAnalyticSymbol::resized(int N_out) const {
    MultiAnalyticSymbol out(d_, N_out, dom_, cod_);
    const Index n = std::min(fock_->total_dim(), out.fock().total_dim());
    for (Index i = 0; i < n; ++i) out.coeff(i) = coeffs_[static_cast<size_t>(i)];
    return out;
}

MultiAnalyticSymbol MultiAnalyticSymbol::times(const CMat& v) const {
    if (v.rows() != dom_) throw DimensionMismatch("right factor does not match the symbol domain");
    MultiAnalyticSymbol out(d_, N_, v.cols(), cod_);
    for (size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = coeffs_[i] * v;
    return out;
}

MultiAnalyticSymbol MultiAnalyticSymbol::left_times(const CMat& u) const {
    if (u.cols() != cod_) throw DimensionMismatch("left factor does not match the symbol codomain");
    MultiAnalyticSymbol out(d_, N_, dom_, u.rows());
    for (size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i] = u * coeffs_[i];
    return out;
}

int MultiAnalyticSymbol::degree(double tol) const {
    int deg = -1;
    for (size_t i = 0; i < coeffs_.size(); ++i)
        if (coeffs_[i].size() && coeffs_[i].norm() > tol)
            deg = std::max(deg, fock_->length(static_cast<Index>(i)));
    return deg;
}

Index concat_across(const TruncatedFock& Fout, const TruncatedFock& Fa, Index a,
                    const TruncatedFock& Fb, Index b) {
    const int la = Fa.length(a), lb = Fb.length(b);
    if (la + lb > Fout.N()) return -1;
    const Index wa = a - Fa.level_offset(la);
    const Index wb = b - Fb.level_offset(lb);
    return Fout.level_offset(la + lb) + wa * Fout.dpow(lb) + wb;
}

CMat extend(const MultiAnalyticSymbol& theta, int N_out) {
    const auto Fo = TruncatedFock::shared(theta.d(), N_out);
    const TruncatedFock& Ft = theta.fock();
    const Index p = theta.dom_dim(), q = theta.cod_dim();
    const Index total = Fo->total_dim();
    CMat M = CMat::Zero(total * q, total * p);
    for (Index g = 0; g < total; ++g) {
        for (Index a = 0; a < Ft.total_dim(); ++a) {
            const Index beta = concat_across(*Fo, *Fo, g, Ft, a);
            if (beta < 0) continue;
            M.block(beta * q, g * p, q, p) = theta.coeff(a);
        }
    }
    return M;
}

MultiAnalyticSymbol compose(const MultiAnalyticSymbol& theta, const MultiAnalyticSymbol& eta,
                            std::optional<int> N_out) {
    if (theta.d() != eta.d()) throw DimensionMismatch("compose: symbols over different d");
    if (theta.dom_dim() != eta.cod_dim())
        throw DimensionMismatch("compose: domain of theta does not match codomain of eta");
    const int N = N_out.value_or(std::min(theta.N(), eta.N()));
    MultiAnalyticSymbol out(theta.d(), N, eta.dom_dim(), theta.cod_dim());
    const TruncatedFock& Fo = out.fock();
    const TruncatedFock& Ft = theta.fock();
    const TruncatedFock& Fe = eta.fock();
    for (Index b = 0; b < Fe.total_dim(); ++b) {
        if (Fe.length(b) > N) break;
        for (Index a = 0; a < Ft.total_dim(); ++a) {
            const Index g = concat_across(Fo, Fe, b, Ft, a);
            if (g < 0) continue;
            out.coeff(g).noalias() += theta.coeff(a) * eta.coeff(b);
        }
    }
    return out;
}

GramDefect gram_defect(const MultiAnalyticSymbol& theta, double tol_inner) {
    const TruncatedFock& F = theta.fock();
    const Index p = theta.dom_dim();
    GramDefect out;
    out.gram0 = CMat::Zero(p, p);
    for (Index a = 0; a < F.total_dim(); ++a) out.gram0.noalias() += theta.coeff(a).adjoint() * theta.coeff(a);
    out.gram0_defect = op_norm(out.gram0 - CMat::Identity(p, p));
    out.worst_cross = 0.0;
    for (Index b = 1; b < F.total_dim(); ++b) {
        CMat c = CMat::Zero(p, p);
        for (Index a = 0; a < F.total_dim(); ++a) {
            const Index ba = F.concat(b, a);
            if (ba < 0) continue;
            c.noalias() += theta.coeff(ba).adjoint() * theta.coeff(a);
        }
        out.worst_cross = std::max(out.worst_cross, op_norm(c));
        out.cross.emplace(b, std::move(c));
    }
    out.inner = out.gram0_defect < tol_inner && out.worst_cross < tol_inner;
    return out;
}

Equivalence equivalent(const MultiAnalyticSymbol& theta, const MultiAnalyticSymbol& theta_p,
                       double tol) {
    Equivalence out;
    if (theta.d() != theta_p.d() || theta.cod_dim() != theta_p.cod_dim())
        throw DimensionMismatch("equivalent: symbols differ in d or codomain");
    if (theta.dom_dim() != theta_p.dom_dim()) {
        out.residual = std::numeric_limits<double>::infinity();
        out.equivalent = false;
        return out;
    }
    const int N = std::min(theta.N(), theta_p.N());
    const Index total = fock_dim(theta.d(), N);
    const Index p = theta.dom_dim();
    CMat cross = CMat::Zero(p, p);
    double norm2 = 0.0;
    for (Index a = 0; a < total; ++a) {
        cross.noalias() += theta_p.coeff(a).adjoint() * theta.coeff(a);
        norm2 += theta.coeff(a).squaredNorm();
    }
    const CMat v = polar_unitary(cross);
    double res2 = 0.0;
    for (Index a = 0; a < total; ++a) res2 += (theta.coeff(a) - theta_p.coeff(a) * v).squaredNorm();
    out.v = v;
    out.residual = norm2 > 0.0 ? std::sqrt(res2 / norm2) : std::sqrt(res2);
    out.equivalent = out.residual < tol;
    return out;
}

SymbolDelta symbol_delta(const MultiAnalyticSymbol& theta, int N_out) {
    const CMat M = extend(theta, N_out);
    SymbolDelta out;
    out.delta = fockdil::psqrt(CMat::Identity(M.cols(), M.cols()) - M.adjoint() * M);
    out.valid_levels = N_out - std::max(0, theta.degree());
    return out;
}

double intertwining_residual(const MultiAnalyticSymbol& theta, int N_out, int max_level) {
    const auto F = TruncatedFock::shared(theta.d(), N_out);
    const CMat M = extend(theta, N_out);
    const OperatorTuple L = creation_ops(*F);
    const Index keep = fock_dim(theta.d(), std::min(max_level, N_out)) * theta.cod_dim();
    double worst = 0.0;
    for (int i = 0; i < theta.d(); ++i) {
        const CMat Lp = kron(L[i], CMat::Identity(theta.dom_dim(), theta.dom_dim()));
        const CMat Lq = kron(L[i], CMat::Identity(theta.cod_dim(), theta.cod_dim()));
        const CMat R = M * Lp - Lq * M;
        worst = std::max(worst, R.topRows(keep).norm());
    }
    return worst;
}

}  // namespace fockdil
