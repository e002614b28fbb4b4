#pragma once

// Multi-analytic symbols: coefficient families {theta_alpha : D -> D'} over
// words of length <= N, their extensions to truncated Fock space,
// composition, Gram tests, equivalence and the symbol defect.

#include "fockdil/fock.hpp"

#include <map>
#include <memory>
#include <optional>

namespace fockdil {

class MultiAnalyticSymbol {
public:
    MultiAnalyticSymbol() = default;
    // All coefficients zero.
    MultiAnalyticSymbol(int d, int N, Index dom_dim, Index cod_dim);
    // From the stacked matrix D -> Gamma_{<=N} (x) D', word blocks of cod_dim rows.
    static MultiAnalyticSymbol from_stacked(int d, int N, const CMat& stacked, Index cod_dim);

    int d() const { return d_; }
    int N() const { return N_; }
    Index dom_dim() const { return dom_; }
    Index cod_dim() const { return cod_; }
    const TruncatedFock& fock() const { return *fock_; }

    // Coefficient at a Fock index or a word; words longer than N read as zero.
    const CMat& coeff(Index i) const { return coeffs_.at(static_cast<size_t>(i)); }
    CMat& coeff(Index i) { return coeffs_.at(static_cast<size_t>(i)); }
    CMat coeff(const Word& w) const;
    void set(const Word& w, const CMat& m);

    // theta as one map D -> Gamma_{<=N} (x) D'.
    CMat stacked() const;
    // Same symbol with coefficients beyond N_out dropped or zero-padded.
    MultiAnalyticSymbol resized(int N_out) const;
    // theta_alpha * v for every alpha, i.e. right multiplication by v : D'' -> D.
    MultiAnalyticSymbol times(const CMat& v) const;
    // u * theta_alpha for u : D' -> D''.
    MultiAnalyticSymbol left_times(const CMat& u) const;

    // Length of the longest word with a coefficient above tol in Frobenius norm, -1 if zero.
    int degree(double tol = 1e-14) const;

private:
    int d_ = 1, N_ = 0;
    Index dom_ = 0, cod_ = 0;
    std::shared_ptr<const TruncatedFock> fock_;
    std::vector<CMat> coeffs_;  // by Fock index
};

// Index of the concatenation of word a (in Fa) and word b (in Fb) inside Fout,
// -1 when it is too long for Fout.
Index concat_across(const TruncatedFock& Fout, const TruncatedFock& Fa, Index a,
                    const TruncatedFock& Fb, Index b);

// Matrix of M_theta from Gamma_{<=N_out} (x) D to Gamma_{<=N_out} (x) D'.
// Block (row beta, column g) is theta_alpha when beta = g alpha; longer
// products are dropped.
CMat extend(const MultiAnalyticSymbol& theta, int N_out);

// Symbol of M_theta M_eta: (theta o eta)_g = sum over g = b a of theta_a eta_b.
// N_out defaults to min(N_theta, N_eta), the longest exact length.
MultiAnalyticSymbol compose(const MultiAnalyticSymbol& theta, const MultiAnalyticSymbol& eta,
                            std::optional<int> N_out = std::nullopt);

struct GramDefect {
    CMat gram0;                  // sum_alpha theta_alpha^dagger theta_alpha
    std::map<Index, CMat> cross; // beta -> sum_alpha theta_{beta alpha}^dagger theta_alpha, 1 <= |beta| <= N
    double worst_cross;
    double gram0_defect;         // |gram0 - 1|
    bool inner;
};

GramDefect gram_defect(const MultiAnalyticSymbol& theta, double tol_inner = config().tol_inner);

struct Equivalence {
    std::optional<CMat> v;  // unitary with theta ~ theta' v, empty when domains differ
    double residual;        // relative Frobenius residual, +inf when domains differ
    bool equivalent;
};

// Orthogonal Procrustes fit theta_alpha ~ theta'_alpha v over all words up to
// the smaller of the two truncation levels.
Equivalence equivalent(const MultiAnalyticSymbol& theta, const MultiAnalyticSymbol& theta_p,
                       double tol = 1e-6);

struct SymbolDelta {
    CMat delta;        // psqrt(1 - M^dagger M), M = extend(theta, N_out)
    int valid_levels;  // N_out - degree(theta); rows above this level carry truncation loss
};

SymbolDelta symbol_delta(const MultiAnalyticSymbol& theta, int N_out);

// Largest Frobenius norm of M(L_i (x) 1) - (L_i (x) 1)M over rows of level <= max_level.
double intertwining_residual(const MultiAnalyticSymbol& theta, int N_out, int max_level);

}  // namespace fockdil
