#pragma once

// Words over {1..d}, the truncated full Fock space, creation operators and
// subspaces cut out by polynomial constraints.

#include "fockdil/tuples.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fockdil {

using Word = std::vector<int>;

// "0" for the empty word, otherwise letters joined by '.'.
std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s);

// Basis e_alpha, |alpha| <= N, in graded lexicographic order.
class TruncatedFock {
public:
    TruncatedFock(int d, int N);
    // Shared read-only instance per (d, N).
    static std::shared_ptr<const TruncatedFock> shared(int d, int N);

    int d() const { return d_; }
    int N() const { return N_; }
    Index total_dim() const { return offsets_.back(); }
    Index level_offset(int n) const { return offsets_.at(static_cast<size_t>(n)); }
    Index level_size(int n) const { return pow_.at(static_cast<size_t>(n)); }
    Index dpow(int n) const { return pow_.at(static_cast<size_t>(n)); }

    Index index(const Word& w) const;
    const Word& word(Index i) const { return words_.at(static_cast<size_t>(i)); }
    int length(Index i) const { return static_cast<int>(words_.at(static_cast<size_t>(i)).size()); }
    const std::vector<Word>& words() const { return words_; }

    // Index of word(a) followed by word(b), or -1 if longer than N.
    Index concat(Index a, Index b) const;
    // Index of the word with `letter` prepended, or -1 at the top level.
    Index prepend(int letter, Index a) const { return N_ < 1 ? -1 : concat(letter_index(letter), a); }
    Index letter_index(int letter) const { return static_cast<Index>(letter); }

private:
    int d_, N_;
    std::vector<Index> offsets_;  // offsets_[n] = first index of level n; back() = total
    std::vector<Index> pow_;      // d^n
    std::vector<Word> words_;
};

// Total dimension of the truncated Fock space, sum_{n<=N} d^n.
Index fock_dim(int d, int N);

// L_i e_alpha = e_{i alpha}, top level mapped to zero.
OperatorTuple creation_ops(const TruncatedFock& F);

struct Monomial {
    cplx coeff;
    Word word;
};
using Polynomial = std::vector<Monomial>;

struct ConstraintSet {
    std::vector<Polynomial> polynomials;

    bool empty() const { return polynomials.empty(); }
    // z_i z_j - z_j z_i for i < j.
    static ConstraintSet commutators(int d);
    // z_i z_j - q_ij z_j z_i for i < j.
    static ConstraintSet q_commutators(int d, const CMat& q);
};

// sum coeff * T_word, the empty word standing for the identity.
CMat eval_poly(const Polynomial& p, const OperatorTuple& T);

// Largest subspace M with T_i^* M in M and p(T)^* M = 0 for every constraint.
SubspaceBasis maximal_constrained_piece(const OperatorTuple& T, const ConstraintSet& J,
                                        double rank_tol = config().rank_tol);

// Maximal constrained subspace of the truncated Fock space for the creation
// operators.  The identity basis is returned for an empty constraint set.
SubspaceBasis constrained_fock(const TruncatedFock& F, const ConstraintSet& J,
                               double rank_tol = config().rank_tol);

// Dimension of the subspace on each Fock level.  Valid for graded subspaces.
std::vector<Index> level_dims(const TruncatedFock& F, const SubspaceBasis& S,
                              double rank_tol = config().rank_tol);

// Embedding of the level <= N space into the level <= M space (M >= N).
CMat fock_embedding(int d, int N, int M);

}  // namespace fockdil
