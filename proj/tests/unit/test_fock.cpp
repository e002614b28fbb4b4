#include "helpers.hpp"

#include "fockdil/fock.hpp"
#include "fockdil/instances.hpp"

#include <algorithm>
#include <cmath>

using namespace fockdil;
using testing_support::rng_for;

namespace {

// Words of length n in lexicographic order, built by odometer counting.
std::vector<Word> words_of_length(int d, int n) {
    std::vector<Word> out;
    Word w(static_cast<size_t>(n), 1);
    while (true) {
        out.push_back(w);
        int k = n - 1;
        while (k >= 0 && w[static_cast<size_t>(k)] == d) w[static_cast<size_t>(k--)] = 1;
        if (k < 0) break;
        ++w[static_cast<size_t>(k)];
    }
    return out;
}

long binomial(long n, long k) {
    long r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("word serialization") {
    CHECK(word_to_string({}) == "0");
    CHECK(word_to_string({1, 2, 1}) == "1.2.1");
    CHECK(word_from_string("0").empty());
    CHECK(word_from_string("2.3") == Word{2, 3});
}

TEST_CASE("index and word are inverse bijections in graded-lex order") {
    for (int d = 1; d <= 4; ++d)
        for (int N = 0; N <= 8; ++N) {
            if (fock_dim(d, N) > 100000) continue;
            const TruncatedFock F(d, N);
            Index expected = 0;
            for (int n = 0; n <= N; ++n)
                for (const Word& w : (n == 0 ? std::vector<Word>{Word{}} : words_of_length(d, n))) {
                    REQUIRE(F.index(w) == expected);
                    REQUIRE(F.word(expected) == w);
                    ++expected;
                }
            CHECK(expected == F.total_dim());
        }
    CHECK(fock_dim(2, 3) == 15);
    CHECK(fock_dim(1, 4) == 5);
}

TEST_CASE("concat and prepend") {
    const TruncatedFock F(3, 3);
    CHECK(F.concat(F.index({1, 2}), F.index({3})) == F.index({1, 2, 3}));
    CHECK(F.concat(F.index({}), F.index({2})) == F.index({2}));
    CHECK(F.concat(F.index({1, 2}), F.index({3, 3})) == -1);
    CHECK(F.prepend(2, F.index({1, 1})) == F.index({2, 1, 1}));
    CHECK(F.prepend(2, F.index({1, 1, 1})) == -1);
}

TEST_CASE("creation operators on small spaces") {
    const OperatorTuple L1 = creation_ops(TruncatedFock(1, 2));
    CMat shift = CMat::Zero(3, 3);
    shift(1, 0) = shift(2, 1) = 1.0;
    CHECK((L1[0] - shift).norm() == 0.0);

    const TruncatedFock F(2, 1);
    const OperatorTuple L = creation_ops(F);
    CHECK(L[0](F.index({1}), 0) == cplx(1.0));
    CHECK(L[0].col(F.index({2})).norm() == 0.0);
}

TEST_CASE("creation operators: vacuum defect and Cuntz relations below the top") {
    for (int d = 1; d <= 3; ++d)
        for (int N = 0; N <= 4; ++N) {
            const TruncatedFock F(d, N);
            const OperatorTuple L = creation_ops(F);
            const Index n = F.total_dim();
            CMat sum = CMat::Zero(n, n);
            for (int i = 0; i < d; ++i) sum += L[i] * L[i].adjoint();
            CMat P0 = CMat::Zero(n, n);
            P0(0, 0) = 1.0;
            CHECK((CMat::Identity(n, n) - sum - P0).norm() == 0.0);
            const Index below = F.level_offset(N);  // levels < N
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const CMat G = (L[i].adjoint() * L[j]).topLeftCorner(below, below);
                    const CMat expect = (i == j ? 1.0 : 0.0) * CMat::Identity(below, below);
                    CHECK((G - expect).norm() == 0.0);
                }
        }
}

TEST_CASE("eval_poly") {
    Rng rng = rng_for(20);
    const OperatorTuple C = random_commuting_coisometric(2, 3, rng);
    const ConstraintSet J = ConstraintSet::commutators(2);
    CHECK(eval_poly(J.polynomials[0], C).norm() < 1e-12);
    CHECK((eval_poly({{1.0, {1}}}, C) - C[0]).norm() == 0.0);
    CHECK((eval_poly({{2.0, {}}}, C) - 2.0 * CMat::Identity(3, 3)).norm() == 0.0);

    const TruncatedFock F(2, 2);
    const CMat P = eval_poly(J.polynomials[0], creation_ops(F));
    CHECK(P.rows() == 7);
    CHECK(P(F.index({1, 2}), 0) == cplx(1.0));
    CHECK(P(F.index({2, 1}), 0) == cplx(-1.0));
    CHECK(P.norm() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("commutator-constrained Fock space has symmetric level dimensions") {
    for (int d = 1; d <= 3; ++d)
        for (int N = 0; N <= 6; ++N) {
            if (fock_dim(d, N) > 1200) continue;
            const TruncatedFock F(d, N);
            const SubspaceBasis G = constrained_fock(F, ConstraintSet::commutators(d));
            const std::vector<Index> dims = level_dims(F, G);
            REQUIRE(dims.size() == static_cast<size_t>(N + 1));
            for (int n = 0; n <= N; ++n) CHECK(dims[static_cast<size_t>(n)] == binomial(n + d - 1, n));
        }
}

TEST_CASE("constrained Fock space agrees with a level-by-level linear solve") {
    // On level n the constrained vectors are those annihilated by every
    // partial adjoint p(L)^* L_beta^*; for commutators this is the kernel of
    // all adjacent-transposition differences, i.e. symmetric tensors.
    const int d = 2, N = 4;
    const TruncatedFock F(d, N);
    const SubspaceBasis G = constrained_fock(F, ConstraintSet::commutators(d));
    for (int n = 0; n <= N; ++n) {
        const Index off = F.level_offset(n), sz = F.level_size(n);
        std::vector<std::pair<Index, Index>> rows;
        for (Index a = 0; a < sz; ++a) {
            Word w = F.word(off + a);
            for (size_t k = 0; k + 1 < w.size(); ++k) {
                Word s = w;
                std::swap(s[k], s[k + 1]);
                rows.push_back({a, F.index(s) - off});
            }
        }
        CMat A = CMat::Zero(static_cast<Index>(rows.size()) + 1, sz);
        for (size_t r = 0; r < rows.size(); ++r) {
            A(static_cast<Index>(r), rows[r].first) += 1.0;
            A(static_cast<Index>(r), rows[r].second) -= 1.0;
        }
        const Index expected = sz - testing_support::jacobi_rank(A);
        CHECK(level_dims(F, G)[static_cast<size_t>(n)] == expected);
    }
}

TEST_CASE("empty constraints and d = 1 give the whole space") {
    const TruncatedFock F(2, 3);
    CHECK(constrained_fock(F, ConstraintSet{}).dim() == F.total_dim());
    const TruncatedFock F1(1, 5);
    CHECK(constrained_fock(F1, ConstraintSet::commutators(1)).dim() == 6);
}

TEST_CASE("q-commutation constraints") {
    // z_1 z_2 = q z_2 z_1 with |q| = 1, q != 1: level 2 keeps e_11, e_22 and
    // the single combination killed by the adjoint of the relation.
    const TruncatedFock F(2, 3);
    CMat q = CMat::Zero(2, 2);
    q(0, 1) = std::polar(1.0, 0.7);
    const SubspaceBasis G = constrained_fock(F, ConstraintSet::q_commutators(2, q));
    const std::vector<Index> dims = level_dims(F, G);
    CHECK(dims[0] == 1);
    CHECK(dims[1] == 2);
    CHECK(dims[2] == 3);
    const OperatorTuple L = creation_ops(F);
    for (const Polynomial& p : ConstraintSet::q_commutators(2, q).polynomials)
        CHECK((eval_poly(p, L).adjoint() * G.basis).norm() < 1e-10);
}

TEST_CASE("maximal constrained piece is constrained and co-invariant") {
    Rng rng = rng_for(21);
    for (int t = 0; t < 30; ++t) {
        const OperatorTuple T = random_row_contraction(2, 2 + t % 4, rng, 0.9);
        const ConstraintSet J = ConstraintSet::commutators(2);
        const SubspaceBasis M = maximal_constrained_piece(T, J);
        for (int i = 0; i < 2; ++i) CHECK(containment_residual(M, T[i].adjoint() * M.basis) < 1e-10);
        for (const Polynomial& p : J.polynomials) CHECK((eval_poly(p, T).adjoint() * M.basis).norm() < 1e-10);
    }
    const OperatorTuple C = random_commuting_coisometric(3, 4, rng);
    CHECK(maximal_constrained_piece(C, ConstraintSet::commutators(3)).dim() == 4);
    const Index k = maximal_constrained_piece(ergodic_pair_3d().A, ConstraintSet::commutators(2)).dim();
    CHECK(k <= 1);
}

TEST_CASE("constrained piece of a creation lifting keeps the base space") {
    // Regression: a rank-deficient SVD once dropped H from this subspace.
    const Lifting L = creation_lifting(4);
    const SubspaceBasis M = maximal_constrained_piece(L.E(), ConstraintSet::commutators(2));
    const Index mC = L.C.dim();
    CMat H = CMat::Zero(L.E().dim(), mC);
    H.topRows(mC) = CMat::Identity(mC, mC);
    CHECK(containment_residual(M, H) < 1e-9);
}

TEST_CASE("fock embedding") {
    const CMat E = fock_embedding(2, 1, 2);
    CHECK(E.rows() == 7);
    CHECK(E.cols() == 3);
    CHECK((E.adjoint() * E - CMat::Identity(3, 3)).norm() == 0.0);
}
