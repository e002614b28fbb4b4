#include "helpers.hpp"

#include "fockdil/charfn.hpp"
#include "fockdil/cpmaps.hpp"
#include "fockdil/instances.hpp"

#include <cmath>

using namespace fockdil;
using testing_support::rng_for;

namespace {

OperatorTuple scalar(double x) { return OperatorTuple({CMat::Constant(1, 1, x)}); }

// Nilpotent tuple: strictly upper triangular, so A_alpha = 0 for |alpha| >= m.
OperatorTuple nilpotent_tuple(int d, Index m, Rng& rng, double norm) {
    const OperatorTuple R = random_row_contraction(d, m, rng, norm);
    std::vector<CMat> mats;
    for (const CMat& r : R.mats()) mats.push_back(r.triangularView<Eigen::StrictlyUpper>());
    return OperatorTuple(std::move(mats));
}

}  // namespace

TEST_CASE("scalar characteristic functions") {
    const MultiAnalyticSymbol z = popescu_char(scalar(0.0), 4);
    CHECK(std::abs(z.coeff(Word{})(0, 0)) < 1e-15);
    CHECK(std::abs(std::abs(z.coeff(Word{1})(0, 0)) - 1.0) < 1e-15);
    for (int n = 2; n <= 4; ++n) CHECK(std::abs(z.coeff(Word(static_cast<size_t>(n), 1))(0, 0)) < 1e-15);

    for (double lambda : {0.2, 0.5, 0.8}) {
        const MultiAnalyticSymbol t = popescu_char(scalar(lambda), 6);
        // theta_0 = -lambda and theta_{1^n} = (1 - lambda^2) lambda^{n-1}, up to
        // the common phase of the two one-dimensional defect bases.
        const cplx phase = -t.coeff(Word{})(0, 0) / lambda;
        CHECK(std::abs(std::abs(phase) - 1.0) < 1e-14);
        for (int n = 1; n <= 6; ++n)
            CHECK(std::abs(t.coeff(Word(static_cast<size_t>(n), 1))(0, 0) -
                           phase * (1 - lambda * lambda) * std::pow(lambda, n - 1)) < 1e-14);
    }
}

TEST_CASE("characteristic function of a *-stable tuple is inner up to the tail") {
    Rng rng = rng_for(60);
    for (int t = 0; t < 5; ++t) {
        const OperatorTuple T = random_row_contraction(2, 2, rng, 0.3);
        const int N = 8;
        // For d = 1 the Gram sum misses 1 by (1 - l^2) l^{2N} <= |Phi^N(1)|.
        const double tail = op_norm(CPMap(T).apply(CMat::Identity(2, 2), N));
        // Cross terms at |beta| = N keep only theta_beta^* theta_0 and so are
        // of the order of the square root of the tail.
        const GramDefect g = gram_defect(popescu_char(T, N), 2 * std::sqrt(tail));
        INFO("tail " << tail << " gram0 " << g.gram0_defect << " cross " << g.worst_cross);
        CHECK(g.gram0_defect <= 2 * tail + 1e-12);
        CHECK(g.worst_cross <= std::sqrt(tail));
        CHECK(g.inner);
    }
}

TEST_CASE("weighted bilateral shift lifting has a constant characteristic function") {
    for (double lambda : {0.3, 0.6, 0.9}) {
        const Index K = 3, M = 4;
        const Lifting L = weighted_shift_lifting(lambda, K, M);
        const LiftingChar lc = lifting_char_full(L, 3, true);
        // Raw family G(x) = Theta(D_E x) at e_0: lambda^2 on e_1 and
        // -lambda sqrt(1 - lambda^2) on g_0, read in the ambient C^K.
        const CVec g_e1 = lc.cod_basis * lc.raw.coeff(Word{}).col(0);
        const CVec g_g0 = lc.cod_basis * lc.raw.coeff(Word{}).col(K + M);
        CHECK(std::abs(g_e1(0) - lambda * lambda) < 1e-12);
        CHECK(std::abs(g_g0(0) + lambda * std::sqrt(1 - lambda * lambda)) < 1e-12);
        CHECK(g_e1.tail(K - 1).norm() < 1e-12);
        for (int n = 1; n <= 3; ++n) CHECK(lc.raw.coeff(Word(static_cast<size_t>(n), 1)).norm() < 1e-12);
        CHECK(lc.kernel_leak < 1e-12);
        CHECK(unitarity_residual(lc, 3, 2) < 1e-10);
    }
}

TEST_CASE("creation lifting has zero characteristic function on buffered levels") {
    const Lifting L = creation_lifting(5);
    const MultiAnalyticSymbol theta = lifting_char(L, 2);
    for (Index a = 0; a < theta.fock().total_dim(); ++a) CHECK(theta.coeff(a).norm() < 1e-10);
}

TEST_CASE("scaled shift lifting: ambient vacuum coefficient under commutator constraints") {
    for (double t : {0.25, 0.5, 0.75}) {
        const Index K = 4;
        const Lifting L = scaled_shift_lifting(t, K);
        const ConstrainedChar cc = constrained_char(L, ConstraintSet::commutators(2), 4);
        // d^1_h with h = e_1 is the first column of the raw family.
        const CVec v = cc.base.cod_basis * cc.base.raw.coeff(Word{}).col(0);
        CHECK(std::abs(v(0) - (t * t + 1) / 2) < 1e-12);
        CHECK(std::abs(v(K) - (t * t - 1) / 2) < 1e-12);
        CHECK(v.norm() == doctest::Approx(std::sqrt(std::pow((t * t + 1) / 2, 2) + std::pow((t * t - 1) / 2, 2))));
    }
}

TEST_CASE("empty constraints reproduce the lifting characteristic function") {
    Rng rng = rng_for(61);
    const Lifting L = random_reduced_lifting(2, 2, 2, rng);
    const int N = 3;
    const ConstrainedChar cc = constrained_char(L, ConstraintSet{}, N);
    const MultiAnalyticSymbol theta = lifting_char(L, N);
    CHECK((cc.theta.stacked() - theta.stacked()).norm() < 1e-12);
    CHECK(cc.leak < 1e-12);
}

TEST_CASE("lifting characteristic function: factorization and unitarity") {
    Rng rng = rng_for(62);
    for (int t = 0; t < 20; ++t) {
        const Lifting L = random_reduced_lifting(2, 2, 2, rng);
        const int N = 5;
        const LiftingChar lc = lifting_char_full(L, N);
        CHECK(lc.kernel_leak < 1e-10);
        const double tail = op_norm(CPMap(L.A).apply(CMat::Identity(2, 2), 3));
        CHECK(unitarity_residual(lc, N, 3) <= std::max(1e-8, tail));
    }
}

TEST_CASE("extended characteristic function of the trivial tuple omega") {
    CVec omega(3);
    omega << 0.6, cplx(0.0, 0.48), 0.64;
    std::vector<CMat> mats;
    for (int i = 0; i < 3; ++i) mats.push_back(CMat::Constant(1, 1, omega(i)));
    const ExtendedChar ec = extended_char(OperatorTuple(mats), 3);
    const CMat t0 = ec.theta.coeff(Word{});
    REQUIRE(t0.rows() == 2);
    REQUIRE(t0.cols() == 2);
    CHECK((t0.adjoint() * t0 - CMat::Identity(2, 2)).norm() < 1e-12);
    for (Index a = 1; a < ec.theta.fock().total_dim(); ++a) CHECK(ec.theta.coeff(a).norm() < 1e-12);
    // eps spans the complement of conj(omega).
    CHECK((ec.eps.adjoint() * omega.conjugate()).norm() < 1e-14);
    CHECK((ec.eps.adjoint() * ec.eps - CMat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("extended characteristic function: the ergodic pair on a random frame") {
    // Conjugating the pair by a unitary U carries Omega to U Omega.  The
    // defect space of omega sits in C^d (x) C Omega, so values are compared
    // as tensors with the frame's Omega, which removes its phase.
    Rng rng = rng_for(63);
    const ErgodicPair p = ergodic_pair_3d();
    const CMat U = random_unitary(3, rng);
    const OperatorTuple A = p.A.compress(U.adjoint());
    const CVec Omega = U * p.Omega;
    const ExtendedChar ec = extended_char(A, eigen_frame(A, Omega), 4);
    CVec base(2);
    base << -1.0 / 6.0, 1.0 / 6.0;
    const CVec f = ec.frame.col(0);
    auto ambient = [&](const Word& w, int i) {
        return CVec(kron(CVec(ec.eps * ec.raw.coeff(w) * kron(CVec::Unit(2, i), Omega)), f));
    };
    CHECK((ambient({}, 0) + kron(base, Omega)).norm() < 1e-10);
    CHECK((ambient({}, 1) - kron(base, Omega)).norm() < 1e-10);
    CHECK((ambient({1, 2}, 0) - 0.5 * kron(base, Omega)).norm() < 1e-10);
    CHECK(ambient({1, 1}, 0).norm() < 1e-10);
}

TEST_CASE("extended characteristic function preconditions") {
    Rng rng = rng_for(64);
    CHECK_THROWS_AS(extended_char(random_coisometric(2, 2, rng), 3), NoInvariantVectorState);
    // omega (+) coisometric block: Omega = e_0 is a joint eigenvector but the
    // tuple is not ergodic.
    const OperatorTuple rest = random_coisometric(2, 2, rng);
    std::vector<CMat> mats;
    for (int i = 0; i < 2; ++i) {
        CMat M = CMat::Zero(3, 3);
        M(0, 0) = 1.0 / std::sqrt(2.0);
        M.bottomRightCorner(2, 2) = rest[i];
        mats.push_back(M);
    }
    const OperatorTuple A(mats);
    CHECK_THROWS_AS(extended_char(A, eigen_frame(A, CVec::Unit(3, 0)), 3), NotErgodic);
}

TEST_CASE("functional model of trivial symbols") {
    Rng rng = rng_for(65);
    const OperatorTuple C = random_row_contraction(2, 2, rng, 0.8);
    const Index rC = defects(C).defect.dim();
    // Identity at e_0: H_A = {0} and the lifting is C itself.
    MultiAnalyticSymbol id(2, 1, rC, rC);
    id.set({}, CMat::Identity(rC, rC));
    const Lifting Li = functional_model(C, id, 2);
    CHECK(Li.mA() == 0);
    // Zero symbol: A is the compressed shift on Gamma_{<=N} (x) D_C.
    const Lifting Lz = functional_model(C, MultiAnalyticSymbol(2, 1, 1, rC), 2);
    CHECK(Lz.mA() == fock_dim(2, 2) * rC);
    CHECK_THROWS_AS(functional_model(C, MultiAnalyticSymbol(2, 2, 1, rC), 3), BufferTooSmall);
}

TEST_CASE("functional model roundtrip for polynomial characteristic functions") {
    // With nilpotent A of order 2 every coefficient beyond length 2 vanishes,
    // so the truncated model sees the whole symbol.
    Rng rng = rng_for(66);
    int checked = 0;
    for (int t = 0; t < 10; ++t) {
        const OperatorTuple C = random_row_contraction(2, 1, rng, 0.8);
        const OperatorTuple A = nilpotent_tuple(2, 2, rng, 0.8);
        const DefectData dC = defects(C), dA = defects(A);
        const Lifting L = lift_from_gamma(C, A, random_contraction(dC.defect.dim(), dA.defect_star.dim(), rng, 0.7));
        if (!classify(L).is_reduced) continue;
        const int Nt = 2;
        const MultiAnalyticSymbol theta = lifting_char(L, Nt);
        REQUIRE(theta.degree(1e-12) <= 2);
        const Lifting model = functional_model(C, theta, 2 * Nt);
        const MultiAnalyticSymbol back = lifting_char(model, Nt, true);
        const Equivalence e = equivalent(back, theta);
        INFO("trial " << t << " residual " << e.residual);
        CHECK(e.residual < 1e-6);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("cocycle steps are isometries and multiply to the product") {
    Rng rng = rng_for(67);
    const OperatorTuple T = random_row_contraction(2, 2, rng, 0.7);
    const DefectData dd = defects(T);
    const int k = 3, N = 4;
    CMat P = CMat::Identity(T.dim(), T.dim());
    for (int j = 0; j < k; ++j) {
        const CMat S = cocycle_step(T, j, dd);
        CHECK((S.adjoint() * S - CMat::Identity(S.cols(), S.cols())).norm() < 1e-12);
        P = S * P;
    }
    const Index r = dd.defect_star.dim();
    const Index emitted = fock_dim(2, k - 1) * r;
    const CMat prod = cocycle_product(T, k, N);
    CHECK((prod.topRows(emitted) - P.bottomRows(emitted)).norm() < 1e-12);
    CHECK(prod.bottomRows(prod.rows() - emitted).norm() == 0.0);
    CHECK_THROWS_AS(cocycle_product(T, N + 1, N), BufferTooSmall);
}

TEST_CASE("cocycle product converges to the Poisson kernel") {
    const double lambda = 0.7;
    const CMat K = poisson_kernel(scalar(lambda), 12);
    CHECK(op_norm(cocycle_product(scalar(lambda), 12, 12) - K) <= std::pow(lambda, 12) * (1 + 1e-12));
    const OperatorTuple Z({CMat::Zero(2, 2), CMat::Zero(2, 2)});
    CHECK(op_norm(cocycle_product(Z, 1, 3) - poisson_kernel(Z, 3)) < 1e-15);

    const ErgodicPair p = ergodic_pair_3d();
    const OperatorTuple R = restrict_off_omega(p.A, eigen_frame(p.A, p.Omega)).tuple;
    // The squared error is |Phi^10(1) - Phi^11(1)| = 3 / (3 * 2^10), inside the
    // trace-decay bound (2/3) 2^{-9}.
    const double err = op_norm(cocycle_product(R, 10, 10) - poisson_kernel(R, 10));
    CHECK(err * err < (2.0 / 3.0) * std::pow(2.0, -9));
    CHECK(err * err == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-9));
}
