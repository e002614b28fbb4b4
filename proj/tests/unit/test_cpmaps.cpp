#include "helpers.hpp"

#include "fockdil/charfn.hpp"
#include "fockdil/cpmaps.hpp"
#include "fockdil/instances.hpp"

#include <cmath>

using namespace fockdil;
using testing_support::rng_for;

TEST_CASE("superoperator matches apply under column-stacking vec") {
    Rng rng = rng_for(30);
    for (int t = 0; t < 50; ++t) {
        const OperatorTuple T = random_row_contraction(1 + t % 3, 1 + t % 5, rng);
        const CPMap phi(T);
        const CMat X = random_gaussian(T.dim(), T.dim(), rng);
        CHECK((phi.superoperator() * vec(X) - vec(phi.apply(X))).norm() < 1e-12);
    }
}

TEST_CASE("n-fold application: repeated, powered and sparse paths agree") {
    Rng rng = rng_for(31);
    const OperatorTuple T = random_row_contraction(2, 4, rng, 0.95);
    const CPMap phi(T);
    const CMat X = random_gaussian(4, 4, rng);
    CMat Y = X;
    for (int k = 0; k < 100; ++k) Y = phi.apply(Y);
    CHECK((phi.apply(X, 100) - Y).norm() < 1e-10 * std::max(1.0, Y.norm()));

    // Creation operators on a 127-dimensional Fock space take the sparse path.
    const OperatorTuple L = creation_ops(TruncatedFock(2, 6));
    const CPMap sparse(L);
    const CMat Z = random_gaussian(L.dim(), L.dim(), rng);
    CMat dense = CMat::Zero(L.dim(), L.dim());
    for (const CMat& l : L.mats()) dense += l * Z * l.adjoint();
    CHECK((sparse.apply(Z) - dense).norm() < 1e-12 * Z.norm());
}

TEST_CASE("positivity and unitality") {
    Rng rng = rng_for(32);
    for (int t = 0; t < 50; ++t) {
        const OperatorTuple T = random_row_contraction(2, 4, rng);
        const CMat G = random_gaussian(4, 4, rng);
        const CMat Y = CPMap(T).apply(G * G.adjoint());
        Eigen::SelfAdjointEigenSolver<CMat> es(CMat((Y + Y.adjoint()) / 2.0));
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
    const OperatorTuple C = random_coisometric(3, 4, rng);
    CHECK((CPMap(C).apply(CMat::Identity(4, 4)) - CMat::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("fixed-point dimensions") {
    Rng rng = rng_for(33);
    CHECK(fixed_points(CPMap(ergodic_pair_3d().A)).size() == 1);
    for (int t = 0; t < 10; ++t) {
        const std::vector<CMat> f1 = fixed_points(CPMap(random_coisometric(2, 3, rng)));
        REQUIRE(f1.size() == 1);
        // The single fixed point is a multiple of the identity.
        CHECK((f1[0] - f1[0](0, 0) * CMat::Identity(3, 3)).norm() < 1e-9);
        CHECK(fixed_points(CPMap(random_nonergodic_coisometric(2, 2, 3, rng))).size() == 2);
    }
    // A *-stable tuple has no nonzero fixed points.
    CHECK(fixed_points(CPMap(random_row_contraction(2, 3, rng, 0.8))).empty());
}

TEST_CASE("kappa and its inverse on liftings with *-stable A") {
    Rng rng = rng_for(34);
    for (int t = 0; t < 10; ++t) {
        const OperatorTuple C = random_nonergodic_coisometric(2, 1 + t % 2, 2, rng);
        const Lifting L = random_reduced_lifting_of(C, 2, rng);
        const CPMap phiE(L.E());
        for (const CMat& x : fixed_points(CPMap(C))) {
            const KappaInverse k = kappa_inverse(L, x);
            CHECK((kappa(k.limit, L.mC()) - x).norm() < 1e-9);
            CHECK((phiE.apply(k.limit) - k.limit).norm() < 1e-8);
        }
    }
}

TEST_CASE("ergodicity of a lifting versus ergodicity of its parts") {
    const ExtendedChar ec = extended_char(ergodic_pair_3d().A, 4);
    const ErgodicLiftingCheck c = ergodic_lifting_check(ec.lifting);
    CHECK(c.erg_E);
    CHECK(c.star_stable_A);
    CHECK(c.biconditional_holds);
}
