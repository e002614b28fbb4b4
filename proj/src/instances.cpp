#include "fockdil/instances.hpp"

#include "fockdil/fock.hpp"

#include <cmath>

namespace fockdil {

ErgodicPair ergodic_pair_3d() {
    const double s = 1.0 / std::sqrt(2.0);
    CMat A1 = CMat::Zero(3, 3), A2 = CMat::Zero(3, 3);
    A1(1, 0) = s;
    A1(2, 1) = s;
    A1(2, 2) = s;
    A2(0, 0) = s;
    A2(0, 1) = s;
    A2(1, 2) = s;
    ErgodicPair p;
    p.A = OperatorTuple({A1, A2});
    p.Omega = CVec::Constant(3, 1.0 / std::sqrt(3.0));
    p.omega = CVec::Constant(2, s);
    return p;
}

namespace {

CMat backward_shift(Index K) {
    CMat S = CMat::Zero(K, K);
    for (Index k = 1; k < K; ++k) S(k - 1, k) = 1.0;
    return S;
}

}  // namespace

Lifting weighted_shift_lifting(double lambda, Index K, Index M) {
    const Index n = 2 * M + 1;
    CMat A = CMat::Zero(n, n);
    for (Index j = -M; j < M; ++j) A(j + 1 + M, j + M) = j == 0 ? lambda : 1.0;
    CMat B = CMat::Zero(n, K);
    B(1 + M, 0) = std::sqrt(1.0 - lambda * lambda);
    return recover_gamma(OperatorTuple({backward_shift(K)}), OperatorTuple({A}), {B});
}

Lifting scaled_shift_lifting(double t, Index K) {
    const double s = 1.0 / std::sqrt(2.0);
    const CMat C = backward_shift(K) * s;
    const CMat A = CMat::Constant(1, 1, t * s);
    CMat B = CMat::Zero(1, K);
    B(0, 0) = std::sqrt((1.0 - t * t) / 2.0);
    return recover_gamma(OperatorTuple({C, C}), OperatorTuple({A, A}), {B, B});
}

Lifting creation_lifting(int M) {
    const TruncatedFock F(2, M);
    const OperatorTuple L = creation_ops(F);
    const Index n = F.total_dim();
    CMat B2 = CMat::Zero(n, 1);
    B2(0, 0) = 1.0;
    return recover_gamma(OperatorTuple({CMat::Identity(1, 1), CMat::Zero(1, 1)}), L,
                         {CMat::Zero(n, 1), B2});
}

}  // namespace fockdil
