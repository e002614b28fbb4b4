#pragma once

// Closed-form reference instances used by the acceptance suite and the CLI
// fixtures.

#include "fockdil/liftings.hpp"

namespace fockdil {

// Ergodic coisometric pair on C^3 with joint eigenvector Omega = (1,1,1)/sqrt 3,
// omega = (1,1)/sqrt 2 and sum_{|alpha|=n} A_alpha A_alpha^* decaying like
// 2^{1-n} on the complement of Omega:
//   A_1 = [[0,0,0],[1,0,0],[0,1,1]]/sqrt 2,  A_2 = [[1,1,0],[0,0,1],[0,0,0]]/sqrt 2.
struct ErgodicPair {
    OperatorTuple A;
    CVec Omega;
    CVec omega;
};
ErgodicPair ergodic_pair_3d();

// d = 1.  C is the backward shift on C^K (C e_1 = 0, C e_k = e_{k-1}), so
// D_C is the projection onto e_1.  A is the weighted bilateral shift on the
// window g_{-M}, ..., g_M with A g_j = g_{j+1} except A g_0 = lambda g_1 and
// A g_M = 0, and B e_1 = sqrt(1 - lambda^2) g_1.  Index of g_j is j + M.
Lifting weighted_shift_lifting(double lambda, Index K, Index M);

// d = 2.  C_i = S^* / sqrt 2 on C^K, A_i = t / sqrt 2 on C and
// B_i h = sqrt((1 - t^2) / 2) h_1.
Lifting scaled_shift_lifting(double t, Index K);

// d = 2.  C = (1, 0) on C, A = creation operators on Gamma_{<=M}(C^2),
// B_1 = 0, B_2 k = k e_0.  The characteristic function vanishes.
Lifting creation_lifting(int M);

}  // namespace fockdil
