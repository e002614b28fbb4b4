#pragma once

// Operator tuples, structural predicates and defect operators.

#include "fockdil/numkit.hpp"

#include <optional>
#include <vector>

namespace fockdil {

// d square matrices acting on a common space of dimension dim.
class OperatorTuple {
public:
    OperatorTuple() = default;
    explicit OperatorTuple(std::vector<CMat> mats);
    // d copies of the 0x0 matrix, for tuples on the zero space.
    static OperatorTuple empty(int d);

    int d() const { return static_cast<int>(mats_.size()); }
    Index dim() const { return mats_.empty() ? 0 : mats_.front().rows(); }
    const CMat& operator[](int i) const { return mats_.at(static_cast<size_t>(i)); }
    const std::vector<CMat>& mats() const { return mats_; }

    // Row operator [T_1 ... T_d] from the d-fold direct sum to the space.
    CMat row() const;
    // Sum of T_i T_i^dagger.
    CMat row_gram() const;
    // T_alpha = T_{a1} ... T_{an} for letters in 1..d; identity for the empty word.
    CMat word(const std::vector<int>& letters) const;
    std::vector<CMat> adjoints() const;
    // U^dagger T_i U for an isometry U (compression to its range).
    OperatorTuple compress(const CMat& U) const;

private:
    std::vector<CMat> mats_;
};

struct DefectData {
    CMat Dstar;                 // (1 - sum T_i T_i^*)^{1/2}
    CMat Dfull;                 // (delta_ij - T_i^* T_j)^{1/2} on the d-fold sum
    SubspaceBasis defect_star;  // range of Dstar
    SubspaceBasis defect;       // range of Dfull
};

struct EigenFrame {
    CVec omega;              // the scalars omega_i
    CVec Omega;              // unit joint eigenvector of the adjoints
    std::vector<CVec> ells;  // ell_i = A_i Omega - omega_i Omega
};

struct StabilityReport {
    CMat Q;            // monotone limit of Phi^n(1)
    bool star_stable;  // |Q| < tol
    SubspaceBasis H1;  // eigenspace of Q at eigenvalue 1
    bool cnc;          // H1 trivial
    int iterations;
    double residual;
};

// Tuple compressed to the orthogonal complement of Omega.
struct RestrictedTuple {
    OperatorTuple tuple;  // in the coordinates given by basis
    CMat basis;           // dim x (dim-1), orthonormal basis of the complement
    // The compressed operators written back in ambient coordinates.
    CMat ambient(int i) const { return basis * tuple[i] * basis.adjoint(); }
};

bool is_row_contraction(const OperatorTuple& T, double tol = 1e-9);
bool is_coisometric(const OperatorTuple& T, double tol = config().tol);
bool is_commuting(const OperatorTuple& T, double tol = config().tol);

DefectData defects(const OperatorTuple& T, double rank_tol = config().rank_tol);

StabilityReport stability_report(const OperatorTuple& T, double tol = 1e-9);

EigenFrame eigen_frame(const OperatorTuple& A, const std::optional<CVec>& Omega_hint = std::nullopt,
                       double tol = 1e-9);

RestrictedTuple restrict_off_omega(const OperatorTuple& A, const EigenFrame& f, double tol = 1e-9);

// Fixed points of X -> sum T_i X T_i^* are exactly the scalars.
bool is_ergodic(const OperatorTuple& T);

}  // namespace fockdil
