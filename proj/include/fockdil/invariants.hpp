#pragma once

// Curvature and Euler statistics of row contractions (free and symmetric),
// with the trace identity relating curvature to a lifting's characteristic
// function.
//
// Conventions.  P_{<n} is the projection onto Fock levels 0..n-1, so
// trace[K^dagger (P_{<n} (x) 1) K] = trace(1 - Phi^n(1)).  The free
// statistics are
//   c_n   = trace(1 - Phi^n(1)) / d^n          (d = 1: divided by n)
//   chi_n = rank(1 - Phi^n(1)) / (1 + d + ... + d^{n-1})
// and the symmetric ones are
//   s_n   = d! trace(1 - Phi^{n+1}(1)) / n^d
//   sr_n  = d! rank(1 - Phi^{n+1}(1)) / n^d.

#include "fockdil/charfn.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <string>

namespace fockdil {

struct InvariantTrace {
    std::string statistic;      // name of the sequence
    std::string normalization;  // human-readable denominator
    std::vector<int> n;
    std::vector<double> sequence;
    double estimate = 0.0;  // last value, or the last Richardson value if requested
    std::string method;     // "last" or "richardson"
};

// Optional principal window: the basis indices to keep at step n.
using TraceWindow = std::function<std::vector<Index>(int n)>;

struct FreeInvariants {
    InvariantTrace curvature;        // from trace(1 - Phi^n(1))
    InvariantTrace curvature_kernel; // from the Poisson-kernel Gram compression
    InvariantTrace euler;
    double worst_gap;                // largest |kernel - trace| difference of the raw traces
};

FreeInvariants curvature_free(const OperatorTuple& T, int n_max, double rank_tol = config().rank_tol);

struct SymInvariants {
    InvariantTrace curvature;  // d! trace(1 - Phi^{n+1}(1)) / n^d
    InvariantTrace euler;      // d! rank(1 - Phi^{n+1}(1)) / n^d
    InvariantTrace compressed; // (d-1)! trace[K^dagger (Q_{<=n} (x) 1) K] / d^n, Q from constrained_fock
    std::vector<double> raw_trace;
    std::vector<double> raw_rank;
};

SymInvariants curvature_sym(const OperatorTuple& T, int n_max, bool richardson = false,
                            const TraceWindow& window = nullptr, bool with_compressed = true,
                            double rank_tol = config().rank_tol);

// trace(1 - Phi^m(1)) and, for diagonal Phi^m(1), its rank, for m = 1..m_max,
// with sparse real matrices.  Throws DimensionMismatch if a rank is requested
// for a non-diagonal iterate.
struct SparseTraces {
    std::vector<double> trace;
    std::vector<Index> rank;
};

using SpMat = Eigen::SparseMatrix<double>;
SparseTraces sparse_defect_traces(const std::vector<SpMat>& T, int m_max);

// Truncated creation operators on Gamma_{<=M}(C^d) as sparse real matrices.
std::vector<SpMat> sparse_creation_ops(int d, int M);

// Richardson step n s_n - (n-1) s_{n-1}, which removes a 1/n term.
std::vector<double> richardson(const std::vector<int>& n, const std::vector<double>& s);

// trace[M M^dagger (P_{<n} (x) 1)] from the symbol coefficients: each word
// alpha of length j is a suffix of d^{k-j} words of length k.  Coefficients
// beyond the symbol's N count as zero.
double split_count_trace(const MultiAnalyticSymbol& theta, int n);

struct TraceIdentityReport {
    std::vector<int> n;
    std::vector<double> lhs;         // c_n(A)
    std::vector<double> rhs_rank;    // rank D_C - S_n / d^n
    std::vector<double> rhs_exact;   // (rank D_C (d^n - 1)/(d - 1) - S_n) / d^n
    Index rank_DC;
    double difference;  // |lhs - rhs_rank| at n_max
};

TraceIdentityReport trace_identity_check(const Lifting& L, const MultiAnalyticSymbol& theta, int n_max);

}  // namespace fockdil
