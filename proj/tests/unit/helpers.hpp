#pragma once

// Shared fixtures for the unit suites.

#include "fockdil/random.hpp"

#include <doctest.h>

namespace testing_support {

inline fockdil::Rng rng_for(std::uint64_t salt) { return fockdil::Rng(0x5eed0000ull + salt); }

// Singular values by one-sided Jacobi, independent of the library's
// divide-and-conquer path.
inline Eigen::VectorXd jacobi_singular_values(const fockdil::CMat& M) {
    Eigen::JacobiSVD<fockdil::CMat> j(M);
    return j.singularValues();
}

inline Eigen::Index jacobi_rank(const fockdil::CMat& M, double rel = 1e-9) {
    const Eigen::VectorXd s = jacobi_singular_values(M);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rel * s(0)) ++r;
    return r;
}

}  // namespace testing_support
