#pragma once

#include <span>
#include <vector>

namespace jjgz {

/// Solves a tridiagonal system with LAPACK dgtsv (partial pivoting). `lower[i]` couples row i+1 to column i and
/// `upper[i]` couples row i to column i+1, so both have n-1 entries.
/// Throws SingularSystemError with the index of the vanishing pivot.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

} // namespace jjgz
