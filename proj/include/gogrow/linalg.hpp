#pragma once

#include <vector>

namespace gog {

/// Thomas algorithm. lower[0] and upper[n-1] are ignored. Intended for
/// diagonally dominant or symmetric positive definite systems.
std::vector<double> solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                                      const std::vector<double>& upper, std::vector<double> rhs);

/// Symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;
    int size() const { return static_cast<int>(diag.size()); }
};

/// Number of eigenvalues strictly below x (Sturm sequence count).
int sturm_count(const SymTridiag& a, double x);

/// The k smallest eigenvalues in ascending order, by bisection on the
/// Sturm count.
std::vector<double> smallest_eigenvalues(const SymTridiag& a, int k);

/// Unit-norm eigenvector of the smallest eigenvalue `lambda0`, by inverse
/// iteration with a shift just below it. Sign chosen so the sum is positive.
std::vector<double> lowest_eigenvector(const SymTridiag& a, double lambda0);

}  // namespace gog
