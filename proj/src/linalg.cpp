#include "gogrow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gogrow/errors.hpp"

namespace gog {

std::vector<double> solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                                      const std::vector<double>& upper, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n)
        throw PreconditionError("solve_tridiagonal: size mismatch");
    std::vector<double> c(n);
    double b = diag[0];
    if (b == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
    c[0] = upper[0] / b;
    rhs[0] /= b;
    for (std::size_t i = 1; i < n; ++i) {
        b = diag[i] - lower[i] * c[i - 1];
        if (b == 0.0) throw NumericalError("solve_tridiagonal: zero pivot");
        c[i] = upper[i] / b;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / b;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

int sturm_count(const SymTridiag& a, double x) {
    const int n = a.size();
    const double tiny = std::numeric_limits<double>::min() * 1e10;
    int count = 0;
    double d = a.diag[0] - x;
    if (d < 0) ++count;
    for (int i = 1; i < n; ++i) {
        if (std::abs(d) < tiny) d = d < 0 ? -tiny : tiny;
        const double e = a.off[static_cast<std::size_t>(i - 1)];
        d = a.diag[static_cast<std::size_t>(i)] - x - e * e / d;
        if (d < 0) ++count;
    }
    return count;
}

std::vector<double> smallest_eigenvalues(const SymTridiag& a, int k) {
    const int n = a.size();
    if (n < 1 || static_cast<int>(a.off.size()) != n - 1) throw PreconditionError("malformed tridiagonal matrix");
    if (k < 1 || k > n) throw PreconditionError("requested eigenvalue count out of range");
    // Gershgorin bounds
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(a.off[static_cast<std::size_t>(i - 1)]);
        if (i < n - 1) r += std::abs(a.off[static_cast<std::size_t>(i)]);
        lo = std::min(lo, a.diag[static_cast<std::size_t>(i)] - r);
        hi = std::max(hi, a.diag[static_cast<std::size_t>(i)] + r);
    }
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        double l = lo, h = hi;
        while (h - l > tol) {
            const double m = 0.5 * (l + h);
            if (m <= l || m >= h) break;
            (sturm_count(a, m) > j ? h : l) = m;
        }
        out.push_back(0.5 * (l + h));
    }
    return out;
}

std::vector<double> lowest_eigenvector(const SymTridiag& a, double lambda0) {
    const int n = a.size();
    const auto un = static_cast<std::size_t>(n);
    double scale = 0.0;
    for (double d : a.diag) scale = std::max(scale, std::abs(d));
    const double shift = lambda0 - std::max(1e-9, 1e-12 * scale);
    std::vector<double> lower(un, 0.0), diag(un), upper(un, 0.0);
    for (std::size_t i = 0; i < un; ++i) diag[i] = a.diag[i] - shift;
    for (std::size_t i = 0; i + 1 < un; ++i) upper[i] = lower[i + 1] = a.off[i];
    std::vector<double> x(un, 1.0);
    for (int it = 0; it < 6; ++it) {
        x = solve_tridiagonal(lower, diag, upper, std::move(x));
        const double nrm = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("inverse iteration failed");
        for (double& v : x) v /= nrm;
    }
    if (std::accumulate(x.begin(), x.end(), 0.0) < 0.0)
        for (double& v : x) v = -v;
    return x;
}

}  // namespace gog
