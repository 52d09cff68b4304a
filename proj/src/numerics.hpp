#pragma once

// Building blocks shared by the parabolic and two-velocity solvers.

#include <vector>

#include "gogrow/core.hpp"

namespace gog::detail {

/// Fraction of cell i lying right of x (0..1).
double right_fraction(const Grid1D& g, int i, double x);

/// Exact solution over time h of rho' = g rho, N' = -rho N with g frozen per
/// cell. Either part may be switched off.
void react(std::vector<double>& rho, std::vector<double>& n, const std::vector<double>& growth, double h,
           bool growth_on, bool consumption_on);

/// Theta-scheme diffusion for the nutrient with Dirichlet values at both
/// faces, plus advection at velocity `u`: explicit upwind, or centred and
/// theta-weighted when `central` is set.
std::vector<double> nutrient_transport(const std::vector<double>& n, const Grid1D& g, double dt, double D,
                                       double theta, double u, double n_left, double n_right,
                                       bool diffusion_on, bool central = false);

/// Tridiagonal operator (L x)_i = lower_i x_{i-1} + diag_i x_i + upper_i x_{i+1} + source_i.
struct TridiagOperator {
    std::vector<double> lower, diag, upper, source;
};

/// x + dt ((1 - theta) L x^n + theta L x^{n+1}).
std::vector<double> theta_step(const TridiagOperator& op, const std::vector<double>& x, double dt, double theta);

/// (I - theta dt L) x = rhs with L the zero-flux Laplacian scaled by `coef`.
std::vector<double> neumann_implicit_solve(const std::vector<double>& rhs, const Grid1D& g, double dt,
                                           double coef, double theta);
/// L x for the zero-flux Laplacian.
std::vector<double> neumann_laplacian(const std::vector<double>& x, double dz);

}  // namespace gog::detail
