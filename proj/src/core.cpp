#include "gogrow/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gog {

void ModelParams::validate() const {
    if (!(std::isfinite(chi) && chi > 0.0)) throw PreconditionError("chi must be positive");
    if (!(std::isfinite(diffusion_n) && diffusion_n > 0.0))
        throw PreconditionError("diffusion_n must be positive");
    if (!(n_threshold > 0.0 && n_threshold < 1.0))
        throw PreconditionError("n_threshold must lie in (0, 1)");
    if (!(std::isfinite(epsilon) && epsilon > 0.0))
        throw PreconditionError("epsilon must be positive");
}

Grid1D::Grid1D(double z_min, double z_max, int n_cells)
    : z_min_(z_min), z_max_(z_max), n_cells_(n_cells), dz_(0.0) {
    if (!std::isfinite(z_min) || !std::isfinite(z_max))
        throw PreconditionError("grid bounds must be finite");
    if (!(z_min < z_max)) throw PreconditionError("grid requires z_min < z_max");
    if (n_cells < 2) throw PreconditionError("grid requires at least 2 cells");
    dz_ = (z_max - z_min) / n_cells;
}

std::vector<double> Grid1D::centers() const {
    std::vector<double> z(static_cast<std::size_t>(n_cells_));
    for (int i = 0; i < n_cells_; ++i) z[static_cast<std::size_t>(i)] = center(i);
    return z;
}

Grid1D build_grid(double z_min, double z_max, int n_cells) { return Grid1D(z_min, z_max, n_cells); }

Field::Field(Grid1D grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.n_cells())
        throw PreconditionError("field length does not match grid");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            std::ostringstream msg;
            msg << "non-finite field value at cell " << i;
            throw NumericalError(msg.str());
        }
    }
}

Field Field::from_function(const Grid1D& grid, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(grid.n_cells()));
    for (int i = 0; i < grid.n_cells(); ++i) v[static_cast<std::size_t>(i)] = f(grid.center(i));
    return Field(grid, std::move(v));
}

Field Field::constant(const Grid1D& grid, double c) {
    return Field(grid, std::vector<double>(static_cast<std::size_t>(grid.n_cells()), c));
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::interpolate(double z) const {
    const double s = (z - grid_.z_min()) / grid_.dz() - 0.5;
    if (s <= 0.0) return values_.front();
    const int n = grid_.n_cells();
    if (s >= n - 1) return values_.back();
    const int i = static_cast<int>(std::floor(s));
    const double w = s - i;
    return (1.0 - w) * (*this)[i] + w * (*this)[i + 1];
}

double integrate(const Field& f, const std::optional<Field>& weight) {
    if (weight && !(weight->grid() == f.grid()))
        throw PreconditionError("integrate: field and weight live on different grids");
    const int n = f.size();
    const double dz = f.grid().dz();
    auto g = [&](int i) { return weight ? f[i] * (*weight)[i] : f[i]; };
    double interior = 0.5 * (g(0) + g(n - 1));
    for (int i = 1; i < n - 1; ++i) interior += g(i);
    interior *= dz;
    // half cells [z_min, c_0] and [c_{n-1}, z_max]
    return interior + 0.5 * dz * (g(0) + g(n - 1));
}

double max_abs_diff(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw PreconditionError("max_abs_diff: grids differ");
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

State State::make(Field rho, Field nutrient, double time, Frame frame) {
    const double left = nutrient[0];
    State s{std::move(rho), std::move(nutrient), time, frame, left};
    s.validate();
    return s;
}

void State::validate() const {
    if (!(rho.grid() == nutrient.grid())) throw PreconditionError("rho and nutrient grids differ");
    if (!(time >= 0.0)) throw PreconditionError("time must be nonnegative");
    if (rho.min() < -1e-12) throw PreconditionError("rho must be nonnegative");
    if (nutrient.min() < -1e-12 || nutrient.max() > 1.0 + 1e-12)
        throw PreconditionError("nutrient must lie in [0, 1]");
}

double State::frame_offset() const {
    if (const auto* m = std::get_if<MovingFrame>(&frame)) return m->xbar;
    return 0.0;
}

}  // namespace gog
