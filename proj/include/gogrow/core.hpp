#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gogrow/errors.hpp"

namespace gog {

inline constexpr const char* kVersion = "0.1.0";

/// Physical parameters shared by every solver. Growth and consumption
/// rates are normalised to one.
struct ModelParams {
    double chi = 2.0;          ///< advection strength below the threshold
    double diffusion_n = 1.0;  ///< nutrient diffusivity
    double n_threshold = 0.5;  ///< nutrient level separating go from grow
    double epsilon = 0.25;     ///< inverse particle speed (kinetic model only)

    static constexpr double growth_rate = 1.0;
    static constexpr double consumption_rate = 1.0;

    void validate() const;
    bool operator==(const ModelParams&) const = default;
};

/// Uniform cell-centred mesh on [z_min, z_max].
class Grid1D {
public:
    Grid1D(double z_min, double z_max, int n_cells);

    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }
    int n_cells() const { return n_cells_; }
    double dz() const { return dz_; }

    double center(int i) const { return z_min_ + (i + 0.5) * dz_; }
    /// Face i sits between cells i-1 and i; faces run 0..n_cells.
    double face(int i) const { return z_min_ + i * dz_; }
    std::vector<double> centers() const;

    bool operator==(const Grid1D& o) const {
        return z_min_ == o.z_min_ && z_max_ == o.z_max_ && n_cells_ == o.n_cells_;
    }

private:
    double z_min_;
    double z_max_;
    int n_cells_;
    double dz_;
};

Grid1D build_grid(double z_min, double z_max, int n_cells);

/// One finite value per cell centre. Immutable.
class Field {
public:
    Field(Grid1D grid, std::vector<double> values);
    static Field from_function(const Grid1D& grid, const std::function<double(double)>& f);
    static Field constant(const Grid1D& grid, double c);

    const Grid1D& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& data() const { return values_; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(values_.size()); }

    double min() const;
    double max() const;
    /// Linear interpolation between centres, constant beyond the end centres.
    double interpolate(double z) const;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

/// Composite trapezoid on the centre samples, with the half cells at both
/// ends closed by the boundary sample.
double integrate(const Field& f, const std::optional<Field>& weight = std::nullopt);

/// Largest |a_i - b_i|; grids must match.
double max_abs_diff(const Field& a, const Field& b);

struct StaticFrame {
    bool operator==(const StaticFrame&) const = default;
};
/// Coordinates are z = x - xbar; xdot is the frame velocity.
struct MovingFrame {
    double xbar = 0.0;
    double xdot = 0.0;
    bool operator==(const MovingFrame&) const = default;
};
using Frame = std::variant<StaticFrame, MovingFrame>;

/// Paired cell density and nutrient at one time.
struct State {
    Field rho;
    Field nutrient;
    double time = 0.0;
    Frame frame = StaticFrame{};
    /// Dirichlet nutrient value imposed at z_min (the initial far-left level).
    double n_left = 0.0;

    /// Builds a state and takes the left nutrient boundary value from the
    /// first cell.
    static State make(Field rho, Field nutrient, double time = 0.0, Frame frame = StaticFrame{});
    void validate() const;
    bool moving() const { return std::holds_alternative<MovingFrame>(frame); }
    /// Lab-frame offset of the grid coordinates.
    double frame_offset() const;
};

}  // namespace gog
