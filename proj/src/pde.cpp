#include "gogrow/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "gogrow/csv.hpp"
#include "gogrow/linalg.hpp"
#include "gogrow/waves.hpp"
#include "numerics.hpp"

namespace gog {

namespace detail {

double right_fraction(const Grid1D& g, int i, double x) {
    const double f = std::clamp((g.face(i + 1) - x) / g.dz(), 0.0, 1.0);
    // faces are computed in floating point; snap near-exact alignments
    if (f < 1e-9) return 0.0;
    if (f > 1.0 - 1e-9) return 1.0;
    return f;
}

void react(std::vector<double>& rho, std::vector<double>& n, const std::vector<double>& growth, double h,
           bool growth_on, bool consumption_on) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r0 = rho[i];
        const double g = growth_on ? growth[i] : 0.0;
        double integral = r0 * h;  // int_0^h rho(s) ds
        if (g > 0.0) {
            integral = r0 * std::expm1(g * h) / g;
            rho[i] = r0 * std::exp(g * h);
        }
        if (consumption_on) n[i] *= std::exp(-integral);
    }
}

std::vector<double> neumann_laplacian(const std::vector<double>& x, double dz) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    const double inv = 1.0 / (dz * dz);
    out[0] = (x[1] - x[0]) * inv;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (x[i - 1] - 2.0 * x[i] + x[i + 1]) * inv;
    out[n - 1] = (x[n - 2] - x[n - 1]) * inv;
    return out;
}

std::vector<double> neumann_implicit_solve(const std::vector<double>& rhs, const Grid1D& g, double dt,
                                           double coef, double theta) {
    const std::size_t n = rhs.size();
    if (theta == 0.0) return rhs;
    const double k = theta * dt * coef / (g.dz() * g.dz());
    std::vector<double> lower(n, -k), diag(n, 1.0 + 2.0 * k), upper(n, -k);
    diag[0] = diag[n - 1] = 1.0 + k;
    return solve_tridiagonal(lower, diag, upper, rhs);
}

std::vector<double> theta_step(const TridiagOperator& op, const std::vector<double>& x, double dt, double theta) {
    const std::size_t m = x.size();
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        double lx = op.diag[i] * x[i] + op.source[i];
        if (i > 0) lx += op.lower[i] * x[i - 1];
        if (i + 1 < m) lx += op.upper[i] * x[i + 1];
        rhs[i] = x[i] + (1.0 - theta) * dt * lx + theta * dt * op.source[i];
    }
    if (theta == 0.0) return rhs;
    std::vector<double> lower(m), diag(m), upper(m);
    for (std::size_t i = 0; i < m; ++i) {
        lower[i] = -theta * dt * op.lower[i];
        diag[i] = 1.0 - theta * dt * op.diag[i];
        upper[i] = -theta * dt * op.upper[i];
    }
    return solve_tridiagonal(lower, diag, upper, std::move(rhs));
}

std::vector<double> nutrient_transport(const std::vector<double>& n, const Grid1D& g, double dt, double D,
                                       double theta, double u, double n_left, double n_right,
                                       bool diffusion_on, bool central) {
    const std::size_t m = n.size();
    const double dz = g.dz();
    if (central) {
        // ghost cells n_{-1} = 2 n_left - n_0 and n_m = 2 n_right - n_{m-1}
        const double k = diffusion_on ? D / (dz * dz) : 0.0;
        const double a = u / (2.0 * dz);
        TridiagOperator op{std::vector<double>(m, k + a), std::vector<double>(m, -2.0 * k),
                           std::vector<double>(m, k - a), std::vector<double>(m, 0.0)};
        op.diag[0] -= k + a;
        op.source[0] += 2.0 * n_left * (k + a);
        op.diag[m - 1] -= k - a;
        op.source[m - 1] += 2.0 * n_right * (k - a);
        return theta_step(op, n, dt, theta);
    }
    std::vector<double> rhs = n;
    if (u != 0.0) {
        for (std::size_t i = 0; i < m; ++i) {
            const double grad = u > 0.0 ? n[i] - (i == 0 ? n_left : n[i - 1])
                                        : (i + 1 == m ? n_right : n[i + 1]) - n[i];
            rhs[i] -= dt * u * grad / dz;
        }
    }
    if (!diffusion_on) return rhs;
    // ghost-cell Dirichlet: boundary rows read (x1 - 3 x0 + 2 n_b) / dz^2
    const double inv = D / (dz * dz);
    auto lap = [&](std::size_t i) {
        if (i == 0) return (n[1] - 3.0 * n[0] + 2.0 * n_left) * inv;
        if (i + 1 == m) return (n[m - 2] - 3.0 * n[m - 1] + 2.0 * n_right) * inv;
        return (n[i - 1] - 2.0 * n[i] + n[i + 1]) * inv;
    };
    for (std::size_t i = 0; i < m; ++i) rhs[i] += (1.0 - theta) * dt * lap(i);
    if (theta == 0.0) return rhs;
    const double k = theta * dt * inv;
    std::vector<double> lower(m, -k), diag(m, 1.0 + 2.0 * k), upper(m, -k);
    diag[0] = diag[m - 1] = 1.0 + 3.0 * k;
    rhs[0] += 2.0 * k * n_left;
    rhs[m - 1] += 2.0 * k * n_right;
    return solve_tridiagonal(lower, diag, upper, std::move(rhs));
}

}  // namespace detail

void SchemeConfig::validate() const {
    if (!(std::isfinite(dt) && dt > 0.0)) throw PreconditionError("dt must be positive");
    if (!(theta >= 0.0 && theta <= 1.0)) throw PreconditionError("theta must lie in [0, 1]");
}

double threshold_crossing(const Field& n, double n_th) {
    const int m = n.size();
    const Grid1D& g = n.grid();
    if (!(n[0] < n_th && n_th < n[m - 1])) {
        std::ostringstream msg;
        msg << "threshold left the domain (N(z_min) = " << n[0] << ", N(z_max) = " << n[m - 1]
            << ", N_th = " << n_th << ")";
        throw NumericalError(msg.str());
    }
    int i = -1;
    for (int k = 0; k + 1 < m; ++k) {
        if (n[k] <= n_th && n[k + 1] > n_th) {
            if (i >= 0) {
                std::ostringstream msg;
                msg << "nutrient crosses the threshold more than once (z = " << g.center(i) << " and "
                    << g.center(k) << ")";
                throw MonotonicityLost(msg.str());
            }
            i = k;
        }
    }
    const double w = (n_th - n[i]) / (n[i + 1] - n[i]);
    return g.center(i) + w * g.dz();
}

double interface_position(const Field& n, double n_th) {
    for (int k = 0; k + 1 < n.size(); ++k) {
        if (n[k + 1] - n[k] < -1e-12) {
            std::ostringstream msg;
            msg << "nutrient not monotone at z = " << n.grid().center(k);
            throw MonotonicityLost(msg.str());
        }
    }
    return threshold_crossing(n, n_th);
}

double monotonicity_margin(const Field& n) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n.size(); ++i) m = std::min(m, n[i + 1] - n[i]);
    return m / n.grid().dz();
}

namespace {

constexpr double kCfl = 0.9;
constexpr double kMonotoneTol = 1e-12;

/// Shared Strang step. `xbar` is the threshold in grid coordinates; when
/// `exact_indicator` the advective indicator is 1_{face <= xbar}, otherwise
/// the fraction of the face-centred interval left of xbar.
StepResult strang_step(const State& s, const ModelParams& p, const SchemeConfig& cfg, double xbar,
                       bool exact_indicator, double xdot) {
    const Grid1D& g = s.rho.grid();
    const int n = g.n_cells();
    const double dt = cfg.dt, dz = g.dz();

    std::vector<double> growth(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) growth[static_cast<std::size_t>(i)] = detail::right_fraction(g, i, xbar);

    std::vector<double> face_u(static_cast<std::size_t>(n + 1));
    for (int f = 0; f <= n; ++f) {
        const double xf = g.face(f);
        double left;
        if (exact_indicator)
            // a face sitting on the interface carries the mean of the two one-sided velocities
            left = std::abs(xf - xbar) <= 1e-9 * dz ? 0.5 : (xf < xbar ? 1.0 : 0.0);
        else
            left = std::clamp(0.5 + (xbar - xf) / dz, 0.0, 1.0);
        face_u[static_cast<std::size_t>(f)] = -xdot + p.chi * left;
    }

    std::vector<double> rho = s.rho.data();
    std::vector<double> nut = s.nutrient.data();

    detail::react(rho, nut, growth, 0.5 * dt, cfg.growth, cfg.consumption);

    if (cfg.transport) {
        const bool central = cfg.advection == Advection::Central2;
        // face flux F_f = cl_f rho_{f-1} + cr_f rho_f; zero density outside the domain
        std::vector<double> cl(static_cast<std::size_t>(n + 1), 0.0), cr(cl);
        for (int f = 0; f <= n; ++f) {
            const auto k = static_cast<std::size_t>(f);
            const double u = face_u[k];
            if (central && f > 0 && f < n) {
                cl[k] = cr[k] = 0.5 * u;
            } else if (u > 0.0) {
                if (f > 0) cl[k] = u;
            } else if (f < n) {
                cr[k] = u;
            }
        }
        if (central) {
            const double k = 1.0 / (dz * dz);
            detail::TridiagOperator op{std::vector<double>(rho.size()), std::vector<double>(rho.size()),
                                       std::vector<double>(rho.size()), std::vector<double>(rho.size(), 0.0)};
            for (std::size_t i = 0; i < rho.size(); ++i) {
                const bool first = i == 0, last = i + 1 == rho.size();
                op.lower[i] = cl[i] / dz + (first ? 0.0 : k);
                op.upper[i] = -cr[i + 1] / dz + (last ? 0.0 : k);
                op.diag[i] = (cr[i] - cl[i + 1]) / dz - (first ? 0.0 : k) - (last ? 0.0 : k);
            }
            rho = detail::theta_step(op, rho, dt, cfg.theta);
        } else {
            const auto lap = detail::neumann_laplacian(rho, dz);
            std::vector<double> rhs(rho.size());
            for (std::size_t i = 0; i < rho.size(); ++i) {
                const double out = cl[i + 1] * rho[i] + cr[i + 1] * (i + 1 < rho.size() ? rho[i + 1] : 0.0);
                const double in = cl[i] * (i > 0 ? rho[i - 1] : 0.0) + cr[i] * rho[i];
                rhs[i] = rho[i] - dt / dz * (out - in) + (1.0 - cfg.theta) * dt * lap[i];
            }
            rho = detail::neumann_implicit_solve(rhs, g, dt, 1.0, cfg.theta);
        }
        nut = detail::nutrient_transport(nut, g, dt, p.diffusion_n, cfg.theta, -xdot, s.n_left, 1.0,
                                         cfg.nutrient_diffusion, central);
    }

    detail::react(rho, nut, growth, 0.5 * dt, cfg.growth, cfg.consumption);
    for (double& v : nut) v = std::clamp(v, 0.0, 1.0);

    Frame frame = s.frame;
    if (auto* m = std::get_if<MovingFrame>(&frame)) {
        m->xbar += xdot * dt;
        m->xdot = xdot;
    }
    StepResult out{State{Field(g, std::move(rho)), Field(g, std::move(nut)), s.time + dt, frame, s.n_left},
                   false};
    out.monotonicity_lost = monotonicity_margin(out.state.nutrient) * dz < -kMonotoneTol;
    return out;
}

}  // namespace

StepResult step_static(const State& s, const ModelParams& p, const SchemeConfig& cfg) {
    p.validate();
    cfg.validate();
    if (s.moving()) throw PreconditionError("step_static needs a static-frame state");
    const double dz = s.rho.grid().dz();
    if (p.chi * cfg.dt / dz > kCfl + 1e-12) throw PreconditionError("CFL violated: chi dt / dz > 0.9");
    const double xbar = threshold_crossing(s.nutrient, p.n_threshold);
    return strang_step(s, p, cfg, xbar, false, 0.0);
}

StepResult step_moving(const State& s, const ModelParams& p, double xdot, const SchemeConfig& cfg) {
    p.validate();
    cfg.validate();
    if (!s.moving()) throw PreconditionError("step_moving needs a moving-frame state");
    if (!std::isfinite(xdot)) throw PreconditionError("xdot must be finite");
    const double dz = s.rho.grid().dz();
    if ((p.chi + std::abs(xdot)) * cfg.dt / dz > kCfl + 1e-12)
        throw PreconditionError("CFL violated: (chi + |xdot|) dt / dz > 0.9");
    return strang_step(s, p, cfg, 0.0, true, xdot);
}

VelocityEstimate interface_velocity(const State& prev, const State& next, const ModelParams& p) {
    if (!(prev.rho.grid() == next.rho.grid())) throw PreconditionError("states live on different grids");
    const double dt = next.time - prev.time;
    if (!(dt > 0.0)) throw PreconditionError("states must be ordered in time");
    const double off0 = prev.frame_offset(), off1 = next.frame_offset();
    const double x0 = off0 + threshold_crossing(prev.nutrient, p.n_threshold);
    const double x1 = off1 + threshold_crossing(next.nutrient, p.n_threshold);
    const double xm = 0.5 * (x0 + x1);
    const double dz = prev.rho.grid().dz();
    auto dndx = [&](const State& s, double off) {
        return (s.nutrient.interpolate(xm - off + dz) - s.nutrient.interpolate(xm - off - dz)) / (2.0 * dz);
    };
    const double nx = 0.5 * (dndx(prev, off0) + dndx(next, off1));
    if (std::abs(nx) < 1e-8) throw NumericalError("nutrient gradient at the threshold below 1e-8");
    const double nt = (next.nutrient.interpolate(xm - off1) - prev.nutrient.interpolate(xm - off0)) / dt;
    return {-nt / nx, (x1 - x0) / dt};
}

Field jump_factor(const Grid1D& grid, double chi) {
    return Field::from_function(grid, [chi](double z) { return z <= 0.0 ? 1.0 : std::exp(-chi * z); });
}

Field factorized_v_step(const Field& v, double xdot, const ModelParams& p, const SchemeConfig& cfg) {
    p.validate();
    cfg.validate();
    const Grid1D& g = v.grid();
    const double dz = g.dz(), dt = cfg.dt, chi = p.chi;
    const double beta_left = xdot - chi, beta_right = xdot - 2.0 * chi;
    const double max_beta = std::max(std::abs(beta_left), std::abs(beta_right));
    if (std::max(max_beta, chi + std::abs(xdot)) * dt / dz > kCfl + 1e-12)
        throw PreconditionError("CFL violated in the factorised step");
    const double gamma_right = chi * (chi + 1.0 / chi - xdot);
    const std::size_t n = static_cast<std::size_t>(g.n_cells());

    std::vector<double> x = v.data();
    auto source = [&](double h) {
        if (!cfg.growth) return;
        for (std::size_t i = 0; i < n; ++i)
            if (g.center(static_cast<int>(i)) > 0.0) x[i] *= std::exp(gamma_right * h);
    };
    source(0.5 * dt);
    // v_t = v_zz + beta v_z, drift upwinded, zero-gradient ends
    const auto lap = detail::neumann_laplacian(x, dz);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double beta = g.center(static_cast<int>(i)) <= 0.0 ? beta_left : beta_right;
        double grad = 0.0;
        if (beta > 0.0 && i + 1 < n) grad = x[i + 1] - x[i];
        if (beta < 0.0 && i > 0) grad = x[i] - x[i - 1];
        rhs[i] = x[i] + dt * beta * grad / dz + (1.0 - cfg.theta) * dt * lap[i];
    }
    x = detail::neumann_implicit_solve(rhs, g, dt, 1.0, cfg.theta);
    source(0.5 * dt);
    return Field(g, std::move(x));
}

double jump_residual(const State& s, const ModelParams& p) {
    const double z0 = s.moving() ? 0.0 : interface_position(s.nutrient, p.n_threshold);
    const double dz = s.rho.grid().dz();
    const Field& r = s.rho;
    const double right = (r.interpolate(z0 + 2.0 * dz) - r.interpolate(z0 + dz)) / dz;
    const double left = (r.interpolate(z0 - dz) - r.interpolate(z0 - 2.0 * dz)) / dz;
    const double mid = 0.5 * (r.interpolate(z0 + dz) + r.interpolate(z0 - dz));
    return right - left + p.chi * mid;
}

RunResult run_parabolic(const State& initial, const ModelParams& p, const SchemeConfig& cfg,
                        const RunOptions& opt) {
    cfg.validate();
    if (!(opt.t_end > 0.0)) throw PreconditionError("t_end must be positive");
    const bool moving = opt.moving_xdot.has_value();
    if (moving != initial.moving()) throw PreconditionError("initial state frame does not match run options");
    const long nsteps = static_cast<long>(std::ceil(opt.t_end / cfg.dt - 1e-9));
    const long every = std::max(1L, std::lround(opt.sample_interval / cfg.dt));
    std::vector<long> snap_steps;
    for (double t : opt.snapshot_times) snap_steps.push_back(std::lround(t / cfg.dt));

    RunResult res{initial, {}, {}, 0, monotonicity_margin(initial.nutrient)};
    auto take_snapshots = [&](long step, const State& s) {
        for (long k : snap_steps)
            if (k == step) res.snapshots.push_back(s);
    };
    take_snapshots(0, initial);

    SchemeConfig half = cfg;
    half.dt = 0.5 * cfg.dt;
    half.theta = 1.0;
    auto advance = [&](const State& s, const SchemeConfig& c) {
        return moving ? step_moving(s, p, *opt.moving_xdot, c) : step_static(s, p, c);
    };

    State cur = initial;
    for (long step = 1; step <= nsteps; ++step) {
        StepResult r = step <= opt.startup_steps ? advance(cur, half) : advance(cur, cfg);
        if (step <= opt.startup_steps) {
            const bool lost = r.monotonicity_lost;
            r = advance(r.state, half);
            r.monotonicity_lost = r.monotonicity_lost || lost;
        }
        res.worst_margin = std::min(res.worst_margin, monotonicity_margin(r.state.nutrient));
        if (r.monotonicity_lost) ++res.monotonicity_lost_steps;
        if (r.monotonicity_lost && opt.abort_on_monotonicity_loss) {
            std::ostringstream msg;
            msg << "nutrient lost monotonicity at t = " << r.state.time
                << " (margin = " << monotonicity_margin(r.state.nutrient) << ")";
            throw MonotonicityLost(msg.str());
        }
        r.state.time = initial.time + static_cast<double>(step) * cfg.dt;
        if (step % every == 0 || step == nsteps) {
            const VelocityEstimate v = interface_velocity(cur, r.state, p);
            const double xbar = r.state.frame_offset() + threshold_crossing(r.state.nutrient, p.n_threshold);
            res.trajectory.push_back({r.state.time, xbar, v.ode, v.slope, integrate(r.state.rho),
                                      monotonicity_margin(r.state.nutrient)});
        }
        cur = std::move(r.state);
        take_snapshots(step, cur);
    }
    res.final_state = std::move(cur);
    return res;
}

Grid1D aligned_grid(double z_min, double z_max, double dz) {
    if (!(dz > 0.0)) throw PreconditionError("dz must be positive");
    const double lo = std::round(z_min / dz) * dz;
    const long n = std::lround((z_max - lo) / dz);
    return Grid1D(lo, lo + static_cast<double>(n) * dz, static_cast<int>(n));
}

State wave_initial_state(const ModelParams& p, const Grid1D& grid, bool moving_frame) {
    p.validate();
    const double sigma = minimal_speed(p.chi);
    const WaveProfile unit = parabolic_profile(p.chi, sigma, 1.0);
    const NutrientProfile np = solve_nutrient_profile(unit, p.diffusion_n, p.n_threshold, grid);
    const WaveProfile wp = unit.with_amplitude(np.a_left_calibrated);
    Frame frame = StaticFrame{};
    if (moving_frame) frame = MovingFrame{0.0, sigma};
    return State::make(sample_profile(wp, grid), np.samples, 0.0, frame);
}

State spreading_initial_state(const ModelParams& p, const Grid1D& grid, const SpreadingInit& init) {
    p.validate();
    if (!(init.amplitude > 0.0 && init.width > 0.0)) throw PreconditionError("invalid spreading initial data");
    const double x0 = -init.width * std::atanh(2.0 * p.n_threshold - 1.0);
    Field rho = Field::from_function(grid, [&](double x) {
        if (x <= 0.0) return init.amplitude;
        return init.tail_rate ? init.amplitude * std::exp(-*init.tail_rate * x) : 0.0;
    });
    Field n = Field::from_function(grid, [&](double x) { return 0.5 * (1.0 + std::tanh((x - x0) / init.width)); });
    return State::make(std::move(rho), std::move(n));
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj,
                          const std::vector<std::string>& header) {
    CsvTable t({"t", "xbar", "xdot_ode", "xdot_slope", "mass_rho", "dn_min"});
    for (const auto& h : header) t.comment(h);
    for (const auto& q : traj) t.add_row({q.t, q.xbar, q.xdot_ode, q.xdot_slope, q.mass_rho, q.dn_min});
    t.write(out);
}

void write_snapshot_csv(std::ostream& out, const State& s, const std::vector<std::string>& header) {
    CsvTable t({"z", "rho", "n"});
    for (const auto& h : header) t.comment(h);
    t.comment("t=" + format_real(s.time) + " frame_offset=" + format_real(s.frame_offset()));
    const Grid1D& g = s.rho.grid();
    for (int i = 0; i < g.n_cells(); ++i) t.add_row({g.center(i), s.rho[i], s.nutrient[i]});
    t.write(out);
}

}  // namespace gog
