#include "gogrow/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "gogrow/csv.hpp"
#include "numerics.hpp"

namespace gog {

KineticState KineticState::make(Field f_plus, Field f_minus, Field nutrient, double epsilon, double time) {
    const double left = nutrient[0];
    KineticState s{std::move(f_plus), std::move(f_minus), std::move(nutrient), time, epsilon, left};
    s.validate();
    return s;
}

Field KineticState::rho() const {
    std::vector<double> r(f_plus.data());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * (r[i] + f_minus.data()[i]);
    return Field(f_plus.grid(), std::move(r));
}

void KineticState::validate() const {
    if (!(f_plus.grid() == f_minus.grid() && f_plus.grid() == nutrient.grid()))
        throw PreconditionError("kinetic fields live on different grids");
    if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
    if (f_plus.min() < -1e-12 || f_minus.min() < -1e-12) throw PreconditionError("densities must be nonnegative");
    if (nutrient.min() < -1e-12 || nutrient.max() > 1.0 + 1e-12)
        throw PreconditionError("nutrient must lie in [0, 1]");
}

MaxwellianWeights maxwellian_weights(double n, double dn, double n_th, double eps, double chi) {
    if (!(eps > 0.0 && chi > 0.0)) throw PreconditionError("epsilon and chi must be positive");
    const double b = eps * chi;
    if (b >= 1.0) throw PreconditionError("need eps * chi < 1");
    if (n > n_th) return {1.0, 1.0};
    if (dn >= 0.0) return {1.0 + b, 1.0 - b};
    return {1.0 - b, 1.0 + b};
}

namespace {

double relaxation_factor(Relaxation kind, double h, double eps) {
    const double x = h / (eps * eps);
    switch (kind) {
        case Relaxation::Exact: return std::exp(-x);
        case Relaxation::Backward: return 1.0 / (1.0 + x);
        case Relaxation::Trapezoidal: return (1.0 - 0.5 * x) / (1.0 + 0.5 * x);
    }
    return std::exp(-x);
}

void relax(std::vector<double>& fp, std::vector<double>& fm, const std::vector<double>& mp, double decay) {
    for (std::size_t i = 0; i < fp.size(); ++i) {
        const double rho = 0.5 * (fp[i] + fm[i]);
        const double ep = mp[i] * rho, em = (2.0 - mp[i]) * rho;
        fp[i] = ep + (fp[i] - ep) * decay;
        fm[i] = em + (fm[i] - em) * decay;
    }
}

/// Reflecting ends: what leaves through one end as f- re-enters as f+ and
/// vice versa.
void transport(std::vector<double>& fp, std::vector<double>& fm, double courant) {
    const long n = static_cast<long>(fp.size());
    const long shift = std::lround(courant);
    if (std::abs(courant - static_cast<double>(shift)) <= 1e-9 && shift >= 1) {
        if (shift > n) throw PreconditionError("transport shift exceeds the grid");
        std::vector<double> np(fp.size()), nm(fm.size());
        for (long i = 0; i < n; ++i) {
            const long src = i - shift;
            np[static_cast<std::size_t>(i)] = src >= 0 ? fp[static_cast<std::size_t>(src)]
                                                       : fm[static_cast<std::size_t>(-src - 1)];
            const long srcm = i + shift;
            nm[static_cast<std::size_t>(i)] = srcm < n ? fm[static_cast<std::size_t>(srcm)]
                                                       : fp[static_cast<std::size_t>(2 * n - srcm - 1)];
        }
        fp.swap(np);
        fm.swap(nm);
        return;
    }
    if (courant > 0.9 + 1e-12) throw PreconditionError("CFL violated: dt / (eps dz) > 0.9 and not an integer");
    const std::vector<double> p0 = fp, m0 = fm;
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < un; ++i) {
        const double in_p = i > 0 ? p0[i - 1] : m0[0];
        const double in_m = i + 1 < un ? m0[i + 1] : p0[un - 1];
        fp[i] = p0[i] - courant * (p0[i] - in_p);
        fm[i] = m0[i] - courant * (m0[i] - in_m);
    }
}

int clip(std::vector<double>& f) {
    int count = 0;
    for (double& v : f) {
        if (v < 0.0) {
            if (v < -1e-12) ++count;
            v = 0.0;
        }
    }
    return count;
}

}  // namespace

KineticStepResult kinetic_step(const KineticState& ks, const ModelParams& p, const SchemeConfig& cfg) {
    p.validate();
    cfg.validate();
    const double eps = ks.epsilon, chi = p.chi;
    if (eps * chi >= 1.0) throw PreconditionError("need eps * chi < 1");
    const Grid1D& g = ks.f_plus.grid();
    const int n = g.n_cells();
    const auto un = static_cast<std::size_t>(n);
    const double dt = cfg.dt;
    const double courant = dt / (eps * g.dz());

    // Growth and the Maxwellian switch share the covered fraction of each
    // cell right of the threshold; the bias direction follows the local
    // forward difference of N.
    const double xbar = threshold_crossing(ks.nutrient, p.n_threshold);
    std::vector<double> growth(un), mp(un);
    for (int i = 0; i < n; ++i) {
        const double gi = detail::right_fraction(g, i, xbar);
        const double next = i + 1 < n ? ks.nutrient[i + 1] : 1.0;
        const double dn = next - ks.nutrient[i];
        const MaxwellianWeights below = maxwellian_weights(0.0, dn, 1.0, eps, chi);
        growth[static_cast<std::size_t>(i)] = gi;
        mp[static_cast<std::size_t>(i)] = gi + (1.0 - gi) * below.m_plus;
    }

    std::vector<double> fp = ks.f_plus.data(), fm = ks.f_minus.data(), nut = ks.nutrient.data();
    auto react = [&](double h) {
        std::vector<double> rho(un);
        for (std::size_t i = 0; i < un; ++i) rho[i] = 0.5 * (fp[i] + fm[i]);
        const std::vector<double> before = rho;
        detail::react(rho, nut, growth, h, cfg.growth, cfg.consumption);
        for (std::size_t i = 0; i < un; ++i) {
            const double added = rho[i] - before[i];  // split evenly between the two directions
            fp[i] += added;
            fm[i] += added;
        }
    };

    // one collision per step between consecutive transports: splitting it
    // into two halves would change the effective diffusion of the shift
    react(0.5 * dt);
    if (cfg.transport) {
        transport(fp, fm, courant);
        nut = detail::nutrient_transport(nut, g, dt, p.diffusion_n, cfg.theta, 0.0, ks.n_left, 1.0,
                                         cfg.nutrient_diffusion);
    }
    relax(fp, fm, mp, relaxation_factor(cfg.relaxation, dt, eps));
    react(0.5 * dt);

    const int clipped = clip(fp) + clip(fm);
    for (double& v : nut) v = std::clamp(v, 0.0, 1.0);
    KineticStepResult out{KineticState{Field(g, std::move(fp)), Field(g, std::move(fm)), Field(g, std::move(nut)),
                                       ks.time + dt, eps, ks.n_left},
                          clipped, false};
    out.monotonicity_lost = monotonicity_margin(out.state.nutrient) * g.dz() < -1e-12;
    return out;
}

std::array<std::complex<double>, 2> CharPoly::roots() const {
    const double d = discriminant();
    if (d >= 0.0) {
        const double q = -0.5 * (b + std::copysign(std::sqrt(d), b));
        std::array<std::complex<double>, 2> r{std::complex<double>(q / a), std::complex<double>(c / q)};
        if (r[0].real() > r[1].real()) std::swap(r[0], r[1]);
        return r;
    }
    const double re = -b / (2.0 * a), im = std::sqrt(-d) / (2.0 * std::abs(a));
    return {std::complex<double>(re, -im), std::complex<double>(re, im)};
}

CharPoly characteristic_polynomial(double sigma, double eps) {
    if (!(eps > 0.0 && std::isfinite(eps))) throw PreconditionError("epsilon must be positive");
    if (!std::isfinite(sigma)) throw PreconditionError("sigma must be finite");
    const double e2 = 1.0 / (eps * eps);
    const double a = e2 - sigma * sigma;
    if (std::abs(a) <= 1e-14 * e2) throw PreconditionError("sonic speed sigma = 1/eps");
    return {a, sigma * (e2 - 1.0), e2};
}

bool subsonic_wave_exists(double chi, double eps, double sigma) {
    if (!(chi > 0.0 && eps > 0.0 && sigma >= 0.0)) throw PreconditionError("need chi, eps > 0 and sigma >= 0");
    if (!(sigma < 1.0 / eps)) throw PreconditionError("supersonic query: sigma >= 1/eps");
    if (eps >= 1.0) return false;
    const double e2 = eps * eps;
    if (sigma < 2.0 / (1.0 + e2) * (1.0 - 1e-12)) return false;  // complex roots
    const DecayRoots r = kinetic_decay_roots(sigma, eps);
    return r.mu_plus * (sigma - chi) - 1.0 >= -1e-10;
}

KineticRunResult run_kinetic(const KineticState& initial, const ModelParams& p, const SchemeConfig& cfg,
                             const RunOptions& opt) {
    cfg.validate();
    if (!(opt.t_end > 0.0)) throw PreconditionError("t_end must be positive");
    if (opt.moving_xdot) throw PreconditionError("kinetic runs use the lab frame");
    const long nsteps = static_cast<long>(std::ceil(opt.t_end / cfg.dt - 1e-9));
    const long every = std::max(1L, std::lround(opt.sample_interval / cfg.dt));
    std::vector<long> snap_steps;
    for (double t : opt.snapshot_times) snap_steps.push_back(std::lround(t / cfg.dt));

    KineticRunResult res{initial, {}, {}};
    auto take = [&](long step, const KineticState& s) {
        for (long k : snap_steps)
            if (k == step) res.snapshots.push_back(s);
    };
    auto as_state = [](const KineticState& k) {
        return State{k.rho(), k.nutrient, k.time, StaticFrame{}, k.n_left};
    };
    take(0, initial);
    KineticState cur = initial;
    for (long step = 1; step <= nsteps; ++step) {
        KineticStepResult r = kinetic_step(cur, p, cfg);
        if (r.monotonicity_lost) ++res.monotonicity_lost_steps;
        res.clipped_cells += r.clipped;
        r.state.time = initial.time + static_cast<double>(step) * cfg.dt;
        if (step % every == 0 || step == nsteps) {
            const State a = as_state(cur), b = as_state(r.state);
            const VelocityEstimate v = interface_velocity(a, b, p);
            res.trajectory.push_back({b.time, threshold_crossing(b.nutrient, p.n_threshold), v.ode, v.slope,
                                      integrate(b.rho), monotonicity_margin(b.nutrient)});
        }
        cur = std::move(r.state);
        take(step, cur);
    }
    res.final_state = std::move(cur);
    return res;
}

KineticState kinetic_wave_initial_state(const ModelParams& p, const Grid1D& grid) {
    p.validate();
    const double sigma = kinetic_minimal_speed(p.chi, p.epsilon);
    const KineticWaveProfile unit = kinetic_profile(p.chi, p.epsilon, sigma, 1.0);
    const NutrientProfile np = solve_kinetic_nutrient_profile(unit, p.diffusion_n, p.n_threshold, grid);
    const KineticWaveProfile kp = unit.with_amplitude(np.a_left_calibrated);
    Field fp = Field::from_function(grid, [&](double z) { return kp.f_plus(z); });
    Field fm = Field::from_function(grid, [&](double z) { return kp.f_minus(z); });
    return KineticState::make(std::move(fp), std::move(fm), np.samples, p.epsilon);
}

KineticState kinetic_spreading_initial_state(const ModelParams& p, const Grid1D& grid, const SpreadingInit& init) {
    const State s = spreading_initial_state(p, grid, init);
    const double b = p.epsilon * p.chi;
    if (b >= 1.0) throw PreconditionError("need eps * chi < 1");
    std::vector<double> fp(s.rho.data()), fm(s.rho.data());
    for (std::size_t i = 0; i < fp.size(); ++i) {
        if (s.nutrient.data()[i] <= p.n_threshold) {
            fp[i] *= 1.0 + b;
            fm[i] *= 1.0 - b;
        }
    }
    return KineticState::make(Field(grid, std::move(fp)), Field(grid, std::move(fm)), s.nutrient, p.epsilon);
}

void write_kinetic_snapshot_csv(std::ostream& out, const KineticState& s, const std::vector<std::string>& header) {
    CsvTable t({"z", "f_plus", "f_minus", "rho", "n"});
    for (const auto& h : header) t.comment(h);
    t.comment("t=" + format_real(s.time) + " epsilon=" + format_real(s.epsilon));
    const Grid1D& g = s.f_plus.grid();
    for (int i = 0; i < g.n_cells(); ++i)
        t.add_row({g.center(i), s.f_plus[i], s.f_minus[i], 0.5 * (s.f_plus[i] + s.f_minus[i]), s.nutrient[i]});
    t.write(out);
}

}  // namespace gog
