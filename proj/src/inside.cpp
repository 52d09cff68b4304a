#include "gogrow/inside.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "gogrow/csv.hpp"

namespace gog {

DriftSpec::DriftSpec(WaveProfile wp) : wp_(std::move(wp)) {
    beta_right_zero_ = wp_.sigma() + 2.0 * wp_.log_derivative(0.0);
}

double DriftSpec::beta(double z) const {
    if (z <= 0.0) return sigma() - chi();
    return sigma() + 2.0 * wp_.log_derivative(z);
}

double DriftSpec::beta_prime(double z) const {
    if (z <= 0.0) return 0.0;
    // rho'' = -sigma rho' - rho on z > 0, so (rho'/rho)' = -1 - sigma L - L^2
    const double l = wp_.log_derivative(z);
    return -2.0 * (1.0 + sigma() * l + l * l);
}

double DriftSpec::v_weight(double z) const {
    if (z <= 0.0) return (sigma() - chi()) * z;
    return sigma() * z + 2.0 * wp_.log_ratio(z);
}

bool DriftSpec::weight_integrable() const { return wp_.regime() == WaveRegime::CriticalLargeBias; }

DriftSpec build_drift(const WaveProfile& wp) { return DriftSpec(wp); }

Field weight_field(const DriftSpec& drift, const Grid1D& grid) {
    std::vector<double> v(static_cast<std::size_t>(grid.n_cells()));
    double vmax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n_cells(); ++i) {
        v[static_cast<std::size_t>(i)] = drift.v_weight(grid.center(i));
        vmax = std::max(vmax, v[static_cast<std::size_t>(i)]);
    }
    for (double& x : v) x = std::exp(x - vmax);
    return Field(grid, std::move(v));
}

FractionState neutral_step(const FractionState& fs, const SchemeConfig& cfg) {
    cfg.validate();
    const Grid1D& g = fs.nu.grid();
    const int n = g.n_cells();
    const auto un = static_cast<std::size_t>(n);
    const double dz2 = g.dz() * g.dz();
    const double dt = cfg.dt;
    const auto& nu = fs.nu.data();

    // c_plus[i] = e^{V(face i+1) - V(z_i)} / dz^2, c_minus[i] = e^{V(face i) - V(z_i)} / dz^2
    std::vector<double> c_plus(un, 0.0), c_minus(un, 0.0);
    for (int i = 0; i < n; ++i) {
        const double vc = fs.drift.v_weight(g.center(i));
        if (i + 1 < n) c_plus[static_cast<std::size_t>(i)] = std::exp(fs.drift.v_weight(g.face(i + 1)) - vc) / dz2;
        if (i > 0) c_minus[static_cast<std::size_t>(i)] = std::exp(fs.drift.v_weight(g.face(i)) - vc) / dz2;
    }
    // Solve for the increment so that constants are reproduced bit for bit.
    std::vector<double> lower(un), diag(un), upper(un), rhs(un);
    for (std::size_t i = 0; i < un; ++i) {
        const double right = i + 1 < un ? nu[i + 1] - nu[i] : 0.0;
        const double left = i > 0 ? nu[i] - nu[i - 1] : 0.0;
        rhs[i] = dt * (c_plus[i] * right - c_minus[i] * left);
        diag[i] = 1.0 + dt * (c_plus[i] + c_minus[i]);
        lower[i] = -dt * c_minus[i];
        upper[i] = -dt * c_plus[i];
    }
    const auto delta = solve_tridiagonal(lower, diag, upper, std::move(rhs));
    std::vector<double> out(un);
    for (std::size_t i = 0; i < un; ++i) out[i] = nu[i] + delta[i];

    const double lo = fs.nu.min(), hi = fs.nu.max();
    const auto [mn, mx] = std::minmax_element(out.begin(), out.end());
    if (*mn < lo - 1e-10 || *mx > hi + 1e-10) {
        std::ostringstream msg;
        msg << "neutral fraction left its initial range [" << lo << ", " << hi << "]";
        throw NumericalError(msg.str());
    }
    return FractionState{Field(g, std::move(out)), fs.time + dt, fs.drift};
}

double weighted_mean(const Field& nu0, const DriftSpec& drift) {
    if (!drift.weight_integrable())
        throw PreconditionError("weight e^V is not integrable: no weighted mean in this regime");
    const Field w = weight_field(drift, nu0.grid());
    return integrate(nu0, w) / integrate(Field::constant(nu0.grid(), 1.0), w);
}

double weighted_distance(const Field& nu, double c, const DriftSpec& drift) {
    const Field w = weight_field(drift, nu.grid());
    std::vector<double> d(nu.data());
    for (double& x : d) x = (x - c) * (x - c);
    return std::sqrt(integrate(Field(nu.grid(), std::move(d)), w));
}

double spectral_gap(double chi, double sigma) {
    if (!(chi > 1.0)) throw PreconditionError("spectral gap needs chi > 1");
    const double s = minimal_speed(chi);
    if (!(std::abs(sigma - s) <= 1e-12 * s)) throw PreconditionError("spectral gap needs sigma at the minimal speed");
    return 0.25 * std::min(s * s - 4.0, 1.0 / (chi * chi));
}

SymTridiag pullback_operator(const DriftSpec& drift, const Grid1D& grid) {
    const int n = grid.n_cells();
    const double dz = grid.dz();
    const double inv = 1.0 / (dz * dz);
    SymTridiag a;
    a.diag.resize(static_cast<std::size_t>(n));
    a.off.assign(static_cast<std::size_t>(n - 1), -inv);
    const double point = -0.5 * drift.chi() / dz;  // beta'/2 carries -(chi/2) delta_0
    const double bl = drift.beta_left(), br = drift.beta_right();
    for (int i = 0; i < n; ++i) {
        const double z = grid.center(i);
        double q;
        if (std::abs(z) <= 1e-9 * dz) {
            q = 0.125 * (bl * bl + br * br) + 0.25 * drift.beta_prime(std::numeric_limits<double>::denorm_min()) + point;
        } else {
            const double b = drift.beta(z);
            q = 0.25 * b * b + 0.5 * drift.beta_prime(z);
            const double lo = grid.face(i), hi = grid.face(i + 1);
            if (std::abs(hi) <= 1e-9 * dz || std::abs(lo) <= 1e-9 * dz)
                q += 0.5 * point;  // interface on a face: split between its two cells
            else if (lo < 0.0 && hi > 0.0)
                q += point;
        }
        a.diag[static_cast<std::size_t>(i)] = 2.0 * inv + q;
    }
    return a;
}

GapReport discrete_spectrum(const DriftSpec& drift, const Grid1D& grid, int k) {
    if (!drift.weight_integrable()) throw PreconditionError("discrete spectrum is defined for the pushed wave only");
    if (k < 2) throw PreconditionError("need at least two eigenvalues");
    const SymTridiag a = pullback_operator(drift, grid);
    GapReport r;
    r.gamma_formula = spectral_gap(drift.chi(), drift.sigma());
    r.eigenvalues = smallest_eigenvalues(a, k);
    r.lambda0 = r.eigenvalues[0];
    r.lambda1 = r.eigenvalues[1];
    const auto vec = lowest_eigenvector(a, r.lambda0);
    const int n = grid.n_cells();
    const int edge = std::min(10, n / 4);
    for (int i = 0; i < edge; ++i) {
        r.boundary_mass += vec[static_cast<std::size_t>(i)] * vec[static_cast<std::size_t>(i)];
        r.boundary_mass += vec[static_cast<std::size_t>(n - 1 - i)] * vec[static_cast<std::size_t>(n - 1 - i)];
    }
    if (r.boundary_mass > 1e-6) {
        std::ostringstream msg;
        msg << "ground state touches the domain ends (mass " << r.boundary_mass << "): widen the grid";
        throw NumericalError(msg.str());
    }
    double dot = 0, nw = 0, nv = 0;
    for (int i = 0; i < n; ++i) {
        const double w = std::exp(0.5 * drift.v_weight(grid.center(i)));
        const double v = vec[static_cast<std::size_t>(i)];
        dot += w * v;
        nw += w * w;
        nv += v * v;
    }
    r.ground_cosine = std::abs(dot) / std::sqrt(nw * nv);
    r.mean_weight = std::numeric_limits<double>::quiet_NaN();
    return r;
}

std::string to_string(DecayKind k) {
    switch (k) {
        case DecayKind::Pushed: return "pushed";
        case DecayKind::Pulled: return "pulled";
        case DecayKind::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

Classification classify(const std::vector<DecaySample>& series, const DriftSpec& drift) {
    if (series.size() < 10) throw PreconditionError("classify needs at least 10 samples");
    const bool all_zero =
        std::all_of(series.begin(), series.end(), [](const DecaySample& s) { return s.metric == 0.0; });
    if (all_zero) return {DecayKind::Pushed, std::numeric_limits<double>::infinity()};

    // least-squares slope of log(metric) over the second half
    double st = 0, sl = 0, stt = 0, stl = 0, m = 0;
    for (std::size_t i = series.size() / 2; i < series.size(); ++i) {
        if (!(series[i].metric > 0.0)) continue;
        const double t = series[i].t, l = std::log(series[i].metric);
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
        m += 1.0;
    }
    const double rate = m >= 2 ? -(m * stl - st * sl) / (m * stt - st * st) : 0.0;
    if (drift.weight_integrable()) {
        const double gamma = spectral_gap(drift.chi(), drift.sigma());
        return {rate >= 0.9 * gamma ? DecayKind::Pushed : DecayKind::Inconclusive, rate};
    }
    const bool vanished = series.back().metric < 1e-2 && series.back().metric < series.front().metric;
    return {vanished ? DecayKind::Pulled : DecayKind::Inconclusive, rate};
}

namespace {

template <class Metric>
std::vector<DecaySample> evolve_series(const Field& nu0, const DriftSpec& drift, double dt, double t_end,
                                       double sample_interval, Metric metric, double gamma) {
    if (!(t_end > 0.0 && sample_interval > 0.0)) throw PreconditionError("invalid series times");
    SchemeConfig cfg;
    cfg.dt = dt;
    const long nsteps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const long every = std::max(1L, std::lround(sample_interval / dt));
    FractionState fs{nu0, 0.0, drift};
    const double m0 = metric(nu0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<DecaySample> out{{0.0, m0, gamma > 0.0 ? m0 : nan}};
    for (long s = 1; s <= nsteps; ++s) {
        fs = neutral_step(fs, cfg);
        fs.time = static_cast<double>(s) * dt;
        if (s % every == 0 || s == nsteps) {
            const double bound = gamma > 0.0 ? m0 * std::exp(-gamma * fs.time) : nan;
            out.push_back({fs.time, metric(fs.nu), bound});
        }
    }
    return out;
}

}  // namespace

std::vector<DecaySample> pushed_decay_series(const Field& nu0, const DriftSpec& drift, double dt, double t_end,
                                             double sample_interval) {
    const double mean = weighted_mean(nu0, drift);
    const double gamma = spectral_gap(drift.chi(), drift.sigma());
    return evolve_series(
        nu0, drift, dt, t_end, sample_interval,
        [&](const Field& nu) { return weighted_distance(nu, mean, drift); }, gamma);
}

std::vector<DecaySample> pulled_sup_series(const Field& nu0, const DriftSpec& drift, double dt, double t_end,
                                           double sample_interval, double a) {
    const Grid1D& g = nu0.grid();
    const double hi = g.z_max() - 10.0;
    if (!(a < hi)) throw PreconditionError("sup window is empty");
    return evolve_series(
        nu0, drift, dt, t_end, sample_interval,
        [&](const Field& nu) {
            double m = 0.0;
            for (int i = 0; i < g.n_cells(); ++i)
                if (g.center(i) >= a && g.center(i) <= hi) m = std::max(m, std::abs(nu[i]));
            return m;
        },
        0.0);
}

void write_decay_csv(std::ostream& out, const std::vector<DecaySample>& series,
                     const std::vector<std::string>& header) {
    const bool bounded = !series.empty() && !std::isnan(series.front().bound);
    CsvTable t(bounded ? std::vector<std::string>{"t", "metric", "bound"} : std::vector<std::string>{"t", "metric"});
    for (const auto& h : header) t.comment(h);
    for (const auto& s : series) {
        if (bounded)
            t.add_row({s.t, s.metric, s.bound});
        else
            t.add_row({s.t, s.metric});
    }
    t.write(out);
}

void write_eigen_csv(std::ostream& out, const GapReport& report, const std::vector<std::string>& header) {
    CsvTable t({"index", "eigenvalue"});
    for (const auto& h : header) t.comment(h);
    t.comment("gamma_formula=" + format_real(report.gamma_formula) +
              " ground_cosine=" + format_real(report.ground_cosine) +
              " mean_weight=" + format_real(report.mean_weight));
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i)
        t.add_row({static_cast<double>(i), report.eigenvalues[i]});
    t.write(out);
}

}  // namespace gog
