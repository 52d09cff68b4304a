#include "gogrow/speedlab.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "gogrow/csv.hpp"
#include "gogrow/kinetic.hpp"
#include "gogrow/waves.hpp"

namespace gog {

SpeedEstimate estimate_speed(const std::vector<std::pair<double, double>>& trajectory, double window_fraction) {
    if (trajectory.size() < 20) throw PreconditionError("estimate_speed needs at least 20 samples");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw PreconditionError("window_fraction must lie in (0, 1]");
    for (std::size_t i = 1; i < trajectory.size(); ++i)
        if (!(trajectory[i].first > trajectory[i - 1].first))
            throw PreconditionError("time stamps must be strictly increasing");

    const double t0 = trajectory.front().first, t1 = trajectory.back().first;
    const double span = t1 - t0;
    const double t_lo = std::max(t0 + 0.2 * span, t1 - window_fraction * span);
    std::vector<std::pair<double, double>> w;
    for (const auto& p : trajectory)
        if (p.first >= t_lo - 1e-12 * std::max(1.0, std::abs(t_lo))) w.push_back(p);
    if (w.size() < 2) throw NumericalError("speed window holds fewer than two samples");

    const double m = static_cast<double>(w.size());
    double tm = 0, xm = 0;
    for (const auto& p : w) {
        tm += p.first;
        xm += p.second;
    }
    tm /= m;
    xm /= m;
    double stt = 0, stx = 0;
    for (const auto& p : w) {
        stt += (p.first - tm) * (p.first - tm);
        stx += (p.first - tm) * (p.second - xm);
    }
    SpeedEstimate e{};
    e.slope = stx / stt;
    e.intercept = xm - e.slope * tm;
    double ss = 0;
    for (const auto& p : w) {
        const double r = p.second - (e.intercept + e.slope * p.first);
        ss += r * r;
    }
    e.rms_residual = std::sqrt(ss / m);
    e.window = {w.front().first, w.back().first};
    e.n_points = static_cast<int>(w.size());
    e.min_slope = std::numeric_limits<double>::infinity();
    e.max_slope = -e.min_slope;
    for (std::size_t i = 1; i < w.size(); ++i) {
        const double s = (w[i].second - w[i - 1].second) / (w[i].first - w[i - 1].first);
        e.min_slope = std::min(e.min_slope, s);
        e.max_slope = std::max(e.max_slope, s);
    }
    return e;
}

std::vector<std::pair<double, double>> positions(const std::vector<TrajectoryPoint>& traj) {
    std::vector<std::pair<double, double>> out;
    out.reserve(traj.size());
    for (const auto& p : traj) out.emplace_back(p.t, p.xbar);
    return out;
}

BracketCheck speed_bracket_check(const std::vector<std::pair<double, double>>& trajectory, double sigma_star,
                                 double tol, double window_fraction) {
    const SpeedEstimate e = estimate_speed(trajectory, window_fraction);
    return {e.min_slope <= sigma_star + tol, e.max_slope >= sigma_star - tol};
}

double predicted_speed(const SpreadingSetup& s) {
    return s.model == ModelKind::Parabolic ? minimal_speed(s.params.chi)
                                           : kinetic_minimal_speed(s.params.chi, s.params.epsilon);
}

SpreadingRun run_spreading(const SpreadingSetup& s) {
    s.params.validate();
    const Grid1D grid = aligned_grid(s.z_min, s.z_max, s.dz);
    SchemeConfig cfg;
    cfg.dt = s.dt;
    cfg.advection = s.advection;
    RunOptions opt;
    opt.t_end = s.t_end;
    opt.sample_interval = s.sample_interval;
    opt.abort_on_monotonicity_loss = false;
    SpreadingRun out;
    if (s.model == ModelKind::Parabolic) {
        const State init = s.initial == InitialData::Wave ? wave_initial_state(s.params, grid, false)
                                                          : spreading_initial_state(s.params, grid);
        RunResult r = run_parabolic(init, s.params, cfg, opt);
        out.trajectory = std::move(r.trajectory);
        out.monotonicity_lost_steps = r.monotonicity_lost_steps;
    } else {
        const KineticState init = s.initial == InitialData::Wave ? kinetic_wave_initial_state(s.params, grid)
                                                                 : kinetic_spreading_initial_state(s.params, grid);
        KineticRunResult r = run_kinetic(init, s.params, cfg, opt);
        out.trajectory = std::move(r.trajectory);
        out.monotonicity_lost_steps = r.monotonicity_lost_steps;
    }
    out.estimate = estimate_speed(positions(out.trajectory), s.window_fraction);
    return out;
}

SweepResult sweep(const std::vector<SpreadingSetup>& setups) {
    std::vector<std::future<SpreadingRun>> jobs;
    jobs.reserve(setups.size());
    for (const auto& s : setups) jobs.push_back(std::async(std::launch::async, [s] { return run_spreading(s); }));
    SweepResult r;
    for (std::size_t i = 0; i < setups.size(); ++i) {
        SpreadingRun run = jobs[i].get();
        const SpreadingSetup& s = setups[i];
        const double pred = predicted_speed(s);
        const double meas = run.estimate.slope;
        r.rows.push_back({s.params.chi,
                          s.model == ModelKind::Kinetic ? std::optional<double>(s.params.epsilon) : std::nullopt,
                          s.dz, s.dt, meas, pred, std::abs(meas - pred) / pred});
        r.trajectories.push_back(std::move(run.trajectory));
    }
    return r;
}

bool errors_decrease(const SweepResult& r) {
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        if (!(r.rows[i].rel_error < r.rows[i - 1].rel_error)) return false;
    return true;
}

SweepResult convergence_study(const SpreadingSetup& base, int levels) {
    if (levels < 2) throw PreconditionError("convergence study needs at least two levels");
    std::vector<SpreadingSetup> setups;
    for (int k = 0; k < levels; ++k) {
        SpreadingSetup s = base;
        s.dz = base.dz / std::ldexp(1.0, k);
        s.dt = base.dt / std::ldexp(1.0, k);
        setups.push_back(s);
    }
    SweepResult r = sweep(setups);
    const SweepRow& fine = r.rows[r.rows.size() - 1];
    const SweepRow& coarse = r.rows[r.rows.size() - 2];
    r.extrapolated_speed = 2.0 * fine.measured_speed - coarse.measured_speed;
    r.extrapolated_rel_error = std::abs(*r.extrapolated_speed - fine.predicted_speed) / fine.predicted_speed;
    return r;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r, const std::vector<std::string>& header) {
    CsvTable t({"chi", "eps_or_none", "dz", "dt", "measured_speed", "predicted_speed", "rel_error"});
    for (const auto& h : header) t.comment(h);
    if (r.extrapolated_speed)
        t.comment("extrapolated_speed=" + format_real(*r.extrapolated_speed) +
                  " extrapolated_rel_error=" + format_real(*r.extrapolated_rel_error));
    // eps_or_none is written as nan for parabolic rows
    for (const auto& row : r.rows)
        t.add_row({row.chi, row.epsilon.value_or(std::numeric_limits<double>::quiet_NaN()), row.dz, row.dt,
                   row.measured_speed, row.predicted_speed, row.rel_error});
    t.write(out);
}

std::string sweep_summary_json(const std::string& name, const SweepResult& r) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json j;
        j["chi"] = row.chi;
        j["epsilon"] = row.epsilon ? nlohmann::ordered_json(*row.epsilon) : nlohmann::ordered_json(nullptr);
        j["dz"] = row.dz;
        j["dt"] = row.dt;
        j["predicted"] = row.predicted_speed;
        j["measured"] = row.measured_speed;
        j["rel_error"] = row.rel_error;
        rows.push_back(j);
    }
    nlohmann::ordered_json body;
    body["rows"] = rows;
    if (!r.rows.empty()) {
        body["predicted"] = r.rows.back().predicted_speed;
        body["measured"] = r.rows.back().measured_speed;
        body["rel_error"] = r.rows.back().rel_error;
    }
    if (r.extrapolated_speed) {
        body["extrapolated"] = *r.extrapolated_speed;
        body["extrapolated_rel_error"] = *r.extrapolated_rel_error;
    }
    nlohmann::ordered_json top;
    top[name] = body;
    return top.dump(2) + "\n";
}

}  // namespace gog
