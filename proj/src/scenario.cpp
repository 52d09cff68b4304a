#include "gogrow/scenario.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gogrow/csv.hpp"
#include "gogrow/errors.hpp"
#include "gogrow/inside.hpp"
#include "gogrow/kinetic.hpp"
#include "gogrow/pde.hpp"
#include "gogrow/speedlab.hpp"
#include "gogrow/waves.hpp"

namespace gog {

namespace {

const std::map<ScenarioKind, std::string>& kind_names() {
    static const std::map<ScenarioKind, std::string> names{{ScenarioKind::WaveTable, "wave_table"},
                                                           {ScenarioKind::ParabolicRun, "parabolic_run"},
                                                           {ScenarioKind::KineticRun, "kinetic_run"},
                                                           {ScenarioKind::InsideRun, "inside_run"},
                                                           {ScenarioKind::SpeedSweep, "speed_sweep"}};
    return names;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(int line, const std::string& what) {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& text, int line, const std::string& key) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (text.empty() || res.ec != std::errc() || res.ptr != last)
        fail_at(line, "expected a real number for '" + key + "', got '" + text + "'");
    return v;
}

int parse_int(const std::string& text, int line, const std::string& key) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        fail_at(line, "expected an integer for '" + key + "', got '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text, int line, const std::string& key) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(trim(item), line, key));
    if (text.back() == ',') fail_at(line, "trailing comma in '" + key + "'");
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_real(v[i]);
    }
    return s;
}

using Setter = std::function<void(Scenario&, const std::string&, int)>;

// section -> key -> setter
const std::map<std::string, std::map<std::string, Setter>>& setters() {
    static const std::map<std::string, std::map<std::string, Setter>> table{
        {"",
         {{"name", [](Scenario& s, const std::string& v, int) { s.name = v; }},
          {"kind",
           [](Scenario& s, const std::string& v, int line) {
               try {
                   s.kind = scenario_kind_from_string(v);
               } catch (const ConfigError& e) {
                   fail_at(line, e.what());
               }
           }}}},
        {"model",
         {{"chi", [](Scenario& s, const std::string& v, int l) { s.params.chi = parse_real(v, l, "chi"); }},
          {"diffusion_n",
           [](Scenario& s, const std::string& v, int l) { s.params.diffusion_n = parse_real(v, l, "diffusion_n"); }},
          {"n_threshold",
           [](Scenario& s, const std::string& v, int l) { s.params.n_threshold = parse_real(v, l, "n_threshold"); }},
          {"epsilon",
           [](Scenario& s, const std::string& v, int l) { s.params.epsilon = parse_real(v, l, "epsilon"); }},
          {"chi_values",
           [](Scenario& s, const std::string& v, int l) { s.chi_values = parse_list(v, l, "chi_values"); }},
          {"initial", [](Scenario& s, const std::string& v, int) { s.initial = v; }},
          {"dynamics", [](Scenario& s, const std::string& v, int) { s.dynamics = v; }}}},
        {"grid",
         {{"z_min", [](Scenario& s, const std::string& v, int l) { s.grid.z_min = parse_real(v, l, "z_min"); }},
          {"z_max", [](Scenario& s, const std::string& v, int l) { s.grid.z_max = parse_real(v, l, "z_max"); }},
          {"dz", [](Scenario& s, const std::string& v, int l) { s.grid.dz = parse_real(v, l, "dz"); }}}},
        {"scheme",
         {{"dt", [](Scenario& s, const std::string& v, int l) { s.scheme.dt = parse_real(v, l, "dt"); }},
          {"theta", [](Scenario& s, const std::string& v, int l) { s.scheme.theta = parse_real(v, l, "theta"); }},
          {"advection", [](Scenario& s, const std::string& v, int) { s.scheme.advection = v; }},
          {"tmax", [](Scenario& s, const std::string& v, int l) { s.scheme.tmax = parse_real(v, l, "tmax"); }},
          {"sample_interval",
           [](Scenario& s, const std::string& v, int l) {
               s.scheme.sample_interval = parse_real(v, l, "sample_interval");
           }},
          {"levels", [](Scenario& s, const std::string& v, int l) { s.scheme.levels = parse_int(v, l, "levels"); }},
          {"window_fraction",
           [](Scenario& s, const std::string& v, int l) {
               s.scheme.window_fraction = parse_real(v, l, "window_fraction");
           }}}},
        {"output",
         {{"dir", [](Scenario& s, const std::string& v, int) { s.output_dir = v; }},
          {"snapshot_times",
           [](Scenario& s, const std::string& v, int l) { s.snapshot_times = parse_list(v, l, "snapshot_times"); }}}},
    };
    return table;
}

bool plain_text(const std::string& v) {
    return !v.empty() && v == trim(v) && v.find_first_of("#\n") == std::string::npos;
}

}  // namespace

std::string to_string(ScenarioKind k) { return kind_names().at(k); }

ScenarioKind scenario_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kind_names())
        if (n == name) return k;
    throw ConfigError("unknown kind '" + name + "'");
}

void Scenario::validate() const {
    try {
        params.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    if (!plain_text(name)) throw ConfigError("name must be non-empty text without '#'");
    if (!plain_text(output_dir)) throw ConfigError("output dir must be non-empty text without '#'");
    if (initial != "wave" && initial != "spreading") throw ConfigError("initial must be 'wave' or 'spreading'");
    if (dynamics != "parabolic" && dynamics != "kinetic")
        throw ConfigError("dynamics must be 'parabolic' or 'kinetic'");
    if (chi_values.empty()) throw ConfigError("chi_values must not be empty");
    for (double c : chi_values)
        if (!(std::isfinite(c) && c > 0.0)) throw ConfigError("chi must be positive");
    if (!(std::isfinite(grid.z_min) && std::isfinite(grid.z_max) && grid.z_min < grid.z_max))
        throw ConfigError("grid requires finite z_min < z_max");
    if (!(std::isfinite(grid.dz) && grid.dz > 0.0)) throw ConfigError("dz must be positive");
    if ((grid.z_max - grid.z_min) / grid.dz < 2.0) throw ConfigError("grid must hold at least 2 cells");
    if (!(std::isfinite(scheme.dt) && scheme.dt > 0.0)) throw ConfigError("dt must be positive");
    if (scheme.advection != "upwind1" && scheme.advection != "central2")
        throw ConfigError("advection must be 'upwind1' or 'central2'");
    if (!(scheme.theta >= 0.5 && scheme.theta <= 1.0)) throw ConfigError("theta must lie in [0.5, 1]");
    if (!(std::isfinite(scheme.tmax) && scheme.tmax > 0.0)) throw ConfigError("tmax must be positive");
    if (!(std::isfinite(scheme.sample_interval) && scheme.sample_interval > 0.0))
        throw ConfigError("sample_interval must be positive");
    if (scheme.levels < 1) throw ConfigError("levels must be at least 1");
    if (!(scheme.window_fraction > 0.0 && scheme.window_fraction <= 1.0))
        throw ConfigError("window_fraction must lie in (0, 1]");
    for (double t : snapshot_times)
        if (!(t >= 0.0 && t <= scheme.tmax)) throw ConfigError("snapshot times must lie in [0, tmax]");
    const bool kinetic =
        kind == ScenarioKind::KineticRun || (kind == ScenarioKind::SpeedSweep && dynamics == "kinetic");
    if (kinetic) {
        if (!(params.epsilon < 1.0)) throw ConfigError("epsilon must be below 1 for kinetic runs");
        const auto& chis = kind == ScenarioKind::SpeedSweep ? chi_values : std::vector<double>{params.chi};
        for (double c : chis)
            if (!(params.epsilon * c < 1.0)) throw ConfigError("epsilon * chi must be below 1 for kinetic runs");
    }
}

Scenario parse_config(const std::string& text, bool validate) {
    Scenario s;
    std::map<std::string, int> seen;  // "section.key" -> line
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail_at(line, "malformed section header '" + body + "'");
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty() || !setters().count(section)) fail_at(line, "unknown section '" + section + "'");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail_at(line, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) fail_at(line, "missing key before '='");
        const auto& keys = setters().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) {
            const std::string where = section.empty() ? "top level" : "section [" + section + "]";
            fail_at(line, "unknown key '" + key + "' in " + where);
        }
        const auto [pos, fresh] = seen.emplace(section + "." + key, line);
        if (!fresh)
            throw ConfigError("duplicate key '" + key + "' (lines " + std::to_string(pos->second) + " and " +
                              std::to_string(line) + ")");
        it->second(s, value, line);
    }
    if (validate) s.validate();
    return s;
}

std::string to_config_text(const Scenario& s) {
    std::ostringstream o;
    o << "name = " << s.name << "\n"
      << "kind = " << to_string(s.kind) << "\n\n"
      << "[model]\n"
      << "chi = " << format_real(s.params.chi) << "\n"
      << "diffusion_n = " << format_real(s.params.diffusion_n) << "\n"
      << "n_threshold = " << format_real(s.params.n_threshold) << "\n"
      << "epsilon = " << format_real(s.params.epsilon) << "\n"
      << "chi_values = " << join(s.chi_values) << "\n"
      << "initial = " << s.initial << "\n"
      << "dynamics = " << s.dynamics << "\n\n"
      << "[grid]\n"
      << "z_min = " << format_real(s.grid.z_min) << "\n"
      << "z_max = " << format_real(s.grid.z_max) << "\n"
      << "dz = " << format_real(s.grid.dz) << "\n\n"
      << "[scheme]\n"
      << "dt = " << format_real(s.scheme.dt) << "\n"
      << "theta = " << format_real(s.scheme.theta) << "\n"
      << "advection = " << s.scheme.advection << "\n"
      << "tmax = " << format_real(s.scheme.tmax) << "\n"
      << "sample_interval = " << format_real(s.scheme.sample_interval) << "\n"
      << "levels = " << s.scheme.levels << "\n"
      << "window_fraction = " << format_real(s.scheme.window_fraction) << "\n\n"
      << "[output]\n"
      << "dir = " << s.output_dir << "\n"
      << "snapshot_times = " << join(s.snapshot_times) << "\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// Runner

namespace {

namespace fs = std::filesystem;

struct Writer {
    fs::path dir;
    std::vector<std::string>* files;

    template <class F>
    void operator()(const std::string& rel, F&& body) const {
        const fs::path path = dir / rel;
        fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::ios_base::failure("cannot write " + path.string());
        body(out);
        out.flush();
        if (!out) throw std::ios_base::failure("write failed for " + path.string());
        files->push_back(path.string());
    }
};

std::vector<std::string> header_lines(const Scenario& s) {
    std::vector<std::string> h{std::string("gogrow ") + kVersion};
    std::istringstream in(to_config_text(s));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) h.push_back(line);
    return h;
}

std::string snapshot_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", i);
    return buf;
}

Grid1D plain_grid(const GridSpec& g) {
    const int n = static_cast<int>(std::lround((g.z_max - g.z_min) / g.dz));
    return build_grid(g.z_min, g.z_max, n);
}

SchemeConfig scheme_of(const Scenario& s) {
    SchemeConfig cfg;
    cfg.dt = s.scheme.dt;
    cfg.theta = s.scheme.theta;
    cfg.advection = s.scheme.advection == "central2" ? Advection::Central2 : Advection::Upwind1;
    return cfg;
}

RunOptions options_of(const Scenario& s) {
    RunOptions opt;
    opt.t_end = s.scheme.tmax;
    opt.sample_interval = s.scheme.sample_interval;
    opt.snapshot_times = s.snapshot_times;
    return opt;
}

void run_wave_table(const Scenario& s, const Writer& w, const std::vector<std::string>& header) {
    CsvTable t({"chi", "sigma_star", "mu_minus", "mu_plus"});
    for (const auto& h : header) t.comment(h);
    for (double chi : s.chi_values) {
        const double sigma = minimal_speed(chi);
        const DecayRoots r = decay_roots(sigma);
        t.add_row({chi, sigma, r.mu_minus, r.mu_plus});
    }
    w("wave_table.csv", [&](std::ostream& o) { t.write(o); });

    const Grid1D grid = plain_grid(s.grid);
    const ModelParams& p = s.params;
    const WaveProfile unit = parabolic_profile(p.chi, minimal_speed(p.chi), 1.0);
    const NutrientProfile np = solve_nutrient_profile(unit, p.diffusion_n, p.n_threshold, grid);
    const WaveProfile wp = unit.with_amplitude(np.a_left_calibrated);
    w("profile.csv", [&](std::ostream& o) { write_profile_csv(o, wp, np, p); });

    if (p.epsilon < 1.0 && p.epsilon * p.chi < 1.0) {
        const KineticWaveProfile ku =
            kinetic_profile(p.chi, p.epsilon, kinetic_minimal_speed(p.chi, p.epsilon), 1.0);
        const NutrientProfile knp = solve_kinetic_nutrient_profile(ku, p.diffusion_n, p.n_threshold, grid);
        const KineticWaveProfile kp = ku.with_amplitude(knp.a_left_calibrated);
        w("kinetic_profile.csv", [&](std::ostream& o) { write_kinetic_profile_csv(o, kp, knp, p); });
    }
}

void run_parabolic_scenario(const Scenario& s, const Writer& w, const std::vector<std::string>& header) {
    const Grid1D grid = aligned_grid(s.grid.z_min, s.grid.z_max, s.grid.dz);
    RunOptions opt = options_of(s);
    State init = s.initial == "wave" ? wave_initial_state(s.params, grid, true)
                                     : spreading_initial_state(s.params, grid);
    if (s.initial == "wave") opt.moving_xdot = minimal_speed(s.params.chi);
    const RunResult r = run_parabolic(init, s.params, scheme_of(s), opt);
    w("trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, r.trajectory, header); });
    for (std::size_t i = 0; i < r.snapshots.size(); ++i)
        w(snapshot_name(i), [&](std::ostream& o) { write_snapshot_csv(o, r.snapshots[i], header); });
    w("final.csv", [&](std::ostream& o) { write_snapshot_csv(o, r.final_state, header); });
}

void run_kinetic_scenario(const Scenario& s, const Writer& w, const std::vector<std::string>& header) {
    const Grid1D grid = aligned_grid(s.grid.z_min, s.grid.z_max, s.grid.dz);
    const KineticState init = s.initial == "wave" ? kinetic_wave_initial_state(s.params, grid)
                                                  : kinetic_spreading_initial_state(s.params, grid);
    const KineticRunResult r = run_kinetic(init, s.params, scheme_of(s), options_of(s));
    w("trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, r.trajectory, header); });
    for (std::size_t i = 0; i < r.snapshots.size(); ++i)
        w(snapshot_name(i), [&](std::ostream& o) { write_kinetic_snapshot_csv(o, r.snapshots[i], header); });
    w("final.csv", [&](std::ostream& o) { write_kinetic_snapshot_csv(o, r.final_state, header); });
}

void run_inside_scenario(const Scenario& s, const Writer& w, std::vector<std::string> header) {
    const double chi = s.params.chi;
    const double sigma = minimal_speed(chi);
    const DriftSpec drift = build_drift(parabolic_profile(chi, sigma, 1.0));
    const Grid1D grid = plain_grid(s.grid);
    // labelled sub-population occupying [-5, 5]
    const Field nu0 = Field::from_function(grid, [](double z) { return std::abs(z) <= 5.0 ? 1.0 : 0.0; });
    const bool pushed = drift.weight_integrable();
    const auto series = pushed ? pushed_decay_series(nu0, drift, s.scheme.dt, s.scheme.tmax, s.scheme.sample_interval)
                               : pulled_sup_series(nu0, drift, s.scheme.dt, s.scheme.tmax, s.scheme.sample_interval);
    header.push_back(std::string("metric=") + (pushed ? "weighted_distance" : "sup_right_of_-10"));
    if (series.size() >= 10) {
        const Classification c = classify(series, drift);
        header.push_back("classification=" + to_string(c.kind) + " rate=" + format_real(c.rate));
    }
    w("decay.csv", [&](std::ostream& o) { write_decay_csv(o, series, header); });
    if (pushed) {
        const GapReport rep = discrete_spectrum(drift, grid, 6);
        w("eigen.csv", [&](std::ostream& o) { write_eigen_csv(o, rep, header); });
    }
}

void run_sweep_scenario(const Scenario& s, const Writer& w, const std::vector<std::string>& header) {
    const ModelKind model = s.dynamics == "kinetic" ? ModelKind::Kinetic : ModelKind::Parabolic;
    std::vector<SpreadingSetup> setups;
    for (double chi : s.chi_values) {
        SpreadingSetup su;
        su.params = s.params;
        su.params.chi = chi;
        su.model = model;
        su.z_min = s.grid.z_min;
        su.z_max = s.grid.z_max;
        su.dz = s.grid.dz;
        su.dt = s.scheme.dt;
        su.t_end = s.scheme.tmax;
        su.sample_interval = s.scheme.sample_interval;
        su.window_fraction = s.scheme.window_fraction;
        su.advection = scheme_of(s).advection;
        setups.push_back(su);
    }

    std::vector<SweepResult> parts;
    if (s.scheme.levels == 1) {
        parts.push_back(sweep(setups));
    } else {
        for (const auto& su : setups) parts.push_back(convergence_study(su, s.scheme.levels));
    }

    SweepResult all;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& part : parts) {
        all.rows.insert(all.rows.end(), part.rows.begin(), part.rows.end());
        all.trajectories.insert(all.trajectories.end(), part.trajectories.begin(), part.trajectories.end());
        if (s.scheme.levels == 1) {
            for (std::size_t i = 0; i < part.rows.size(); ++i) {
                SweepResult one;
                one.rows.push_back(part.rows[i]);
                summary.update(nlohmann::ordered_json::parse(
                    sweep_summary_json("chi=" + format_real(part.rows[i].chi), one)));
            }
        } else {
            summary.update(
                nlohmann::ordered_json::parse(sweep_summary_json("chi=" + format_real(part.rows[0].chi), part)));
        }
    }
    for (std::size_t i = 0; i < all.rows.size(); ++i) {
        char dir[32];
        std::snprintf(dir, sizeof dir, "row_%03zu/trajectory.csv", i);
        w(dir, [&](std::ostream& o) { write_trajectory_csv(o, all.trajectories[i], header); });
    }
    w("sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, all, header); });
    nlohmann::ordered_json top;
    top["version"] = kVersion;
    top["scenario"] = s.name;
    top["results"] = summary;
    w("summary.json", [&](std::ostream& o) { o << top.dump(2) << "\n"; });
}

}  // namespace

ScenarioOutcome run_scenario(const Scenario& s) {
    ScenarioOutcome out;
    try {
        s.validate();
        const Writer w{fs::path(s.output_dir), &out.files};
        const auto header = header_lines(s);
        switch (s.kind) {
            case ScenarioKind::WaveTable: run_wave_table(s, w, header); break;
            case ScenarioKind::ParabolicRun: run_parabolic_scenario(s, w, header); break;
            case ScenarioKind::KineticRun: run_kinetic_scenario(s, w, header); break;
            case ScenarioKind::InsideRun: run_inside_scenario(s, w, header); break;
            case ScenarioKind::SpeedSweep: run_sweep_scenario(s, w, header); break;
        }
    } catch (const ConfigError& e) {
        out = {2, std::string("config: ") + e.what(), out.files};
    } catch (const PreconditionError& e) {
        out = {2, std::string("config: ") + e.what(), out.files};
    } catch (const MonotonicityLost& e) {
        out = {1, std::string("monotonicity_lost: ") + e.what(), out.files};
    } catch (const NumericalError& e) {
        out = {1, std::string("numerical: ") + e.what(), out.files};
    } catch (const std::exception& e) {
        out = {1, std::string("io: ") + e.what(), out.files};
    }
    return out;
}

}  // namespace gog
