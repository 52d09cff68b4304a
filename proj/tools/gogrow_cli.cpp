#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gogrow/errors.hpp"
#include "gogrow/scenario.hpp"

namespace {

int fail(int code, const std::string& msg) {
    std::cerr << "gogrow: error " << code << ": " << msg << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario runner for go-or-grow front experiments"};
    app.set_version_flag("--version", std::string(gog::kVersion));

    std::string scenario_file, out_dir, kind;
    std::optional<double> chi, epsilon, dz, dt, tmax;
    bool print_config = false;
    app.add_option("--scenario", scenario_file, "Scenario config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--kind", kind, "wave_table | parabolic_run | kinetic_run | inside_run | speed_sweep");
    app.add_option("--chi", chi, "Chemotactic bias");
    app.add_option("--epsilon", epsilon, "Kinetic scaling parameter");
    app.add_option("--dz", dz, "Cell width");
    app.add_option("--dt", dt, "Time step");
    app.add_option("--tmax", tmax, "Final time");
    app.add_flag("--print-config", print_config, "Print the resolved config and exit");
    CLI11_PARSE(app, argc, argv);

    gog::Scenario s;
    try {
        std::string text;
        if (!scenario_file.empty()) {
            std::ifstream in(scenario_file);
            std::stringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        s = gog::parse_config(text, false);
        if (!kind.empty()) s.kind = gog::scenario_kind_from_string(kind);
        if (chi) s.params.chi = *chi;
        if (epsilon) s.params.epsilon = *epsilon;
        if (dz) s.grid.dz = *dz;
        if (dt) s.scheme.dt = *dt;
        if (tmax) s.scheme.tmax = *tmax;
        if (!out_dir.empty()) s.output_dir = out_dir;
        s.validate();
    } catch (const gog::ConfigError& e) {
        return fail(2, std::string("config: ") + e.what());
    }

    if (print_config) {
        std::cout << gog::to_config_text(s);
        return 0;
    }
    const gog::ScenarioOutcome r = gog::run_scenario(s);
    if (r.exit_code != 0) return fail(r.exit_code, r.error);
    for (const auto& f : r.files) std::cout << f << "\n";
    return 0;
}
